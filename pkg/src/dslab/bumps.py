"""Smooth compactly supported test functions for weak-form quadrature.

Two kinds built from the classical mollifier exp(-1/(1-s^2)):

* plain bump -- peak value 1 at the center;
* sloping bump -- identically 1 on a plateau around the center, falling
  smoothly to 0 at the support edge (used to localize distributional
  limits around a shock point).

Values and first derivatives are analytic; all evaluators accept arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BUMP = "bump"
SLOPING = "sloping"


def _mollifier(s):
    """exp(1 - 1/(1-s^2)) on |s| < 1, zero outside; peak 1 at s = 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    mask = np.abs(s) < 1.0
    r = 1.0 - s[mask] ** 2
    out[mask] = np.exp(1.0 - 1.0 / r)
    return out


def _mollifier_deriv(s):
    """d/ds of the mollifier, computed in log form so the edge underflows to 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    mask = np.abs(s) < 1.0
    sm = s[mask]
    r = 1.0 - sm**2
    out[mask] = -2.0 * sm * np.exp(1.0 - 1.0 / r - 2.0 * np.log(r))
    return out


def _smoothstep(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, f(t)/(f(t)+f(1-t)) between."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    out[t >= 1.0] = 1.0
    mask = (t > 0.0) & (t < 1.0)
    tm = t[mask]
    f = np.exp(-1.0 / tm)
    g = np.exp(-1.0 / (1.0 - tm))
    out[mask] = f / (f + g)
    return out


def _smoothstep_deriv(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    mask = (t > 0.0) & (t < 1.0)
    tm = t[mask]
    f = np.exp(-1.0 / tm)
    g = np.exp(-1.0 / (1.0 - tm))
    fp = f / tm**2
    gp = g / (1.0 - tm) ** 2
    out[mask] = (fp * g + f * gp) / (f + g) ** 2
    return out


@dataclass(frozen=True)
class Bump:
    """One-dimensional smooth bump with compact support [center-width, center+width]."""

    center: float
    width: float
    kind: str = BUMP
    plateau_halfwidth: float = 0.0

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError(f"width must be > 0, got {self.width}")
        if self.kind not in (BUMP, SLOPING):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == SLOPING and not 0.0 < self.plateau_halfwidth < self.width:
            raise ValueError(
                "sloping bump needs 0 < plateau_halfwidth < width, got "
                f"{self.plateau_halfwidth} vs {self.width}"
            )

    @property
    def support(self):
        return (self.center - self.width, self.center + self.width)

    def __call__(self, x):
        d = np.asarray(x, dtype=float) - self.center
        if self.kind == BUMP:
            return _mollifier(d / self.width)
        t = (self.width - np.abs(d)) / (self.width - self.plateau_halfwidth)
        return _smoothstep(t)

    def derivative(self, x):
        d = np.asarray(x, dtype=float) - self.center
        if self.kind == BUMP:
            return _mollifier_deriv(d / self.width) / self.width
        t = (self.width - np.abs(d)) / (self.width - self.plateau_halfwidth)
        return _smoothstep_deriv(t) * (-np.sign(d)) / (self.width - self.plateau_halfwidth)


@dataclass(frozen=True)
class SpaceTimeBump:
    """Product bump phi(x, t) = bx(x) * bt(t) with analytic partials."""

    bx: Bump
    bt: Bump

    @property
    def support(self):
        return (self.bx.support, self.bt.support)

    def __call__(self, x, t):
        return self.bx(x) * self.bt(t)

    def dx(self, x, t):
        return self.bx.derivative(x) * self.bt(t)

    def dt(self, x, t):
        return self.bx(x) * self.bt.derivative(t)
