"""Exact delta-shock parameters and solution evaluation.

The model is the damped zero-pressure gas system

    v_t + (v u^k)_x = 0,
    (v u)_t + (v u^{k+1})_x = -alpha v u,        k odd,

with two-state initial data.  For u_- > u_+ the solution is a single
delta shock: constant states left/right of a curve x(t) that carries a
growing point mass w(t) moving with front velocity u_delta * e^{-alpha t}.
The shock parameters (sigma, w0, u_delta) solve an algebraic system with
a unique root selected by the entropy bracket u_+^k < sigma < u_-^k.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidProblem,
    MultipleRootsInBracket,
    NoRootInBracket,
    UnsupportedConfiguration,
)


def jump(q_minus, q_plus):
    """Jump bracket [q] = q_minus - q_plus."""
    return q_minus - q_plus


def effective_time(alpha, k, t):
    """Damped time scale (1 - e^{-alpha k t}) / (alpha k); equals t for alpha = 0.

    Evaluated through expm1 so that alpha*k*t near 0 does not cancel.
    """
    if alpha == 0.0:
        return t
    akt = alpha * k * t
    return -math.expm1(-akt) / (alpha * k)


@dataclass(frozen=True)
class RiemannProblem:
    """Two-state initial data (v_-, u_-) | (v_+, u_+) with damping alpha and odd exponent k."""

    v_minus: float
    v_plus: float
    u_minus: float
    u_plus: float
    alpha: float
    k: int = 1

    def __post_init__(self):
        for name in ("v_minus", "v_plus", "u_minus", "u_plus", "alpha"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise InvalidProblem(f"{name} must be finite, got {val!r}")
        if self.v_minus <= 0.0 or self.v_plus <= 0.0:
            raise InvalidProblem(
                f"densities must be positive: v_minus={self.v_minus}, v_plus={self.v_plus}"
            )
        if self.alpha < 0.0:
            raise InvalidProblem(f"damping rate must be >= 0, got {self.alpha}")
        if not isinstance(self.k, (int, np.integer)) or isinstance(self.k, bool):
            raise InvalidProblem(f"k must be an integer, got {self.k!r}")
        if self.k < 1 or self.k % 2 == 0:
            raise InvalidProblem(f"k must be an odd positive integer, got {self.k}")

    def require_delta_shock(self):
        """Delta-shock operations only cover u_- > u_+; reject everything else."""
        if not self.u_minus > self.u_plus:
            raise UnsupportedConfiguration(
                f"delta shock requires u_minus > u_plus, got "
                f"u_minus={self.u_minus}, u_plus={self.u_plus}"
            )


@dataclass(frozen=True)
class DeltaShockParams:
    """Shock speed scale sigma = u_delta^k, weight rate w0, front velocity scale u_delta."""

    sigma: float
    w0: float
    u_delta: float


@dataclass(frozen=True)
class ShockState:
    """Shock position, accumulated weight and front velocity at one time."""

    x: float
    w: float
    u_front: float
    t: float


class Region(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    ON_SHOCK = "on_shock"


@dataclass(frozen=True)
class SolutionSample:
    """Point value of the measure solution: a constant state or the shock itself."""

    region: Region
    v: float | None = None
    u: float | None = None
    shock: ShockState | None = None


def _jumps(problem):
    """Brackets [v], [vu], [v u^k], [v u^{k+1}] of the two constant states."""
    vm, vp = problem.v_minus, problem.v_plus
    um, up = problem.u_minus, problem.u_plus
    k = problem.k
    return (
        jump(vm, vp),
        jump(vm * um, vp * up),
        jump(vm * um**k, vp * up**k),
        jump(vm * um ** (k + 1), vp * up ** (k + 1)),
    )


def delta_shock_polynomial(problem):
    """Coefficients (descending degree) of the front-velocity polynomial.

    Eliminating sigma = u^k and w0 from the parameter system leaves

        P(u) = -[v] u^{k+1} + [vu] u^k + [v u^k] u - [v u^{k+1}],

    whose roots in (u_+, u_-) are the admissible front velocities.  For
    k = 1 the u^k and u^1 coefficients merge into a quadratic.
    """
    problem.require_delta_shock()
    jv, jvu, jvuk, jvuk1 = _jumps(problem)
    k = problem.k
    coeffs = np.zeros(k + 2)
    coeffs[0] = -jv          # degree k+1
    coeffs[1] += jvu         # degree k
    coeffs[k] += jvuk        # degree 1 (merges with the above when k = 1)
    coeffs[k + 1] = -jvuk1   # constant
    return coeffs


def _refine_root(poly, dpoly, lo, hi):
    """Root of poly in [lo, hi] by bisection with safeguarded Newton steps.

    poly(lo) and poly(hi) must have opposite signs.  Newton is accepted only
    while it stays inside the current bracket; otherwise bisect.
    """
    flo = np.polyval(poly, lo)
    fhi = np.polyval(poly, hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx = np.polyval(poly, x)
        if fx == 0.0:
            return x
        if np.sign(fx) == np.sign(flo):
            lo = x
        else:
            hi = x
        if hi - lo <= 1e-16 * max(1.0, abs(lo), abs(hi)):
            return 0.5 * (lo + hi)
        d = np.polyval(dpoly, x)
        step_ok = False
        if d != 0.0:
            xn = x - fx / d
            step_ok = lo < xn < hi
        x = xn if step_ok else 0.5 * (lo + hi)
    return x


def solve_delta_shock(problem, scan_points=1024):
    """Solve the shock parameter system for the unique entropy root.

    Scans P on (u_+, u_-) for sign changes (more than one means numerically
    degenerate data), then refines the bracketed root.  Returns params with
    sigma = u_delta^k and w0 = -sigma [v] + [v u^k] > 0.
    """
    problem.require_delta_shock()
    coeffs = delta_shock_polynomial(problem)
    dcoeffs = np.polyder(coeffs)
    up, um = problem.u_plus, problem.u_minus
    delta = 1e-12 * (um - up)
    grid = np.linspace(up + delta, um - delta, scan_points)
    vals = np.polyval(coeffs, grid)
    signs = np.sign(vals)
    # Exact zeros (hit a root on the grid) count as one crossing each.
    nonzero = signs != 0
    changes = np.flatnonzero(np.diff(signs[nonzero]) != 0)
    n_changes = len(changes) + np.count_nonzero(~nonzero)
    if n_changes == 0:
        raise NoRootInBracket(
            f"no sign change of the shock polynomial on ({up}, {um})"
        )
    if n_changes > 1:
        raise MultipleRootsInBracket(
            f"{n_changes} sign changes of the shock polynomial on ({up}, {um})"
        )
    if np.count_nonzero(~nonzero):
        u_delta = float(grid[np.flatnonzero(~nonzero)[0]])
    else:
        idx = np.flatnonzero(np.diff(signs) != 0)[0]
        u_delta = float(_refine_root(coeffs, dcoeffs, grid[idx], grid[idx + 1]))
    sigma = u_delta ** problem.k
    jv, jvu, jvuk, jvuk1 = _jumps(problem)
    w0 = -sigma * jv + jvuk
    return DeltaShockParams(sigma=sigma, w0=w0, u_delta=u_delta)


def closed_form_k1(problem):
    """Closed-form parameters for k = 1 (Eulerian droplet model).

    v_- != v_+:  u_delta = (sqrt(v_-) u_- + sqrt(v_+) u_+) / (sqrt(v_-) + sqrt(v_+)),
                 w0 = sqrt(v_- v_+) (u_- - u_+).
    v_- == v_+:  u_delta = (u_- + u_+) / 2,  w0 = v_- (u_- - u_+).
    """
    if problem.k != 1:
        raise ValueError(f"closed form only covers k = 1, got k = {problem.k}")
    problem.require_delta_shock()
    vm, vp = problem.v_minus, problem.v_plus
    um, up = problem.u_minus, problem.u_plus
    if vm == vp:
        u_delta = 0.5 * (um + up)
        w0 = vm * (um - up)
    else:
        sm, sp = math.sqrt(vm), math.sqrt(vp)
        u_delta = (sm * um + sp * up) / (sm + sp)
        w0 = math.sqrt(vm * vp) * (um - up)
    return DeltaShockParams(sigma=u_delta, w0=w0, u_delta=u_delta)


def shock_state(params, alpha, k, t):
    """Shock position, weight and front velocity at time t >= 0.

    x(t) = sigma * tau(t), w(t) = w0 * tau(t) with tau the damped time scale;
    alpha = 0 uses the undamped limit tau = t.
    """
    if t < 0.0:
        raise ValueError(f"time must be >= 0, got {t}")
    tau = effective_time(alpha, k, t)
    return ShockState(
        x=params.sigma * tau,
        w=params.w0 * tau,
        u_front=params.u_delta * math.exp(-alpha * t),
        t=t,
    )


def evaluate_solution(problem, params, x, t, band=None):
    """Classify (x, t) against the shock curve and return the local state.

    On-shock means |x - x(t)| <= band (default 1e-9 * (1 + |x(t)|)); the
    measure support has zero width so point queries need a tolerance.  At
    t = 0 the shock carries zero weight and position 0.
    """
    if t < 0.0:
        raise ValueError(f"time must be >= 0, got {t}")
    state = shock_state(params, problem.alpha, problem.k, t)
    if band is None:
        band = 1e-9 * (1.0 + abs(state.x))
    decay = math.exp(-problem.alpha * t)
    if abs(x - state.x) <= band:
        return SolutionSample(region=Region.ON_SHOCK, shock=state)
    if x < state.x:
        return SolutionSample(region=Region.LEFT, v=problem.v_minus, u=problem.u_minus * decay)
    return SolutionSample(region=Region.RIGHT, v=problem.v_plus, u=problem.u_plus * decay)


def rh_residual(problem, params, t):
    """Residuals of the generalized Rankine-Hugoniot conditions at time t.

    r1 = x'(t) - (u_delta(t))^k
    r2 = w'(t) - (-[[v]] sigma(t) + [[v u^k]])
    r3 = (w u_delta)'(t) - (-[[vu]] sigma(t) + [[v u^{k+1}]] - alpha w(t) u_delta(t))

    with traces v_+-, u_+- e^{-alpha t}, sigma(t) = (u_delta e^{-alpha t})^k,
    and x, w, u_delta(t) differentiated from their closed forms.
    """
    if t < 0.0:
        raise ValueError(f"time must be >= 0, got {t}")
    alpha, k = problem.alpha, problem.k
    jv, jvu, jvuk, jvuk1 = _jumps(problem)
    ek = math.exp(-alpha * k * t)      # decay of u^k terms
    e1 = math.exp(-alpha * t)
    ek1 = ek * e1                      # decay of u^{k+1} terms
    state = shock_state(params, alpha, k, t)
    sigma_t = params.u_delta**k * ek
    dx_dt = params.sigma * ek
    dw_dt = params.w0 * ek
    # product rule on w(t) * u_delta e^{-alpha t}
    dwu_dt = params.w0 * params.u_delta * ek1 - alpha * state.w * params.u_delta * e1
    r1 = dx_dt - sigma_t
    r2 = dw_dt - (-jv * sigma_t + jvuk * ek)
    r3 = dwu_dt - (
        -jvu * e1 * sigma_t + jvuk1 * ek1 - alpha * state.w * params.u_delta * e1
    )
    return (r1, r2, r3)
