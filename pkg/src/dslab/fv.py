"""Finite-volume oracle for the damped system in conservative variables.

Local Lax-Friedrichs fluxes for (v, m) with m = v u, fluxes (v u^k, v u^{k+1})
and eigenvalue u^k (double, linearly degenerate); the damping source -alpha m
is applied by its exact integrating factor each step.  Delta shocks show up
as concentrated mass whose centroid and excess weight are measured against
the closed-form trajectory.  This is deliberately plain: an independent
check, not a production solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SimulationError


@dataclass(frozen=True)
class FvConfig:
    x_lo: float
    x_hi: float
    cells: int
    cfl: float = 0.45
    t_end: float = 1.0
    floor: float | None = None        # density floor for u = m / v
    snapshot_times: tuple = ()        # defaults to (t_end,)

    def __post_init__(self):
        if self.cells < 16:
            raise ValueError(f"need at least 16 cells, got {self.cells}")
        if not 0.0 < self.cfl < 1.0:
            raise ValueError(f"cfl must be in (0,1), got {self.cfl}")
        if not self.x_lo < 0.0 < self.x_hi:
            raise ValueError(
                f"domain must straddle the initial jump at 0, got "
                f"[{self.x_lo}, {self.x_hi}]"
            )
        if self.t_end <= 0.0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        for s in self.snapshot_times:
            if not 0.0 < s <= self.t_end:
                raise ValueError(f"snapshot time {s} outside (0, t_end]")


@dataclass(frozen=True)
class FvState:
    """Cell-centered conservative state at one time."""

    x: np.ndarray
    v: np.ndarray
    m: np.ndarray
    t: float
    u: np.ndarray


@dataclass(frozen=True)
class FvDiagnostics:
    steps: int
    mass_initial: float
    mass_final: float
    boundary_mass_outflow: float      # time-integrated net mass flux out
    momentum_final: float
    momentum_expected: float          # flux- and decay-tracked prediction


@dataclass(frozen=True)
class FvRun:
    snapshots: tuple
    diagnostics: FvDiagnostics


def _fluxes(v, m, u, k):
    uk = u**k
    return v * uk, m * uk


def simulate(problem, config):
    """Evolve the Riemann data to t_end; returns FvRun with snapshots.

    Rusanov (local Lax-Friedrichs) fluxes, outflow ghost cells, CFL time step
    from max |u|^k, exact exponential source integration, snapshots hit
    exactly by clipping dt.
    """
    k = problem.k
    alpha = problem.alpha
    dx = (config.x_hi - config.x_lo) / config.cells
    x = config.x_lo + (np.arange(config.cells) + 0.5) * dx
    v = np.where(x < 0.0, problem.v_minus, problem.v_plus)
    u0 = np.where(x < 0.0, problem.u_minus, problem.u_plus)
    m = v * u0
    floor = config.floor
    if floor is None:
        floor = 1e-12 * max(problem.v_minus, problem.v_plus)

    snap_times = sorted(set(config.snapshot_times)) or [config.t_end]
    if snap_times[-1] < config.t_end:
        snap_times.append(config.t_end)
    pending = list(snap_times)

    mass0 = float(np.sum(v) * dx)
    mom_expected = float(np.sum(m) * dx)
    boundary_mass = 0.0
    t = 0.0
    step = 0
    snapshots = []
    tiny = 1e-14 * config.t_end
    while t < config.t_end - tiny:
        u = m / np.maximum(v, floor)
        speed = float(np.max(np.abs(u) ** k))
        if not math.isfinite(speed):
            raise SimulationError(f"non-finite wave speed at step {step}", step=step)
        dt = config.cfl * dx / speed if speed > 0.0 else config.t_end - t
        dt = min(dt, pending[0] - t, config.t_end - t)

        vg = np.concatenate(([v[0]], v, [v[-1]]))
        mg = np.concatenate(([m[0]], m, [m[-1]]))
        ug = np.concatenate(([u[0]], u, [u[-1]]))
        f1, f2 = _fluxes(vg, mg, ug, k)
        a = np.maximum(np.abs(ug[:-1]) ** k, np.abs(ug[1:]) ** k)
        F1 = 0.5 * (f1[:-1] + f1[1:]) - 0.5 * a * (vg[1:] - vg[:-1])
        F2 = 0.5 * (f2[:-1] + f2[1:]) - 0.5 * a * (mg[1:] - mg[:-1])

        lam = dt / dx
        v = v - lam * (F1[1:] - F1[:-1])
        m = m - lam * (F2[1:] - F2[:-1])
        if np.any(v < 0.0):
            raise SimulationError(
                f"negative density after step {step} (t={t + dt:.6g})", step=step
            )
        boundary_mass += dt * (F1[-1] - F1[0])
        mom_expected = (mom_expected - dt * (F2[-1] - F2[0])) * math.exp(-alpha * dt)
        decay = math.exp(-alpha * dt)
        m = m * decay

        t += dt
        step += 1
        if pending and t >= pending[0] - tiny:
            pending.pop(0)
            snapshots.append(
                FvState(x=x.copy(), v=v.copy(), m=m.copy(), t=t,
                        u=m / np.maximum(v, floor))
            )
    diagnostics = FvDiagnostics(
        steps=step,
        mass_initial=mass0,
        mass_final=float(np.sum(v) * dx),
        boundary_mass_outflow=boundary_mass,
        momentum_final=float(np.sum(m) * dx),
        momentum_expected=mom_expected,
    )
    return FvRun(snapshots=tuple(snapshots), diagnostics=diagnostics)


def measure_concentration(state, problem, window_halfwidth):
    """Locate the concentrated mass: (x_hat, w_hat).

    x_hat is the density-weighted centroid of above-threshold cells within
    the window around the global maximum; w_hat sums the excess density over
    the step background (v_- left of x_hat, v_+ right) across the window.
    Detection threshold: 3x the larger background density.
    """
    background = max(problem.v_minus, problem.v_plus)
    threshold = 3.0 * background
    peak = int(np.argmax(state.v))
    if state.v[peak] <= threshold:
        raise ValueError(
            f"no concentration: max density {state.v[peak]:.4g} below "
            f"threshold {threshold:.4g}"
        )
    dx = float(state.x[1] - state.x[0])
    window = np.abs(state.x - state.x[peak]) <= window_halfwidth
    sel = window & (state.v > threshold)
    x_hat = float(np.sum(state.v[sel] * state.x[sel]) / np.sum(state.v[sel]))
    bg = np.where(state.x < x_hat, problem.v_minus, problem.v_plus)
    w_hat = float(np.sum((state.v[window] - bg[window])) * dx)
    return x_hat, w_hat
