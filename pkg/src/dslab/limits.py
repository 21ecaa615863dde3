"""Vanishing-viscosity diagnostics: pointwise limits, delta weights, mappings.

As eps -> 0 the viscous profile converges to the two constant states away
from the shock point while the density concentrates there.  This module
measures that convergence on computed profiles:

* sup-norm deviations from the far-field states outside an eta-collar;
* delta-weight extraction against smooth test functions.  The density
  spike is steeper than any grid, so the defining integral
  int (v - J) psi is evaluated through the continuous flux weight
  q = v (u^k - xi)  (q' = -v):

      int v psi dxi = int q psi' dxi          (psi supported inside the domain)
      int v u psi dxi = int q (u psi)' dxi

  which needs no sampling of v near its blow-up point;
* shock-point extrapolation across an eps sweep;
* the similarity map xi = alpha k x / (1 - e^{-alpha k t}) and its use to
  read time-domain states off a profile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bumps import Bump
from .profile import ProfileConfig, GridSpec, solve_profile
from .riemann import effective_time, solve_delta_shock


@dataclass(frozen=True)
class DeviationReport:
    """Sup-norm deviations from the far fields outside the eta-collar."""

    left_u: float
    left_v: float
    right_u: float
    right_v: float
    slope: float

    @property
    def left(self):
        return max(self.left_u, self.left_v)

    @property
    def right(self):
        return max(self.right_u, self.right_v)


@dataclass(frozen=True)
class EpsilonRecord:
    epsilon: float
    xi_sigma: float
    xs_resolution: float     # width of the grid cell holding xi_sigma
    deviations: DeviationReport
    weight_estimate: float
    momentum_weight_estimate: float


@dataclass(frozen=True)
class SweepReport:
    eta: float
    records: tuple
    problem: object = None
    exact: object = None     # DeltaShockParams for comparison


@dataclass(frozen=True)
class SigmaEstimate:
    raw: float               # xi_sigma at the smallest epsilon
    richardson: float | None
    extrapolated: bool


@dataclass(frozen=True)
class TimeDomainSample:
    v: float
    u: float
    xi: float
    clipped: bool            # xi fell outside the profile domain


def pointwise_deviation(profile, sigma, eta):
    """Deviations of (u, v) from the far fields on |xi - sigma| >= eta,
    plus the sup of |du/dxi| there."""
    if eta <= 0.0:
        raise ValueError(f"eta must be > 0, got {eta}")
    xi = profile.xi
    if sigma - eta <= xi[0] or sigma + eta >= xi[-1]:
        raise ValueError(
            f"collar [{sigma - eta}, {sigma + eta}] must be interior to "
            f"[{xi[0]}, {xi[-1]}]"
        )
    prob = profile.problem
    lmask = xi <= sigma - eta
    rmask = xi >= sigma + eta
    return DeviationReport(
        left_u=float(np.max(np.abs(profile.u[lmask] - prob.u_minus))),
        left_v=float(np.max(np.abs(profile.v[lmask] - prob.v_minus))),
        right_u=float(np.max(np.abs(profile.u[rmask] - prob.u_plus))),
        right_v=float(np.max(np.abs(profile.v[rmask] - prob.v_plus))),
        slope=float(np.max(np.abs(profile.du[lmask | rmask]))),
    )


def _support_nodes(profile, psi, sigma, density=2048):
    lo, hi = psi.support
    if lo <= profile.xi[0] or hi >= profile.xi[-1]:
        raise ValueError(
            f"test-function support [{lo}, {hi}] clipped by the profile domain "
            f"[{profile.xi[0]}, {profile.xi[-1]}]"
        )
    inside = profile.xi[(profile.xi >= lo) & (profile.xi <= hi)]
    extra = np.array([sigma, profile.xi_sigma])
    extra = extra[(extra > lo) & (extra < hi)]
    nodes = np.unique(np.concatenate((np.linspace(lo, hi, density), inside, extra)))
    return nodes


def _step_integral(psi, lo, hi, split, left_value, right_value, density=2048):
    """int of a step background times psi, split analytically at the jump."""
    total = 0.0
    for a, b, val in ((lo, split, left_value), (split, hi, right_value)):
        if b > a:
            grid = np.linspace(a, b, density)
            total += val * float(np.trapezoid(psi(grid), grid))
    return total


def delta_weight_estimate(profile, sigma, psi, moment="mass"):
    """Normalized pairing of the concentrating density against psi.

    mass:      [int (v - J(xi - sigma)) psi dxi] / psi(sigma)   -> w0
    momentum:  [int (v u - Jt(xi - sigma)) psi dxi] / psi(sigma) -> w0 u_delta

    J, Jt are the step backgrounds (v_-, v_+) and (v_- u_-, v_+ u_+).  Both
    integrals are taken in flux-weight form (see module docstring), so the
    estimate sees all of the concentrated mass regardless of grid.
    """
    if moment not in ("mass", "momentum"):
        raise ValueError(f"moment must be 'mass' or 'momentum', got {moment!r}")
    psis = float(psi(sigma))
    peak = 1.0  # bump kinds used here have unit peak
    if abs(psis) < 1e-8 * peak:
        raise ValueError("psi(sigma) too small to normalize the estimate")
    prob = profile.problem
    nodes = _support_nodes(profile, psi, sigma)
    q = np.interp(nodes, profile.xi, profile.relative_flux)
    lo, hi = psi.support
    if moment == "mass":
        integrand = q * psi.derivative(nodes)
        background = _step_integral(psi, lo, hi, sigma, prob.v_minus, prob.v_plus)
    else:
        u = np.interp(nodes, profile.xi, profile.u)
        du = np.interp(nodes, profile.xi, profile.du)
        integrand = q * (du * psi(nodes) + u * psi.derivative(nodes))
        background = _step_integral(
            psi, lo, hi, sigma, prob.v_minus * prob.u_minus, prob.v_plus * prob.u_plus
        )
    return (float(np.trapezoid(integrand, nodes)) - background) / psis


def extrapolate_sigma(report):
    """Shock-point estimate from a sweep: raw value at the smallest epsilon
    plus a Richardson value assuming first-order drift in epsilon."""
    records = list(report.records)
    if not records:
        raise ValueError("sweep report has no records")
    for rec in records:
        if not np.isfinite(rec.xi_sigma):
            raise ValueError(f"record eps={rec.epsilon} is missing xi_sigma")
    raw = records[-1].xi_sigma
    if len(records) < 2:
        estimate = SigmaEstimate(raw=raw, richardson=None, extrapolated=False)
    else:
        e1, x1 = records[-2].epsilon, records[-2].xi_sigma
        e2, x2 = records[-1].epsilon, records[-1].xi_sigma
        slope = (x1 - x2) / (e1 - e2)
        estimate = SigmaEstimate(
            raw=raw, richardson=x2 - slope * e2, extrapolated=True
        )
    prob = report.problem
    if prob is not None:
        lo, hi = prob.u_plus**prob.k, prob.u_minus**prob.k
        for value, label in ((estimate.raw, "raw"), (estimate.richardson, "Richardson")):
            if value is not None and not lo < value < hi:
                raise ValueError(
                    f"{label} shock-point estimate {value} violates the entropy "
                    f"bracket ({lo}, {hi})"
                )
    return estimate


def similarity_map(x, t, alpha, k):
    """Similarity variable xi = alpha k x / (1 - e^{-alpha k t}); x/t for alpha = 0."""
    if t <= 0.0:
        raise ValueError(f"time must be > 0, got {t}")
    return x / effective_time(alpha, k, t)


def map_to_time_domain(profile, problem, x, t):
    """Read the time-domain state (v, u e^{-alpha t}) off a similarity profile.

    Points mapping outside [-R, R] return the far-field constants, flagged.
    """
    xi = similarity_map(x, t, problem.alpha, problem.k)
    decay = float(np.exp(-problem.alpha * t))
    if xi < profile.xi[0]:
        return TimeDomainSample(problem.v_minus, problem.u_minus * decay, xi, True)
    if xi > profile.xi[-1]:
        return TimeDomainSample(problem.v_plus, problem.u_plus * decay, xi, True)
    u = float(np.interp(xi, profile.xi, profile.u))
    v = float(np.interp(xi, profile.xi, profile.v))
    return TimeDomainSample(v, u * decay, xi, False)


def default_eta(problem):
    """Collar half-width: a quarter of the wave-fan width u_-^k - u_+^k."""
    return 0.25 * (problem.u_minus**problem.k - problem.u_plus**problem.k)


def default_psi(problem, sigma):
    """Plain bump at the shock point, two collars wide."""
    return Bump(center=sigma, width=2.0 * default_eta(problem))


def run_sweep(problem, epsilons, grid=None, eta=None, psi=None, fp_tol=1e-10,
              continuation=True):
    """Solve profiles across a decreasing epsilon list and assemble the report.

    Returns (SweepReport, profiles).  Each epsilon warm-starts from the
    previous profile (continuation keeps small-eps solves in the Picard
    basin); the per-record xs_resolution is the width of the grid cell
    holding xi_sigma, the resolution floor for the shock-point estimate.
    """
    epsilons = [float(e) for e in epsilons]
    if any(e <= 0 for e in epsilons):
        raise ValueError("epsilons must be positive")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("epsilons must be strictly decreasing")
    params = solve_delta_shock(problem)
    if eta is None:
        eta = default_eta(problem)
    if psi is None:
        psi = default_psi(problem, params.sigma)
    if grid is None:
        grid = GridSpec()
    records = []
    profiles = []
    warm = None
    for eps in epsilons:
        config = ProfileConfig(epsilon=eps, grid=grid, fp_tol=fp_tol)
        profile = solve_profile(problem, config, initial_u=warm)
        if continuation:
            warm = (profile.xi, profile.u)
        cell = int(np.searchsorted(profile.xi, profile.xi_sigma))
        cell = min(max(cell, 1), len(profile.xi) - 1)
        records.append(
            EpsilonRecord(
                epsilon=eps,
                xi_sigma=profile.xi_sigma,
                xs_resolution=float(profile.xi[cell] - profile.xi[cell - 1]),
                deviations=pointwise_deviation(profile, params.sigma, eta),
                weight_estimate=delta_weight_estimate(
                    profile, params.sigma, psi, "mass"
                ),
                momentum_weight_estimate=delta_weight_estimate(
                    profile, params.sigma, psi, "momentum"
                ),
            )
        )
        profiles.append(profile)
    report = SweepReport(
        eta=eta, records=tuple(records), problem=problem, exact=params
    )
    return report, profiles
