import math

import numpy as np
import pytest

from dslab.bumps import Bump
from dslab.limits import (
    EpsilonRecord,
    DeviationReport,
    SweepReport,
    default_eta,
    delta_weight_estimate,
    extrapolate_sigma,
    map_to_time_domain,
    pointwise_deviation,
    run_sweep,
    similarity_map,
)
from dslab.profile import GridSpec, ProfileConfig, ViscousProfile, solve_profile
from dslab.riemann import RiemannProblem, solve_delta_shock

STANDARD = RiemannProblem(4, 1, 2, 0, 1.0, 1)
SYMMETRIC = RiemannProblem(1, 1, 1, -1, 1.0, 1)


def _step_profile(problem, n=801):
    """Synthetic profile equal to the exact step states (zero-width layer)."""
    R = 5.0
    xi = np.linspace(-R, R, n)
    params = solve_delta_shock(problem)
    u = np.where(xi < params.sigma, problem.u_minus, problem.u_plus).astype(float)
    v = np.where(xi < params.sigma, problem.v_minus, problem.v_plus).astype(float)
    return ViscousProfile(
        xi=xi, u=u, v=v, du=np.zeros_like(xi),
        relative_flux=v * (u**problem.k - xi), xi_sigma=params.sigma,
        epsilon=0.01, R=R, iterations=0, converged=True, residual=0.0,
        ode_residual=0.0, problem=problem,
    )


def test_pointwise_deviation_of_exact_step_is_zero():
    prof = _step_profile(SYMMETRIC)
    dev = pointwise_deviation(prof, 0.0, 0.5)
    assert dev.left_u == dev.left_v == dev.right_u == dev.right_v == 0.0
    assert dev.slope == 0.0


def test_pointwise_deviation_eta_too_large():
    prof = _step_profile(SYMMETRIC)
    with pytest.raises(ValueError):
        pointwise_deviation(prof, 0.0, 5.0)
    with pytest.raises(ValueError):
        pointwise_deviation(prof, 0.0, -0.1)


def test_pointwise_deviation_improves_with_epsilon():
    devs = {}
    warm = None
    for eps in (0.1, 0.01):
        config = ProfileConfig(epsilon=eps, grid=GridSpec(count=2001))
        prof = solve_profile(SYMMETRIC, config, initial_u=warm)
        warm = (prof.xi, prof.u)
        devs[eps] = pointwise_deviation(prof, 0.0, 0.5)
    for field in ("left_u", "left_v", "right_u", "right_v", "slope"):
        assert getattr(devs[0.01], field) < getattr(devs[0.1], field)


def test_delta_weight_symmetric_small_epsilon():
    params = solve_delta_shock(SYMMETRIC)
    config = ProfileConfig(epsilon=0.01, grid=GridSpec(count=2001))
    prof = solve_profile(SYMMETRIC, config)
    psi = Bump(center=0.0, width=1.0)
    w = delta_weight_estimate(prof, 0.0, psi, "mass")
    assert abs(w - params.w0) / params.w0 < 0.05
    wu = delta_weight_estimate(prof, 0.0, psi, "momentum")
    assert abs(wu - params.w0 * params.u_delta) < 0.05 * params.w0


def test_delta_weight_rejects_bad_psi():
    prof = _step_profile(STANDARD)
    # psi vanishing at sigma cannot normalize
    off = Bump(center=prof.xi_sigma + 3.0, width=1.0)
    with pytest.raises(ValueError):
        delta_weight_estimate(prof, prof.xi_sigma, off, "mass")
    # support clipped by the domain
    wide = Bump(center=prof.xi_sigma, width=50.0)
    with pytest.raises(ValueError):
        delta_weight_estimate(prof, prof.xi_sigma, wide, "mass")
    with pytest.raises(ValueError):
        delta_weight_estimate(prof, prof.xi_sigma, Bump(center=prof.xi_sigma, width=1.0), "energy")


def test_extrapolate_sigma_arithmetic():
    recs = []
    for eps, xs in ((0.2, 0.30), (0.1, 0.27), (0.05, 0.255)):
        recs.append(
            EpsilonRecord(
                epsilon=eps, xi_sigma=xs, xs_resolution=0.0,
                deviations=DeviationReport(0, 0, 0, 0, 0),
                weight_estimate=0.0, momentum_weight_estimate=0.0,
            )
        )
    report = SweepReport(eta=0.5, records=tuple(recs))
    est = extrapolate_sigma(report)
    assert est.raw == pytest.approx(0.255)
    assert est.richardson == pytest.approx(0.24)
    assert est.extrapolated

    single = SweepReport(eta=0.5, records=(recs[0],))
    est1 = extrapolate_sigma(single)
    assert est1.raw == pytest.approx(0.30)
    assert est1.richardson is None and not est1.extrapolated

    empty = SweepReport(eta=0.5, records=())
    with pytest.raises(ValueError):
        extrapolate_sigma(empty)


def test_extrapolate_sigma_entropy_bracket():
    rec = EpsilonRecord(
        epsilon=0.1, xi_sigma=5.0, xs_resolution=0.0,
        deviations=DeviationReport(0, 0, 0, 0, 0),
        weight_estimate=0.0, momentum_weight_estimate=0.0,
    )
    report = SweepReport(eta=0.5, records=(rec,), problem=STANDARD)
    with pytest.raises(ValueError):
        extrapolate_sigma(report)


def test_similarity_map_values():
    assert similarity_map(1.0, math.log(2.0), 1.0, 1) == pytest.approx(2.0, abs=1e-14)
    assert similarity_map(3.0, 1.5, 0.0, 1) == pytest.approx(2.0, abs=1e-14)
    assert similarity_map(0.0, 0.7, 1.0, 3) == 0.0
    with pytest.raises(ValueError):
        similarity_map(1.0, 0.0, 1.0, 1)


def test_similarity_map_inverse_identity():
    rng = np.random.default_rng(5)
    for _ in range(200):
        alpha = rng.uniform(1e-3, 3.0)
        k = int(rng.choice([1, 3, 5]))
        t = rng.uniform(1e-3, 10.0)
        x = rng.uniform(-5.0, 5.0)
        xi = similarity_map(x, t, alpha, k)
        back = xi * (1.0 - math.exp(-alpha * k * t)) / (alpha * k)
        assert back == pytest.approx(x, rel=1e-12, abs=1e-12)


def test_map_to_time_domain_far_fields_and_decay():
    prob = RiemannProblem(1, 2, 1, -1, 1.0, 1)
    config = ProfileConfig(epsilon=0.05, grid=GridSpec(count=2001))
    prof = solve_profile(prob, config)
    t = math.log(2.0)  # decay factor exactly 1/2
    far_left = map_to_time_domain(prof, prob, x=-50.0, t=t)
    assert far_left.clipped
    assert far_left.v == prob.v_minus
    assert far_left.u == pytest.approx(prob.u_minus * 0.5)
    # interior but deep in the flat right region
    right = map_to_time_domain(prof, prob, x=0.9 * prof.R * (1 - 0.5) / 1.0, t=t)
    assert not right.clipped
    assert right.u == pytest.approx(prob.u_plus * 0.5, abs=1e-6)
    assert right.v == pytest.approx(prob.v_plus, rel=1e-6)


def test_map_to_time_domain_near_shock_state():
    params = solve_delta_shock(STANDARD)
    config = ProfileConfig(epsilon=0.01, grid=GridSpec(count=2001))
    prof = solve_profile(STANDARD, config)
    t = 1.0
    xt = params.sigma * (1.0 - math.exp(-t))
    sample = map_to_time_domain(prof, STANDARD, x=xt + 0.15, t=t)
    assert sample.v == pytest.approx(STANDARD.v_plus, rel=0.05)
    assert sample.u == pytest.approx(STANDARD.u_plus * math.exp(-t), abs=0.05)


def test_run_sweep_validation():
    with pytest.raises(ValueError):
        run_sweep(STANDARD, [0.1, 0.2])
    with pytest.raises(ValueError):
        run_sweep(STANDARD, [0.1, -0.05])


def test_run_sweep_records_and_trends():
    report, profiles = run_sweep(
        SYMMETRIC, [0.1, 0.05], grid=GridSpec(count=1501)
    )
    assert len(report.records) == 2 and len(profiles) == 2
    assert report.eta == pytest.approx(default_eta(SYMMETRIC))
    r0, r1 = report.records
    assert r1.deviations.left <= r0.deviations.left
    assert r1.deviations.right <= r0.deviations.right
    exact = report.exact
    assert abs(r1.weight_estimate - exact.w0) / exact.w0 < 0.05
    assert abs(r1.momentum_weight_estimate - exact.w0 * exact.u_delta) < 0.05 * exact.w0
    for rec in report.records:
        lo, hi = SYMMETRIC.u_plus, SYMMETRIC.u_minus
        assert lo < rec.xi_sigma < hi


def test_weight_estimate_psi_invariance():
    config = ProfileConfig(epsilon=0.02, grid=GridSpec(count=2001))
    prof = solve_profile(STANDARD, config)
    params = solve_delta_shock(STANDARD)
    eta = default_eta(STANDARD)
    psis = [
        Bump(center=params.sigma, width=eta),
        Bump(center=params.sigma, width=2 * eta),
        Bump(center=params.sigma, width=1.5 * eta, kind="sloping",
             plateau_halfwidth=0.5 * eta),
    ]
    vals = [delta_weight_estimate(prof, params.sigma, p, "mass") for p in psis]
    assert (max(vals) - min(vals)) / params.w0 < 0.02
