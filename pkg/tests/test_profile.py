import math

import numpy as np
import pytest

from dslab.errors import NoRootInBracket, NonConvergence
from dslab.profile import (
    GridSpec,
    ProfileConfig,
    ViscousProfile,
    apply_T,
    build_grid,
    default_halfwidth,
    density_from_velocity,
    density_log_form,
    profile_ode_residual,
    solve_profile,
    xi_sigma_root,
    _transport,
)
from dslab.riemann import RiemannProblem, solve_delta_shock

STANDARD = RiemannProblem(4, 1, 2, 0, 1.0, 1)
SYMMETRIC = RiemannProblem(1, 1, 1, -1, 1.0, 1)


def test_xi_sigma_root_linear_cases():
    xi = np.linspace(-2.0, 2.0, 401)
    assert xi_sigma_root(xi, -xi / 2.0, 1) == pytest.approx(0.0, abs=1e-12)
    assert xi_sigma_root(xi, 0.5 - xi / 4.0, 1) == pytest.approx(0.4, abs=1e-12)
    # odd symmetry pins the k=3 root at 0
    assert xi_sigma_root(xi, -np.tanh(xi), 3) == pytest.approx(0.0, abs=1e-12)


def test_xi_sigma_root_errors():
    xi = np.linspace(-0.1, 0.1, 11)
    with pytest.raises(NoRootInBracket):
        xi_sigma_root(xi, 0.5 - xi / 4.0, 1)  # root at 0.4 outside domain
    with pytest.raises(ValueError):
        xi_sigma_root(np.linspace(-2, 2, 11), np.linspace(-1, 1, 11), 1)  # increasing


def test_density_boundary_and_telescoping():
    R = default_halfwidth(STANDARD)
    xi = np.linspace(-R, R, 2001)
    # ramp with constant u_- plateau on the left third
    u = np.interp(xi, [-R, 0.5, 2.0, R], [2.0, 2.0, 0.0, 0.0])
    xs = xi_sigma_root(xi, u, 1)
    v, q = density_from_velocity(xi, u, STANDARD, R, xs)
    assert v[0] == pytest.approx(STANDARD.v_minus, rel=1e-13)
    assert v[-1] == pytest.approx(STANDARD.v_plus, rel=1e-13)
    # constant-velocity stretch: density telescopes to exactly v_-
    plateau = xi < 0.4
    assert np.allclose(v[plateau], STANDARD.v_minus, rtol=1e-12)
    # two-sided bounds on the flux weight
    k = STANDARD.k
    cap_left = STANDARD.v_minus * (STANDARD.u_minus**k + R)
    cap_right = STANDARD.v_plus * (STANDARD.u_plus**k - R)
    left = xi < xs
    # strict inequalities hold in the interior; the endpoints attain the caps
    assert np.all(q[left] > 0.0) and np.all(q[left] <= cap_left)
    assert np.all(q[left][1:] < cap_left)
    assert np.all(q[~left] < 0.0) and np.all(q[~left] >= cap_right)
    assert np.all(q[~left][:-1] > cap_right)
    # q decreases monotonically through its zero at the shock point
    assert np.all(np.diff(q) < 0.0)


def test_density_inconsistent_xi_sigma():
    R = default_halfwidth(STANDARD)
    xi = np.linspace(-R, R, 101)
    u = np.interp(xi, [-R, R], [2.0, 0.0])
    xs = xi_sigma_root(xi, u, 1)
    with pytest.raises(ValueError):
        density_from_velocity(xi, u, STANDARD, R, xs + 1.0)


def test_density_log_form_cross_check():
    config = ProfileConfig(epsilon=0.2, grid=GridSpec(count=2001))
    prof = solve_profile(STANDARD, config)
    v_log = density_log_form(prof.xi, prof.u, STANDARD, prof.xi_sigma)
    far = np.abs(prof.xi - prof.xi_sigma) > 1.0
    rel = np.abs(v_log[far] - prof.v[far]) / prof.v[far]
    assert np.max(rel) < 1e-3


def test_transport_zero_weight_gives_linear_interpolant():
    xi = np.linspace(-3.0, 3.0, 301)
    q = np.zeros_like(xi)
    u, du = _transport(xi, q, STANDARD, epsilon=0.1, xi_sigma=0.0)
    expected = STANDARD.u_minus + (STANDARD.u_plus - STANDARD.u_minus) * (xi + 3.0) / 6.0
    assert np.allclose(u, expected, atol=1e-12)
    assert np.allclose(du, (STANDARD.u_plus - STANDARD.u_minus) / 6.0, atol=1e-12)


def test_apply_T_degenerate_equal_states():
    prob = RiemannProblem(2, 1, 0.5, 0.5, 1.0, 1)
    config = ProfileConfig(epsilon=0.1)
    R = default_halfwidth(prob)
    xi = np.linspace(-R, R, 501)
    u = np.full_like(xi, 0.5)
    out = apply_T(xi, u, prob, config)
    assert np.allclose(out, 0.5, atol=1e-14)


def test_apply_T_preserves_monotone_class():
    config = ProfileConfig(epsilon=0.1)
    R = default_halfwidth(STANDARD)
    xi = np.linspace(-R, R, 1501)
    rng = np.random.default_rng(3)
    # random monotone profiles with exact boundary values
    for _ in range(5):
        steps = rng.uniform(0.0, 1.0, len(xi) - 1)
        u = 2.0 - 2.0 * np.concatenate(([0.0], np.cumsum(steps) / np.sum(steps)))
        out = apply_T(xi, u, STANDARD, config)
        assert out[0] == STANDARD.u_minus and out[-1] == STANDARD.u_plus
        assert np.all(np.diff(out) <= 0.0)


def test_apply_T_odd_symmetry():
    config = ProfileConfig(epsilon=0.1)
    R = default_halfwidth(SYMMETRIC)
    xi = np.linspace(-R, R, 2001)  # symmetric grid with a node at 0
    u = -np.tanh(xi / 0.3)
    u[0], u[-1] = 1.0, -1.0
    out = apply_T(xi, u, SYMMETRIC, config)
    mid = len(xi) // 2
    assert abs(out[mid]) < 1e-10
    assert np.max(np.abs(out + out[::-1])) < 1e-9


def test_solve_profile_symmetric_layer_at_origin():
    config = ProfileConfig(epsilon=0.1, grid=GridSpec(count=2001))
    prof = solve_profile(SYMMETRIC, config)
    assert prof.converged
    # the discrete fixed point pins the layer within the central cell, so the
    # symmetry error scales like slope * cell/2
    cell = np.min(np.diff(prof.xi))
    assert abs(prof.xi_sigma) <= cell
    slope = np.max(np.abs(prof.du))
    mid = np.interp(0.0, prof.xi, prof.u)
    assert abs(mid) <= slope * cell
    assert np.max(np.abs(prof.u + prof.u[::-1])) <= 2 * slope * cell


def test_solve_profile_standard_case_brackets():
    for eps in (0.2, 0.1):
        config = ProfileConfig(epsilon=eps, grid=GridSpec(count=2001))
        prof = solve_profile(STANDARD, config)
        assert prof.converged
        assert 0.0 < prof.xi_sigma < 2.0  # entropy bracket (u_+^k, u_-^k)
        assert np.all(np.diff(prof.u) <= 0.0)
        assert prof.u[0] == STANDARD.u_minus and prof.u[-1] == STANDARD.u_plus


def test_solve_profile_fixed_point_self_consistency():
    config = ProfileConfig(epsilon=0.1, grid=GridSpec(count=2001))
    prof = solve_profile(STANDARD, config)
    out = apply_T(prof.xi, prof.u, STANDARD, config)
    assert np.max(np.abs(out - prof.u)) <= 10.0 * config.fp_tol


def test_solve_profile_iteration_cap():
    config = ProfileConfig(epsilon=0.1, fp_max_iter=0)
    with pytest.raises(NonConvergence):
        solve_profile(STANDARD, config)


def test_solve_profile_rejects_small_R():
    config = ProfileConfig(epsilon=0.1, R=1.5)  # below max(|u_-|^k, |u_+|^k) = 2
    with pytest.raises(ValueError):
        solve_profile(STANDARD, config)


def test_ode_residual_trivial_profiles():
    xi = np.linspace(-1.0, 1.0, 101)
    linear = ViscousProfile(
        xi=xi, u=-xi, v=np.zeros_like(xi), du=np.full_like(xi, -1.0),
        relative_flux=np.zeros_like(xi), xi_sigma=0.0, epsilon=0.1, R=1.0,
        iterations=0, converged=True, residual=0.0, ode_residual=0.0,
    )
    assert profile_ode_residual(linear, exclude_halfwidth=0.0) < 1e-12
    const = ViscousProfile(
        xi=xi, u=np.full_like(xi, 0.3), v=np.zeros_like(xi),
        du=np.zeros_like(xi), relative_flux=np.ones_like(xi), xi_sigma=0.0,
        epsilon=0.1, R=1.0, iterations=0, converged=True, residual=0.0,
        ode_residual=0.0,
    )
    assert profile_ode_residual(const, exclude_halfwidth=0.0) < 1e-12
    with pytest.raises(ValueError):
        profile_ode_residual(
            ViscousProfile(
                xi=xi[:2], u=(-xi)[:2], v=np.zeros(2), du=np.zeros(2),
                relative_flux=np.zeros(2), xi_sigma=0.0, epsilon=0.1, R=1.0,
                iterations=0, converged=True, residual=0.0, ode_residual=0.0,
            )
        )


def test_ode_residual_second_order_refinement():
    res = {}
    for count in (2001, 4001):
        config = ProfileConfig(epsilon=0.1, grid=GridSpec(count=count))
        prof = solve_profile(SYMMETRIC, config)
        res[count] = prof.ode_residual
    ratio = res[2001] / res[4001]
    assert 2.5 < ratio < 6.5


def test_grid_layout():
    config = ProfileConfig(epsilon=0.1, grid=GridSpec(count=2001))
    R = default_halfwidth(STANDARD)
    xi = build_grid(STANDARD, config, center=4.0 / 3.0, R=R)
    assert len(xi) == 2001
    assert xi[0] == -R and xi[-1] == R
    assert np.all(np.diff(xi) > 0.0)
    window = np.abs(xi - 4.0 / 3.0) <= 10 * config.epsilon
    assert np.count_nonzero(window) >= 0.55 * len(xi)
