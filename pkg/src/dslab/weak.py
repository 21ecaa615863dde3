"""Distributional verification of measure solutions.

A candidate solution is a pair of classical states separated by a curve
x(t) that carries a weighted point mass w(t) with its own velocity
u_front(t).  Pairings against space-time test functions follow the
two-part rule

    <v G(u), phi> = int int vt G(ut) phi dx dt + int w(t) G(u_front(t)) phi(x(t), t) dt,

and the weak-form residuals of the damped system are

    r_mass     = <v, phi_t> + <v u^k, phi_x>,
    r_momentum = <v u, phi_t> + <v u^{k+1}, phi_x> - alpha <v u, phi>.

Both vanish for the exact delta-shock solution.  The 2D quadrature splits
the x-line at x(t) for every time node, so each Gauss panel sees a smooth
integrand and refinement converges at spectral order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .riemann import effective_time


@dataclass(frozen=True)
class MeasureSolution:
    """Piecewise-classical fields plus a weighted point mass on x = x_of_t."""

    v_left: object            # callables (x, t) -> array
    u_left: object
    v_right: object
    u_right: object
    x_of_t: object            # callables (t) -> array
    w_of_t: object
    u_front_of_t: object
    t_range: tuple = (0.0, math.inf)   # parameter range of the carrying curve


def exact_measure_solution(problem, params, speed_factor=1.0):
    """Measure solution built from the closed forms; speed_factor != 1 scales
    the trajectory only (a deliberately wrong solution for discrimination)."""
    alpha, k = problem.alpha, problem.k

    def x_of_t(t):
        return speed_factor * params.sigma * np.vectorize(
            lambda s: effective_time(alpha, k, s)
        )(t)

    def w_of_t(t):
        return params.w0 * np.vectorize(lambda s: effective_time(alpha, k, s))(t)

    return MeasureSolution(
        v_left=lambda x, t: np.broadcast_to(float(problem.v_minus), np.shape(x)),
        u_left=lambda x, t: problem.u_minus * np.exp(-alpha * np.asarray(t)),
        v_right=lambda x, t: np.broadcast_to(float(problem.v_plus), np.shape(x)),
        u_right=lambda x, t: problem.u_plus * np.exp(-alpha * np.asarray(t)),
        x_of_t=x_of_t,
        w_of_t=w_of_t,
        u_front_of_t=lambda t: params.u_delta * np.exp(-alpha * np.asarray(t)),
    )


def _composite_gauss(lo, hi, panels, order):
    """Nodes and weights of a composite Gauss-Legendre rule on [lo, hi]."""
    g, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * g[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _x_rule_per_time(xlo, xhi, cuts, panels, order):
    """Per-time-node composite Gauss rules on [xlo, cut] and [cut, xhi].

    cuts is an array of x(t) values (clipped to the support); returns
    (X, WX) with shape (nt, 2 * panels * order); empty sides get zero weight.
    """
    g, w = np.polynomial.legendre.leggauss(order)
    cuts = np.clip(cuts, xlo, xhi)
    X_parts = []
    W_parts = []
    for lo, hi in ((np.full_like(cuts, xlo), cuts), (cuts, np.full_like(cuts, xhi))):
        edges = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, panels + 1)[None, :]
        mid = 0.5 * (edges[:, :-1] + edges[:, 1:])
        half = 0.5 * np.diff(edges, axis=1)
        X_parts.append((mid[:, :, None] + half[:, :, None] * g[None, None, :]).reshape(len(cuts), -1))
        W_parts.append((half[:, :, None] * w[None, None, :]).reshape(len(cuts), -1))
    return np.concatenate(X_parts, axis=1), np.concatenate(W_parts, axis=1)


def _phi_component(phi, component):
    if component == "value":
        return phi
    if component == "dx":
        return phi.dx
    if component == "dt":
        return phi.dt
    raise ValueError(f"unknown test-function component {component!r}")


def pair_with_measure(solution, G, phi, component="value", panels=8, order=10):
    """<v G(u), phi-component> for a measure solution.

    The classical part integrates the two smooth sides of x(t) with
    tensor-product composite Gauss rules; the measure part is the line
    integral of w(t) G(u_front(t)) along the curve, parametrized by t
    (restricted to the curve's parameter range).
    """
    (xlo, xhi), (tlo, thi) = phi.support
    if tlo <= 0.0:
        raise ValueError(f"test-function support touches t = 0 (t-support starts {tlo})")
    f = _phi_component(phi, component)

    tn, tw = _composite_gauss(tlo, thi, panels, order)
    cuts = np.asarray(solution.x_of_t(tn), dtype=float)
    X, WX = _x_rule_per_time(xlo, xhi, cuts, panels, order)
    T = np.broadcast_to(tn[:, None], X.shape)
    n_side = X.shape[1] // 2
    left = solution.v_left(X[:, :n_side], T[:, :n_side]) * G(
        solution.u_left(X[:, :n_side], T[:, :n_side])
    )
    right = solution.v_right(X[:, n_side:], T[:, n_side:]) * G(
        solution.u_right(X[:, n_side:], T[:, n_side:])
    )
    classical = float(
        np.sum(tw * np.sum(np.concatenate((left, right), axis=1) * f(X, T) * WX, axis=1))
    )

    lo = max(tlo, solution.t_range[0])
    hi = min(thi, solution.t_range[1])
    line = 0.0
    if hi > lo:
        sn, sw = _composite_gauss(lo, hi, panels, order)
        xc = np.asarray(solution.x_of_t(sn), dtype=float)
        line = float(
            np.sum(
                sw
                * np.asarray(solution.w_of_t(sn), dtype=float)
                * G(np.asarray(solution.u_front_of_t(sn), dtype=float))
                * f(xc, sn)
            )
        )
    return classical + line


def weak_residual(solution, problem, phi, panels=8, order=10):
    """Raw weak-form residuals (r_mass, r_momentum) against one test function.

    Linear in phi; report-level normalization (by the L1 mass of phi) is left
    to callers so that linearity is preserved here.
    """
    k = problem.k
    alpha = problem.alpha

    def one(u):
        return np.ones_like(np.asarray(u, dtype=float))

    r_mass = pair_with_measure(
        solution, one, phi, "dt", panels, order
    ) + pair_with_measure(solution, lambda u: u**k, phi, "dx", panels, order)
    r_mom = (
        pair_with_measure(solution, lambda u: u, phi, "dt", panels, order)
        + pair_with_measure(solution, lambda u: u ** (k + 1), phi, "dx", panels, order)
        - alpha * pair_with_measure(solution, lambda u: u, phi, "value", panels, order)
    )
    return r_mass, r_mom


def phi_l1(phi, panels=8, order=10):
    """Quadrature of |phi| over its support, for cross-phi normalization."""
    (xlo, xhi), (tlo, thi) = phi.support
    xn, xw = _composite_gauss(xlo, xhi, panels, order)
    tn, tw = _composite_gauss(tlo, thi, panels, order)
    vals = np.abs(phi(xn[None, :], tn[:, None]))
    return float(np.sum(tw[:, None] * xw[None, :] * vals))
