import numpy as np
import pytest

from dslab.bumps import Bump, SpaceTimeBump


def test_plain_bump_shape():
    b = Bump(center=1.0, width=2.0)
    assert b(1.0) == pytest.approx(1.0)
    assert b(-1.0) == 0.0 and b(3.0) == 0.0
    assert b(10.0) == 0.0
    x = np.linspace(-1.5, 3.5, 1001)
    vals = b(x)
    assert np.all(vals >= 0.0)
    assert np.all(vals[(x <= -1.0) | (x >= 3.0)] == 0.0)


def test_plain_bump_derivative_matches_fd():
    b = Bump(center=0.0, width=1.5)
    x = np.linspace(-1.4, 1.4, 41)
    h = 1e-6
    fd = (b(x + h) - b(x - h)) / (2 * h)
    assert np.allclose(b.derivative(x), fd, atol=1e-7)


def test_sloping_bump_plateau():
    b = Bump(center=0.0, width=1.0, kind="sloping", plateau_halfwidth=0.4)
    x = np.linspace(-0.4, 0.4, 21)
    assert np.allclose(b(x), 1.0)
    assert b(1.0) == 0.0 and b(-1.0) == 0.0
    assert np.all(b.derivative(x) == 0.0)
    xs = np.linspace(-0.99, 0.99, 400)
    vals = b(xs)
    assert np.all((vals >= 0.0) & (vals <= 1.0))
    fd = (b(xs + 1e-7) - b(xs - 1e-7)) / 2e-7
    assert np.allclose(b.derivative(xs), fd, atol=1e-5)


def test_bump_validation():
    with pytest.raises(ValueError):
        Bump(center=0.0, width=-1.0)
    with pytest.raises(ValueError):
        Bump(center=0.0, width=1.0, kind="sloping", plateau_halfwidth=0.0)
    with pytest.raises(ValueError):
        Bump(center=0.0, width=1.0, kind="sloping", plateau_halfwidth=1.5)
    with pytest.raises(ValueError):
        Bump(center=0.0, width=1.0, kind="triangle")


def test_space_time_bump_partials():
    phi = SpaceTimeBump(Bump(center=0.5, width=1.0), Bump(center=2.0, width=0.5))
    x = np.linspace(-0.4, 1.4, 11)
    t = np.linspace(1.6, 2.4, 11)
    h = 1e-6
    fd_x = (phi(x + h, t) - phi(x - h, t)) / (2 * h)
    fd_t = (phi(x, t + h) - phi(x, t - h)) / (2 * h)
    assert np.allclose(phi.dx(x, t), fd_x, atol=1e-7)
    assert np.allclose(phi.dt(x, t), fd_t, atol=1e-7)
    (xs, xe), (ts, te) = phi.support
    assert (xs, xe) == (-0.5, 1.5)
    assert (ts, te) == (1.5, 2.5)
