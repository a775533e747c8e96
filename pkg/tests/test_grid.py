"""Grid construction, quadrature and realification round trips."""

import numpy as np
import pytest

from glvortex.grid import (from_real, inner, inner_real, integrate, make_grid,
                           norm, to_real)


def test_grid_geometry():
    g = make_grid(3.0, 16)
    assert g.h == pytest.approx(3.0 / 16)
    assert g.x[0] == pytest.approx(-1.5)
    assert g.x[-1] == pytest.approx(1.5)
    assert g.shape == (17, 17)
    assert g.nreal == 2 * 17 * 17
    # midpoint of an even grid sits exactly on the origin
    assert g.x[g.N // 2] == 0.0


def test_grid_validation():
    with pytest.raises(ValueError):
        make_grid(3.0, 7)
    with pytest.raises(ValueError):
        make_grid(3.0, 4)
    with pytest.raises(ValueError):
        make_grid(-1.0, 16)


def test_quadrature_exact_for_bilinear():
    # trapezoid weights integrate piecewise-bilinear data exactly; constants
    # and the product x*y are both in that class
    for n in (8, 10, 16):
        g = make_grid(2.5, n)
        one = np.ones(g.shape)
        assert integrate(g, one).real == pytest.approx(2.5**2, abs=1e-13)
        xy = g.x[:, None] * g.x[None, :]
        assert abs(integrate(g, xy)) < 1e-13


def test_inner_product_structure():
    rng = np.random.default_rng(7)
    g = make_grid(3.0, 12)
    for _ in range(20):
        a = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        b = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        # conjugate symmetry and positivity
        assert inner(g, a, b) == pytest.approx(np.conj(inner(g, b, a)))
        assert inner(g, a, a).real > 0
        assert abs(inner(g, a, a).imag) < 1e-14 * inner(g, a, a).real
        assert norm(g, a) == pytest.approx(np.sqrt(inner(g, a, a).real))
        # realified inner product agrees with the complex real part
        assert inner_real(g, a, b) == pytest.approx(inner(g, a, b).real)
        # weighted dot of the realified vectors gives the same number
        assert np.dot(g.wr * to_real(a), to_real(b)) == pytest.approx(
            inner(g, a, b).real)


def test_realify_round_trip():
    rng = np.random.default_rng(11)
    g = make_grid(1.7, 10)
    psi = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    v = to_real(psi)
    assert v.shape == (g.nreal,)
    assert v.dtype == np.float64
    back = from_real(g, v)
    assert np.array_equal(back, psi)
