"""Stencil kernels: backend agreement, loop oracle, positivity."""

import numpy as np
import pytest

from glvortex._core import BACKEND, fallback
from glvortex.gauge import link_field
from glvortex.grid import inner, make_grid, norm


def _random_field(grid, rng):
    re = rng.standard_normal(grid.shape)
    im = rng.standard_normal(grid.shape)
    return re + 1j * im


def _kinetic_loops(psi, ux, uy, h):
    """Independent scalar-loop oracle for the gauged second difference.

    Each node sums its four gauged neighbors; a hop leaving a boundary node
    toward the interior is counted twice in place of the missing mirror hop.
    """
    n0, n1 = psi.shape
    out = np.zeros_like(psi)
    for a in range(n0):
        for b in range(n1):
            s = 0.0 + 0.0j
            if a + 1 < n0:
                w = 2.0 if a == 0 else 1.0
                s += w * ux[a, b] * psi[a + 1, b]
            if a - 1 >= 0:
                w = 2.0 if a == n0 - 1 else 1.0
                s += w * np.conj(ux[a - 1, b]) * psi[a - 1, b]
            if b + 1 < n1:
                w = 2.0 if b == 0 else 1.0
                s += w * uy[a, b] * psi[a, b + 1]
            if b - 1 >= 0:
                w = 2.0 if b == n1 - 1 else 1.0
                s += w * np.conj(uy[a, b - 1]) * psi[a, b - 1]
            out[a, b] = (4.0 * psi[a, b] - s) / (h * h)
    return out


def test_kinetic_matches_loop_oracle():
    rng = np.random.default_rng(5)
    for mu in (0.0, 0.8):
        g = make_grid(3.0, 8)
        links = link_field(g, mu)
        psi = _random_field(g, rng)
        got = fallback.kinetic_apply(psi, links.ux, links.uy, g.h)
        want = _kinetic_loops(psi, links.ux, links.uy, g.h)
        assert np.max(np.abs(got - want)) < 1e-12


def test_backends_agree():
    if BACKEND != "cython":
        pytest.skip("compiled backend not available")
    from glvortex._core import kernels

    rng = np.random.default_rng(11)
    for d, n, mu in ((3.0, 8, 0.0), (3.0, 12, 0.7), (5.5, 10, 1.3)):
        g = make_grid(d, n)
        links = link_field(g, mu)
        psi = _random_field(g, rng)
        phi = _random_field(g, rng)
        pairs = [
            (kernels.kinetic_apply(psi, links.ux, links.uy, g.h),
             fallback.kinetic_apply(psi, links.ux, links.uy, g.h)),
            (kernels.residual_field(psi, links.ux, links.uy, g.h),
             fallback.residual_field(psi, links.ux, links.uy, g.h)),
            (kernels.jacobian_field(psi, phi, links.ux, links.uy, g.h),
             fallback.jacobian_field(psi, phi, links.ux, links.uy, g.h)),
            (kernels.dmu_field(psi, links.dux, links.duy, g.h),
             fallback.dmu_field(psi, links.dux, links.duy, g.h)),
        ]
        for got, want in pairs:
            scale = max(np.max(np.abs(want)), 1.0)
            assert np.max(np.abs(got - want)) < 1e-13 * scale


def test_kinetic_positive_semidefinite():
    # the doubled boundary rows make the operator PSD in the trapezoid
    # weighted inner product; raw (unweighted) symmetry would fail
    rng = np.random.default_rng(7)
    for mu in (0.0, 1.5):
        g = make_grid(4.0, 12)
        links = link_field(g, mu)
        for _ in range(20):
            psi = _random_field(g, rng)
            q = inner(g, psi, fallback.kinetic_apply(psi, links.ux, links.uy, g.h))
            assert q.real > -1e-10 * norm(g, psi) ** 2
            assert abs(q.imag) < 1e-10 * norm(g, psi) ** 2


def test_kinetic_annihilates_aligned_plane_wave():
    # at mu=0 the constant field is an exact null vector
    g = make_grid(3.0, 16)
    links = link_field(g, 0.0)
    out = fallback.kinetic_apply(np.ones(g.shape, complex), links.ux, links.uy, g.h)
    assert np.max(np.abs(out)) == 0.0


def test_jacobian_is_residual_derivative():
    rng = np.random.default_rng(3)
    g = make_grid(3.0, 10)
    links = link_field(g, 0.6)
    psi = _random_field(g, rng)
    phi = _random_field(g, rng)
    eps = 1e-6
    plus = fallback.residual_field(psi + eps * phi, links.ux, links.uy, g.h)
    minus = fallback.residual_field(psi - eps * phi, links.ux, links.uy, g.h)
    fd = (plus - minus) / (2 * eps)
    jac = fallback.jacobian_field(psi, phi, links.ux, links.uy, g.h)
    assert np.max(np.abs(jac - fd)) < 1e-7


def test_residual_combines_kinetic_and_cubic():
    rng = np.random.default_rng(9)
    g = make_grid(5.5, 10)
    links = link_field(g, 1.1)
    psi = _random_field(g, rng)
    want = (fallback.kinetic_apply(psi, links.ux, links.uy, g.h)
            - psi * (1.0 - np.abs(psi) ** 2))
    got = fallback.residual_field(psi, links.ux, links.uy, g.h)
    assert np.max(np.abs(got - want)) < 1e-13
