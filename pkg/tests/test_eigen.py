"""Spectral layer: dense/iterative agreement, phase deflation, clustering."""

import numpy as np
import pytest

from glvortex.eigen import leading_eigenpairs, stability
from glvortex.fields import constant_field, perturbed_constant
from glvortex.gauge import link_field
from glvortex.glop import apply_jacobian
from glvortex.grid import inner_real, make_grid, norm
from glvortex.newton import newton_solve


def test_dense_path_matches_direct_eigh():
    g = make_grid(3.0, 10)
    links = link_field(g, 0.7)
    psi = perturbed_constant(g, 0.2, seed=5)
    res = leading_eigenpairs(g, links, psi, m=6)
    assert np.all(np.diff(res.eigenvalues) >= -1e-12)
    # eigenpair residuals certify the values independently of the path taken
    assert np.max(res.residuals) < 1e-8
    for lam, f in zip(res.eigenvalues, res.eigenfields):
        defect = apply_jacobian(g, links, psi, f) - lam * f
        assert norm(g, defect) < 1e-8
    # weighted orthonormality of the returned fields
    for i, fi in enumerate(res.eigenfields):
        for j, fj in enumerate(res.eigenfields):
            want = 1.0 if i == j else 0.0
            assert inner_real(g, fi, fj) == pytest.approx(want, abs=1e-8)


def test_iterative_path_matches_dense_values():
    # N = 24 exceeds the dense cutoff, so LOBPCG runs; compare against the
    # dense spectrum of the same operator built by brute force
    g = make_grid(3.0, 24)
    links = link_field(g, 0.6)
    sol = newton_solve(g, links, constant_field(g, 0.9))
    assert sol.converged
    res = leading_eigenpairs(g, links, sol.psi, m=6, tol=1e-9)
    assert np.max(res.residuals) < 1e-6
    from glvortex.glop import jacobian_operator
    from glvortex.linalg import dense_materialize

    op = jacobian_operator(g, links, sol.psi)
    s = g.sr
    a = dense_materialize(op) * (s[:, None] / s[None, :])
    lam_all = np.linalg.eigvalsh(0.5 * (a + a.T))
    assert np.max(np.abs(res.eigenvalues - lam_all[:6])) < 1e-6


def test_phase_mode_identified_and_deflated():
    # global phase rotation contributes an exact zero mode along i psi;
    # stability() must recognize it and exclude it from the verdict
    g = make_grid(3.0, 12)
    links = link_field(g, 0.5)
    sol = newton_solve(g, links, perturbed_constant(g, 0.05, seed=9))
    assert sol.converged
    info = stability(g, links, sol.psi)
    assert info.phase_index >= 0
    assert abs(info.phase_eigenvalue) < 1e-8
    mode = info.eigenfields[info.phase_index]
    align = abs(inner_real(g, mode, 1j * sol.psi)) / (norm(g, mode) * norm(g, sol.psi))
    assert align > 0.99
    # the flat-like state at low mu is stable once the phase mode is removed
    assert info.n_unstable == 0
    assert info.stable


def test_zero_state_spectrum_is_kinetic_minus_one():
    # linearization at psi = 0 decouples into two copies of kinetic - 1
    g = make_grid(3.0, 10)
    links = link_field(g, 0.0)
    zero = np.zeros(g.shape, complex)
    res = leading_eigenpairs(g, links, zero, m=4)
    # mu = 0 kinetic has a zero mode (constants), so the bottom eigenvalue
    # pair sits at exactly -1, doubled across re/im copies
    assert res.eigenvalues[0] == pytest.approx(-1.0, abs=1e-10)
    assert res.eigenvalues[1] == pytest.approx(-1.0, abs=1e-10)
    assert res.eigenvalues[2] > -1.0 + 1e-6


def test_multiplicity_clustering():
    # at mu = 0 the zero state's next eigenvalue block comes from the first
    # 1d cosine mode in either direction: fourfold across x/y and re/im
    g = make_grid(3.0, 10)
    links = link_field(g, 0.0)
    zero = np.zeros(g.shape, complex)
    info = stability(g, links, zero, m=8, cluster_gap=1e-6)
    lam = info.eigenvalues
    # no phase mode at the zero state
    assert info.phase_index == -1
    assert info.critical_multiplicity >= 2
    assert np.all(lam[:2] < 0)


def test_stability_counts_negative_directions():
    # high field strips superconductivity: the flat guess relaxes to a state
    # whose spectrum stability() reports consistently with its own values
    g = make_grid(3.0, 12)
    links = link_field(g, 0.5)
    sol = newton_solve(g, links, perturbed_constant(g, 0.02, seed=11))
    assert sol.converged
    info = stability(g, links, sol.psi, tol_stab=1e-6)
    others = [k for k in range(len(info.eigenvalues)) if k != info.phase_index]
    direct = sum(info.eigenvalues[k] < -1e-6 for k in others)
    assert info.n_unstable == direct
    assert info.stable == (direct == 0)
