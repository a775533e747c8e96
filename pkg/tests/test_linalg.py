"""Weighted Krylov solvers and dense nullity diagnostics."""

import numpy as np
import pytest

from glvortex.linalg import (BorderedNullity, LinearOperator, bordered_nullity,
                             condition_estimate, dense_materialize,
                             solve_general, solve_symmetric)


def _weighted_spd_op(rng, n):
    """Random weighted-self-adjoint positive definite operator."""
    w = rng.uniform(0.5, 2.0, n)
    q = rng.standard_normal((n, n))
    spd = q @ q.T + n * np.eye(n)
    # A = W^-1 spd is self-adjoint under <u, v>_W
    a = spd / w[:, None]
    return LinearOperator(dim=n, matvec=lambda v: a @ v, weights=w,
                          symmetric=True), a, w


def test_solve_symmetric_dense_oracle():
    rng = np.random.default_rng(12)
    for n in (10, 30):
        op, a, _ = _weighted_spd_op(rng, n)
        rhs = rng.standard_normal(n)
        x, rep = solve_symmetric(op, rhs, tol=1e-12)
        assert rep.converged
        assert np.linalg.norm(x - np.linalg.solve(a, rhs)) < 1e-8
        assert rep.iterations > 0


def test_solve_symmetric_rejects_nonsymmetric():
    op = LinearOperator(dim=3, matvec=lambda v: v, weights=np.ones(3),
                        symmetric=False)
    with pytest.raises(ValueError):
        solve_symmetric(op, np.ones(3))


def test_solve_symmetric_zero_rhs_short_circuits():
    rng = np.random.default_rng(1)
    op, _, _ = _weighted_spd_op(rng, 8)
    x, rep = solve_symmetric(op, np.zeros(8))
    assert np.all(x == 0.0)
    assert rep.converged and rep.iterations == 0


def test_solve_general_dense_oracle():
    rng = np.random.default_rng(40)
    n = 25
    a = rng.standard_normal((n, n)) + n * np.eye(n)
    w = rng.uniform(0.5, 2.0, n)
    op = LinearOperator(dim=n, matvec=lambda v: a @ v, weights=w,
                        symmetric=False)
    rhs = rng.standard_normal(n)
    x, rep = solve_general(op, rhs, tol=1e-12)
    assert rep.converged
    assert np.linalg.norm(x - np.linalg.solve(a, rhs)) < 1e-8


def test_solve_with_exact_preconditioner_is_fast():
    rng = np.random.default_rng(6)
    op, a, _ = _weighted_spd_op(rng, 40)
    ainv = np.linalg.inv(a)
    rhs = rng.standard_normal(40)
    _, plain = solve_symmetric(op, rhs, tol=1e-10)
    _, pre = solve_symmetric(op, rhs, tol=1e-10, precond=lambda v: ainv @ v)
    assert pre.converged
    assert pre.iterations < plain.iterations


def test_dense_materialize_and_condition():
    rng = np.random.default_rng(3)
    n = 12
    a = rng.standard_normal((n, n))
    w = np.ones(n)
    op = LinearOperator(dim=n, matvec=lambda v: a @ v, weights=w,
                        symmetric=False)
    assert np.max(np.abs(dense_materialize(op) - a)) == 0.0
    assert condition_estimate(op) == pytest.approx(np.linalg.cond(a, 1))


def _nullity_instance(rng, n, k, complete):
    """Rank-deficient matrix with known k-dim kernel plus border vectors."""
    left = np.linalg.qr(rng.standard_normal((n, k)))[0]
    right = np.linalg.qr(rng.standard_normal((n, k)))[0]
    sing = rng.standard_normal((n, n))
    sing -= left @ (left.T @ sing)
    sing -= (sing @ right) @ right.T
    if complete:
        b = left @ rng.standard_normal(k) + sing @ rng.standard_normal(n)
        f = right @ rng.standard_normal(k) + sing.T @ rng.standard_normal(n)
    else:
        b = sing @ rng.standard_normal(n)
        f = sing.T @ rng.standard_normal(n)
    return sing, b, f


def test_bordered_nullity_drops_exactly_one():
    # one border row/column removes exactly one kernel dimension when the
    # borders are compatible, and none at all otherwise: checked over 1000+
    # random instances with kernel dimensions 1, 2 and 3
    rng = np.random.default_rng(2024)
    n = 12
    trials = 1020
    for t in range(trials):
        k = 1 + t % 3
        complete = (t % 2 == 0)
        L, b, f = _nullity_instance(rng, n, k, complete)
        rep = bordered_nullity(L, b, f, d=float(rng.standard_normal()))
        assert isinstance(rep, BorderedNullity)
        assert rep.nullity == k
        assert rep.border_outside_range == complete
        assert rep.functional_sees_kernel == complete
        assert rep.nullity_bordered == (k - 1 if complete else k)


def test_bordered_nullity_full_rank_matrix():
    rng = np.random.default_rng(5)
    n = 9
    L = rng.standard_normal((n, n)) + n * np.eye(n)
    rep = bordered_nullity(L, rng.standard_normal(n), rng.standard_normal(n))
    assert rep.nullity == 0
    assert rep.nullity_bordered == 0
    assert not rep.functional_sees_kernel
