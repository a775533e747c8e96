"""Krylov solvers and dense diagnostics over the weighted inner product.

Operators here act on realified vectors. An operator flagged symmetric is
self-adjoint with respect to <u, v>_W = u . (W v), W the diagonal quadrature
weights; conjugating with W^(1/2) turns it into a Euclidean-symmetric map,
which is how the scipy solvers are driven. Reported residuals are always
measured in the weighted norm of the original (untransformed) system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse.linalg as sla


@dataclass
class LinearOperator:
    """Real-linear map on realified vectors plus its inner-product data."""

    dim: int
    matvec: Callable[[np.ndarray], np.ndarray]
    weights: np.ndarray          # diagonal of W, length dim, strictly positive
    symmetric: bool


@dataclass
class SolveReport:
    converged: bool
    iterations: int              # matvec count
    relative_residual: float     # weighted norm, original variables


def _wnorm(weights: np.ndarray, v: np.ndarray) -> float:
    return float(np.sqrt(np.dot(weights * v, v)))


class _Counted:
    def __init__(self, fn):
        self.fn = fn
        self.count = 0

    def __call__(self, v):
        self.count += 1
        return self.fn(v)


def _transformed(op: LinearOperator, precond=None):
    """scipy operators for S A S^-1 and S M S^-1, S = diag(sqrt(weights))."""
    s = np.sqrt(op.weights)
    inv = 1.0 / s
    mv = _Counted(lambda v: s * op.matvec(inv * v))
    a_hat = sla.LinearOperator((op.dim, op.dim), matvec=mv, dtype=float)
    m_hat = None
    if precond is not None:
        m_hat = sla.LinearOperator((op.dim, op.dim),
                                   matvec=lambda v: s * precond(inv * v), dtype=float)
    return s, a_hat, m_hat, mv


def _report(op: LinearOperator, x: np.ndarray, rhs: np.ndarray, tol: float,
            count: int) -> SolveReport:
    nb = _wnorm(op.weights, rhs)
    rel = _wnorm(op.weights, op.matvec(x) - rhs) / nb
    # scipy stopping rules differ slightly from the weighted check; accept up
    # to one order above the request and report the measured value
    return SolveReport(converged=bool(rel <= 10 * tol), iterations=count,
                       relative_residual=float(rel))


def solve_symmetric(op: LinearOperator, rhs: np.ndarray, tol: float = 1e-10,
                    maxit: int | None = None, precond=None,
                    x0: np.ndarray | None = None) -> tuple[np.ndarray, SolveReport]:
    """MINRES on a weighted-self-adjoint (possibly indefinite) operator.

    precond, if given, approximates the inverse of op in the original
    variables and must itself be weighted-self-adjoint positive definite.
    """
    if not op.symmetric:
        raise ValueError("solve_symmetric needs a symmetric operator")
    if maxit is None:
        maxit = 10 * op.dim
    if _wnorm(op.weights, rhs) == 0.0:
        return np.zeros(op.dim), SolveReport(True, 0, 0.0)
    s, a_hat, m_hat, mv = _transformed(op, precond)
    xhat, _ = sla.minres(a_hat, s * rhs, x0=None if x0 is None else s * x0,
                         rtol=tol, maxiter=maxit, M=m_hat)
    x = xhat / s
    return x, _report(op, x, rhs, tol, mv.count)


def solve_general(op: LinearOperator, rhs: np.ndarray, tol: float = 1e-10,
                  maxit: int | None = None, precond=None,
                  x0: np.ndarray | None = None) -> tuple[np.ndarray, SolveReport]:
    """LGMRES for nonsymmetric (e.g. bordered) operators, weighted metric."""
    if maxit is None:
        maxit = 10 * op.dim
    if _wnorm(op.weights, rhs) == 0.0:
        return np.zeros(op.dim), SolveReport(True, 0, 0.0)
    s, a_hat, m_hat, mv = _transformed(op, precond)
    inner_m = 40
    outer = max(2, int(np.ceil(maxit / inner_m)))
    xhat, _ = sla.lgmres(a_hat, s * rhs, x0=None if x0 is None else s * x0,
                         rtol=tol, atol=0.0, maxiter=outer, M=m_hat,
                         inner_m=inner_m, outer_k=6)
    x = xhat / s
    return x, _report(op, x, rhs, tol, mv.count)


def dense_materialize(op: LinearOperator) -> np.ndarray:
    """Column-by-column dense matrix of the operator (small dims only)."""
    cols = np.empty((op.dim, op.dim))
    e = np.zeros(op.dim)
    for k in range(op.dim):
        e[k] = 1.0
        cols[:, k] = op.matvec(e)
        e[k] = 0.0
    return cols


def condition_estimate(op: LinearOperator) -> float:
    """1-norm condition number of the weight-transformed dense matrix."""
    s = np.sqrt(op.weights)
    a = dense_materialize(op) * (s[:, None] / s[None, :])
    return float(np.linalg.cond(a, 1))


@dataclass
class BorderedNullity:
    nullity: int                 # of the unbordered matrix
    nullity_bordered: int
    border_outside_range: bool   # column border not in range(L)
    functional_sees_kernel: bool # row border nonzero on ker(L)


def bordered_nullity(L: np.ndarray, b: np.ndarray, f: np.ndarray, d: float = 0.0,
                     rank_tol: float = 1e-8) -> BorderedNullity:
    """Dense nullity bookkeeping for a one-row/one-column bordered matrix.

    Bordering can lower the nullity by at most one, and does so exactly when
    the column border leaves the range of L and the row border does not
    annihilate the kernel of L.
    """
    n = L.shape[0]
    u, sv, vt = np.linalg.svd(L)
    smax = sv[0] if n else 0.0
    thresh = rank_tol * max(smax, 1.0e-300)
    r = int(np.sum(sv > thresh))
    nullity = n - r
    bordered = np.zeros((n + 1, n + 1))
    bordered[:n, :n] = L
    bordered[:n, n] = b
    bordered[n, :n] = f
    bordered[n, n] = d
    sv2 = np.linalg.svd(bordered, compute_uv=False)
    smax2 = sv2[0]
    r2 = int(np.sum(sv2 > rank_tol * max(smax2, 1.0e-300)))
    nullity_b = n + 1 - r2
    left_null = u[:, r:]
    right_null = vt[r:, :].T
    nb = np.linalg.norm(b)
    nf = np.linalg.norm(f)
    b_out = bool(nb > 0 and np.linalg.norm(left_null.T @ b) > rank_tol * nb)
    f_act = bool(nf > 0 and nullity > 0
                 and np.linalg.norm(f @ right_null) > rank_tol * nf)
    return BorderedNullity(nullity=nullity, nullity_bordered=nullity_b,
                           border_outside_range=b_out, functional_sees_kernel=f_act)
