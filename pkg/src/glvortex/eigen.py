"""Smallest eigenpairs of the Jacobian and the stability verdict.

Stability of a steady state means the Jacobian is positive semidefinite on
the complement of the phase direction i psi, whose eigenvalue is an exact
zero of the continuous problem and a numerical zero here. Eigenvalues come
from LOBPCG on the weight-transformed realified operator (dense solves below
N = 20), preconditioned by the shifted ungauged kinetic inverse; warm starts
across continuation points keep the iteration count low.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as sla

from . import glop
from .gauge import LinkField
from .grid import Grid, from_real, inner_real, norm, to_real
from .linalg import dense_materialize


@dataclass
class EigenResult:
    eigenvalues: np.ndarray          # ascending
    eigenfields: list                # complex node fields, weighted-orthonormal
    block: np.ndarray | None         # transformed block for warm starting
    residuals: np.ndarray


@dataclass
class StabilityInfo:
    eigenvalues: np.ndarray
    n_unstable: int
    phase_index: int                 # -1 if no phase mode was identified
    phase_eigenvalue: float
    critical_eigenvalue: float
    critical_multiplicity: int
    critical_indices: list
    stable: bool
    eigenfields: list
    block: np.ndarray | None


_DENSE_LIMIT = 20


def leading_eigenpairs(grid: Grid, links: LinkField, psi: np.ndarray, m: int = 8,
                       tol: float = 1e-8, x0: np.ndarray | None = None,
                       maxiter: int = 400, precond=None) -> EigenResult:
    """m algebraically smallest eigenpairs of the Jacobian at psi."""
    op = glop.jacobian_operator(grid, links, psi)
    s = grid.sr
    m = min(m, op.dim - 2)

    if grid.N <= _DENSE_LIMIT:
        a = dense_materialize(op) * (s[:, None] / s[None, :])
        lam, vec = np.linalg.eigh(0.5 * (a + a.T))
        lam, vec = lam[:m], vec[:, :m]
        fields = [from_real(grid, vec[:, k] / s) for k in range(m)]
        res = _residual_norms(grid, links, psi, lam, fields)
        return EigenResult(lam, fields, vec, res)

    a_hat = sla.LinearOperator((op.dim, op.dim), dtype=float,
                               matvec=lambda v: s * op.matvec(np.ravel(v) / s))
    if precond is None:
        precond = glop.kinetic_preconditioner(grid, 1.0)
    m_hat = sla.LinearOperator((op.dim, op.dim), dtype=float,
                               matvec=lambda v: s * precond(np.ravel(v) / s))
    if x0 is not None and x0.shape[1] >= m:
        block = np.ascontiguousarray(x0[:, :m])
    else:
        rng = np.random.default_rng(12345)
        block = rng.standard_normal((op.dim, m))
        if x0 is not None:
            block[:, :x0.shape[1]] = x0
    lam, vec = sla.lobpcg(a_hat, block, M=m_hat, largest=False, tol=tol,
                          maxiter=maxiter)
    order = np.argsort(lam)
    lam, vec = lam[order], vec[:, order]
    fields = [from_real(grid, vec[:, k] / s) for k in range(m)]
    res = _residual_norms(grid, links, psi, lam, fields)
    if np.max(res) > 1e3 * tol * max(1.0, float(np.max(np.abs(lam)))):
        # LOBPCG stagnated; restart once from scratch with more headroom
        rng = np.random.default_rng(54321)
        block = rng.standard_normal((op.dim, m))
        lam, vec = sla.lobpcg(a_hat, block, M=m_hat, largest=False, tol=tol,
                              maxiter=4 * maxiter)
        order = np.argsort(lam)
        lam, vec = lam[order], vec[:, order]
        fields = [from_real(grid, vec[:, k] / s) for k in range(m)]
        res = _residual_norms(grid, links, psi, lam, fields)
    return EigenResult(lam, fields, vec, res)


def _residual_norms(grid, links, psi, lam, fields) -> np.ndarray:
    out = np.empty(len(lam))
    for k, (lk, fk) in enumerate(zip(lam, fields)):
        out[k] = norm(grid, glop.apply_jacobian(grid, links, psi, fk) - lk * fk)
    return out


def stability(grid: Grid, links: LinkField, psi: np.ndarray, m: int = 8,
              tol_stab: float = 1e-6, cluster_gap: float = 1e-4,
              eig_tol: float = 1e-8, x0: np.ndarray | None = None,
              m_cap: int = 24, precond=None) -> StabilityInfo:
    """Deflated stability verdict at a steady state.

    m grows automatically until the largest computed eigenvalue clears the
    stability tolerance, so no negative eigenvalue can hide beyond the block.
    """
    while True:
        res = leading_eigenpairs(grid, links, psi, m=m, tol=eig_tol, x0=x0,
                                 precond=precond)
        if res.eigenvalues[-1] > tol_stab or m >= min(m_cap, grid.nreal - 2):
            break
        m = min(int(m * 1.5) + 1, m_cap)
        x0 = res.block

    lam = res.eigenvalues
    npsi = norm(grid, psi)
    phase_idx = -1
    if npsi > 1e-12:
        ph = 1j * np.asarray(psi)
        overlaps = np.array([abs(inner_real(grid, f, ph)) /
                             max(norm(grid, f) * npsi, 1e-300)
                             for f in res.eigenfields])
        cand = int(np.argmax(overlaps))
        if overlaps[cand] > 0.5:
            phase_idx = cand
    phase_lam = float(lam[phase_idx]) if phase_idx >= 0 else np.nan

    others = [k for k in range(len(lam)) if k != phase_idx]
    n_unstable = int(sum(lam[k] < -tol_stab for k in others))
    if others:
        crit = min(others, key=lambda k: abs(lam[k]))
        crit_lam = float(lam[crit])
        crit_idx = [k for k in others if abs(lam[k] - crit_lam) <= cluster_gap]
    else:
        crit_lam, crit_idx = np.nan, []
    return StabilityInfo(eigenvalues=lam, n_unstable=n_unstable,
                         phase_index=phase_idx, phase_eigenvalue=phase_lam,
                         critical_eigenvalue=crit_lam,
                         critical_multiplicity=len(crit_idx),
                         critical_indices=crit_idx, stable=(n_unstable == 0),
                         eigenfields=res.eigenfields, block=res.block)
