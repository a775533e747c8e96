"""Discrete Ginzburg-Landau operators in the extreme type-II limit.

All operators act on complex node fields of shape (N+1, N+1). The gauged
kinetic part couples neighbors through the unit-modulus links; rows on the
domain edges carry doubled neighbor terms, which is the natural boundary
condition in disguise. The Jacobian is only real-linear (it contains a
conjugation term), so Krylov work happens on realified vectors; with respect
to the weighted real inner product the Jacobian is self-adjoint.

The extended ("phase-regularized") system appends the scalar unknown eta and
the phase constraint Im<psi0, psi> = 0, which removes the zero eigenvalue
that the global phase symmetry forces on the plain Jacobian.
"""

from __future__ import annotations

import numpy as np

from . import _core
from .gauge import LinkField
from .grid import Grid, from_real, inner, to_real
from .linalg import LinearOperator


def _as_field(psi: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(psi, dtype=np.complex128)


def kinetic_apply(grid: Grid, links: LinkField, psi: np.ndarray) -> np.ndarray:
    """Gauged kinetic operator; positive semidefinite in the weighted product."""
    return _core.kinetic_apply(_as_field(psi), links.ux, links.uy, grid.h)


def residual(grid: Grid, links: LinkField, psi: np.ndarray) -> np.ndarray:
    """kinetic(psi) - psi (1 - |psi|^2); zero exactly at steady states."""
    return _core.residual_field(_as_field(psi), links.ux, links.uy, grid.h)


def apply_jacobian(grid: Grid, links: LinkField, psi: np.ndarray,
                   phi: np.ndarray) -> np.ndarray:
    """Directional derivative of residual() at psi applied to phi."""
    return _core.jacobian_field(_as_field(psi), _as_field(phi), links.ux, links.uy, grid.h)


def dresidual_dmu(grid: Grid, links: LinkField, psi: np.ndarray) -> np.ndarray:
    """Derivative of residual() with respect to the field strength mu."""
    if links.dux is None or links.duy is None:
        raise ValueError("link field carries no mu-derivative data")
    return _core.dmu_field(_as_field(psi), links.dux, links.duy, grid.h)


def phase_condition(grid: Grid, psi0: np.ndarray, psi: np.ndarray) -> float:
    """Im<psi0, psi>; vanishing pins one representative of the phase orbit."""
    return float(np.imag(inner(grid, psi0, psi)))


def residual_extended(grid: Grid, links: LinkField, psi0: np.ndarray,
                      psi: np.ndarray, eta: float) -> tuple[np.ndarray, float]:
    """(residual(psi) - i eta psi, Im<psi0, psi>)."""
    return residual(grid, links, psi) - 1j * eta * psi, phase_condition(grid, psi0, psi)


def apply_jacobian_extended(grid: Grid, links: LinkField, psi0: np.ndarray,
                            psi: np.ndarray, eta: float, phi: np.ndarray,
                            nu: float) -> tuple[np.ndarray, float]:
    """Derivative of residual_extended at (psi, eta) applied to (phi, nu)."""
    field = apply_jacobian(grid, links, psi, phi) - 1j * eta * phi - 1j * nu * psi
    return field, phase_condition(grid, psi0, phi)


def extended_norm(grid: Grid, field: np.ndarray, scalar: float) -> float:
    """Norm of an (field, scalar) residual pair of the extended system."""
    from .grid import inner_real

    return float(np.sqrt(max(inner_real(grid, field, field) + scalar * scalar, 0.0)))


# realified operator builders for the Krylov layer

def jacobian_operator(grid: Grid, links: LinkField, psi: np.ndarray) -> LinearOperator:
    """Realified Jacobian at psi; symmetric under the weighted product."""
    psi = _as_field(psi)

    def mv(v: np.ndarray) -> np.ndarray:
        return to_real(apply_jacobian(grid, links, psi, from_real(grid, v)))

    return LinearOperator(dim=grid.nreal, matvec=mv, weights=grid.wr, symmetric=True)


def extended_operator(grid: Grid, links: LinkField, psi0: np.ndarray,
                      psi: np.ndarray, eta: float) -> LinearOperator:
    """Realified bordered Jacobian; the border makes it nonsymmetric."""
    psi = _as_field(psi)
    psi0 = _as_field(psi0)
    weights = np.concatenate([grid.wr, [1.0]])

    def mv(v: np.ndarray) -> np.ndarray:
        phi = from_real(grid, v[:-1])
        field, scalar = apply_jacobian_extended(grid, links, psi0, psi, eta, phi, v[-1])
        return np.concatenate([to_real(field), [scalar]])

    return LinearOperator(dim=grid.nreal + 1, matvec=mv, weights=weights, symmetric=False)


def kinetic_preconditioner(grid: Grid, shift: float = 1.0):
    """Exact inverse of (mu = 0 kinetic + shift) as a realified preconditioner.

    The ungauged doubled-neighbor stencil is diagonalized by cosine modes
    with 1d eigenvalues 2 (1 - cos(k pi / N)) / h^2, so the inverse is two
    type-I DCTs and a pointwise division. Complex fields split into real and
    imaginary parts, which the mu = 0 operator does not couple.
    """
    from scipy.fft import dctn, idctn

    lam1 = 2.0 * (1.0 - np.cos(np.arange(grid.N + 1) * np.pi / grid.N)) / grid.h**2
    denom = lam1[:, None] + lam1[None, :] + shift

    def solve_plane(r: np.ndarray) -> np.ndarray:
        return idctn(dctn(r, type=1) / denom, type=1)

    n = (grid.N + 1) ** 2
    shape = grid.shape

    def apply(v: np.ndarray) -> np.ndarray:
        out = np.empty_like(v)
        out[:n] = solve_plane(v[:n].reshape(shape)).ravel()
        out[n:2 * n] = solve_plane(v[n:2 * n].reshape(shape)).ravel()
        out[2 * n:] = v[2 * n:]  # any bordered scalar slots pass through
        return out

    return apply
