"""Square grid geometry, trapezoid quadrature and weighted inner products.

The domain is the square [-d/2, d/2]^2 sampled on (N+1) x (N+1) nodes with
spacing h = d/N. Node (i, j) in array index space corresponds to the point
(x_i, y_j) = ((i - N/2) h, (j - N/2) h), first array axis = x.

All inner products and norms carry the trapezoid weights; this is the inner
product under which the discrete operators are self-adjoint, so every norm,
orthogonality and Krylov statement in the package refers to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Geometry and quadrature data for one domain resolution."""

    d: float
    N: int
    h: float
    x: np.ndarray            # node coordinates, shape (N+1,), x[0] = -d/2
    w1: np.ndarray           # 1d trapezoid weights, 1/2 at the ends
    w2: np.ndarray           # 2d quadrature weights incl. h^2, shape (N+1, N+1)
    wr: np.ndarray = field(repr=False, default=None)   # w2 tiled for realified vectors
    sr: np.ndarray = field(repr=False, default=None)   # sqrt(wr)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.N + 1, self.N + 1)

    @property
    def nreal(self) -> int:
        """Dimension of the realified state space."""
        return 2 * (self.N + 1) ** 2


def make_grid(d: float, N: int) -> Grid:
    """Build the grid for a d x d square with N subintervals per side.

    N must be even (the node set has to contain the domain center) and at
    least 8 so the stencils have interior rows to act on.
    """
    if N % 2 != 0:
        raise ValueError(f"N must be even, got {N}")
    if N < 8:
        raise ValueError(f"N must be at least 8, got {N}")
    if d <= 0:
        raise ValueError(f"d must be positive, got {d}")
    h = d / N
    x = (np.arange(N + 1) - N // 2) * h
    w1 = np.ones(N + 1)
    w1[0] = w1[-1] = 0.5
    w2 = np.outer(w1, w1) * h * h
    wr = np.concatenate([w2.ravel(), w2.ravel()])
    return Grid(d=d, N=N, h=h, x=x, w1=w1, w2=w2, wr=wr, sr=np.sqrt(wr))


def integrate(grid: Grid, f: np.ndarray) -> complex:
    """Trapezoid quadrature of a node field over the square."""
    return np.sum(grid.w2 * f)


def inner(grid: Grid, a: np.ndarray, b: np.ndarray) -> complex:
    """Weighted complex inner product, conjugate-linear in the first slot."""
    return np.vdot(grid.w2 * a, b)


def inner_real(grid: Grid, a: np.ndarray, b: np.ndarray) -> float:
    """Real part of inner(); the inner product of the realified state space."""
    return float(np.real(inner(grid, a, b)))


def norm(grid: Grid, a: np.ndarray) -> float:
    return float(np.sqrt(max(inner_real(grid, a, a), 0.0)))


def to_real(psi: np.ndarray) -> np.ndarray:
    """Flatten a complex node field into the realified vector (re parts, im parts)."""
    return np.concatenate([psi.real.ravel(), psi.imag.ravel()])


def from_real(grid: Grid, v: np.ndarray) -> np.ndarray:
    """Inverse of to_real()."""
    n = (grid.N + 1) ** 2
    return (v[:n] + 1j * v[n:]).reshape(grid.shape)
