"""Applied-field vector potential and the unit-modulus edge link field.

The applied field enters through A(x, y; mu) = 0.5 * (-mu y, mu x), the
symmetric gauge centered at the domain origin. Each grid edge carries the
complex unit exp(-i * integral of A along the edge); the line integrals are
exact because A is linear in the coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid


@dataclass(frozen=True)
class LinkField:
    """Per-edge link phases for one field strength.

    ux[a, b] lives on the edge (a, b) -> (a+1, b), shape (N, N+1).
    uy[a, b] lives on the edge (a, b) -> (a, b+1), shape (N+1, N).
    dux/duy are the mu-derivatives of the links (None for link fields not
    generated from the potential, e.g. after a gauge transform).
    """

    mu: float
    ux: np.ndarray
    uy: np.ndarray
    dux: np.ndarray | None = None
    duy: np.ndarray | None = None


def vector_potential(grid: Grid, mu: float) -> tuple[np.ndarray, np.ndarray]:
    """Node samples (Ax, Ay) of the symmetric-gauge potential."""
    X, Y = np.meshgrid(grid.x, grid.x, indexing="ij")
    return -0.5 * mu * Y, 0.5 * mu * X


def link_field(grid: Grid, mu: float) -> LinkField:
    """Exact edge links for field strength mu, with their mu-derivatives."""
    x = grid.x
    h = grid.h
    # integral of Ax over the x-edge at height y_b is -mu*y_b*h/2, of Ay over
    # the y-edge at abscissa x_a is +mu*x_a*h/2; links are exp(-i * integral)
    ix1 = np.broadcast_to(-x[None, :] * (h / 2), (grid.N, grid.N + 1))
    iy1 = np.broadcast_to(x[:, None] * (h / 2), (grid.N + 1, grid.N))
    ux = np.exp(-1j * mu * ix1)
    uy = np.exp(-1j * mu * iy1)
    return LinkField(mu=mu, ux=ux, uy=uy, dux=-1j * ix1 * ux, duy=-1j * iy1 * uy)


def plaquette_phases(grid: Grid, links: LinkField) -> np.ndarray:
    """Counterclockwise product of the four links around each cell, shape (N, N)."""
    ux, uy = links.ux, links.uy
    return ux[:, :-1] * uy[1:, :] * np.conj(ux[:, 1:]) * np.conj(uy[:-1, :])


def gauge_transform(grid: Grid, links: LinkField, chi: np.ndarray) -> LinkField:
    """Links of the gauge-shifted potential A + grad(chi), chi a real node field."""
    g = np.exp(1j * chi)
    ux = g[:-1, :] * links.ux * np.conj(g[1:, :])
    uy = g[:, :-1] * links.uy * np.conj(g[:, 1:])
    return LinkField(mu=links.mu, ux=ux, uy=uy)
