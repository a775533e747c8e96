"""Energies, phase winding and the vortex census of a state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import glop
from .gauge import LinkField
from .grid import Grid, inner_real, integrate

AMPLITUDE_FLOOR = 1e-3


def free_energy(grid: Grid, psi: np.ndarray) -> float:
    """Reduced energy density -|Omega|^-1 Int |psi|^4; valid at steady states.

    Normalized so the zero state gives 0 and the mu = 0 ground state psi = 1
    gives -1.
    """
    return float(-integrate(grid, np.abs(psi) ** 4).real / grid.d**2)


def full_energy(grid: Grid, links: LinkField, psi: np.ndarray) -> float:
    """Discrete energy functional, defined for any field, not just solutions."""
    kin = inner_real(grid, psi, glop.kinetic_apply(grid, links, psi))
    a2 = np.abs(psi) ** 2
    return float(kin + integrate(grid, -a2 + 0.5 * a2**2).real)


def _principal(x: np.ndarray) -> np.ndarray:
    return np.mod(x + np.pi, 2 * np.pi) - np.pi


def winding_number(grid: Grid, psi: np.ndarray, loop: np.ndarray,
                   floor: float = AMPLITUDE_FLOOR) -> int:
    """Phase winding along a closed node loop, in units of 2 pi.

    loop holds (a, b) index pairs; the segment from the last node back to the
    first is implied. Raises if the amplitude anywhere on the loop is below
    the floor, where the phase stops meaning anything.
    """
    vals = psi[loop[:, 0], loop[:, 1]]
    if np.min(np.abs(vals)) < floor:
        raise ValueError("amplitude below floor on the winding loop")
    ang = np.angle(vals)
    total = np.sum(_principal(np.diff(ang, append=ang[:1])))
    k = total / (2 * np.pi)
    return int(np.rint(k))


def boundary_loop(grid: Grid, inset: int = 0) -> np.ndarray:
    """Counterclockwise closed loop of node indices at the given inset."""
    lo, hi = inset, grid.N - inset
    if hi <= lo:
        raise ValueError("inset leaves no loop")
    bottom = [(a, lo) for a in range(lo, hi)]
    right = [(hi, b) for b in range(lo, hi)]
    top = [(a, hi) for a in range(hi, lo, -1)]
    left = [(lo, b) for b in range(hi, lo, -1)]
    return np.array(bottom + right + top + left, dtype=int)


def cell_windings(grid: Grid, psi: np.ndarray) -> np.ndarray:
    """Integer phase winding around every grid cell, shape (N, N)."""
    ang = np.angle(psi)
    dx = _principal(ang[1:, :] - ang[:-1, :])      # along x edges, (N, N+1)
    dy = _principal(ang[:, 1:] - ang[:, :-1])      # along y edges, (N+1, N)
    circ = dx[:, :-1] + dy[1:, :] - dx[:, 1:] - dy[:-1, :]
    return np.rint(circ / (2 * np.pi)).astype(int)


@dataclass
class VortexRecord:
    charge: int
    x: float
    y: float
    cells: list   # (a, b) cell indices in the cluster


def vortex_census(grid: Grid, psi: np.ndarray,
                  floor: float = AMPLITUDE_FLOOR) -> tuple[list[VortexRecord], int]:
    """Clustered cell windings of one sign and the total boundary vorticity.

    Adjacent cells of like charge merge into one record (a giant vortex can
    spread its winding over neighboring cells); a defect of the opposite sign
    in a touching cell stays a separate record. Total vorticity is measured
    on the outermost loop whose amplitudes clear the floor.
    """
    w = cell_windings(grid, psi)
    seen = np.zeros_like(w, dtype=bool)
    records: list[VortexRecord] = []
    for a0, b0 in zip(*np.nonzero(w)):
        if seen[a0, b0]:
            continue
        sgn = np.sign(w[a0, b0])
        stack, cells = [(a0, b0)], []
        seen[a0, b0] = True
        while stack:
            a, b = stack.pop()
            cells.append((a, b))
            for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                na, nb = a + da, b + db
                if 0 <= na < grid.N and 0 <= nb < grid.N \
                        and np.sign(w[na, nb]) == sgn and not seen[na, nb]:
                    seen[na, nb] = True
                    stack.append((na, nb))
        charge = int(sum(w[a, b] for a, b in cells))
        wt = np.array([abs(w[a, b]) for a, b in cells], dtype=float)
        xs = np.array([grid.x[a] + grid.h / 2 for a, b in cells])
        ys = np.array([grid.x[b] + grid.h / 2 for a, b in cells])
        records.append(VortexRecord(charge=charge, x=float(np.average(xs, weights=wt)),
                                    y=float(np.average(ys, weights=wt)), cells=cells))

    total = None
    for inset in range(0, grid.N // 4):
        try:
            total = winding_number(grid, psi, boundary_loop(grid, inset), floor)
            break
        except ValueError:
            continue
    if total is None:
        total = int(np.sum(w))
    return records, total
