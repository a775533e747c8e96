"""Energy, winding numbers and vortex census."""

import numpy as np
import pytest

from glvortex.fields import constant_field, vortex_ansatz
from glvortex.gauge import link_field
from glvortex.grid import make_grid
from glvortex.postproc import (boundary_loop, cell_windings, free_energy,
                               full_energy, vortex_census, winding_number)


def test_free_energy_reference_points():
    g = make_grid(3.0, 20)
    assert free_energy(g, np.zeros(g.shape, complex)) == 0.0
    assert free_energy(g, constant_field(g)) == pytest.approx(-1.0, abs=1e-13)
    # quartic, so doubling the amplitude scales by 16
    assert free_energy(g, constant_field(g, 2.0)) == pytest.approx(-16.0, abs=1e-11)


def test_full_energy_flat_state():
    # E(1) at mu = 0: no kinetic cost, potential integrates to -d^2/2
    g = make_grid(3.0, 16)
    links = link_field(g, 0.0)
    assert full_energy(g, links, constant_field(g)) == pytest.approx(-0.5 * g.d**2, abs=1e-12)
    assert full_energy(g, links, np.zeros(g.shape, complex)) == 0.0


def test_winding_number_plane_field():
    g = make_grid(3.0, 16)
    X, Y = np.meshgrid(g.x, g.x, indexing="ij")
    one_vortex = X + 1j * Y
    loop = boundary_loop(g)
    assert winding_number(g, one_vortex, loop, floor=1e-12) == 1
    assert winding_number(g, np.conj(one_vortex), loop, floor=1e-12) == -1
    assert winding_number(g, constant_field(g), loop) == 0
    # squared field doubles the winding
    assert winding_number(g, one_vortex**2, loop, floor=1e-12) == 2


def test_winding_number_floor_guard():
    g = make_grid(3.0, 12)
    X, Y = np.meshgrid(g.x, g.x, indexing="ij")
    psi = (X + 1j * Y) + 0j
    # the boundary loop through the midpoints of the edges dips to |x| = d/2
    # which clears a small floor; an absurd floor must raise
    with pytest.raises(ValueError):
        winding_number(g, psi, boundary_loop(g), floor=1e6)


def test_boundary_loop_is_closed_and_ccw():
    g = make_grid(3.0, 12)
    loop = boundary_loop(g, inset=2)
    assert len(loop) == 4 * (g.N - 4)
    # consecutive nodes differ by one step in exactly one index
    diffs = np.diff(np.vstack([loop, loop[:1]]), axis=0)
    assert np.all(np.abs(diffs).sum(axis=1) == 1)
    # counterclockwise: the enclosed signed area is positive
    xs = g.x[loop[:, 0]]
    ys = g.x[loop[:, 1]]
    area = 0.5 * np.sum(xs * np.roll(ys, -1) - np.roll(xs, -1) * ys)
    assert area > 0


def test_cell_windings_localize_vortex():
    g = make_grid(3.0, 16)
    X, Y = np.meshgrid(g.x, g.x, indexing="ij")
    psi = (X + 0.5 * g.h / 2) + 1j * (Y + 0.5 * g.h / 2)
    # shift the zero slightly off the node so exactly one cell carries it
    w = cell_windings(g, psi)
    assert int(w.sum()) == 1
    assert np.count_nonzero(w) == 1


def test_vortex_census_synthetic_pair():
    g = make_grid(6.0, 32)
    X, Y = np.meshgrid(g.x, g.x, indexing="ij")
    eps = 0.3 * g.h
    plus = (X - 1.0 + eps) + 1j * (Y + eps)
    minus = np.conj((X + 1.0 + eps) + 1j * (Y + eps))
    psi = plus * minus / (1.0 + np.abs(plus) * np.abs(minus))
    records, total = vortex_census(g, psi, floor=1e-8)
    charges = sorted(r.charge for r in records)
    assert charges == [-1, 1]
    assert total == 0
    by_charge = {r.charge: r for r in records}
    assert by_charge[1].x == pytest.approx(1.0, abs=2 * g.h)
    assert by_charge[-1].x == pytest.approx(-1.0, abs=2 * g.h)
    assert abs(by_charge[1].y) < 2 * g.h


def test_vortex_census_ansatz():
    g = make_grid(5.5, 24)
    psi = vortex_ansatz(g, winding=2)
    records, total = vortex_census(g, psi, floor=1e-10)
    assert total == 2
    assert sum(r.charge for r in records) == 2
    # the double zero sits at the center
    assert all(abs(r.x) < 2 * g.h and abs(r.y) < 2 * g.h for r in records)
