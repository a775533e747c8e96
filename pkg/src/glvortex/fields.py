"""Constructors for initial-guess fields."""

from __future__ import annotations

import numpy as np

from .grid import Grid


def constant_field(grid: Grid, value: complex = 1.0) -> np.ndarray:
    return np.full(grid.shape, value, dtype=complex)


def vortex_ansatz(grid: Grid, winding: int = 1, core: float = 1.0) -> np.ndarray:
    """Centered vortex guess: tanh amplitude profile times e^(i winding theta)."""
    X, Y = np.meshgrid(grid.x, grid.x, indexing="ij")
    r = np.hypot(X, Y)
    phase = np.exp(1j * winding * np.arctan2(Y, X))
    psi = np.tanh(np.maximum(r, 1e-300) / core) ** abs(winding) * phase
    psi[r == 0] = 0.0
    return psi


def perturbed_constant(grid: Grid, amplitude: float, seed: int) -> np.ndarray:
    """psi = 1 plus a seeded complex perturbation, for basin tests."""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return constant_field(grid) + amplitude * noise
