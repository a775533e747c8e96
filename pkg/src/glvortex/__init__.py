"""Steady vortex states of the extreme type-II Ginzburg-Landau equation on a
square, with phase-regularized Newton solves, stability analysis and
bifurcation-branch continuation in the applied-field strength."""

from ._core import BACKEND
from .grid import Grid, make_grid

__version__ = "0.1.0"

__all__ = ["BACKEND", "Grid", "make_grid", "__version__"]
