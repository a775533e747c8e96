"""Pure numpy twins of the compiled stencil kernels (same signatures)."""

from __future__ import annotations

import numpy as np


def _hops(psi: np.ndarray, ux: np.ndarray, uy: np.ndarray) -> np.ndarray:
    """Gauged neighbor sum with doubled terms on the four domain edges."""
    out = np.zeros_like(psi)
    fx = ux * psi[1:, :]
    out[:-1, :] += fx
    out[0, :] += fx[0, :]
    bx = np.conj(ux) * psi[:-1, :]
    out[1:, :] += bx
    out[-1, :] += bx[-1, :]
    fy = uy * psi[:, 1:]
    out[:, :-1] += fy
    out[:, 0] += fy[:, 0]
    by = np.conj(uy) * psi[:, :-1]
    out[:, 1:] += by
    out[:, -1] += by[:, -1]
    return out


def kinetic_apply(psi: np.ndarray, ux: np.ndarray, uy: np.ndarray, h: float) -> np.ndarray:
    """Gauged second-difference sum; discretizes -(grad - iA)^2 and is PSD."""
    return (4.0 * psi - _hops(psi, ux, uy)) / (h * h)


def residual_field(psi: np.ndarray, ux: np.ndarray, uy: np.ndarray, h: float) -> np.ndarray:
    """kinetic(psi) - psi (1 - |psi|^2)."""
    return kinetic_apply(psi, ux, uy, h) - psi * (1.0 - np.abs(psi) ** 2)


def jacobian_field(psi: np.ndarray, phi: np.ndarray, ux: np.ndarray, uy: np.ndarray,
                   h: float) -> np.ndarray:
    """kinetic(phi) + (2|psi|^2 - 1) phi + psi^2 conj(phi); real-linear in phi."""
    return (kinetic_apply(phi, ux, uy, h)
            + (2.0 * np.abs(psi) ** 2 - 1.0) * phi + psi * psi * np.conj(phi))


def dmu_field(psi: np.ndarray, dux: np.ndarray, duy: np.ndarray, h: float) -> np.ndarray:
    """mu-derivative of the kinetic term: hop sum with the link derivatives."""
    return -_hops(psi, dux, duy) / (h * h)
