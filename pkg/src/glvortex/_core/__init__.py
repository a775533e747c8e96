"""Stencil kernel backend selection.

The compiled Cython module is used when it imported cleanly and the
environment variable GLV_PURE_PYTHON is unset; otherwise the numpy fallback
serves the same four functions. BACKEND names the active choice.
"""

from __future__ import annotations

import os

from . import fallback

if os.environ.get("GLV_PURE_PYTHON"):
    _impl = fallback
    BACKEND = "numpy"
else:
    try:
        from . import kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = fallback
        BACKEND = "numpy"

kinetic_apply = _impl.kinetic_apply
residual_field = _impl.residual_field
jacobian_field = _impl.jacobian_field
dmu_field = _impl.dmu_field

__all__ = ["BACKEND", "kinetic_apply", "residual_field", "jacobian_field", "dmu_field"]
