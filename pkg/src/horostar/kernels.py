"""Backend selection for the float kernels.

The compiled extension is preferred; set ``HOROSTAR_PURE=1`` to force the
numpy implementation. ``BACKEND`` names the one in use.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("HOROSTAR_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

grid_sup_diff = _impl.grid_sup_diff
affine_gap_series = _impl.affine_gap_series
