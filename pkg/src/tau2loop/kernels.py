"""Backend selection for the hot kernels.

The compiled extension ``_kernels`` is used when it imports; otherwise the
numpy implementations in ``_kernels_py`` are used. Setting the environment
variable ``TAU2LOOP_PURE=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("TAU2LOOP_PURE", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

compositions = _impl.compositions
divided_power_entries = _impl.divided_power_entries
csr_matvec_checked = _impl.csr_matvec_checked

__all__ = ["BACKEND", "compositions", "divided_power_entries", "csr_matvec_checked"]
