"""Backend selection for the scan kernels.

The compiled :mod:`paralog._kernels` module is used when it imports; setting
``PARALOG_PURE_PYTHON=1`` forces the numpy fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("PARALOG_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = _impl.BACKEND
pair_maxima = _impl.pair_maxima
bmo_scan = _impl.bmo_scan


def backends() -> dict:
    """All importable backends keyed by name (used by tests and benchmarks)."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
