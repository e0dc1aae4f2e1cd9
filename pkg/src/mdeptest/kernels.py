"""Backend selection for the trace-product kernels.

The compiled extension is used when importable; otherwise the NumPy
implementation.  Setting ``MDEPTEST_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("MDEPTEST_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

trace_product_grid = _impl.trace_product_grid
cross_trace_grid = _impl.cross_trace_grid

__all__ = ["BACKEND", "trace_product_grid", "cross_trace_grid"]
