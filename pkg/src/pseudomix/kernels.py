"""Backend selection for the hot loops.

The compiled extension is used when it imports; set
``PSEUDOMIX_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("PSEUDOMIX_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

kde_cross = _impl.kde_cross
mixture_logpdf_points = _impl.mixture_logpdf_points
mixture_logpdf_sum = _impl.mixture_logpdf_sum
gauss_pair_sum = _impl.gauss_pair_sum

__all__ = [
    "BACKEND",
    "kde_cross",
    "mixture_logpdf_points",
    "mixture_logpdf_sum",
    "gauss_pair_sum",
]
