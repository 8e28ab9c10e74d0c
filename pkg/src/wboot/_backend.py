"""Select the compiled kernels when importable, else the numpy fallback.

Set ``WBOOT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("WBOOT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _fallback

sup_abs_prefix = _impl.sup_abs_prefix
partial_sum_max = _impl.partial_sum_max
window_range_max = _impl.window_range_max

__all__ = ["BACKEND", "sup_abs_prefix", "partial_sum_max", "window_range_max"]
