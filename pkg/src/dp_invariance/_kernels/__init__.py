"""Backend selection for the hot draw kernels.

The compiled extension is preferred when importable; otherwise the numpy
fallback is used. ``DP_INVARIANCE_BACKEND=python|compiled`` forces the
choice (``compiled`` raises if the extension is missing). Both backends
draw identical random streams; results agree up to summation order.
"""

from __future__ import annotations

import os

from . import _fallback

_forced = os.environ.get("DP_INVARIANCE_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _forced == "compiled":
            raise
        _impl = _fallback
        BACKEND = "python"

exp_ratio_draws = _impl.exp_ratio_draws
exp_quantile_draws = _impl.exp_quantile_draws

__all__ = ["BACKEND", "exp_ratio_draws", "exp_quantile_draws"]
