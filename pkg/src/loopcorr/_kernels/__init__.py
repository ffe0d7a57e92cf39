"""Hot-kernel backend selection.

The compiled extension `_core` is preferred; the pure-Python `_fallback`
is used when the extension is missing or when the environment variable
LOOPCORR_PURE_PYTHON is set to a non-empty value.  Both expose the same
functions with identical semantics.
"""

import os

if os.environ.get("LOOPCORR_PURE_PYTHON"):
    from . import _fallback as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as _impl

BACKEND = _impl.BACKEND

brute_loop_masks = _impl.brute_loop_masks
dfs_loop_masks = _impl.dfs_loop_masks
loop_weights = _impl.loop_weights
loop_type_counts = _impl.loop_type_counts
component_all_small = _impl.component_all_small
span_logz = _impl.span_logz


def backend_name() -> str:
    """Which kernel implementation is active: 'compiled' or 'python'."""
    return BACKEND
