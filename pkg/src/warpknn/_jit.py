"""Backend switch for the compiled kernels.

Set ``WARPKNN_DISABLE_NUMBA=1`` (any of 1/true/yes) before import to force the
pure-numpy code path. The numpy path is also used when numba cannot be
imported.
"""
import os

_FLAG = os.environ.get("WARPKNN_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in ("1", "true", "yes", "on")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAS_NUMBA = numba is not None
USE_NUMBA = HAS_NUMBA and not NUMBA_DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(func):
    """``numba.njit(cache=True, nogil=True)`` when numba is usable, else identity."""
    if not HAS_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)
