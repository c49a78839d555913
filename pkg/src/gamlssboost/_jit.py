"""Backend switch for the compiled kernels.

Set ``GAMLSSBOOST_NUMBA=0`` before import to run every kernel as plain numpy.
"""
import os

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("GAMLSSBOOST_NUMBA", "1").strip().lower() not in (
    "0",
    "false",
    "no",
    "off",
)

BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(fn):
    """Compile ``fn`` with numba when enabled, otherwise return it unchanged."""
    if USE_NUMBA:
        return njit(cache=True, nogil=True)(fn)
    return fn
