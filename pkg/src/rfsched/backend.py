"""Kernel backend selection: numba-jitted by default, pure numpy on request.

Set ``RFSCHED_BACKEND=numpy`` to force the pure-python/numpy path (slower,
but handy for debugging and for environments without a working numba).
Both paths execute the same source and draw from the same counter-based
RNG, so simulation output is bit-identical across backends.
"""

import functools
import os

import numpy as np

_requested = os.environ.get("RFSCHED_BACKEND", "numba").strip().lower()

if _requested in ("numpy", "python", "pure"):
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False


def jit(fn):
    """Compile ``fn`` with numba when enabled.

    The fallback wrapper silences numpy's uint64 overflow warnings: the
    counter RNG relies on wrapping arithmetic, which numba performs
    silently but numpy scalars report as RuntimeWarning.
    """
    if NUMBA_ENABLED:
        from numba import njit

        return njit(cache=True)(fn)

    @functools.wraps(fn)
    def wrapper(*args):
        with np.errstate(over="ignore"):
            return fn(*args)

    return wrapper


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
