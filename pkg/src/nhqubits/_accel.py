"""Optional numba acceleration.

Kernels are written so that they run unchanged either compiled with
``numba.njit`` or as plain numpy code.  Set ``NHQUBITS_DISABLE_NUMBA=1`` to
force the pure-numpy path (useful for debugging and for benchmarking the two
paths against each other).
"""

import os

_FLAG = os.environ.get("NHQUBITS_DISABLE_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _FLAG not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and not DISABLED_BY_ENV


def jit(func):
    """Compile ``func`` in nopython mode when numba is active, else return it."""
    if not USE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend():
    return "numba" if USE_NUMBA else "numpy"
