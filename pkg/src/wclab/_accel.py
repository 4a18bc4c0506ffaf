"""JIT switch for the numeric kernels.

Kernels are written in the numba-compatible subset of Python. They are
compiled with ``numba.njit`` unless ``WCLAB_DISABLE_JIT`` is set to a true
value (or numba is missing), in which case the plain functions run.
"""

import os

_FLAG = os.environ.get("WCLAB_DISABLE_JIT", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_JIT = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def jit(fn):
    """Compile ``fn`` with numba when enabled; keep ``fn.py_func`` either way."""
    if USE_JIT:
        return numba.njit(cache=True, nogil=True)(fn)
    fn.py_func = fn
    return fn
