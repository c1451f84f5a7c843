"""Kernel backend selection.

Hot inner loops (raster codec passes, Rice bit packing, convolution) are
compiled with numba's ``@njit`` by default.  Setting ``NLCODEC_NUMBA=0`` in
the environment *before import* selects the pure-Python/numpy fallback
instead: the same functions run uncompiled, and convolution switches to a
vectorized numpy path.  Integer codec results are identical on both
backends; floating-point outputs agree within test tolerances.

``bench/compare_backends.py`` times the two backends against each other.
"""

import os

#: True when kernels are JIT-compiled.  Read once at import.
NUMBA_ENABLED = os.environ.get("NLCODEC_NUMBA", "1").lower() not in ("0", "false", "no")

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):
        """No-op stand-in for numba.njit (pure-Python fallback)."""
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
