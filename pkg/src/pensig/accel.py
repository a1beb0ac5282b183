"""Numba backend selection.

Hot kernels in :mod:`pensig.kernels` are written once as plain numpy
functions and compiled with numba unless PENSIG_NO_NUMBA=1 is set (or
numba is not importable), in which case the same functions run as pure
numpy. ``benchmarks/bench_backends.py`` compares the two paths.
"""

import os

_FALSY = ("", "0", "false", "no")


def numba_requested() -> bool:
    return os.environ.get("PENSIG_NO_NUMBA", "").strip().lower() in _FALSY


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = numba_requested() and numba_available()


def maybe_jit(fn):
    """Compile fn with numba when the numba backend is active, else return fn."""
    if NUMBA_ENABLED:
        from numba import njit

        return njit(cache=True)(fn)
    return fn


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
