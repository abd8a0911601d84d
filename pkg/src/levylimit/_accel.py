"""Numba switch.

Kernels are compiled with numba when it is importable and the environment
variable ``LEVYLIMIT_DISABLE_NUMBA`` is unset (or ``0``).  Otherwise the
pure-numpy implementations in :mod:`levylimit.kernels` are used.
"""
import os
import warnings

_disabled = os.environ.get("LEVYLIMIT_DISABLE_NUMBA", "0").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    if not _disabled:
        warnings.warn("numba is not installed, falling back to numpy kernels")

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


USE_NUMBA = HAVE_NUMBA

__all__ = ["njit", "USE_NUMBA", "HAVE_NUMBA"]
