"""Optional numba acceleration.

Kernels decorated with :func:`njit` are compiled when numba is importable and
the environment variable ``CLUSTERX_DISABLE_NUMBA`` is unset (or ``0``).
Otherwise callers fall back to the vectorized numpy implementations.
"""
import os

_disabled = os.environ.get("CLUSTERX_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("numba disabled by CLUSTERX_DISABLE_NUMBA")
    from numba import njit as _numba_njit

    USING_NUMBA = True

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        return _numba_njit(*args, **kwargs)

except ImportError:
    USING_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"


__all__ = ["njit", "USING_NUMBA", "backend_name"]
