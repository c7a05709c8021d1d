"""Numba switch.

Set ``COCYCLELAB_DISABLE_NUMBA=1`` to force the pure-numpy kernels. When numba
is missing the numpy kernels are used as well.
"""
from __future__ import annotations

import os

_DISABLED = os.environ.get("COCYCLELAB_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

NUMBA_AVAILABLE = _numba is not None
USE_NUMBA = NUMBA_AVAILABLE and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator.

    The jitted versions are always built when numba imports, so tests and the
    benchmark can compare both paths regardless of ``USE_NUMBA``.
    """
    if _numba is None:
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return _numba.njit(*args, **kwargs)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
