"""Kernel backend selection.

The hot numeric loops (tree split scans, coordinate descent, SMO, SGD)
have two interchangeable implementations: numba-jitted loops and a pure
numpy fallback.  The environment variable CYCLELIFE_NUMBA picks one:

    CYCLELIFE_NUMBA=1      require numba (error if unavailable)
    CYCLELIFE_NUMBA=0      force the pure numpy fallback
    unset / auto           numba when importable, numpy otherwise

The choice is made once at import time.  Results are deterministic
within a backend; across backends they agree to floating-point
accumulation order (see benchmarks/bench_backends.py).
"""

from __future__ import annotations

import os

_TRUTHY = {"1", "true", "yes", "on"}
_FALSY = {"0", "false", "no", "off"}


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def select_backend() -> str:
    raw = os.environ.get("CYCLELIFE_NUMBA", "auto").strip().lower()
    if raw in _FALSY:
        return "numpy"
    if raw in _TRUTHY:
        if not _numba_available():
            raise ImportError(
                "CYCLELIFE_NUMBA requests numba but numba is not importable"
            )
        return "numba"
    if raw not in ("auto", ""):
        raise ValueError(
            f"CYCLELIFE_NUMBA={raw!r} not understood; use 1/0/auto"
        )
    return "numba" if _numba_available() else "numpy"
