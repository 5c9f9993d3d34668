"""Numba toggle.

Hot kernels ship in two forms: a numba @njit loop and a vectorized numpy
fallback.  The env var BGKLAB_NUMBA selects at import time ("0"/"false"/"off"
forces the numpy path); the numpy path is also used when numba is missing or
fails to import.  `benchmarks/bench_kernels.py` times both.
"""

import os

_flag = os.environ.get("BGKLAB_NUMBA", "1").strip().lower()
NUMBA_ENABLED = _flag not in ("0", "false", "off", "no")

if NUMBA_ENABLED:
    try:
        from numba import njit
    except Exception:  # pragma: no cover - exercised only without numba
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):  # noqa: D103 - decorator passthrough
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap
