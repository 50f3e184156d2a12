"""Backend selection for the streaming-statistics kernel.

The compiled extension is preferred when it imported cleanly; the
pure-Python pool is the fallback and the reference. Set
``NIDSLAB_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
the backend-parity tests).
"""

from __future__ import annotations

import os

from . import _pystats

try:
    from . import _speedups
except ImportError:
    _speedups = None

if _speedups is not None and not os.environ.get("NIDSLAB_PURE_PYTHON"):
    StatsPool = _speedups.StatsPool
    BACKEND = "compiled"
else:
    StatsPool = _pystats.StatsPool
    BACKEND = "python"


def get_stats_pool_class(backend: str | None = None):
    """Explicit backend lookup: 'compiled', 'python', or None for the default."""
    if backend is None:
        return StatsPool
    if backend == "python":
        return _pystats.StatsPool
    if backend == "compiled":
        if _speedups is None:
            raise ImportError("compiled kernel is not available")
        return _speedups.StatsPool
    raise ValueError(f"unknown backend {backend!r}")
