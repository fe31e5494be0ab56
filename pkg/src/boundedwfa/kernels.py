"""Backend selection for the hot loops.

``BOUNDEDWFA_BACKEND=numpy`` forces the pure-numpy path; otherwise numba is
used when it imports cleanly. The choice is made once, at import time.
"""

import os
import warnings

import numpy as np

from . import _numpy_kernels

_requested = os.environ.get("BOUNDEDWFA_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"BOUNDEDWFA_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numba":
    try:
        from . import _numba_kernels as _impl
    except ImportError:  # pragma: no cover - depends on environment
        warnings.warn("numba not available; falling back to numpy kernels")
        _impl = _numpy_kernels
else:
    _impl = _numpy_kernels

BACKEND = "numba" if _impl is not _numpy_kernels else "numpy"

mts_absorb = _impl.mts_absorb
wf_extend = _impl.wf_extend
wf_absorb = _impl.wf_absorb
relax = _impl.relax

_warm = False


def warmup():
    """Trigger JIT compilation so it does not land inside timed steps."""
    global _warm
    if _warm:
        return
    from .configs import config_index

    for k in (1, 2, 3):
        idx = config_index(k)
        cfg = idx.configs(3)
        d = np.ones((3, 3)) - np.eye(3)
        vals = np.zeros(len(cfg))
        wf_absorb(vals, cfg, 1, d[1], idx.binom)
        wf_extend(vals[: len(idx.configs(2))], cfg, 2, d[2], idx.binom)
        relax(vals, cfg, d, idx.binom)
    mts_absorb(np.zeros(2), np.zeros(2), np.zeros((2, 2)))
    _warm = True
