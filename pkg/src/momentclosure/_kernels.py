"""Hot numeric kernels: scatter-accumulate loops behind tensor contraction.

Two interchangeable implementations are provided:

* ``coo_accumulate_numba`` -- an ``@njit`` loop (used by default when numba
  imports cleanly),
* ``coo_accumulate_numpy``  -- a vectorized ``np.bincount`` fallback.

Selection is done once at import time.  Set ``MCF_NUMBA=0`` in the
environment to force the numpy path (see ``benchmarks/bench_kernels.py`` for
a timing comparison of the two).
"""

from __future__ import annotations

import os

import numpy as np


def coo_accumulate_numpy(out, idx_out, idx_a, idx_b, w, a, b):
    """out[idx_out[i]] += w[i] * a[idx_a[i]] * b[idx_b[i]] for all i."""
    out += np.bincount(idx_out, weights=w * a[idx_a] * b[idx_b], minlength=out.size)
    return out


def _want_numba() -> bool:
    flag = os.environ.get("MCF_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


coo_accumulate_numba = None
if _want_numba():
    try:
        from numba import njit

        @njit(cache=True, nogil=True)
        def _coo_accumulate_jit(out, idx_out, idx_a, idx_b, w, a, b):  # pragma: no cover
            for i in range(w.size):
                out[idx_out[i]] += w[i] * a[idx_a[i]] * b[idx_b[i]]
            return out

        coo_accumulate_numba = _coo_accumulate_jit
    except ImportError:  # pragma: no cover
        coo_accumulate_numba = None

if coo_accumulate_numba is not None:
    coo_accumulate = coo_accumulate_numba
    BACKEND = "numba"
else:
    coo_accumulate = coo_accumulate_numpy
    BACKEND = "numpy"
