"""Hot numeric kernels: batch sparse cosine and pairwise-hinge SGD.

Both kernels exist twice: a numba @njit version and a pure-numpy fallback.
The FAULTLINE_NUMBA environment variable picks the path at import time:
"0", "false" or "numpy" force the fallback, anything else (the default)
uses numba when it imports. `flavor()` reports which one is live;
benchmarks/bench_kernels.py times the two against each other.
"""

import math
import os

import numpy as np

_ENV = os.environ.get("FAULTLINE_NUMBA", "auto").strip().lower()
_WANT_NUMBA = _ENV not in ("0", "false", "numpy", "off")

if _WANT_NUMBA:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False


def flavor() -> str:
    """Which kernel path is active: "numba" or "numpy"."""
    return "numba" if _HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# Batch cosine: one sparse query vector against every row of a CSR matrix.
# ---------------------------------------------------------------------------

def _cosine_batch_numpy(indptr, indices, data, row_norms, q_dense, q_norm):
    n_rows = indptr.shape[0] - 1
    sims = np.zeros(n_rows, dtype=np.float64)
    if q_norm == 0.0:
        return sims
    for r in range(n_rows):
        s, e = indptr[r], indptr[r + 1]
        if e == s or row_norms[r] == 0.0:
            continue
        dot = float(np.dot(data[s:e], q_dense[indices[s:e]]))
        sims[r] = dot / (row_norms[r] * q_norm)
    return sims


def _make_cosine_batch_numba():
    @njit(cache=True)
    def _cosine_batch(indptr, indices, data, row_norms, q_dense, q_norm):
        n_rows = indptr.shape[0] - 1
        sims = np.zeros(n_rows, dtype=np.float64)
        if q_norm == 0.0:
            return sims
        for r in range(n_rows):
            s, e = indptr[r], indptr[r + 1]
            if e == s or row_norms[r] == 0.0:
                continue
            dot = 0.0
            for k in range(s, e):
                dot += data[k] * q_dense[indices[k]]
            sims[r] = dot / (row_norms[r] * q_norm)
        return sims

    return _cosine_batch


# ---------------------------------------------------------------------------
# Pairwise hinge SGD: minimize 0.5*||w||^2 + C * sum_i hinge(1 - w.d_i)
# over difference vectors d_i, visiting pairs in a precomputed order so the
# trajectory is identical for a fixed seed regardless of kernel path.
# ---------------------------------------------------------------------------

def _sgd_hinge_numpy(diffs, c, lr0, order):
    n, dim = diffs.shape
    w = np.zeros(dim, dtype=np.float64)
    t = 0
    for i in order:
        t += 1
        lr = lr0 / math.sqrt(t)
        margin = float(np.dot(w, diffs[i]))
        w *= 1.0 - lr / n
        if margin < 1.0:
            w += (lr * c) * diffs[i]
    return w


def _make_sgd_hinge_numba():
    @njit(cache=True)
    def _sgd_hinge(diffs, c, lr0, order):
        n, dim = diffs.shape
        w = np.zeros(dim, dtype=np.float64)
        t = 0
        for oi in range(order.shape[0]):
            i = order[oi]
            t += 1
            lr = lr0 / math.sqrt(t)
            margin = 0.0
            for j in range(dim):
                margin += w[j] * diffs[i, j]
            shrink = 1.0 - lr / n
            if margin < 1.0:
                step = lr * c
                for j in range(dim):
                    w[j] = w[j] * shrink + step * diffs[i, j]
            else:
                for j in range(dim):
                    w[j] = w[j] * shrink
        return w

    return _sgd_hinge


if _HAVE_NUMBA:
    cosine_batch = _make_cosine_batch_numba()
    sgd_hinge = _make_sgd_hinge_numba()
else:
    cosine_batch = _cosine_batch_numpy
    sgd_hinge = _sgd_hinge_numpy


def hinge_objective(diffs: np.ndarray, w: np.ndarray, c: float) -> float:
    """0.5*||w||^2 + C * sum hinge(1 - w.d); used to monitor convergence."""
    margins = diffs @ w
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * float(w @ w) + c * float(hinge.sum())


def mean_hinge(diffs: np.ndarray, w: np.ndarray) -> float:
    """Average hinge(1 - w.d) over all difference vectors."""
    margins = diffs @ w
    return float(np.maximum(0.0, 1.0 - margins).mean())
