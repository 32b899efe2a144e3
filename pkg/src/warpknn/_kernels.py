"""Dynamic-programming kernels for banded DTW.

Two implementations of every kernel live here:

* ``*_loop`` functions are written as explicit loops and compiled with numba
  (``_nb`` suffix) when numba is available.
* ``*_numpy`` functions are the fallback. The cumulative table is filled one
  anti-diagonal at a time, since every cell on diagonal ``i + j = k`` depends
  only on diagonals ``k - 1`` and ``k - 2``.

Both paths evaluate ``d(i, j) + min(up, left, diag)`` with the same point
distance, so they agree to the last bit for p < 8 channels.

Table layout: ``D`` has shape (m + 1, n + 1); ``D[0, 0] = 0``, every other
border cell and every out-of-band cell is ``+inf``. Indices inside ``D`` are
1-based with respect to the series, paths returned here are 0-based.
"""
import math

import numpy as np

from . import _jit

def effective_band(m, n, window):
    """Half-width actually applied: ``max(window, |m - n|)``; None means unbounded."""
    if window is None or window < 0:
        return max(m, n)
    return max(int(window), abs(m - n))


def _dtw_table_loop(S, T, band):
    m = S.shape[0]
    n = T.shape[0]
    D = np.full((m + 1, n + 1), np.inf)
    D[0, 0] = 0.0
    for i in range(1, m + 1):
        jlo = max(1, i - band)
        jhi = min(n, i + band)
        for j in range(jlo, jhi + 1):
            acc = 0.0
            for l in range(S.shape[1]):
                diff = S[i - 1, l] - T[j - 1, l]
                acc += diff * diff
            best = D[i - 1, j - 1]
            if D[i - 1, j] < best:
                best = D[i - 1, j]
            if D[i, j - 1] < best:
                best = D[i, j - 1]
            D[i, j] = math.sqrt(acc) + best
    return D


def _dtw_value_loop(S, T, band):
    # two-row rolling buffer; same arithmetic as _dtw_table_loop
    m = S.shape[0]
    n = T.shape[0]
    prev = np.full(n + 1, np.inf)
    cur = np.full(n + 1, np.inf)
    prev[0] = 0.0
    for i in range(1, m + 1):
        jlo = max(1, i - band)
        jhi = min(n, i + band)
        for j in range(n + 1):
            cur[j] = np.inf
        for j in range(jlo, jhi + 1):
            acc = 0.0
            for l in range(S.shape[1]):
                diff = S[i - 1, l] - T[j - 1, l]
                acc += diff * diff
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = math.sqrt(acc) + best
        tmp = prev
        prev = cur
        cur = tmp
    return prev[n]


def _backtrack_loop(D):
    """Recover the optimal path from a filled table.

    Ties prefer the diagonal predecessor, then (i-1, j), then (i, j-1).
    """
    i = D.shape[0] - 1
    j = D.shape[1] - 1
    out = np.empty((i + j, 2), dtype=np.int64)
    k = 0
    while True:
        out[k, 0] = i - 1
        out[k, 1] = j - 1
        k += 1
        if i == 1 and j == 1:
            break
        bi = i - 1
        bj = j - 1
        best = D[i - 1, j - 1]
        if D[i - 1, j] < best:
            best = D[i - 1, j]
            bi = i - 1
            bj = j
        if D[i, j - 1] < best:
            bi = i
            bj = j - 1
        i = bi
        j = bj
    return out[:k][::-1].copy()


def cost_matrix_numpy(S, T):
    diff = S[:, None, :] - T[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def dtw_table_numpy(S, T, band):
    m = S.shape[0]
    n = T.shape[0]
    C = cost_matrix_numpy(S, T)
    D = np.full((m + 1, n + 1), np.inf)
    D[0, 0] = 0.0
    for k in range(2, m + n + 1):
        # cells with i + j = k, 1 <= i <= m, 1 <= j <= n, |i - j| <= band
        lo = max(1, k - n, -((band - k) // 2))
        hi = min(m, k - 1, (k + band) // 2)
        if lo > hi:
            continue
        i = np.arange(lo, hi + 1)
        j = k - i
        best = np.minimum(np.minimum(D[i - 1, j - 1], D[i - 1, j]), D[i, j - 1])
        D[i, j] = C[i - 1, j - 1] + best
    return D


def dtw_value_numpy(S, T, band):
    return dtw_table_numpy(S, T, band)[-1, -1]


backtrack_python = _backtrack_loop

if _jit.HAS_NUMBA:
    dtw_table_nb = _jit.njit(_dtw_table_loop)
    dtw_value_nb = _jit.njit(_dtw_value_loop)
    backtrack_nb = _jit.njit(_backtrack_loop)
else:  # pragma: no cover
    dtw_table_nb = dtw_value_nb = backtrack_nb = None

if _jit.USE_NUMBA:
    dtw_table = dtw_table_nb
    dtw_value = dtw_value_nb
    backtrack = backtrack_nb
else:
    dtw_table = dtw_table_numpy
    dtw_value = dtw_value_numpy
    backtrack = backtrack_python
