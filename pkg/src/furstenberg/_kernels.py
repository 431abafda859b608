"""Compiled inner loop for the transfer-matrix cocycle."""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def propagate_frame(Ts, idx, period, logs, block_len):
    """Push an orthonormal frame through ``Ts[idx[k]]``, k = 0..steps-1.

    Every ``period`` cells the frame is re-orthonormalized by Gram-Schmidt
    with one reorthogonalization pass (positive-diagonal QR); ``logs[b, j]``
    receives log R_jj for block ``b``. Returns -1 on success, otherwise the
    step index at which the frame overflowed or collapsed.
    """
    n = Ts.shape[1]
    steps = idx.shape[0]
    Q = np.eye(n)
    tmp = np.empty((n, n))
    for b in range(logs.shape[0]):
        start = b * period
        stop = min(start + period, steps)
        for k in range(start, stop):
            T = Ts[idx[k]]
            for i in range(n):
                for j in range(n):
                    acc = 0.0
                    for m in range(n):
                        acc += T[i, m] * Q[m, j]
                    tmp[i, j] = acc
            Q, tmp = tmp, Q
        for j in range(n):
            for _ in range(2):
                for i in range(j):
                    dot = 0.0
                    for m in range(n):
                        dot += Q[m, i] * Q[m, j]
                    for m in range(n):
                        Q[m, j] -= dot * Q[m, i]
            nrm = 0.0
            for m in range(n):
                nrm += Q[m, j] * Q[m, j]
            nrm = math.sqrt(nrm)
            if not (nrm > 0.0 and nrm < np.inf):
                return stop
            logs[b, j] = math.log(nrm)
            for m in range(n):
                Q[m, j] /= nrm
        block_len[b] = stop - start
    return -1
