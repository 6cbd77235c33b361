"""Loop kernels compiled with numba.  Same contracts as the numpy module,
including the tie-break, so the two backends return identical paths."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _viterbi(emissions, inner_t, start, end):
    # inner_t[j, k] is the score of k -> j
    n, t = emissions.shape
    back = np.zeros((n, t), dtype=np.int64)
    score = np.empty(t)
    new = np.empty(t)
    for j in range(t):
        score[j] = start[j] + emissions[0, j]
    for i in range(1, n):
        for j in range(t):
            best = -np.inf
            arg = 0
            row = inner_t[j]
            for k in range(t):
                s = score[k] + row[k]
                if s > best:
                    best = s
                    arg = k
            back[i, j] = arg
            new[j] = best + emissions[i, j]
        score, new = new, score
    best = -np.inf
    last = 0
    for j in range(t):
        s = score[j] + end[j]
        if s > best:
            best = s
            last = j
    path = np.empty(n, dtype=np.int64)
    path[n - 1] = last
    for i in range(n - 1, 0, -1):
        path[i - 1] = back[i, path[i]]
    return path, best


@njit(cache=True, nogil=True, inline="always")
def _lse_into(buf):
    m = -np.inf
    for k in range(buf.shape[0]):
        if buf[k] > m:
            m = buf[k]
    if m == -np.inf:
        return m
    s = 0.0
    for k in range(buf.shape[0]):
        s += np.exp(buf[k] - m)
    return m + np.log(s)


@njit(cache=True, nogil=True)
def _forward(emissions, inner_t, start, end):
    n, t = emissions.shape
    alpha = np.empty((n, t))
    buf = np.empty(t)
    for j in range(t):
        alpha[0, j] = start[j] + emissions[0, j]
    for i in range(1, n):
        for j in range(t):
            for k in range(t):
                buf[k] = alpha[i - 1, k] + inner_t[j, k]
            alpha[i, j] = _lse_into(buf) + emissions[i, j]
    for k in range(t):
        buf[k] = alpha[n - 1, k] + end[k]
    return alpha, _lse_into(buf)


@njit(cache=True, nogil=True)
def _backward(emissions, inner, start, end):
    n, t = emissions.shape
    beta = np.empty((n, t))
    buf = np.empty(t)
    for j in range(t):
        beta[n - 1, j] = end[j]
    for i in range(n - 2, -1, -1):
        for j in range(t):
            for k in range(t):
                buf[k] = inner[j, k] + emissions[i + 1, k] + beta[i + 1, k]
            beta[i, j] = _lse_into(buf)
    return beta


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def viterbi(emissions, inner, start, end):
    path, best = _viterbi(_c(emissions), _c(np.transpose(inner)), _c(start), _c(end))
    return path, float(best)


def forward(emissions, inner, start, end):
    alpha, logz = _forward(_c(emissions), _c(np.transpose(inner)), _c(start), _c(end))
    return alpha, float(logz)


def backward(emissions, inner, start, end):
    return _backward(_c(emissions), _c(inner), _c(start), _c(end))
