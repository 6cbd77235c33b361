"""Vectorized numpy kernels.  The loop over tokens stays in Python; the
work over tag pairs is broadcast."""

import numpy as np


def viterbi(emissions, inner, start, end):
    """Max-sum over tag sequences.

    Returns ``(path, best)``.  Ties go to the lowest tag index at every
    backpointer and at the final position (``np.argmax`` keeps the first
    maximum).  ``best`` is ``-inf`` when every path is excluded.
    """
    n, t = emissions.shape
    back = np.zeros((n, t), dtype=np.int64)
    score = start + emissions[0]
    for i in range(1, n):
        cand = score[:, None] + inner
        back[i] = np.argmax(cand, axis=0)
        score = cand[back[i], np.arange(t)] + emissions[i]
    final = score + end
    last = int(np.argmax(final))
    best = final[last]
    path = np.empty(n, dtype=np.int64)
    path[-1] = last
    for i in range(n - 1, 0, -1):
        path[i - 1] = back[i, path[i]]
    return path, float(best)


def _lse(x, axis):
    m = np.max(x, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(x - m), axis=axis, keepdims=True)) + m
    return np.squeeze(out, axis=axis)


def forward(emissions, inner, start, end):
    """Forward log-potentials ``alpha`` (N, T) and ``log Z``."""
    n, t = emissions.shape
    alpha = np.empty((n, t))
    alpha[0] = start + emissions[0]
    for i in range(1, n):
        alpha[i] = _lse(alpha[i - 1][:, None] + inner, axis=0) + emissions[i]
    return alpha, float(_lse(alpha[-1] + end, axis=0))


def backward(emissions, inner, start, end):
    """Backward log-potentials ``beta`` (N, T); ``beta[-1] = end``."""
    n, t = emissions.shape
    beta = np.empty((n, t))
    beta[-1] = end
    for i in range(n - 2, -1, -1):
        beta[i] = _lse(inner + (emissions[i + 1] + beta[i + 1])[None, :], axis=1)
    return beta
