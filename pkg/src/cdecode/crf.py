"""Linear-chain CRF quantities: log-partition, NLL, marginals, gradients,
and the per-token cross-entropy loss used instead of the CRF."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .decode import as_lattice, score_path, split_transitions
from .schemes import DEFAULT_ILLEGAL_SCORE, TransitionMask


@dataclass(frozen=True, eq=False)
class CrfParams:
    """Transition scores with an optional legality mask laid on top.

    Masked entries are replaced by ``illegal_score`` before any computation;
    :attr:`effective` is the matrix every routine actually uses.
    """

    transitions: np.ndarray
    mask: Optional[TransitionMask] = None
    illegal_score: float = DEFAULT_ILLEGAL_SCORE

    def __post_init__(self):
        trans = np.asarray(self.transitions, dtype=np.float64)
        if trans.ndim != 2 or trans.shape[0] != trans.shape[1] or trans.shape[0] < 3:
            raise ValueError(f"transitions must be a square (T+2)x(T+2) matrix, got {trans.shape}")
        if self.mask is not None:
            if self.mask.allowed.shape != trans.shape:
                raise ValueError("mask and transitions disagree in size")
            trans = np.where(self.mask.allowed, trans, self.illegal_score)
        if not np.isfinite(trans).all():
            raise ValueError("CRF transitions must be finite; use a large negative score, not -inf")
        object.__setattr__(self, "effective", trans)

    @classmethod
    def zeros(cls, num_tags, mask=None, illegal_score=DEFAULT_ILLEGAL_SCORE):
        return cls(np.zeros((num_tags + 2, num_tags + 2)), mask, illegal_score)

    @property
    def num_tags(self):
        return self.effective.shape[0] - 2


@dataclass(frozen=True)
class CrfGradients:
    d_emissions: np.ndarray
    d_transitions: np.ndarray


def _as_params(params):
    if isinstance(params, CrfParams):
        return params
    return CrfParams(np.asarray(params, dtype=np.float64))


def _parts(lattice, params):
    lattice = as_lattice(lattice)
    params = _as_params(params)
    inner, start, end = split_transitions(params.effective, lattice.shape[1])
    return lattice, params, inner, start, end


def log_partition(lattice, params, backend=None) -> float:
    """log of the summed exp-scores of all T**N sequences (forward algorithm)."""
    lattice, _, inner, start, end = _parts(lattice, params)
    _, logz = kernels.get_backend(backend).forward(lattice, inner, start, end)
    return logz


def crf_nll(lattice, params, gold, backend=None) -> float:
    lattice, params, *_ = _parts(lattice, params)
    return log_partition(lattice, params, backend) - score_path(lattice, params.effective, gold)


def forward_backward(lattice, params, backend=None):
    """Posterior marginals under the CRF.

    Returns
    -------
    unary : ndarray (N, T)
        ``unary[i, t] = P(y_i = t)``.
    pairwise : ndarray (N - 1, T, T)
        ``pairwise[i, f, t] = P(y_i = f, y_{i+1} = t)``.
    """
    lattice, _, inner, start, end = _parts(lattice, params)
    k = kernels.get_backend(backend)
    alpha, logz = k.forward(lattice, inner, start, end)
    beta = k.backward(lattice, inner, start, end)
    unary = np.exp(alpha + beta - logz)
    pairwise = np.exp(
        alpha[:-1, :, None] + inner[None, :, :] + (lattice[1:] + beta[1:])[:, None, :] - logz
    )
    return unary, pairwise


def crf_nll_gradients(lattice, params, gold, backend=None) -> CrfGradients:
    """Expected minus observed feature counts.

    Gradients are taken with respect to the effective (masked) transition
    matrix; masked entries are reported as computed.
    """
    lattice, params, *_ = _parts(lattice, params)
    n, t = lattice.shape
    gold = np.asarray(gold, dtype=np.int64)
    if gold.shape != (n,):
        raise ValueError(f"gold length {gold.shape} does not match lattice length {n}")
    if ((gold < 0) | (gold >= t)).any():
        raise IndexError(f"gold indices must lie in [0, {t})")
    unary, pairwise = forward_backward(lattice, params, backend)
    go, eos = t, t + 1

    d_em = unary.copy()
    d_em[np.arange(n), gold] -= 1.0

    d_tr = np.zeros((t + 2, t + 2))
    d_tr[:t, :t] = pairwise.sum(axis=0)
    d_tr[go, :t] = unary[0]
    d_tr[:t, eos] = unary[-1]
    np.add.at(d_tr, (gold[:-1], gold[1:]), -1.0)
    d_tr[go, gold[0]] -= 1.0
    d_tr[gold[-1], eos] -= 1.0
    return CrfGradients(d_em, d_tr)


def token_cross_entropy(lattice, gold) -> float:
    """Sum over tokens of -log softmax(scores[i])[gold[i]]; no transitions."""
    lattice = as_lattice(lattice)
    n, t = lattice.shape
    gold = np.asarray(gold, dtype=np.int64)
    if gold.shape != (n,):
        raise ValueError(f"gold length {gold.shape} does not match lattice length {n}")
    if ((gold < 0) | (gold >= t)).any():
        raise IndexError(f"gold indices must lie in [0, {t})")
    m = lattice.max(axis=1)
    lse = m + np.log(np.exp(lattice - m[:, None]).sum(axis=1))
    return float((lse - lattice[np.arange(n), gold]).sum())


def finite_difference_check(lattice, params, gold, step=1e-5, floor=1e-4, backend=None, flip_sign=False):
    """Compare analytic NLL gradients with central differences.

    Relative error per entry is ``|a - n| / max(|a|, |n|, floor)``.  Returns
    the largest relative error over emissions and transitions.  ``flip_sign``
    negates the analytic gradient (negative control for the checker itself).
    """
    lattice = as_lattice(lattice).copy()
    params = _as_params(params)
    trans = params.effective.copy()
    grads = crf_nll_gradients(lattice, trans, gold, backend)
    sign = -1.0 if flip_sign else 1.0

    def nll(em, tr):
        return crf_nll(em, CrfParams(tr), gold, backend)

    worst = 0.0
    for arr, analytic, which in ((lattice, grads.d_emissions, 0), (trans, grads.d_transitions, 1)):
        for idx in np.ndindex(arr.shape):
            orig = arr[idx]
            arr[idx] = orig + step
            hi = nll(lattice, trans)
            arr[idx] = orig - step
            lo = nll(lattice, trans)
            arr[idx] = orig
            numeric = (hi - lo) / (2 * step)
            a = sign * analytic[idx]
            err = abs(a - numeric) / max(abs(a), abs(numeric), floor)
            worst = max(worst, err)
    return worst
