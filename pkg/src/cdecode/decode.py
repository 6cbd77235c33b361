"""Greedy, Viterbi and constrained decoding over emission lattices."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .schemes import TransitionMask, mask_to_scores


class NoLegalPathError(ValueError):
    """Every tag sequence scores -inf under the transition matrix."""


@dataclass(frozen=True)
class DecodedPath:
    tag_indices: np.ndarray
    path_score: float

    def __len__(self):
        return len(self.tag_indices)

    def labels(self, vocab):
        return vocab.decode(self.tag_indices)


def as_lattice(scores) -> np.ndarray:
    """Validate an (N, T) emission matrix and return it as float64."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[0] < 1 or scores.shape[1] < 1:
        raise ValueError(f"lattice must be a non-empty N x T matrix, got shape {scores.shape}")
    if not np.isfinite(scores).all():
        raise ValueError("lattice entries must be finite")
    return scores


def split_transitions(transitions, num_tags):
    """Return ``(inner, start, end)`` views of a (T+2, T+2) matrix."""
    transitions = np.asarray(transitions, dtype=np.float64)
    size = num_tags + 2
    if transitions.shape != (size, size):
        raise ValueError(f"transition matrix must be {size}x{size}, got {transitions.shape}")
    if np.isnan(transitions).any():
        raise ValueError("transition matrix contains NaN")
    go, eos = num_tags, num_tags + 1
    return transitions[:num_tags, :num_tags], transitions[go, :num_tags], transitions[:num_tags, eos]


def zero_transitions(num_tags) -> np.ndarray:
    return np.zeros((num_tags + 2, num_tags + 2))


def score_path(lattice, transitions, path) -> float:
    """Sum of chosen emissions and transitions, GO and EOS terms included.

    Emissions are added first, then transitions left to right.
    """
    lattice = as_lattice(lattice)
    n, t = lattice.shape
    inner, start, end = split_transitions(transitions, t)
    path = np.asarray(path, dtype=np.int64)
    if path.shape != (n,):
        raise ValueError(f"path length {path.shape} does not match lattice length {n}")
    if ((path < 0) | (path >= t)).any():
        raise IndexError(f"path indices must lie in [0, {t})")
    total = float(lattice[np.arange(n), path].sum())
    total += start[path[0]]
    total += float(inner[path[:-1], path[1:]].sum())
    total += end[path[-1]]
    return float(total)


def greedy_decode(lattice) -> DecodedPath:
    lattice = as_lattice(lattice)
    path = np.argmax(lattice, axis=1).astype(np.int64)
    return DecodedPath(path, score_path(lattice, zero_transitions(lattice.shape[1]), path))


def viterbi(lattice, transitions, backend=None) -> DecodedPath:
    """Highest-scoring tag sequence, ties to the lowest tag index.

    ``path_score`` is recomputed with :func:`score_path`, so it is exactly
    what re-scoring the returned path gives.
    """
    lattice = as_lattice(lattice)
    inner, start, end = split_transitions(transitions, lattice.shape[1])
    path, best = kernels.get_backend(backend).viterbi(lattice, inner, start, end)
    if best == -np.inf:
        raise NoLegalPathError("no legal path through the lattice")
    return DecodedPath(path, score_path(lattice, transitions, path))


def constrained_decode(lattice, mask: TransitionMask, backend=None) -> DecodedPath:
    """Viterbi with the legality mask as the only transition scores."""
    lattice = as_lattice(lattice)
    if lattice.shape[1] != mask.num_tags:
        raise ValueError(
            f"lattice has {lattice.shape[1]} tags but the mask covers {mask.num_tags}"
        )
    return viterbi(lattice, mask_to_scores(mask, -np.inf), backend=backend)


class LatticeFormatError(ValueError):
    def __init__(self, message, record=None):
        self.record = record
        super().__init__(f"record {record}: {message}" if record is not None else message)


def read_lattices(stream):
    """Yield ``(labels, scores, tokens)`` from line-delimited JSON records.

    Each record holds ``"labels"`` (identical across the file) and
    ``"scores"`` (N x T); ``"tokens"`` is optional.  Blank lines are skipped.
    """
    labels = None
    number = 0
    for line in stream:
        if not line.strip():
            continue
        number += 1
        try:
            rec = json.loads(line)
            rec_labels = list(rec["labels"])
            scores = as_lattice(rec["scores"])
        except (ValueError, KeyError, TypeError) as exc:
            raise LatticeFormatError(str(exc) or type(exc).__name__, number) from None
        if labels is None:
            labels = rec_labels
        elif rec_labels != labels:
            raise LatticeFormatError("label list differs from the first record", number)
        if scores.shape[1] != len(labels):
            raise LatticeFormatError(
                f"{scores.shape[1]} score columns for {len(labels)} labels", number
            )
        tokens = rec.get("tokens")
        if tokens is not None and len(tokens) != scores.shape[0]:
            raise LatticeFormatError("tokens and scores differ in length", number)
        yield labels, scores, tokens


def write_lattice(stream, labels, scores, tokens=None):
    rec = {"labels": list(labels), "scores": np.asarray(scores).tolist()}
    if tokens is not None:
        rec["tokens"] = list(tokens)
    stream.write(json.dumps(rec) + "\n")
