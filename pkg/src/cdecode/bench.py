"""Timing harness for the decoders and the forward algorithm."""

from __future__ import annotations

import hashlib
import statistics
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import kernels
from .crf import CrfParams, log_partition
from .decode import constrained_decode, greedy_decode, viterbi
from .schemes import Scheme, TagVocabulary, build_transition_mask

METHODS = ("greedy", "viterbi", "constrained", "log_partition")


def bench_vocab(num_tags: int) -> TagVocabulary:
    """An IOBES vocabulary with exactly ``num_tags`` labels.

    Full B/I/E/S groups are used while they fit; the remainder is filled
    with S- labels of fresh types so no label is a dead end.
    """
    if num_tags < 1:
        raise ValueError("num_tags must be positive")
    labels = ["O"]
    k = 0
    while len(labels) + 4 <= num_tags:
        labels += [f"{p}-T{k}" for p in "BIES"]
        k += 1
    while len(labels) < num_tags:
        labels.append(f"S-T{k}")
        k += 1
    return TagVocabulary(labels, Scheme.IOBES)


def make_lattices(seed, num_sentences, length, num_tags):
    rng = np.random.default_rng(seed)
    lattices = [rng.normal(size=(length, num_tags)) for _ in range(num_sentences)]
    transitions = rng.normal(size=(num_tags + 2, num_tags + 2))
    return lattices, transitions


def _runner(method, transitions, mask, backend):
    if method == "greedy":
        return lambda lat: greedy_decode(lat).tag_indices
    if method == "viterbi":
        return lambda lat: viterbi(lat, transitions, backend).tag_indices
    if method == "constrained":
        return lambda lat: constrained_decode(lat, mask, backend).tag_indices
    if method == "log_partition":
        params = CrfParams(transitions)
        return lambda lat: log_partition(lat, params, backend)
    raise ValueError(f"unknown method {method!r}")


def _digest(outputs):
    h = hashlib.sha256()
    for out in outputs:
        h.update(np.asarray(out, dtype=np.float64).tobytes())
    return h.hexdigest()[:16]


def run_bench(
    seed=0,
    length=50,
    num_tags=9,
    num_sentences=200,
    repeats=3,
    methods=METHODS,
    backend=None,
    threads=1,
):
    """Time each method over the same seeded lattices.

    Returns one record per method with the median wall-clock time over
    ``repeats`` runs, throughput, time relative to greedy, and a checksum
    of the outputs.
    """
    if min(length, num_tags, num_sentences, repeats, threads) < 1:
        raise ValueError("dimensions, repeats and threads must be positive")
    backend = kernels.BACKEND if backend is None else backend
    lattices, transitions = make_lattices(seed, num_sentences, length, num_tags)
    mask = build_transition_mask(Scheme.IOBES, bench_vocab(num_tags))

    records = []
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for method in methods:
            fn = _runner(method, transitions, mask, backend)
            fn(lattices[0])  # compile / warm up
            times = []
            outputs = None
            for _ in range(repeats):
                t0 = time.perf_counter()
                outputs = list(pool.map(fn, lattices)) if pool else [fn(lat) for lat in lattices]
                times.append(time.perf_counter() - t0)
            med = statistics.median(times)
            records.append(
                {
                    "method": method,
                    "backend": backend,
                    "seed": seed,
                    "N": length,
                    "T": num_tags,
                    "sentences": num_sentences,
                    "threads": threads,
                    "median_s": med,
                    "tokens_per_s": length * num_sentences / med if med > 0 else float("inf"),
                    "checksum": _digest(outputs),
                }
            )
    finally:
        if pool:
            pool.shutdown()
    base = next((r["median_s"] for r in records if r["method"] == "greedy"), None)
    for r in records:
        r["ratio_to_greedy"] = r["median_s"] / base if base else None
    return records


def time_kernel(backend, method, length, num_tags, seed=0, repeats=5, num_sentences=1):
    """Median seconds for one raw kernel call pattern, bypassing wrappers."""
    k = kernels.get_backend(backend)
    rng = np.random.default_rng(seed)
    lattices = [rng.normal(size=(length, num_tags)) for _ in range(num_sentences)]
    trans = rng.normal(size=(num_tags + 2, num_tags + 2))
    inner, start, end = trans[:num_tags, :num_tags], trans[num_tags, :num_tags], trans[:num_tags, -1]
    inner, start, end = (np.ascontiguousarray(a) for a in (inner, start, end))
    if method == "greedy":
        def call(lat):
            return np.argmax(lat, axis=1)
    else:
        fn = {"viterbi": k.viterbi, "forward": k.forward}[method]
        def call(lat):
            return fn(lat, inner, start, end)
    call(lattices[0])
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for lat in lattices:
            call(lat)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)
