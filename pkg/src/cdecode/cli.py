"""Command-line entry point: ``cdecode <subcommand> ...``.

Exit status is 0 on success, 1 when the subcommand finds a failure it is
meant to report (violations, failed gradient check, eval shape mismatch),
and 2 for usage and parse errors.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, kernels
from .bench import METHODS, run_bench
from .corpus import (
    ConllFormatError,
    Corpus,
    convert_corpus,
    read_conll_file,
    validate_sequence,
    write_conll,
)
from .crf import CrfParams, finite_difference_check
from .decode import (
    LatticeFormatError,
    NoLegalPathError,
    constrained_decode,
    greedy_decode,
    read_lattices,
    viterbi,
)
from .dynamics import analyze
from .evaluate import ShapeMismatchError, entity_f1, format_report
from .schemes import MaskError, Scheme, TagError, TagVocabulary, build_transition_mask

log = logging.getLogger("cdecode")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _records(stream, records):
    for rec in records:
        stream.write(json.dumps(rec) + "\n")


def _map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _read_corpus(args, path, scheme=None):
    return read_conll_file(
        path,
        token_column=args.token_column,
        label_column=args.label_column,
        scheme=scheme or args.scheme,
    )


def _load_transitions(path, num_tags):
    if path.endswith(".npy"):
        mat = np.load(path)
    else:
        with open(path, encoding="utf-8") as fh:
            mat = np.array(json.load(fh), dtype=np.float64)
    if mat.shape != (num_tags + 2, num_tags + 2):
        raise UsageError(f"transition matrix is {mat.shape}, expected {(num_tags + 2,) * 2}")
    return mat


def cmd_decode(args):
    with open(args.lattice, encoding="utf-8") as fh:
        records = list(read_lattices(fh))
    if not records:
        with _output(args.output):
            pass
        return EXIT_OK
    labels = records[0][0]
    vocab = TagVocabulary(labels, args.scheme)
    if args.mode == "greedy":
        def run(lat):
            return greedy_decode(lat)
    elif args.mode == "viterbi":
        if not args.transitions:
            raise UsageError("--mode viterbi needs --transitions")
        trans = _load_transitions(args.transitions, len(vocab))
        def run(lat):
            return viterbi(lat, trans)
    else:
        mask = build_transition_mask(args.scheme, vocab)
        def run(lat):
            return constrained_decode(lat, mask)
    paths = _map(run, [r[1] for r in records], args.threads)
    with _output(args.output) as out:
        for i, ((_, _, tokens), path) in enumerate(zip(records, paths)):
            if i:
                out.write("\n")
            for j, lab in enumerate(vocab.decode(path.tag_indices)):
                tok = tokens[j] if tokens is not None else str(j)
                out.write(f"{tok} {lab}\n")
    return EXIT_OK


def cmd_convert(args):
    corpus = _read_corpus(args, args.input, args.source)
    converted = convert_corpus(corpus, args.target)
    with _output(args.output) as out:
        write_conll(converted, out)
    return EXIT_OK


def cmd_validate(args):
    corpus = _read_corpus(args, args.input)
    count = 0
    for s_idx, sent in enumerate(corpus.sentences):
        for v in validate_sequence(sent.labels, corpus.scheme):
            count += 1
            print(f"sentence {s_idx} position {v.position}: {v.prev} -> {v.label}")
    log.info("%d violation(s) in %d sentences", count, len(corpus))
    return EXIT_OK if count == 0 else EXIT_FAIL


def cmd_eval(args):
    gold = _read_corpus(args, args.gold)
    pred = _read_corpus(args, args.pred, args.pred_scheme)
    try:
        report = entity_f1(gold, pred)
    except ShapeMismatchError as exc:
        log.error("%s", exc)
        return EXIT_FAIL
    with _output(args.output) as out:
        if args.json:
            _records(out, [{"type": "ALL", **report.as_dict()}])
            _records(out, [{"type": t, **c.as_dict()} for t, c in report.per_type.items()])
        else:
            out.write(format_report(report) + "\n")
    return EXIT_OK


_ANALYZE_COLUMNS = (
    ("Tag Types", "tag_types"),
    ("Ambiguity", "ambiguity_pct"),
    ("Strictly Dominated", "strictly_dominated_pct"),
    ("Easy First", "easy_first_pct"),
    ("Easy Last", "easy_last_pct"),
)


def cmd_analyze(args):
    paths = args.inputs if args.all_splits else args.inputs[:1]
    sentences = []
    source = args.source or args.scheme
    for path in paths:
        sentences.extend(_read_corpus(args, path, source).sentences)
    corpus = Corpus(sentences, source)
    report = analyze(corpus, args.scheme, casefold=args.casefold, ambiguity_by=args.ambiguity_by)
    with _output(args.output) as out:
        if args.json:
            rec = report.as_dict()
            rec["files"] = list(paths)
            _records(out, [rec])
        else:
            header = ["Dataset"] + [c for c, _ in _ANALYZE_COLUMNS]
            row = [f"{args.name or paths[0]} ({report.scheme})"]
            for _, key in _ANALYZE_COLUMNS:
                val = getattr(report, key)
                row.append(str(val) if key == "tag_types" else f"{val:.1f}%")
            widths = [max(len(h), len(r)) for h, r in zip(header, row)]
            out.write(" | ".join(h.ljust(w) for h, w in zip(header, widths)) + "\n")
            out.write(" | ".join(r.rjust(w) for r, w in zip(row, widths)) + "\n")
    log.info(
        "conventions: splits=%s casefold=%s ambiguity_by=%s; -DOCSTART- excluded",
        "all" if args.all_splits else "first", args.casefold, args.ambiguity_by,
    )
    return EXIT_OK


def cmd_bench(args):
    backends = list(kernels.BACKENDS) if args.backend == "both" else [args.backend]
    records = []
    for backend in backends:
        records += run_bench(
            seed=args.seed,
            length=args.length,
            num_tags=args.tags,
            num_sentences=args.sentences,
            repeats=args.repeats,
            methods=args.methods,
            backend=backend,
            threads=args.threads,
        )
    with _output(args.output) as out:
        _records(out, records)
    return EXIT_OK


def cmd_grad_check(args):
    if args.tolerance < 0:
        raise UsageError("--tolerance must be non-negative")
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    failures = 0
    for i in range(args.instances):
        n = int(rng.integers(1, args.max_length + 1))
        t = int(rng.integers(1, args.max_tags + 1))
        lattice = rng.normal(size=(n, t))
        trans = rng.normal(size=(t + 2, t + 2))
        gold = rng.integers(0, t, size=n)
        err = finite_difference_check(
            lattice, CrfParams(trans), gold, step=args.step, flip_sign=args.inject_sign_flip
        )
        worst = max(worst, err)
        failures += int(err > args.tolerance)
    with _output(args.output) as out:
        _records(
            out,
            [
                {
                    "instances": args.instances,
                    "failures": failures,
                    "max_rel_error": float(worst),
                    "tolerance": args.tolerance,
                    "step": args.step,
                    "passed": failures == 0,
                }
            ],
        )
    return EXIT_OK if failures == 0 else EXIT_FAIL


def _positive(value):
    v = int(value)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="cdecode", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def columns(p):
        p.add_argument("--token-column", type=int, default=0)
        p.add_argument("--label-column", type=int, default=-1)

    def scheme(p, default="IOBES", flag="--scheme"):
        p.add_argument(flag, type=Scheme.parse, default=default and Scheme.parse(default))

    def output(p):
        p.add_argument("-o", "--output", default=None, help="default: stdout")

    p = sub.add_parser("decode", help="decode a lattice file")
    p.add_argument("lattice")
    p.add_argument("--mode", choices=("greedy", "viterbi", "constrained"), default="constrained")
    p.add_argument("--transitions", help="(T+2)x(T+2) matrix as JSON or .npy (viterbi mode)")
    p.add_argument("--threads", type=_positive, default=1)
    scheme(p)
    output(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("convert", help="convert a CoNLL file between span schemes")
    p.add_argument("input")
    p.add_argument("--from", dest="source", type=Scheme.parse, required=True)
    p.add_argument("--to", dest="target", type=Scheme.parse, required=True)
    p.set_defaults(scheme=None)
    columns(p)
    output(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("validate", help="report illegal transitions in a CoNLL file")
    p.add_argument("input")
    scheme(p)
    columns(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", help="entity-level precision/recall/F1")
    p.add_argument("gold")
    p.add_argument("pred")
    scheme(p)
    p.add_argument("--pred-scheme", type=Scheme.parse, default=None, help="default: --scheme")
    p.add_argument("--json", action="store_true", help="line-delimited records")
    columns(p)
    output(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", help="tag dynamics: ambiguity, domination, easy first/last")
    p.add_argument("inputs", nargs="+", help="training split first, then any other splits")
    p.add_argument("--all-splits", action="store_true", help="pool every file instead of the first")
    scheme(p)
    p.add_argument("--source", type=Scheme.parse, default=None, help="scheme of the files (default: --scheme)")
    p.add_argument("--casefold", action="store_true")
    p.add_argument("--ambiguity-by", choices=("occurrence", "form"), default="occurrence")
    p.add_argument("--name", default=None)
    p.add_argument("--json", action="store_true")
    columns(p)
    output(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="time decoders on seeded random lattices")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-n", "--length", type=_positive, default=50)
    p.add_argument("-t", "--tags", type=_positive, default=9)
    p.add_argument("--sentences", type=_positive, default=200)
    p.add_argument("--repeats", type=_positive, default=3)
    p.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    p.add_argument("--backend", choices=("numba", "numpy", "both"), default=kernels.BACKEND)
    p.add_argument("--threads", type=_positive, default=1)
    output(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("grad-check", help="finite-difference check of CRF gradients")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=_positive, default=100)
    p.add_argument("--max-length", type=_positive, default=5)
    p.add_argument("--max-tags", type=_positive, default=4)
    p.add_argument("--step", type=float, default=1e-5)
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.add_argument("--inject-sign-flip", action="store_true", help=argparse.SUPPRESS)
    output(p)
    p.set_defaults(func=cmd_grad_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.propagate = False
    log.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    try:
        return args.func(args)
    except (
        UsageError,
        ConllFormatError,
        LatticeFormatError,
        TagError,
        MaskError,
        NoLegalPathError,
        OSError,
        ValueError,
    ) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
