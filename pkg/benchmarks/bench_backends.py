"""Compare the numba and numpy backends on raw kernels and full decoders.

    python3 benchmarks/bench_backends.py --tags 5 9 17 33 --length 2000

Prints one JSON record per (backend, method, T).  Checksums let you
confirm both backends produced the same outputs.
"""

import argparse
import json
import sys

from cdecode import kernels
from cdecode.bench import METHODS, run_bench, time_kernel


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tags", type=int, nargs="+", default=[5, 9, 17, 33])
    ap.add_argument("--length", type=int, default=2000)
    ap.add_argument("--sentences", type=int, default=20)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--kernels-only", action="store_true", help="skip the decoder wrappers")
    args = ap.parse_args(argv)

    backends = list(kernels.BACKENDS)
    if "numba" not in backends:
        print("numba is not importable; only the numpy backend is timed", file=sys.stderr)

    for t in args.tags:
        for method in ("viterbi", "forward"):
            times = {
                b: time_kernel(b, method, args.length, t, seed=args.seed, repeats=args.repeats,
                               num_sentences=args.sentences)
                for b in backends
            }
            rec = {"kind": "kernel", "method": method, "T": t, "N": args.length,
                   **{f"{b}_s": v for b, v in times.items()}}
            if len(times) == 2:
                rec["speedup"] = times["numpy"] / times["numba"]
            print(json.dumps(rec))
        if args.kernels_only:
            continue
        for b in backends:
            for r in run_bench(seed=args.seed, length=args.length, num_tags=t,
                               num_sentences=args.sentences, repeats=args.repeats,
                               methods=METHODS, backend=b):
                print(json.dumps({"kind": "decoder", **r}))


if __name__ == "__main__":
    main()
