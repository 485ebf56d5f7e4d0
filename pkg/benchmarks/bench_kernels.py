"""Compare the compiled and pure enumeration kernels.

    python benchmarks/bench_kernels.py [--repeat 3] [--workers 1 4] [--json out.json]

Each case runs on every available backend; outputs are checked for equality
before timings are reported.
"""
import argparse
import json
import sys
import time

import numpy as np

from ska_mds import kernels
from ska_mds.rs import RsParams, build_generator


def _gen(q, n, k):
    return build_generator(RsParams.create(q, n, k)).as_array()


def cases():
    g13 = _gen(13, 12, 5)
    g11 = _gen(11, 10, 5)
    return {
        "min_weight q=13 n=12 k=5": lambda b, w: kernels.min_weight(13, g13, workers=w, backend=b),
        "project_codes q=11 k=5 |S|=6": lambda b, w: kernels.project_codes(
            11, g11, [0, 2, 4, 6, 8, 9], workers=w, backend=b),
        "joint_codes q=7 n=6 k=3 masks=2": lambda b, w: kernels.joint_codes(
            7, _gen(7, 6, 3), [0, 1], [3, 4, 5], 2, workers=w, backend=b),
        "affine_counts q=1048573 u=1": lambda b, w: kernels.affine_counts(
            1048573, 3, [5], [1], [[2]], workers=w, backend=b),
        "partition_min n=9 k=4": lambda b, w: kernels.partition_min(9, 4, backend=b),
    }


def _same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return a == b


def timed(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--workers", type=int, nargs="+", default=[1, 4])
    ap.add_argument("--json", help="write raw timings here")
    args = ap.parse_args(argv)

    backends = sorted(kernels.BACKENDS)
    if "cython" not in backends:
        print("compiled core not built; timing the python backend only", file=sys.stderr)
    rows = []
    print(f"{'case':36} {'workers':>7} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for name, fn in cases().items():
        for w in args.workers:
            times, outs = {}, {}
            for b in backends:
                times[b], outs[b] = timed(lambda: fn(b, w), args.repeat)
            ref = outs[backends[0]]
            if not all(_same(ref, o) for o in outs.values()):
                print(f"backends disagree on {name}", file=sys.stderr)
                return 1
            speedup = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{name:36} {w:>7} " + " ".join(f"{times[b]:>9.4f}s" for b in backends)
                  + f"   {speedup:7.1f}x")
            rows.append({"case": name, "workers": w, "seconds": times})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
