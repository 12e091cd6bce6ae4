"""Benchmark the chamber kernel: pure Python vs compiled extension.

Times ball exploration (the dominant cost of every pipeline) and the
single-panel neighbor step on both backends, checks the outputs agree byte
for byte while it is at it, and prints one table.

    python3 benchmarks/bench_core.py
    python3 benchmarks/bench_core.py --cases 3,2,4 2,2,6 --repeat 5
"""

import argparse
import statistics
import time

from heckegamma._kernel import CompiledKernel, make_kernel

DEFAULT_CASES = ["2,2,5", "2,3,4", "3,2,4", "3,3,3", "4,2,2"]


def time_explore(kern, radius, repeat):
    best = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = kern.explore(radius, 5_000_000, True)
        best.append(time.perf_counter() - t0)
    return min(best), out


def time_neighbors(kern, keys, repeat):
    samples = keys[:: max(1, len(keys) // 64)]
    best = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for k in samples:
            for s in range(kern.n):
                kern.neighbors(k, s)
        best.append(time.perf_counter() - t0)
    return min(best) / (len(samples) * kern.n)


def same_outputs(a, b):
    if a["keys_blob"] != b["keys_blob"] or a["index"] != b["index"]:
        return False
    return all(
        (a[f] == b[f]).all()
        for f in ("key_offsets", "dist_base", "dist_xf", "stable", "members", "weyl")
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", nargs="*", default=DEFAULT_CASES, metavar="N,Q0,RADIUS")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if CompiledKernel is None:
        print("compiled kernel not built; nothing to compare")
        return 1

    header = f"{'case':>12} {'chambers':>9} {'pure':>9} {'compiled':>9} {'speedup':>8} {'panel(c)':>10} {'match':>6}"
    print(header)
    print("-" * len(header))
    ratios = []
    for case in args.cases:
        n, q0, radius = (int(x) for x in case.split(","))
        kp = make_kernel(n, q0, 60, "pure")
        kc = make_kernel(n, q0, 60, "compiled")
        tp, dp = time_explore(kp, radius, args.repeat)
        tc, dc = time_explore(kc, radius, args.repeat)
        keys = list(dc["index"])
        tn = time_neighbors(kc, keys, args.repeat)
        ok = same_outputs(dp, dc)
        ratios.append(tp / tc)
        print(
            f"{case:>12} {len(keys):>9} {tp:>8.3f}s {tc:>8.3f}s {tp / tc:>7.1f}x"
            f" {tn * 1e6:>8.1f}us {'yes' if ok else 'NO':>6}"
        )
        if not ok:
            return 1
    print(f"\nmedian speedup: {statistics.median(ratios):.1f}x over {len(ratios)} cases")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
