#!/usr/bin/env python3
"""Build/query benchmark with counters, written to CSV.

Also prints the per-doubling build-time ratios and the log-log exponent of
the dynamic per-op counter when --dyn-ops is given.
"""
import argparse

from udisk import harness as hz
from udisk.cli import parse_sizes


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="2^10..2^15")
    ap.add_argument("--queries", type=int, default=500)
    ap.add_argument("--dyn-ops", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", default="bench.csv")
    args = ap.parse_args()

    rows = hz.bench(parse_sizes(args.sizes), seed=args.seed, queries=args.queries,
                    dyn_ops=args.dyn_ops, csv_path=args.csv)
    print(f"{'n':>8} {'build s':>9} {'query us':>9} {'ctr mean':>9} {'ctr/(lg n+k)':>13}")
    for r in rows:
        print(f"{r.n:>8} {r.build_seconds:>9.3f} {r.query_seconds * 1e6:>9.1f} "
              f"{r.query_counter_mean:>9.1f} {r.counter_bound_ratio:>13.2f}")
    if len(rows) > 1:
        ratios = [b.build_seconds / a.build_seconds for a, b in zip(rows, rows[1:])]
        print("build ratio per doubling:", " ".join(f"{x:.2f}" for x in ratios))
    if args.dyn_ops and len(rows) > 1:
        e = hz.loglog_exponent([r.n for r in rows], [r.dyn_counter_mean for r in rows])
        print(f"dynamic counter n-exponent: {e:.3f}")
    print("wrote", args.csv)


if __name__ == "__main__":
    main()
