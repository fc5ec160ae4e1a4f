"""Command line entry point.

Exit codes: 0 ok, 2 mismatch, 3 validation failure, 1 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from typing import List, Optional

from . import cuttings as cu
from . import engine as eng
from . import geometry as geo
from . import harness as hz

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH, EXIT_INVALID = 0, 1, 2, 3


def parse_sizes(text: str) -> List[int]:
    """``2^10..2^16`` (every power in between), or a comma list of ints/powers."""
    def one(t: str) -> int:
        t = t.strip()
        if "^" in t:
            b, e = t.split("^")
            return int(b) ** int(e)
        return int(t)

    if ".." in text:
        a, b = text.split("..")
        lo, hi = one(a), one(b)
        if "^" in a and "^" in b and a.split("^")[0] == b.split("^")[0]:
            base = int(a.split("^")[0])
            e0, e1 = int(a.split("^")[1]), int(b.split("^")[1])
            return [base ** e for e in range(e0, e1 + 1)]
        out, n = [], lo
        while n <= hi:
            out.append(n)
            n *= 2
        return out
    return [one(t) for t in text.split(",")]


def cmd_build(args) -> int:
    pts = hz.read_points(args.points)
    t0 = time.perf_counter()
    s = eng.StaticUDRR(pts, mode=args.mode)
    dt = time.perf_counter() - t0
    pieces = sum(x.size for x in s.structs.values())
    info = {"points": len(pts), "nonempty_cells": len(s.cov.nonempty_cells()),
            "registered_cells": len(s.cov.registry), "structures": len(s.structs),
            "pieces": pieces, "seconds": round(dt, 6)}
    print(json.dumps(info))
    return EXIT_OK


def cmd_trace(args) -> int:
    with open(args.inp) as fh:
        tr = hz.Trace.loads(fh.read())
    res = hz.replay(tr, args.engine)
    out = open(args.out, "w") if args.out != "-" else sys.stdout
    try:
        hz.write_results(res, out)
    finally:
        if out is not sys.stdout:
            out.close()
    bad = [r for r in res if r.get("witness_ok") is False]
    if bad:
        print(f"invalid witness at op {bad[0]['op_index']}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_diff(args) -> int:
    with open(args.a) as fa, open(args.b) as fb:
        A, B = hz.read_results(fa), hz.read_results(fb)
    mm = hz.diff(A, B)
    if mm:
        m = mm[0]
        print(f"{len(mm)} mismatches; first at op {m.op_index} ({m.kind}): {m.a} vs {m.b}")
        return EXIT_MISMATCH
    print(f"identical ({len(A)} ops)")
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = hz.bench(parse_sizes(args.sizes), seed=args.seed, queries=args.queries,
                    dyn_ops=args.dyn_ops, csv_path=args.csv)
    for r in rows:
        print(f"n={r.n} build={r.build_seconds:.3f}s query={r.query_seconds * 1e6:.1f}us "
              f"counter_mean={r.query_counter_mean:.1f} ratio={r.counter_bound_ratio:.2f}"
              + (f" dyn={r.dyn_counter_mean:.1f}" if r.dyn_ops else ""))
    return EXIT_OK


def cmd_verify_cutting(args) -> int:
    pts = hz.read_points(args.arcs)
    A = cu.ArcSet.from_points(pts)
    if len(A) != len(pts):
        print("arc centers must satisfy 0 <= y < 1", file=sys.stderr)
        return EXIT_ERROR
    cfg = cu.CuttingConfig(B=args.B, C=args.C, C_size=args.C_size, seed=args.seed)
    k = min(max(args.k, 1), max(len(A), 1))
    try:
        H = cu.hierarchy(A, k, cfg, check=False)
    except cu.ValidationFailure as exc:
        print(f"construction failed: {exc}")
        return EXIT_INVALID
    ok = True
    for i, c in enumerate(H):
        rep = cu.verify(A, c, c.k, c.K, samples=args.samples, seed=args.seed + i,
                        size_bound=cfg.C_size * len(A) / c.k)
        print(f"level {i}: k={c.k:g} K={c.K:g} |Q|={len(c.Q)} |S|={len(c.S)} "
              f"max_level={rep.max_level} max_cross={rep.max_crossings} "
              f"samples={rep.samples_checked} {'ok' if rep.ok else 'FAIL'}")
        for v in rep.violations[:5]:
            print("   ", v)
        ok = ok and rep.ok
    if args.dump:
        with open(args.dump, "w") as fh:
            cu.dump_jsonl(H[0], fh)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_gen(args) -> int:
    tr = hz.gen_workload(args.seed, args.n, hz.parse_mix(args.mix), args.dist,
                         hz.WorkloadConfig(box=args.box))
    text = tr.dumps()
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="udisk", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("build", help="build the static engine and print statistics")
    p.add_argument("--points", required=True)
    p.add_argument("--mode", choices=("cascading", "binary"), default="cascading")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("trace", help="replay a trace and write JSON-lines results")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--engine", choices=("static", "dynamic", "oracle"), default="dynamic")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("diff", help="compare two result files")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(fn=cmd_diff)

    p = sub.add_parser("bench", help="timing and counter benchmark")
    p.add_argument("--sizes", default="2^10..2^16")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--queries", type=int, default=200)
    p.add_argument("--dyn-ops", type=int, default=0)
    p.add_argument("--csv")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("verify-cutting", help="build and verify a cutting hierarchy")
    p.add_argument("--arcs", required=True, help="points file of arc centers (0 <= y < 1)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--B", type=int, default=4)
    p.add_argument("--C", type=float, default=12.0)
    p.add_argument("--C-size", dest="C_size", type=float, default=48.0)
    p.add_argument("--dump", help="write the finest cutting as JSON-lines")
    p.set_defaults(fn=cmd_verify_cutting)

    p = sub.add_parser("gen", help="generate a seeded trace")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mix", default="I:0.5,D:0.2,Q:0.2,E:0.1")
    p.add_argument("--dist", choices=hz.DISTRIBUTIONS, default="uniform-square")
    p.add_argument("--box", type=float, default=10.0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.fn(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
