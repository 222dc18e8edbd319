#!/usr/bin/env python3
"""Time the naive and recursive Jacobians and fit log-log slopes in P."""
import argparse
import sys

import numpy as np

from topotrack.experiment import run_jacobian_bench


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, nargs="+", default=[10, 20])
    p.add_argument("--p", type=int, nargs="+", default=[2, 4, 8, 16])
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--out", default="results/bench_jacobian.csv")
    args = p.parse_args(argv)

    rows = run_jacobian_bench(args.n, args.p, args.repeats, out=args.out)
    for N in args.n:
        line = [f"N={N}"]
        for method in ("naive", "dp"):
            t = [r[3] for r in rows if r[0] == N and r[2] == method]
            slope = np.polyfit(np.log(args.p), np.log(t), 1)[0]
            line.append(f"{method} slope {slope:.2f}")
        print("  ".join(line))
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
