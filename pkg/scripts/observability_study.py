#!/usr/bin/env python3
"""Observable fraction and rank against horizon, with the closed-form rank.

With identity transitions and generic inputs the stacked matrix has rank
M - k(k+1)/2, k = max(0, N-1-T), so full rank first appears at T = N-1.
"""
import argparse
import sys

from topotrack.experiment import run_observability_study


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--t-max", type=int, default=10)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", default="results/observability.csv")
    args = p.parse_args(argv)

    n, M = args.n, args.n * (args.n - 1) // 2
    rows = run_observability_study(n, range(1, args.t_max + 1), args.trials, out=args.out)
    print(" T  observable  mean rank  predicted")
    for _, T, frac, rank in rows:
        k = max(0, n - 1 - T)
        print(f"{T:2d}  {frac:10.2f}  {rank:9.1f}  {M - k * (k + 1) // 2:9d}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
