#!/usr/bin/env python3
"""Run every built-in preset (or a chosen subset) and print the summaries.

    python3 scripts/run_presets.py --trials 10 --out results
    python3 scripts/run_presets.py lin20 nl5
"""
import argparse
import sys
import time
from pathlib import Path

from topotrack import experiment as ex


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("presets", nargs="*", help="default: all presets")
    p.add_argument("--out", default="results")
    p.add_argument("--trials", type=int, help="override mc_trials")
    p.add_argument("--seed", type=int)
    p.add_argument("--parallel", type=int, default=1)
    args = p.parse_args(argv)

    names = args.presets or ex.preset_names()
    for name in names:
        cfg = ex.load_preset(name).with_overrides(mc_trials=args.trials, seed=args.seed,
                                                  record_timing=False)
        tic = time.perf_counter()
        paths = ex.run_experiment(cfg, Path(args.out) / name, parallel=args.parallel)
        print(f"== {name} ({time.perf_counter() - tic:.0f}s)")
        for row in ex.read_csv(paths["summary"]):
            print(f"  {row['experiment']:<28} {row['tracker']:<9} "
                  f"{float(row['nmse_db']):8.2f} dB  eier {float(row['eier']):6.2f} %  "
                  f"failed trials {row['failures']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
