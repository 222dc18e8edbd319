"""``track`` command line entry point."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiment as ex


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(" ", "").split(",") if v]


def _int_range(text: str) -> list[int]:
    """``"1-6"`` (inclusive), ``"1:7"`` (half-open) or ``"1,3,5"``."""
    if "-" in text:
        lo, hi = text.split("-")
        return list(range(int(lo), int(hi) + 1))
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi)))
    return _int_list(text)


def _progress(done, total):
    if done == total or done % max(1, total // 20) == 0:
        print(f"  {done}/{total} trials", file=sys.stderr)


def cmd_run(args) -> int:
    cfg = ex.ExperimentConfig.load(args.config)
    cfg = cfg.with_overrides(seed=args.seed, mc_trials=args.trials,
                             record_timing=False if args.no_timing else None)
    out = args.out or cfg.output_dir or f"results/{cfg.name}"
    paths = ex.run_experiment(cfg, out, parallel=args.parallel,
                              progress=None if args.quiet else _progress)
    for row in ex.read_csv(paths["summary"]):
        print(f"{row['experiment']:<28} {row['tracker']:<9} "
              f"nmse {float(row['nmse_db']):7.2f} dB  eier {float(row['eier']):6.2f} %"
              f"  failures {row['failures']}")
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    return 0


def cmd_bench(args) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = ex.run_jacobian_bench(_int_list(args.n), _int_list(args.p),
                                 args.repeats, args.seed, out)
    for N, P, method, sec in rows:
        print(f"N={N:<4} P={P:<3} {method:<6} {sec:.3e} s")
    print(f"wrote {out}")
    return 0


def cmd_observability(args) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = ex.run_observability_study(args.n, _int_range(args.t), args.trials,
                                      args.seed, out)
    for N, T, frac, rank in rows:
        print(f"N={N} T={T}: observable in {100 * frac:.0f}% (mean rank {rank:.1f})")
    print(f"wrote {out}")
    return 0


def cmd_presets(args) -> int:
    for name in ex.preset_names():
        print(f"{name:<18} {ex.preset_description(name)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="track", description="Graph topology tracking experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a Monte-Carlo experiment")
    p.add_argument("--config", required=True,
                   help="JSON config file or preset name")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--no-timing", action="store_true",
                   help="write 0 for wall times so output is byte-reproducible")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench-jacobian", help="time naive vs DP Jacobians")
    p.add_argument("--n", default="10,20")
    p.add_argument("--p", default="1,2,4,8,16")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results/bench_jacobian.csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("observability", help="rank study of the T-step observability matrix")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--t", default="1-6", help="horizons, e.g. 1-6 or 1,5,10")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results/observability.csv")
    p.set_defaults(func=cmd_observability)

    p = sub.add_parser("presets", help="list built-in experiment presets")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"track: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
