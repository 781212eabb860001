"""``infoplan bench <experiment> ...`` command line."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

from .experiments import EXPERIMENTS, load_spec
from .runner import run_experiment, write_csv

log = logging.getLogger("infoplan.bench")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infoplan", description="Belief-space planning benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)
    bench = sub.add_parser("bench", help="run one experiment and write CSV (and optionally SVG)")
    bench.add_argument("experiment", choices=EXPERIMENTS)
    bench.add_argument("--config", default=None, help="JSON config; defaults to the shipped one")
    bench.add_argument("--seed", type=int, default=0, help="master seed (unsigned 64-bit)")
    bench.add_argument("--trials", type=int, default=None, help="override the configured trial count")
    bench.add_argument("--jobs", type=int, default=1, help="worker processes")
    bench.add_argument("--out", type=Path, default=Path("bench_out"))
    bench.add_argument("--plot", action="store_true", help="also write an SVG figure")
    bench.add_argument("--paper-scale", action="store_true", help="apply the config's paper_scale overrides")
    bench.add_argument("-v", "--verbose", action="store_true")
    return parser


def summarize(name: str, rows) -> list[str]:
    lines = []
    if name in ("time-vs-K", "time-vs-N"):
        times = defaultdict(list)
        for r in rows:
            times[(r.sweep, r.planner)].append(r.wall_clock_s)
        for x in sorted({k[0] for k in times}):
            f, a = np.median(times[(x, "fsss")]), np.median(times[(x, "ai-fsss")])
            lines.append(f"sweep={x:g}  median fsss={f:.3f}s  ai-fsss={a:.3f}s  speedup={f / a:.2f}")
    elif name == "total-return":
        by = defaultdict(list)
        for r in rows:
            if r.status == "ok":
                by[r.planner].append(r.total_return)
        for p, v in by.items():
            lines.append(f"{p:8s} mean={np.mean(v):.2f}  sd={np.std(v):.2f}  se={np.std(v) / math.sqrt(len(v)):.2f}  n={len(v)}")
    else:
        by = defaultdict(list)
        for r in rows:
            if r.status != "skipped: degenerate":
                by[(r.planner, r.sweep)].append(r.bound_gap_root)
        for (p, k), gaps in sorted(by.items()):
            ratio = max(gaps) / math.log(k) if k > 1 else float("nan")
            lines.append(f"{p:8s} K={k:g}  min gap={min(gaps):.3g}  max gap={max(gaps):.4g}  max/logK={ratio:.3f}")
    return lines


def bench(args) -> int:
    spec = load_spec(args.experiment, args.config, args.paper_scale, args.trials)
    log.info("running %s: %d trials, seed %d", spec.name, spec.trials, args.seed)
    rows = run_experiment(spec, args.seed, args.jobs)
    stem = spec.name.replace("-", "_")
    path = write_csv(rows, args.out / f"{stem}.csv")
    print(f"wrote {len(rows)} rows to {path}")
    if args.plot:
        from .plots import plot_experiment

        print(f"wrote {plot_experiment(spec.name, rows, args.out / f'{stem}.svg')}")
    for line in summarize(spec.name, rows):
        print(line)
    bad = [r for r in rows if r.status in ("mismatch", "violation")]
    failed = [r for r in rows if r.status.startswith("failed")]
    if failed:
        print(f"{len(failed)} episodes failed (recorded in the CSV)")
    if bad:
        print(f"ASSERTION FAILED: {len(bad)} rows with status {sorted({r.status for r in bad})}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.seed < 0 or args.seed >= 2**64:
        print("--seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    return bench(args)


if __name__ == "__main__":
    sys.exit(main())
