#!/usr/bin/env python3
"""Run the figure presets and print their checks.

    python3 scripts/run_figures.py                 # all five, full scale
    python3 scripts/run_figures.py fig1 fig3 --scale quick --out results
"""
import argparse
import sys
import time

from wireqfi.config import ExperimentConfig
from wireqfi.runner import run

PRESETS = ["fig1", "fig2", "fig3", "fig4", "fig5"]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("presets", nargs="*", help=f"any of {PRESETS} (default: all)")
    ap.add_argument("--scale", default="full", choices=["full", "quick"])
    ap.add_argument("--out", default="results")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)
    unknown = set(args.presets) - set(PRESETS)
    if unknown:
        ap.error(f"unknown preset(s): {sorted(unknown)}")

    worst = 0
    for name in args.presets or PRESETS:
        start = time.perf_counter()
        res = run(ExperimentConfig(name=name, preset=name, scale=args.scale), out=f"{args.out}/{name}", workers=args.workers, check=True)
        print(f"== {name} ({time.perf_counter() - start:.1f} s, exit {res.exit_code})")
        for c in res.checks:
            print(f"  {'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail} (tolerance {c.tolerance})")
        worst = max(worst, res.exit_code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
