"""Command-line interface: ``wireqfi run | validate | version``."""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config, validate


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if getattr(args, "preset", None):
        cfg.preset = args.preset
    if getattr(args, "scale", None):
        cfg.scale = args.scale
    return cfg


def cmd_run(args) -> int:
    from .runner import run

    if not args.config and not args.preset:
        print("error: run needs --config or --preset", file=sys.stderr)
        return 2
    try:
        cfg = _load(args)
        report = validate(cfg)
        for w in report.warnings:
            print(f"warning: {w}", file=sys.stderr)
        result = run(cfg, out=args.out, workers=args.workers, check=args.check)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return 2
    for check in result.checks:
        print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}: {check.detail} (tolerance {check.tolerance})")
    failed = result.summary["failed_points"]
    if failed:
        print(f"{failed} point(s) failed; see the message column in the CSV files", file=sys.stderr)
    return result.exit_code


def cmd_validate(args) -> int:
    try:
        cfg = _load(args)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return 2
    report = validate(cfg)
    for w in report.warnings:
        print(f"warning: {w}")
    for e in report.errors:
        print(f"error: {e}")
    if report.ok:
        print("ok")
        return 0
    return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wireqfi", description="Fisher information of Rashba quantum wires")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset or a custom sweep")
    run.add_argument("--config", help="config file")
    run.add_argument("--preset", choices=["fig1", "fig2", "fig3", "fig4", "fig5"])
    run.add_argument("--scale", choices=["full", "quick"])
    run.add_argument("--out", help="output directory (default: config 'out' or ./results)")
    run.add_argument("--workers", type=int, help="worker processes")
    run.add_argument("--check", action="store_true", help="exit 2 when an acceptance check fails")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="validate a config file")
    val.add_argument("--config", required=True)
    val.set_defaults(func=cmd_validate)

    ver = sub.add_parser("version", help="print the version")
    ver.set_defaults(func=lambda args: print(__version__) or 0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
