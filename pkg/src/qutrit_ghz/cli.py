"""Command-line front end: ``qutrit-ghz <command> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .pipeline import COMMANDS, EXIT_ERROR, FORMATS, ConfigError, ExperimentConfig, run_pipeline


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError(f"expected 'on' or 'off', got {value!r}")
    return value == "on"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qutrit-ghz",
                                description="Simulate, measure and certify three-qutrit GHZ states.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", metavar="PATH", help="JSON configuration file")
    p.add_argument("--seed", type=int, help="master seed for shot sampling")
    p.add_argument("--shots", type=int, help="shots per experiment")
    p.add_argument("--noise", type=_on_off, metavar="on|off", help="simulate readout errors")
    p.add_argument("--dephase", type=_on_off, metavar="on|off",
                   help="apply frame phases and the compensation scan")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--format", choices=FORMATS, help="extra output format")
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    overrides = {k: getattr(args, k) for k in ("seed", "shots", "noise", "dephase", "out", "format")
                 if getattr(args, k) is not None}
    if args.seed is not None:
        overrides["search"] = replace(cfg.search, seed=args.seed)
    return replace(cfg, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    result = run_pipeline(args.command, cfg)
    print(json.dumps({"command": args.command, "exit_code": result.exit_code,
                      "out": cfg.out, **result.summary}, default=str))
    if "error" in result.summary:
        print(f"error: {result.summary['error']}", file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
