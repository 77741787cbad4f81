"""Command-line entry point.

    rieszlab <subcommand> --config cfg.json --out outdir [--no-figures]

Exit codes: 0 when the verdict matches the configured expectation (or no
expectation was set), 1 on a verdict mismatch, 2 on invalid input.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from ..fields import field_to_csv
from .config import ConfigError, load_config
from .experiments import RUNNERS
from .report import VERDICTS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rieszlab",
        description="Numerical experiments for generalized Riesz potentials "
                    "over Orlicz classes.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, runner in sorted(RUNNERS.items()):
        doc = (runner.__doc__ or "").strip().splitlines()[0]
        cmd = sub.add_parser(name, help=doc)
        cmd.add_argument("--config", required=True, help="JSON config file")
        cmd.add_argument("--out", required=True, help="output directory")
        cmd.add_argument("--no-figures", action="store_true",
                         help="skip PNG rendering (CSV/JSON only)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    outdir = Path(args.out)
    try:
        cfg = load_config(args.config)
        expect = cfg.get("expect")
        if expect is not None and expect not in VERDICTS:
            raise ConfigError(f"expect must be one of {list(VERDICTS)}, got {expect!r}")
        started = time.perf_counter()
        report = RUNNERS[args.subcommand](cfg)
        report.runtime_seconds = time.perf_counter() - started
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2

    report.write(outdir)
    for name, field in sorted(getattr(report, "field_dumps", {}).items()):
        field_to_csv(field, outdir / f"{report.experiment}_field_{name}.csv")
    if not args.no_figures:
        from .figures import render_figures
        render_figures(report, outdir)

    wanted = report.expectation or "any"
    print(f"{report.experiment}: verdict={report.verdict} (expected {wanted}) "
          f"-> {outdir}")
    return 0 if report.verdict_matches else 1


if __name__ == "__main__":
    sys.exit(main())
