"""Command-line front end: scenario runs, figure presets, validation suites.

    accelpair run --scenario params.txt --out sweep.csv [--fig sweep.png]
    accelpair preset --name fig2_left --out fig2.csv [--fig fig2.png]
    accelpair validate --suite oracle|identity|window

Set ACCELPAIR_THREADS to evaluate sweep points in parallel worker processes;
rows are always written in sweep order.
"""

from __future__ import annotations

import argparse
import sys

from .scenario import PRESET_NAMES, figure_preset, load_scenario, run_to_files
from .validation import SUITES, run_suite


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="accelpair", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario file")
    run_p.add_argument("--scenario", required=True, help="scenario file path")
    run_p.add_argument("--out", required=True, help="output CSV path")
    run_p.add_argument("--fig", help="also render a figure to this path")

    pre_p = sub.add_parser("preset", help="run a built-in figure preset")
    pre_p.add_argument("--name", required=True, choices=PRESET_NAMES)
    pre_p.add_argument("--out", required=True, help="output CSV path")
    pre_p.add_argument("--fig", help="also render a figure to this path")

    val_p = sub.add_parser("validate", help="run a validation suite")
    val_p.add_argument("--suite", required=True, choices=sorted(SUITES))
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        scenario = load_scenario(args.scenario)
        run_to_files(scenario, args.out, args.fig)
        print(f"wrote {args.out}")
        return 0
    if args.command == "preset":
        scenario = figure_preset(args.name)
        run_to_files(scenario, args.out, args.fig)
        print(f"wrote {args.out}")
        return 0
    if args.command == "validate":
        return 0 if run_suite(args.suite) else 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
