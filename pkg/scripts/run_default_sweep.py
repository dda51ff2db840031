#!/usr/bin/env python3
"""Run the default revenue-vs-size experiment and print the resulting curve.

Equivalent to ``gms sweep --config configs/default.json`` plus a quick
textual summary of the CSV it wrote.
"""

import argparse
import sys
from pathlib import Path

from gms.cli import main as gms_main

REPO_ROOT = Path(__file__).resolve().parents[1]


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="results", help="output directory")
    parser.add_argument("--workers", type=int, default=1, help="replication worker processes")
    parser.add_argument("--replications", type=int, default=None, help="override replication count")
    args = parser.parse_args(argv)

    cli_args = [
        "sweep",
        "--config", str(REPO_ROOT / "configs" / "default.json"),
        "--output", args.output,
        "--workers", str(args.workers),
    ]
    if args.replications is not None:
        cli_args += ["--replications", str(args.replications)]
    code = gms_main(cli_args)
    if code != 0:
        return code

    csv_path = Path(args.output) / "revenue_curve.csv"
    print()
    print(csv_path.read_text(), end="")
    return 0


if __name__ == "__main__":
    sys.exit(run())
