#!/usr/bin/env python3
"""Plot a revenue_curve.csv as revenue-vs-size with error bars.

Requires matplotlib, which is not a package dependency:
``python3 scripts/plot_revenue_curve.py results/revenue_curve.csv``
"""

import argparse
import csv
import sys
from collections import defaultdict
from pathlib import Path


def read_curve(path):
    by_mechanism = defaultdict(list)
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            by_mechanism[row["mechanism"]].append(
                (
                    int(row["size_billions"]),
                    float(row["mean_revenue"]),
                    float(row["revenue_stderr"]),
                )
            )
    for rows in by_mechanism.values():
        rows.sort()
    return by_mechanism


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="path to revenue_curve.csv")
    parser.add_argument("--out", default=None, help="output image (default: <csv dir>/revenue_curve.png)")
    args = parser.parse_args(argv)

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    curve = read_curve(args.csv)
    fig, ax = plt.subplots(figsize=(6, 4))
    for mechanism, rows in sorted(curve.items()):
        sizes = [r[0] for r in rows]
        means = [r[1] for r in rows]
        errs = [r[2] for r in rows]
        ax.errorbar(sizes, means, yerr=errs, marker="o", capsize=3, label=mechanism)
    ax.set_xlabel("model size (billions of parameters)")
    ax.set_ylabel("mean market revenue")
    ax.set_title("Market revenue versus model size")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()

    out = args.out or str(Path(args.csv).with_name("revenue_curve.png"))
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
