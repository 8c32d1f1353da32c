#!/usr/bin/env python3
"""Criterion spread versus perturbation from a scan table.

Usage:
    python plots/scan.py <scan.csv> <out.png>

One line per (body count, curvature sign) family: the worst relative
spread of the radial coefficients against the applied angle perturbation,
log-scale, with inadmissible rows drawn as crosses.
"""

import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

FLOOR = 1e-18

REQUIRED = {"n", "sigma", "perturbation", "b_spread_rel_max", "verdict"}


def load_rows(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not REQUIRED.issubset(reader.fieldnames):
            raise SystemExit(
                f"scan: {path} lacks the scan column contract {sorted(REQUIRED)}"
            )
        rows = [row for row in reader if row["verdict"] != "error"]
    if not rows:
        raise SystemExit(f"scan: {path} has no usable rows")
    return rows


def render(rows, out_path):
    families = defaultdict(list)
    for row in rows:
        key = (int(row["n"]), int(row["sigma"]))
        families[key].append(row)
    fig, ax = plt.subplots(figsize=(12, 9), dpi=100)
    for (n, sigma) in sorted(families):
        family = sorted(families[(n, sigma)],
                        key=lambda r: float(r["perturbation"]))
        x = [float(r["perturbation"]) for r in family]
        y = [max(float(r["b_spread_rel_max"]), FLOOR) for r in family]
        (line,) = ax.semilogy(x, y, "-o", markersize=4,
                              label=f"n={n}, sign={sigma:+d}")
        bad = [(xi, yi) for xi, yi, r in zip(x, y, family)
               if r["verdict"] == "inadmissible"]
        if bad:
            ax.semilogy([p[0] for p in bad], [p[1] for p in bad], "x",
                        color=line.get_color(), markersize=10)
    ax.set_xlabel("angle perturbation (radians)")
    ax.set_ylabel("worst relative b-spread over the size grid")
    ax.set_title("criterion spread vs. perturbation (x = inadmissible)")
    ax.legend(loc="lower right", ncols=2, fontsize=9)
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(out_path)
    plt.close(fig)


def main(argv):
    if len(argv) != 3:
        raise SystemExit("usage: scan.py <scan.csv> <out.png>")
    render(load_rows(argv[1]), argv[2])
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
