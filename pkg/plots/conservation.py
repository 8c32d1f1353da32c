#!/usr/bin/env python3
"""Conservation-drift curves from a run summary (or reduced trajectory CSV).

Usage:
    python plots/conservation.py <summary.json|trajectory.csv> <out.png>

A ``summary.json`` carries every per-sample series the run produced:
absolute deviation from the initial value is drawn for the conserved
quantities, the constraint and tangency drifts as-is, plus the criterion
spread along reduced runs (flat at roundoff on-criterion, visibly large
for --force runs).  A reduced-kind ``trajectory.csv`` suffices for the
size-swirl momentum drift alone; full-kind CSVs lack masses and the
curvature sign, so they must come through their summary file.
"""

import csv
import json
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

FLOOR = 1e-18  # log-scale stand-in for exact zeros


def drift_from_initial(values, relative=True):
    ref = values[0]
    scale = abs(ref) if relative and ref != 0 else 1.0
    return [max(abs(v - ref) / scale, FLOOR) for v in values]


def curves_from_summary(path):
    with open(path) as fh:
        doc = json.load(fh)
    series = doc.get("series")
    if not isinstance(series, dict) or "times" not in series:
        raise SystemExit(f"conservation: {path} carries no series block")
    times = series["times"]
    curves = {}
    if "angular_momentum" in series:
        curves["|size-swirl momentum drift| (relative)"] = drift_from_initial(
            series["angular_momentum"]
        )
    if "wedge_c12" in series:
        curves["|planar wedge drift| (relative)"] = drift_from_initial(
            series["wedge_c12"]
        )
    if "constraint_drift" in series:
        curves["constraint drift"] = [
            max(v, FLOOR) for v in series["constraint_drift"]
        ]
    if "tangency_drift" in series:
        curves["tangency drift"] = [
            max(v, FLOOR) for v in series["tangency_drift"]
        ]
    if "criterion_spread" in series:
        pairs = [
            (t, max(v, FLOOR))
            for t, v in zip(times, series["criterion_spread"])
            if v is not None
        ]
        if pairs:
            curves["criterion b-spread at sampled size"] = pairs
    return times, curves


def curves_from_reduced_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SystemExit(f"conservation: {path} is empty")
        if header[:5] != ["time", "rho", "rho_dot", "theta", "theta_dot"]:
            raise SystemExit(
                f"conservation: {path} is not a reduced-kind trajectory; "
                "full runs need their summary.json (masses and curvature "
                "sign are not in the CSV)"
            )
        times, momentum = [], []
        for row in reader:
            times.append(float(row[0]))
            momentum.append(float(row[1]) ** 2 * float(row[4]))
    if not times:
        raise SystemExit(f"conservation: {path} has a header but no samples")
    return times, {
        "|size-swirl momentum drift| (relative)": drift_from_initial(momentum)
    }


def render(times, curves, out_path):
    fig, ax = plt.subplots(figsize=(12, 9), dpi=100)
    for label in sorted(curves):
        data = curves[label]
        if data and isinstance(data[0], tuple):
            ax.semilogy([t for t, _ in data], [v for _, v in data],
                        linewidth=1.2, label=label)
        else:
            ax.semilogy(times, data, linewidth=1.2, label=label)
    ax.set_xlabel("time")
    ax.set_ylabel("absolute deviation")
    ax.set_title("conservation and constraint drift")
    ax.legend(loc="best")
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(out_path)
    plt.close(fig)


def main(argv):
    if len(argv) != 3:
        raise SystemExit("usage: conservation.py <summary.json|trajectory.csv> <out.png>")
    source = argv[1]
    if source.endswith(".json"):
        times, curves = curves_from_summary(source)
    else:
        times, curves = curves_from_reduced_csv(source)
    if not curves:
        raise SystemExit(f"conservation: nothing plottable in {source}")
    render(times, curves, argv[2])
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
