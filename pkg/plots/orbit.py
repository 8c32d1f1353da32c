#!/usr/bin/env python3
"""Planar projection of an ambient trajectory CSV.

Usage:
    python plots/orbit.py <trajectory.csv> <out.png>

Expects the full-run column contract: ``time`` followed by
``q_<body>_<coord>`` / ``qdot_<body>_<coord>`` groups.  Draws the
(first, second) coordinate track of every body with a start marker,
equal axis scaling, fixed 1200x900 output.
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load_planar_tracks(path):
    """Returns {body: ([x...], [y...])} from a full-kind trajectory CSV."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SystemExit(f"orbit: {path} is empty")
        columns = {}
        for idx, name in enumerate(header):
            parts = name.split("_")
            if len(parts) == 3 and parts[0] == "q":
                body, coord = int(parts[1]), int(parts[2])
                if coord in (1, 2):
                    columns[(body, coord)] = idx
        bodies = sorted({body for body, _ in columns})
        if not bodies or header[0] != "time":
            raise SystemExit(
                f"orbit: {path} does not carry full-run q_<body>_<coord> columns"
            )
        tracks = {body: ([], []) for body in bodies}
        rows = 0
        for row in reader:
            rows += 1
            for body in bodies:
                tracks[body][0].append(float(row[columns[(body, 1)]]))
                tracks[body][1].append(float(row[columns[(body, 2)]]))
        if rows == 0:
            raise SystemExit(f"orbit: {path} has a header but no samples")
    return tracks


def render(tracks, out_path):
    fig, ax = plt.subplots(figsize=(12, 9), dpi=100)
    for body in sorted(tracks):
        x, y = tracks[body]
        (line,) = ax.plot(x, y, linewidth=0.9, label=f"body {body}")
        ax.plot(x[0], y[0], "o", color=line.get_color(), markersize=6)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("first planar coordinate")
    ax.set_ylabel("second planar coordinate")
    ax.set_title("planar projection of body trajectories")
    ax.legend(loc="upper right")
    ax.grid(True, alpha=0.3)
    fig.savefig(out_path)
    plt.close(fig)


def main(argv):
    if len(argv) != 3:
        raise SystemExit("usage: orbit.py <trajectory.csv> <out.png>")
    render(load_planar_tracks(argv[1]), argv[2])
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
