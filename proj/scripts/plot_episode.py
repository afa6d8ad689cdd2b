#!/usr/bin/env python3
"""Render the plot-data CSV written by `acil run`.

Usage: plot_episode.py OUT_DIR/run_plot.csv [figure.png]
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__.strip(), file=sys.stderr)
        return 1
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else path.rsplit(".", 1)[0] + ".png"

    cols: dict[str, list[float]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            for key, value in row.items():
                cols.setdefault(key, []).append(float(value))

    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(7, 8))
    for ax, key, label in zip(
        axes, ["B_f", "u_norm", "lambda_hat"], ["barrier value", "|u|", "multiplier"]
    ):
        ax.plot(cols["t"], cols[key], lw=1.0)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    axes[-1].set_xlabel("t [s]")
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
