#!/usr/bin/env python3
"""Plot the per-run measurement histograms emitted by `qbnsearch search`.

Development convenience only: the JSON reports are the actual interface.

Usage:
    plot_histogram.py out_run1.json [out_run2.json ...] [--save plot.png]

Without --save the bars are printed as text, so the script also works in a
terminal without a display.
"""

import argparse
import json
import sys


def load_runs(paths):
    runs = []
    for path in paths:
        with open(path) as fh:
            data = json.load(fh)
        if "counts" not in data or "shots" not in data:
            sys.exit(f"{path}: not a run histogram (expected 'counts' and 'shots')")
        runs.append((path, data))
    return runs


def print_text(runs, width=50):
    for path, data in runs:
        shots = data["shots"]
        print(f"{path}  ({shots} shots)")
        top = max(data["counts"].values())
        for bits, count in sorted(data["counts"].items()):
            bar = "#" * max(1, round(width * count / top))
            print(f"  {bits}  {count:>8}  {bar}")
        print()


def save_png(runs, out):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, len(runs), figsize=(4 * len(runs), 3.2), squeeze=False)
    for ax, (path, data) in zip(axes[0], runs):
        items = sorted(data["counts"].items())
        ax.bar([b for b, _ in items], [c for _, c in items], color="steelblue")
        ax.set_title(path, fontsize=9)
        ax.set_ylabel("counts")
        ax.tick_params(axis="x", rotation=60, labelsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("runs", nargs="+", help="per-run histogram JSON files")
    ap.add_argument("--save", metavar="PNG", help="write a bar chart instead of text output")
    args = ap.parse_args()

    runs = load_runs(args.runs)
    if args.save:
        save_png(runs, args.save)
    else:
        print_text(runs)


if __name__ == "__main__":
    main()
