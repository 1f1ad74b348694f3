#!/usr/bin/env python3
"""Plot fracaim trajectory CSVs: x and its reconstruction x~, component-wise.

usage: plot.py out/example1_h0.01.csv [more.csv ...] [-o figure.png]
"""
import argparse

import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("files", nargs="+")
    ap.add_argument("-o", "--output", help="write to file instead of showing")
    args = ap.parse_args()

    frames = [(f, pd.read_csv(f)) for f in args.files]
    dims = max(len([c for c in df.columns if c.startswith("x_")]) for _, df in frames)
    fig, axes = plt.subplots(dims, 1, sharex=True, squeeze=False, figsize=(8, 3 * dims))
    for name, df in frames:
        for i in range(dims):
            ax = axes[i][0]
            ax.plot(df["t"], df[f"x_{i + 1}"], label=f"x_{i + 1} ({name})")
            if f"xt_{i + 1}" in df:
                ax.plot(df["t"], df[f"xt_{i + 1}"], "--", label=f"x~_{i + 1} ({name})")
            ax.legend(fontsize="small")
    axes[-1][0].set_xlabel("t")
    fig.tight_layout()
    if args.output:
        fig.savefig(args.output, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
