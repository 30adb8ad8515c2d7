#!/usr/bin/env python3
"""Plot a .dat table written by magpath.

    scripts/plot.py out/ito-vs-strat/cylinder.dat n gap --logx --logy
"""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def load(path):
    with open(path) as f:
        f.readline()
        cols = f.readline().lstrip("#").split()
    data = np.loadtxt(path, comments="#", ndmin=2)
    return cols, data


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("dat")
    ap.add_argument("x")
    ap.add_argument("y", nargs="+")
    ap.add_argument("--group", help="column whose values split the rows into curves")
    ap.add_argument("--logx", action="store_true")
    ap.add_argument("--logy", action="store_true")
    ap.add_argument("-o", "--output")
    args = ap.parse_args()

    cols, data = load(args.dat)
    idx = {c: i for i, c in enumerate(cols)}
    groups = [None] if args.group is None else sorted(set(data[:, idx[args.group]]))
    fig, ax = plt.subplots()
    for g in groups:
        rows = data if g is None else data[data[:, idx[args.group]] == g]
        for y in args.y:
            label = y if g is None else f"{y} ({args.group}={g:g})"
            ax.plot(rows[:, idx[args.x]], rows[:, idx[y]], marker="o", label=label)
    if args.logx:
        ax.set_xscale("log")
    if args.logy:
        ax.set_yscale("log")
    ax.set_xlabel(args.x)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output or args.dat.rsplit(".", 1)[0] + ".png", dpi=120)


if __name__ == "__main__":
    main()
