"""Render the snapshots of one run as a grid of images.

Snapshot format: an ASCII header line `nx ny Lx Ly t`, then nx*ny
little-endian f64 values with y varying fastest.

usage: python plot_snapshots.py DIR [-o snapshots.png]
"""

import argparse
import math
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np


def read_snapshot(path):
    with open(path, "rb") as f:
        nx, ny, lx, ly, t = f.readline().split()
        nx, ny = int(nx), int(ny)
        data = np.frombuffer(f.read(8 * nx * ny), dtype="<f8").reshape(nx, ny)
    return data, float(lx), float(ly), float(t)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("run", type=Path)
    ap.add_argument("-o", "--output", type=Path, default=Path("snapshots.png"))
    args = ap.parse_args()

    paths = sorted((args.run / "snapshots").glob("step_*.bin"))
    cols = min(len(paths), 4)
    rows = math.ceil(len(paths) / cols)
    fig, axes = plt.subplots(rows, cols, figsize=(3 * cols, 3 * rows), squeeze=False)
    for ax in axes.flat:
        ax.axis("off")
    for ax, path in zip(axes.flat, paths):
        data, lx, ly, t = read_snapshot(path)
        ax.imshow(data.T, origin="lower", extent=(0, lx, 0, ly), cmap="RdBu_r")
        ax.set_title(f"t = {t:g}")
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
