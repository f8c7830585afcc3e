"""Plot energy traces written by `fracphase run --out DIR`.

usage: python plot_energy.py DIR [DIR ...] [-o energy.png]
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("runs", nargs="+", type=Path)
    ap.add_argument("-o", "--output", type=Path, default=Path("energy.png"))
    args = ap.parse_args()

    fig, (ax_e, ax_m) = plt.subplots(1, 2, figsize=(10, 4))
    for run in args.runs:
        df = pd.read_csv(run / "energy.csv")
        ax_e.plot(df["t"], df["E"], label=f"{run.name} E")
        if df["E_modified"].notna().any():
            ax_e.plot(df["t"], df["E_modified"], "--", label=f"{run.name} E mod")
        ax_m.plot(df["t"], df["max_abs"], label=run.name)
    ax_e.set_xlabel("t")
    ax_e.set_ylabel("energy")
    ax_e.legend()
    ax_m.set_xlabel("t")
    ax_m.set_ylabel("max |phi|")
    ax_m.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
