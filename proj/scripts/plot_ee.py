#!/usr/bin/env python3
"""Plot averaged energy efficiency from a riscf_sim summary CSV.

    python3 scripts/plot_ee.py results/ee_vs_pmax.csv -o ee_vs_pmax.png
"""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

LABELS = {
    "ris_cf": "RIS-aided cell-free",
    "cf_no_ris": "cell-free, no RIS",
    "collocated_ris": "collocated, RIS",
    "collocated_no_ris": "collocated, no RIS",
}
XLABELS = {"pmax_dbm": "P max per AP (dBm)", "cmax_bps_hz": "C max per AP (b/s/Hz)", "k": "antennas per AP"}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("summary", help="<name>.csv written by riscf_sim")
    ap.add_argument("-o", "--out", default="ee.png")
    args = ap.parse_args()

    df = pd.read_csv(args.summary, na_values=["nan"])
    sweep = df["sweep"].iloc[0]
    fig, ax = plt.subplots(figsize=(6, 4))
    for scheme, g in df.groupby("scheme", sort=False):
        g = g.sort_values("value")
        ax.errorbar(g["value"], g["ee_mean"] / 1e6, yerr=g["ee_stderr"].fillna(0) / 1e6,
                    marker="o", capsize=3, label=LABELS.get(scheme, scheme))
    if sweep == "cmax_bps_hz":
        ax.set_xscale("log")
    ax.set_xlabel(XLABELS.get(sweep, sweep))
    ax.set_ylabel("energy efficiency (Mbit/J)")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(args.out)


if __name__ == "__main__":
    main()
