"""Raw versus corrected transfer entropy per candidate pair, split by truth.

Usage: python3 scripts/plot_scores.py out.png scores.csv truth.csv
"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    if len(sys.argv) != 4:
        sys.exit(__doc__)
    scores = list(csv.DictReader(open(sys.argv[2])))
    truth = {(r["source"], r["target"]) for r in csv.DictReader(open(sys.argv[3]))}
    fig, ax = plt.subplots(figsize=(5, 4))
    for is_edge, colour, label in [(True, "tab:red", "edge"), (False, "tab:blue", "non-edge")]:
        rows = [r for r in scores if ((r["source"], r["target"]) in truth) == is_edge]
        ax.scatter([float(r["te_raw"]) for r in rows], [float(r["te_corrected"]) for r in rows],
                   s=6, color=colour, label=label)
    ax.axhline(0, color="grey", linewidth=0.5)
    ax.set_xscale("symlog", linthresh=1e-8)
    ax.set_yscale("symlog", linthresh=1e-8)
    ax.set_xlabel("te_raw (bits)")
    ax.set_ylabel("te_corrected (bits)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(sys.argv[1], dpi=150)


if __name__ == "__main__":
    main()
