"""Plot one or more roc.csv files written by `tenet eval`.

Usage: python3 scripts/plot_roc.py out.png run1/roc.csv [run2/roc.csv ...]
"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    if len(sys.argv) < 3:
        sys.exit(__doc__)
    fig, ax = plt.subplots(figsize=(4, 4))
    for path in sys.argv[2:]:
        rows = list(csv.DictReader(open(path)))
        ax.plot([float(r["fpr"]) for r in rows], [float(r["tpr"]) for r in rows], label=path)
    ax.plot([0, 1], [0, 1], color="grey", linewidth=0.5)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(sys.argv[1], dpi=150)


if __name__ == "__main__":
    main()
