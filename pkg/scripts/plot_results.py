"""Plot the CSVs written by ``dismagick random-bench`` and ``dismagick heisenberg``.

    python3 scripts/plot_results.py random runs/random-bench/random_bench_aggregate.csv -o fig2.png
    python3 scripts/plot_results.py heisenberg runs/heisenberg/heisenberg.csv -o fig3.png

Needs matplotlib (``pip install .[plot]``).
"""
import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SCHEMA = "# dismagick-csv v1"
LABELS = {"clifford_only": "Clifford only", "sequential": "Sequential", "joint": "Joint"}


def read(path):
    with open(path, newline="") as fh:
        if fh.readline().rstrip("\n") != SCHEMA:
            raise SystemExit(f"{path}: not a dismagick CSV (missing '{SCHEMA}')")
        return list(csv.DictReader(fh))


def plot_random(rows, out):
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6), sharex=True)
    for name, label in LABELS.items():
        sel = sorted((r for r in rows if r["strategy"] == name), key=lambda r: int(r["sweep"]))
        if not sel:
            continue
        x = np.array([int(r["sweep"]) for r in sel])
        for ax, key in zip(axes, ("m2", "ee")):
            mean = np.array([float(r[f"{key}_mean"]) for r in sel])
            std = np.array([float(r[f"{key}_std"]) for r in sel])
            ax.plot(x, mean, marker="o", ms=3, label=label)
            ax.fill_between(x, mean - std, mean + std, alpha=0.2)
    axes[0].set_ylabel(r"$M_2$ (bits)")
    axes[1].set_ylabel("half-chain EE (bits)")
    for ax in axes:
        ax.set_xlabel("sweep")
    axes[0].legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_heisenberg(rows, out):
    x = np.array([int(r["sweep"]) for r in rows])
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    axes[0].plot(x, [float(r["m2"]) for r in rows], marker="o", label=r"$M_2$")
    axes[0].plot(x, [float(r["mean_ee"]) for r in rows], marker="s", label="mean bond EE")
    axes[0].set_xlabel("sweep")
    axes[0].legend()
    axes[1].semilogy(x, [float(r["relative_error"]) for r in rows], marker="o")
    axes[1].set_xlabel("sweep")
    axes[1].set_ylabel(r"$|E - E_{ref}| / |E_{ref}|$")
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("kind", choices=["random", "heisenberg"])
    parser.add_argument("csv")
    parser.add_argument("-o", "--output", default=None)
    args = parser.parse_args(argv)
    rows = read(args.csv)
    out = args.output or f"{args.kind}.png"
    (plot_random if args.kind == "random" else plot_heisenberg)(rows, out)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
