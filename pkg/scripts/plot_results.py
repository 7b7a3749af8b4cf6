#!/usr/bin/env python3
"""Plot the CSVs written by the figure presets.

Needs matplotlib (``pip install .[plot]``). Reads ``<results>/figN/*.csv``
and writes one PNG per figure next to the data.
"""
import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def load(path: Path) -> list[dict]:
    with open(path) as fh:
        rows = [r for r in csv.DictReader(fh) if r["status"] == "ok"]
    return [{k: _num(v) for k, v in r.items()} for r in rows]


def _num(v):
    try:
        return float(v)
    except ValueError:
        return v


def loglog(ax, rows, x, y, label):
    rows = sorted(rows, key=lambda r: r[x])
    ax.loglog([r[x] for r in rows], [r[y] for r in rows], "o-", ms=3, label=label)


def heatmap(ax, rows, x, y, z, title):
    xs, ys = sorted({r[x] for r in rows}), sorted({r[y] for r in rows})
    grid = np.full((len(ys), len(xs)), np.nan)
    for r in rows:
        grid[ys.index(r[y]), xs.index(r[x])] = r[z]
    im = ax.imshow(np.log10(grid), origin="lower", aspect="auto", extent=[xs[0], xs[-1], ys[0], ys[-1]])
    ax.set(xlabel=x, ylabel=y, title=title)
    plt.colorbar(im, ax=ax, label=f"log10 {z}")


def scaling_panels(d: Path, prefix: str, y: str, ax, xlabel="L"):
    for f in sorted(d.glob(f"{prefix}*.csv")):
        loglog(ax, load(f), "L", y, f.stem.replace(prefix, ""))
    ax.set(xlabel=xlabel, ylabel=y)
    ax.legend(fontsize=6)


def fig1(d: Path):
    fig, axes = plt.subplots(1, 3, figsize=(13, 4))
    heatmap(axes[0], load(d / "fig1_heatmap.csv"), "alpha_z", "B", "qfi", "QFI, L = 100")
    scaling_panels(d, "fig1_scaling_", "gap", axes[1])
    scaling_panels(d, "fig1_scaling_", "qfi", axes[2])
    return fig


def fig2(d: Path):
    fig, axes = plt.subplots(1, 3, figsize=(13, 4))
    scaling_panels(d, "fig2_slater_", "qfi", axes[0])
    for key, ax in (("U", axes[1]), ("V", axes[2])):
        rows = sorted(load(d / f"fig2_{key}.csv"), key=lambda r: r[key])
        ax.plot([r[key] for r in rows], [r["qfi"] for r in rows], "o-")
        ax.set(xlabel=key, ylabel="qfi", title="L = 6")
    return fig


def fig3(d: Path):
    fig, ax = plt.subplots(figsize=(5, 4))
    for f in sorted(d.glob("fig3_thermal_L*.csv")):
        rows = [r for r in load(f) if r["T"] > 0]
        loglog(ax, rows, "T", "qfi", f.stem)
    ax.set(xlabel="T", ylabel="qfi")
    ax.legend()
    return fig


def fig4(d: Path):
    fig, axes = plt.subplots(1, 4, figsize=(17, 4))
    rows = load(d / "fig4_heatmap.csv")
    for ax, col in zip(axes, ("qfim_alpha_y_alpha_y", "qfim_alpha_z_alpha_z")):
        heatmap(ax, rows, "alpha_y", "alpha_z", col, col)
    for ax, col in zip(axes[2:], ("qfim_alpha_y_alpha_y", "qfim_alpha_z_alpha_z")):
        scaling_panels(d, "fig4_scaling_", col, ax)
    return fig


def fig5(d: Path):
    fig, ax = plt.subplots(figsize=(5, 4))
    for name in ("fig5_ground", "fig5_thermal", "fig5_many_body"):
        rows = sorted(load(d / f"{name}.csv"), key=lambda r: r["alpha_z"])
        a = [r["alpha_z"] for r in rows]
        ax.plot(a, [r["qfi"] for r in rows], "-", label=f"{name} QFI")
        ax.plot(a, [r["cfi"] for r in rows], "--", label=f"{name} CFI")
    ax.set(xlabel="alpha", yscale="log")
    ax.legend(fontsize=6)
    return fig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("results", nargs="?", default="results")
    args = ap.parse_args()
    root = Path(args.results)
    written = []
    for name, fn in (("fig1", fig1), ("fig2", fig2), ("fig3", fig3), ("fig4", fig4), ("fig5", fig5)):
        d = root / name
        if not d.is_dir():
            continue
        fig = fn(d)
        fig.tight_layout()
        fig.savefig(d / f"{name}.png", dpi=120)
        written.append(str(d / f"{name}.png"))
    print("\n".join(written) or "no preset output found")


if __name__ == "__main__":
    main()
