#!/usr/bin/env python3
"""Quick-look plotting for photoion output directories.

Usage: plot_results.py <out_dir> [...]

Renders whatever recognizable CSVs are present (spectrum, occupations,
interference polar plots, stochastic averages) next to the data as PNGs.
Plotting stays out of the core: the CLI only emits tidy CSV.
"""
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    if data.ndim == 1:
        data = data[None, :]
    return header, data


def plot_spectrum(path):
    header, data = read_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, name in enumerate(header):
        if name.startswith("sigma_l"):
            ax.plot(data[:, 0], data[:, i], label=name)
    ax.set_xlabel("photoelectron energy (eV)")
    ax.set_ylabel("partial ionization probability")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path.with_suffix(".png"), dpi=150)
    plt.close(fig)


def plot_occupations(path):
    header, data = read_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, name in enumerate(header[1:], start=1):
        if name.startswith("c_"):
            ax.plot(data[:, 0], data[:, i], label=name)
    ax.set_xlabel("t (a.u.)")
    ax.set_ylabel("occupation")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path.with_suffix(".png"), dpi=150)
    plt.close(fig)


def plot_interference(path):
    header, data = read_csv(path)
    th = np.radians(data[:, 0])
    fig = plt.figure(figsize=(10, 4))
    ax1 = fig.add_subplot(1, 2, 1, projection="polar")
    for i, name in enumerate(header):
        if name.startswith("dcs_"):
            ax1.plot(th, data[:, i], label=name)
    ax1.legend(fontsize=7)
    ax2 = fig.add_subplot(1, 2, 2)
    j = header.index("delta_phi12_deg")
    ax2.plot(data[:, 0], data[:, j])
    ax2.set_xlabel("theta (deg)")
    ax2.set_ylabel("delta phi_12 (deg)")
    fig.tight_layout()
    fig.savefig(path.with_suffix(".png"), dpi=150)
    plt.close(fig)


def plot_stochastic(path):
    header, data = read_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, name in enumerate(header[1:], start=1):
        ax.plot(data[:, 0], data[:, i], label=name)
    ax.set_xlabel("theta (deg)")
    ax.set_ylabel("interference term")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path.with_suffix(".png"), dpi=150)
    plt.close(fig)


HANDLERS = {
    "spectrum.csv": plot_spectrum,
    "occupations.csv": plot_occupations,
    "pt_occupations.csv": plot_occupations,
    "interference.csv": plot_interference,
    "stochastic.csv": plot_stochastic,
}


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    for arg in sys.argv[1:]:
        root = Path(arg)
        for path in sorted(root.rglob("*.csv")):
            handler = HANDLERS.get(path.name)
            if handler is None and path.name.startswith("pair_"):
                handler = plot_interference
            if handler is None and path.name.startswith("control_"):
                handler = plot_stochastic
            if handler:
                handler(path)
                print(f"wrote {path.with_suffix('.png')}")


if __name__ == "__main__":
    main()
