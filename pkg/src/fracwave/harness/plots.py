"""Figure rendering for report bundles; every figure goes straight to a file."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

plt.rcParams["svg.hashsalt"] = "fracwave"
plt.rcParams["figure.figsize"] = (6.4, 4.2)


def plot_energy_overlay(traces, labels, path: str | Path, title: str = "Energy decay") -> None:
    fig, ax = plt.subplots()
    for trace, label in zip(traces, labels):
        positive = trace.energies > 0
        ax.semilogy(trace.times[positive], trace.energies[positive], label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("E(t)")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def plot_loglog_scan(
    params: np.ndarray,
    values: np.ndarray,
    path: str | Path,
    xlabel: str,
    ylabel: str,
    title: str = "",
    shift_param: float = 0.0,
) -> None:
    fig, ax = plt.subplots()
    x = np.asarray(params) + shift_param
    ax.loglog(x, values, marker=".", linestyle="-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def plot_curve(
    params: np.ndarray,
    values: np.ndarray,
    path: str | Path,
    xlabel: str,
    ylabel: str,
    title: str = "",
    logy: bool = False,
) -> None:
    fig, ax = plt.subplots()
    if logy:
        ax.semilogy(params, values, marker=".", linestyle="-")
    else:
        ax.plot(params, values, marker=".", linestyle="-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def plot_profile(profile, path: str | Path) -> None:
    fig, ax = plt.subplots()
    ax.plot(profile.grid.x, profile.samples, lw=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel("gamma(x)")
    ax.set_title(profile.descriptor.get("kind", "damping profile"))
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
