"""Matplotlib rendering of experiment results to image files.

All figures are written straight to disk with the Agg backend; nothing is
shown interactively. Import stays local to this module so library users who
never render pay no matplotlib import cost.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def save_regret_trajectories(
    trajectories: dict[str, np.ndarray], path: Path, title: str, mean_key: str | None = None
) -> None:
    """Plot per-seed (or per-variant) cumulative regret curves over rounds."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for label, traj in trajectories.items():
        rounds = np.arange(1, len(traj) + 1)
        if mean_key is not None and label == mean_key:
            ax.plot(rounds, traj, label=label, color="black", linewidth=2.0)
        else:
            ax.plot(rounds, traj, label=label, alpha=0.8, linewidth=1.0)
    ax.set_xlabel("round")
    ax.set_ylabel("cumulative regret")
    ax.set_title(title)
    if len(trajectories) <= 12:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_deviation_plot(deviations: Sequence[float], tol: float, path: Path, title: str) -> None:
    """Per-case max deviation of sampled vs closed-form selection probabilities."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(range(1, len(deviations) + 1), deviations, "o", markersize=4)
    ax.axhline(tol, color="red", linestyle="--", label=f"tolerance {tol:g}")
    ax.set_xlabel("case")
    ax.set_ylabel("max entrywise deviation")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_bound_sweep(
    params: Sequence[float], costs: Sequence[float], bound_values: Sequence[float], path: Path, title: str,
    xlabel: str = "parameter",
) -> None:
    """Mean cost against the guaranteed ceiling across a parameter sweep."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(params, costs, "o-", label="mean expected cost")
    ax.plot(params, bound_values, "s--", label="bound")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("total cost")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
