"""Report figures (PNG, Agg backend)."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def cactus_plot(series: Mapping[str, Sequence[float]], path, title: str | None = None):
    """Solved-instance count against time, one line per solver configuration.

    ``series`` maps a label to the solve times of its solved instances.
    """
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        for label, times in series.items():
            times = sorted(times)
            ax.step(times, range(1, len(times) + 1), where="post", label=f"{label} ({len(times)})")
        ax.set_xlabel("time (s)")
        ax.set_ylabel("instances solved")
        if any(len(t) for t in series.values()):
            ax.set_xscale("symlog", linthresh=1e-2)
        ax.legend(loc="lower right", frameon=False)
        if title:
            ax.set_title(title)
        return _save(fig, path)


def best_fraction_plot(names: Sequence[str], fractions: Sequence[float], path):
    """Bar chart of best satisfied-clause fraction per instance."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(max(4.0, 0.25 * len(names) + 1.5), 3.2))
        ax.bar(range(len(names)), fractions, color="tab:blue")
        low = min(fractions) - 0.01 if len(fractions) else 0.9
        ax.set_ylim(low, 1.0005)
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=90, fontsize=6)
        ax.set_ylabel("satisfied clause fraction")
        return _save(fig, path)


def ablation_bars(counts: Mapping[str, int], total: int, path):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(3.6, 3.0))
        labels = list(counts)
        ax.bar(labels, [counts[k] for k in labels], color=["tab:blue", "tab:orange", "tab:green"][: len(labels)])
        ax.axhline(total, color="grey", lw=0.8, ls="--")
        ax.set_ylabel("instances solved")
        for i, k in enumerate(labels):
            ax.text(i, counts[k], str(counts[k]), ha="center", va="bottom", fontsize=8)
        return _save(fig, path)
