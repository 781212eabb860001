"""Static SVG figures; decorative only, acceptance reads the CSV."""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _group(rows, key, value):
    out = defaultdict(lambda: defaultdict(list))
    for r in rows:
        v = getattr(r, value)
        if r.status == "ok" and not math.isnan(v):
            out[r.planner][getattr(r, key)].append(v)
    return out


def plot_experiment(name: str, rows, path: Path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if name in ("time-vs-K", "time-vs-N"):
        for planner, by_x in _group(rows, "sweep", "wall_clock_s").items():
            xs = sorted(by_x)
            mean = np.array([np.mean(by_x[x]) for x in xs])
            sd = np.array([np.std(by_x[x]) for x in xs])
            ax.errorbar(xs, mean, yerr=sd, marker="o", capsize=3, label=planner)
        ax.set_xlabel("K (observations per cluster)" if name == "time-vs-K" else "particles")
        ax.set_ylabel("planning time [s]")
        ax.legend()
    elif name == "total-return":
        groups = _group(rows, "sweep", "total_return")
        names = list(groups)
        vals = [sum(groups[p].values(), []) for p in names]
        means = [np.mean(v) for v in vals]
        sems = [np.std(v) / math.sqrt(len(v)) for v in vals]
        ax.bar(names, means, yerr=sems, capsize=4)
        ax.set_ylabel("mean total return")
    else:
        groups = _group(rows, "sweep", "bound_gap_root")
        for planner, by_k in groups.items():
            for k, gaps in sorted(by_k.items()):
                if k > 1:
                    ax.hist(np.array(gaps) / math.log(k), bins=30, alpha=0.5, label=f"{planner} K={k:g}")
        ax.set_xlabel("entropy gap / log K")
        ax.set_ylabel("instances")
        ax.legend()
    ax.set_title(name)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
