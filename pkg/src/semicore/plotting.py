"""Figures for benchmark runs, rendered off-screen to image files."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_computations(rows, path):
    """Grouped bars of node computations per graph, one bar per algorithm.

    ``rows`` are bench dicts with at least graph, algorithm and
    node_computations.
    """
    graphs = list(dict.fromkeys(r["graph"] for r in rows))
    algos = list(dict.fromkeys(r["algorithm"] for r in rows))
    table = {(r["graph"], r["algorithm"]): r["node_computations"] for r in rows}
    x = np.arange(len(graphs))
    width = 0.8 / max(len(algos), 1)
    fig, ax = plt.subplots(figsize=(max(6, 0.9 * len(graphs) + 2), 4))
    for i, algo in enumerate(algos):
        heights = [table.get((gname, algo), 0) for gname in graphs]
        ax.bar(x + (i - (len(algos) - 1) / 2) * width, heights, width, label=algo)
    ax.set_xticks(x)
    ax.set_xticklabels(graphs, rotation=30, ha="right")
    ax.set_ylabel("node computations")
    ax.set_yscale("log")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_changed_counts(series, path):
    """Nodes whose bound changed in each pass, one line per run.

    ``series`` maps a label to a list of per-pass changed counts.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, counts in series.items():
        ax.plot(np.arange(1, len(counts) + 1), counts, "-o", markersize=3, label=label)
    ax.set_xlabel("iteration")
    ax.set_ylabel("nodes changed")
    ax.set_yscale("symlog", linthresh=1)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
