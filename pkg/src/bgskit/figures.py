"""Matplotlib rendering for evaluation, ranking and benchmark reports.

Each writer produces one PNG next to the delimited report it illustrates.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import RankingTable, ReportTree


def save_metrics_figure(tree: ReportTree, path) -> None:
    """Per-category F-score bars with the overall mean marked."""
    categories = sorted(tree.categories)
    scores = [tree.categories[c].f1 for c in categories]
    fig, ax = plt.subplots(figsize=(max(6, 0.9 * len(categories)), 4))
    ax.bar(range(len(categories)), scores, color="#4878d0")
    ax.axhline(tree.overall.f1, color="#d65f5f", linestyle="--", label=f"overall {tree.overall.f1:.4f}")
    ax.set_xticks(range(len(categories)))
    ax.set_xticklabels(categories, rotation=45, ha="right")
    ax.set_ylabel("F-score")
    ax.set_ylim(0, 1)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_ranking_figure(table: RankingTable, path) -> None:
    """Grouped bars of the two mean ranks per method (lower is better)."""
    methods = list(table.methods)
    x = range(len(methods))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(methods)), 4))
    ax.bar([i - width / 2 for i in x], [table.mean_rank[m] for m in methods], width, label="R")
    ax.bar(
        [i + width / 2 for i in x],
        [table.mean_rank_categories[m] for m in methods],
        width,
        label="R_cat",
    )
    ax.set_xticks(list(x))
    ax.set_xticklabels(methods, rotation=30, ha="right")
    ax.set_ylabel("mean rank (lower is better)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_bench_figure(results: list[tuple[str, float]], path) -> None:
    """Throughput per benchmarked resolution."""
    labels = [label for label, _ in results]
    values = [value for _, value in results]
    fig, ax = plt.subplots(figsize=(max(5, 1.2 * len(labels)), 4))
    ax.bar(range(len(labels)), values, color="#6acc64")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels)
    ax.set_ylabel("augmented triplets / s")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
