"""Figure rendering for reports (written to files next to the text output)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .graph import GraphStats
from .pipeline import ErrorType, EvalReport

_CATEGORY_COLORS = {
    "DiseaseCondition": "#e377c2",
    "TreatmentOption": "#2ca02c",
    "Evaluation": "#c49c94",
    "unlabeled": "#7f7f7f",
}


def save_stats_figure(graph_stats: GraphStats, path: str | Path) -> Path:
    """Bar charts of node counts per category and edge counts per relation."""
    fig, (ax_nodes, ax_edges) = plt.subplots(1, 2, figsize=(9, 3.5))
    node_items = [(k, v) for k, v in graph_stats.nodes_by_category.items() if v]
    edge_items = [(k, v) for k, v in graph_stats.edges_by_relation.items() if v]
    for ax, items, title, total in (
        (ax_nodes, node_items, "Nodes by category", graph_stats.node_total),
        (ax_edges, edge_items, "Edges by relation", graph_stats.edge_total),
    ):
        labels = [k for k, _ in items]
        values = [v for _, v in items]
        colors = [_CATEGORY_COLORS.get(k, "#1f77b4") for k in labels]
        ax.bar(range(len(items)), values, color=colors)
        ax.set_xticks(range(len(items)))
        ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
        ax.set_title(f"{title} (total {total})", fontsize=10)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def save_eval_figure(report: EvalReport, path: str | Path) -> Path:
    """Grouped bars of per-set error percentages with the overall line."""
    set_names = sorted(report.set_totals)
    error_types = list(ErrorType)
    width = 0.8 / (len(set_names) + 1)
    fig, ax = plt.subplots(figsize=(7, 4))
    for offset, name in enumerate(set_names):
        values = [float(report.percent(name, e)) for e in error_types]
        positions = [i + offset * width for i in range(len(error_types))]
        ax.bar(positions, values, width=width, label=f"Set {name} (n={report.set_totals[name]})")
    overall = [float(report.overall_percent(e)) for e in error_types]
    positions = [i + len(set_names) * width for i in range(len(error_types))]
    ax.bar(positions, overall, width=width, label="Overall", color="#444444")
    ax.set_xticks([i + width * len(set_names) / 2 for i in range(len(error_types))])
    ax.set_xticklabels([e.display_name for e in error_types])
    ax.set_ylabel("% of generated queries")
    ax.set_title("Generated-query error breakdown")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
