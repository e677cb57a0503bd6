"""Figures for the report command.

All figures are written with the Agg backend and without a Software tag in
the PNG metadata, so repeated runs with the same matplotlib produce the same
bytes.
"""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

CONDITION_COLORS = {
    "baseline": "#4c72b0",
    "nominal": "#8172b3",
    "camera": "#dd8452",
    "dynamic": "#55a868",
}
METRIC_LABELS = {"mAcc": "mAcc", "f_mIoU": "f-mIoU"}


@contextmanager
def report_style(width=6.0, height=None):
    golden = (np.sqrt(5) - 1.0) / 2.0
    rc = {
        "figure.figsize": (width, height or width * golden),
        "font.size": 9,
        "axes.titlesize": 10,
        "axes.labelsize": 9,
        "legend.fontsize": 8,
        "xtick.labelsize": 7,
        "axes.spines.top": False,
        "axes.spines.right": False,
        "svg.hashsalt": "scenebench",
    }
    with plt.rc_context(rc):
        yield


def _save(fig, path: Path, layout: bool = True) -> Path:
    if layout:
        fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return Path(path)


def _grouped_bars(ax, groups: Sequence[str], series: Mapping[str, Sequence[float]], colors=None):
    n = max(1, len(series))
    width = 0.8 / n
    x = np.arange(len(groups))
    for i, (name, values) in enumerate(series.items()):
        ax.bar(
            x + (i - (n - 1) / 2) * width,
            values,
            width,
            label=name,
            color=(colors or {}).get(name),
        )
    ax.set_xticks(x)
    ax.set_xticklabels(groups)


def plot_relative_change(rows: Sequence[Mapping], path: Path) -> Path:
    """Two panels (mAcc, f-mIoU) of percent change against baseline per method."""
    methods = sorted({r["method"] for r in rows})
    conditions = [c for c in CONDITION_COLORS if any(r["condition"] == c for r in rows)]
    with report_style(height=5.0):
        fig, axes = plt.subplots(2, 1, sharex=True)
        for ax, metric in zip(axes, METRIC_LABELS):
            series = {
                c: [
                    next(
                        (float(r["percent"]) for r in rows
                         if r["method"] == m and r["condition"] == c and r["metric"] == metric),
                        0.0,
                    )
                    for m in methods
                ]
                for c in conditions
            }
            _grouped_bars(ax, methods, series, CONDITION_COLORS)
            ax.axhline(0.0, color="black", linewidth=0.6)
            ax.set_ylabel(f"{METRIC_LABELS[metric]} change, %")
        fig.legend(*axes[0].get_legend_handles_labels(), loc="upper center", frameon=False,
                   ncol=len(conditions))
        fig.tight_layout(rect=(0, 0, 1, 0.94))
        return _save(fig, path, layout=False)


def _group_label(subset: str, category: str, method: str) -> str:
    return f"{subset}\n{category}\n{method}"


def plot_qa_accuracy(rows: Sequence[Mapping], path: Path, source: str = "prompt_gt") -> Path:
    """Accuracy per condition for each (subset, category, method) group of one question source."""
    if any("source" in r for r in rows):
        rows = [r for r in rows if r.get("source") == source]
    conditions = [c for c in CONDITION_COLORS if any(r.get("condition") == c for r in rows)]
    groups = sorted({(r["subset"], r["category"], r["method"]) for r in rows})
    labels = [_group_label(*g) for g in groups]
    series = {
        c: [
            next(
                (float(r["accuracy"]) for r in rows
                 if (r["subset"], r["category"], r["method"]) == g and r.get("condition") == c),
                0.0,
            )
            for g in groups
        ]
        for c in conditions
    }
    with report_style(width=max(6.0, 0.95 * len(groups) + 1.5), height=3.6):
        fig, ax = plt.subplots()
        _grouped_bars(ax, labels, series, CONDITION_COLORS)
        ax.set_ylabel(f"QA accuracy ({source}), %")
        ax.set_ylim(0, 100)
        ax.legend(frameon=False, ncol=len(conditions), loc="lower center", bbox_to_anchor=(0.5, 1.0))
        return _save(fig, path)


def plot_ablation(rows: Sequence[Mapping], path: Path) -> Path:
    groups = [_group_label(r["subset"], r["category"], r["method"]) for r in rows]
    series = {
        "Standard": [float(r["standard"]) for r in rows],
        "PromptGT": [float(r["prompt_gt"]) for r in rows],
    }
    with report_style(width=max(6.0, 0.95 * len(groups) + 1.5), height=3.6):
        fig, ax = plt.subplots()
        _grouped_bars(ax, groups, series, {"Standard": "#937860", "PromptGT": "#4c72b0"})
        ax.set_ylabel("QA accuracy, %")
        ax.set_ylim(0, 100)
        ax.legend(frameon=False, ncol=2, loc="lower center", bbox_to_anchor=(0.5, 1.0))
        return _save(fig, path)
