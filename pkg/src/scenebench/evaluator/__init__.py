"""Segmentation metrics, QA accuracy tables and fidelity statistics."""

from .fidelity import FidelityStats, QcRecord, fidelity_stats
from .labelmaps import read_pgm, read_raw, write_pgm, write_raw
from .qa import AblationRow, AccuracyRow, ablation_table, aggregate_qa
from .segmentation import (
    ConfusionMatrix,
    LabelMap,
    confusion_accumulate,
    fw_miou,
    mean_accuracy,
    pool,
    relative_change,
)
from .tables import MetricRow, metric_table, relative_change_rows

__all__ = [
    "AblationRow",
    "AccuracyRow",
    "ConfusionMatrix",
    "FidelityStats",
    "LabelMap",
    "MetricRow",
    "QcRecord",
    "ablation_table",
    "aggregate_qa",
    "confusion_accumulate",
    "fidelity_stats",
    "fw_miou",
    "mean_accuracy",
    "metric_table",
    "pool",
    "read_pgm",
    "read_raw",
    "relative_change",
    "relative_change_rows",
    "write_pgm",
    "write_raw",
]
