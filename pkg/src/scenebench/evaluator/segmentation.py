"""Pixel-level semantic segmentation metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import DegenerateBaselineError, DimensionMismatchError, EmptyEvaluationError, LabelRangeError

IGNORE_ID = -1


@dataclass(frozen=True)
class LabelMap:
    width: int
    height: int
    labels: np.ndarray  # shape (height, width), int64
    ignore_id: int = IGNORE_ID

    def __post_init__(self):
        arr = np.asarray(self.labels, dtype=np.int64)
        if self.width <= 0 or self.height <= 0:
            raise DimensionMismatchError("label map dimensions must be positive")
        if arr.size != self.width * self.height:
            raise DimensionMismatchError(
                f"label map has {arr.size} entries, expected {self.width}x{self.height}"
            )
        object.__setattr__(self, "labels", arr.reshape(self.height, self.width))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ignore_id: int = IGNORE_ID) -> "LabelMap":
        arr = np.asarray(rows, dtype=np.int64)
        return cls(arr.shape[1], arr.shape[0], arr, ignore_id)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are ground-truth classes, columns are predicted classes."""

    counts: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.counts.shape[0]

    @classmethod
    def zeros(cls, num_classes: int) -> "ConfusionMatrix":
        return cls(np.zeros((num_classes, num_classes), dtype=np.int64))

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if other.num_classes != self.num_classes:
            raise DimensionMismatchError("cannot add confusion matrices of different size")
        return ConfusionMatrix(self.counts + other.counts)

    def to_list(self) -> list[list[int]]:
        return self.counts.tolist()


def _check_range(lm: LabelMap, num_classes: int, which: str, allow_ignore: bool) -> None:
    lab = lm.labels
    bad = (lab >= num_classes) | (lab < 0)
    if allow_ignore:
        bad &= lab != lm.ignore_id
    if bad.any():
        r, c = (int(v) for v in np.argwhere(bad)[0])
        raise LabelRangeError(
            f"{which} label {int(lab[r, c])} at row {r}, column {c} is outside [0, {num_classes})"
        )


def confusion_accumulate(gt: LabelMap, pred: LabelMap, num_classes: int) -> ConfusionMatrix:
    """Count (ground truth, prediction) pixel pairs, skipping ignored ground truth.

    Raises:
        DimensionMismatchError: the maps differ in size.
        LabelRangeError: an id outside ``[0, num_classes)`` (names id and position).
    """
    if (gt.width, gt.height) != (pred.width, pred.height):
        raise DimensionMismatchError(
            f"ground truth is {gt.width}x{gt.height}, prediction is {pred.width}x{pred.height}"
        )
    _check_range(gt, num_classes, "ground-truth", allow_ignore=True)
    keep = gt.labels != gt.ignore_id
    _check_range(
        LabelMap(pred.width, pred.height, np.where(keep, pred.labels, 0)), num_classes, "predicted", False
    )
    g = gt.labels[keep]
    p = pred.labels[keep]
    counts = np.bincount(g * num_classes + p, minlength=num_classes**2)
    return ConfusionMatrix(counts.reshape(num_classes, num_classes).astype(np.int64))


def pool(matrices: Iterable[ConfusionMatrix]) -> ConfusionMatrix:
    it = iter(matrices)
    try:
        total = next(it)
    except StopIteration:
        raise EmptyEvaluationError("no confusion matrices to pool") from None
    for m in it:
        total = total + m
    return total


def _gt_rows(cm: ConfusionMatrix) -> np.ndarray:
    rows = cm.counts.sum(axis=1)
    if not rows.any():
        raise EmptyEvaluationError("no ground-truth pixels to evaluate")
    return rows


def mean_accuracy(cm: ConfusionMatrix, include_absent_classes: bool = False) -> float:
    """Mean per-class pixel accuracy.

    Classes without ground-truth pixels are left out unless
    ``include_absent_classes`` is set, in which case they count as zero.
    """
    rows = _gt_rows(cm)
    diag = np.diag(cm.counts).astype(float)
    present = rows > 0
    acc = np.zeros(cm.num_classes)
    acc[present] = diag[present] / rows[present]
    if include_absent_classes:
        return float(acc.mean())
    return float(acc[present].mean())


def fw_miou(cm: ConfusionMatrix) -> float:
    """Frequency-weighted IoU: per-class IoU weighted by ground-truth share."""
    rows = _gt_rows(cm)
    cols = cm.counts.sum(axis=0)
    diag = np.diag(cm.counts).astype(float)
    present = rows > 0
    union = rows + cols - diag
    iou = np.zeros(cm.num_classes)
    iou[present] = diag[present] / union[present]
    weights = rows / rows.sum()
    return float((weights * iou).sum())


def relative_change(value: float, baseline: float) -> float:
    """Signed percent change of ``value`` with respect to ``baseline``."""
    if not baseline > 0:
        raise DegenerateBaselineError(f"baseline must be positive, got {baseline}")
    return 100.0 * (value - baseline) / baseline
