"""Metric tables and their delimited-file layouts."""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..errors import EmptyEvaluationError, InputError
from ..scene_adapter.lighting import CONDITIONS
from .labelmaps import load_label_map
from .qa import AblationRow, AccuracyRow
from .segmentation import ConfusionMatrix, confusion_accumulate, fw_miou, mean_accuracy, pool, relative_change

METRICS = ("mAcc", "f_mIoU")


@dataclass(frozen=True)
class MetricRow:
    method: str
    condition: str
    mAcc: float
    f_mIoU: float
    scenes: int
    frames: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _condition_order(c: str) -> int:
    return CONDITIONS.index(c) if c in CONDITIONS else len(CONDITIONS)


def metric_table(
    pairs: Sequence[Mapping],
    num_classes: int,
    base: Path,
    pooling: str = "scene",
    include_absent_classes: bool = False,
) -> list[MetricRow]:
    """Segmentation metrics per (method, condition).

    ``pooling="scene"`` sums the confusion matrices of all frames of a scene,
    computes the metrics per scene and averages over scenes. ``"frame"``
    computes the metrics per frame and averages over frames.

    Raises:
        EmptyEvaluationError: no pairs listed.
    """
    if not pairs:
        raise EmptyEvaluationError("no label-map pairs listed in the run manifest")
    if pooling not in ("scene", "frame"):
        raise InputError(f"unknown pooling mode {pooling!r}")
    frames: dict[tuple[str, str], dict[str, list[ConfusionMatrix]]] = defaultdict(lambda: defaultdict(list))
    for entry in pairs:
        gt = load_label_map(entry, base, "gt")
        pred = load_label_map(entry, base, "pred")
        cm = confusion_accumulate(gt, pred, num_classes)
        frames[(entry["method"], entry["condition"])][entry["scene_id"]].append(cm)

    rows = []
    for (method, cond), scenes in sorted(frames.items(), key=lambda kv: (kv[0][0], _condition_order(kv[0][1]))):
        if pooling == "scene":
            units = [pool(cms) for _, cms in sorted(scenes.items())]
        else:
            units = [cm for _, cms in sorted(scenes.items()) for cm in cms]
        macc = sum(mean_accuracy(u, include_absent_classes) for u in units) / len(units)
        fiou = sum(fw_miou(u) for u in units) / len(units)
        rows.append(
            MetricRow(method, cond, macc, fiou, len(scenes), sum(len(c) for c in scenes.values()))
        )
    return rows


def relative_change_rows(rows: Iterable[MetricRow]) -> list[dict]:
    """Percent change of every non-baseline cell against its method's baseline."""
    by_key = {(r.method, r.condition): r for r in rows}
    out = []
    for (method, cond), r in sorted(by_key.items(), key=lambda kv: (kv[0][0], _condition_order(kv[0][1]))):
        if cond == "baseline":
            continue
        base = by_key.get((method, "baseline"))
        if base is None:
            raise EmptyEvaluationError(f"method {method!r} has no baseline row")
        for metric in METRICS:
            out.append(
                {
                    "method": method,
                    "condition": cond,
                    "metric": metric,
                    "percent": relative_change(getattr(r, metric), getattr(base, metric)),
                }
            )
    return out


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_relative_change_csv(path: Path, rows: Iterable[Mapping]) -> None:
    _write_csv(
        path,
        ["method", "condition", "metric", "percent"],
        ([r["method"], r["condition"], r["metric"], f"{r['percent']:.2f}"] for r in rows),
    )


def write_qa_csv(path: Path, rows: Sequence[AccuracyRow]) -> None:
    keys = [k for k, _ in rows[0].key] if rows else ["subset", "category", "method", "condition", "source"]
    _write_csv(
        path,
        [*keys, "correct", "total", "accuracy"],
        ([*(v for _, v in r.key), r.correct, r.total, f"{r.percent:.1f}"] for r in rows),
    )


def write_ablation_csv(path: Path, rows: Sequence[AblationRow]) -> None:
    _write_csv(
        path,
        ["subset", "category", "method", "standard", "prompt_gt"],
        (
            [r.subset, r.category, r.method, f"{r.standard.percent:.1f}", f"{r.prompt_gt.percent:.1f}"]
            for r in rows
        ),
    )


def read_csv(path: Path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
