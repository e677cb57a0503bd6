"""QA accuracy tables: grouped accuracy and the question-source ablation."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..errors import CoverageError, InputError
from ..question_gen import Verdict

GROUP_KEYS = ("subset", "category", "method", "condition", "source")


@dataclass(frozen=True)
class AccuracyRow:
    key: tuple[tuple[str, str], ...]
    correct: int
    total: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.total

    @property
    def percent(self) -> float:
        """Accuracy in percent, rounded to one decimal for presentation."""
        return round(100.0 * self.correct / self.total, 1)

    def as_dict(self) -> dict:
        return {**dict(self.key), "correct": self.correct, "total": self.total, "accuracy": self.percent}


def aggregate_qa(
    verdicts: Iterable[Verdict], group_keys: Sequence[str] = GROUP_KEYS
) -> list[AccuracyRow]:
    """Accuracy per group, groups sorted lexicographically by key values."""
    for k in group_keys:
        if k not in GROUP_KEYS:
            raise InputError(f"unknown group key {k!r}")
    tally: dict[tuple, list[int]] = defaultdict(lambda: [0, 0])
    for v in verdicts:
        key = tuple(getattr(v, k) for k in group_keys)
        tally[key][0] += int(v.correct)
        tally[key][1] += 1
    return [
        AccuracyRow(tuple(zip(group_keys, key)), c, n) for key, (c, n) in sorted(tally.items())
    ]


@dataclass(frozen=True)
class AblationRow:
    subset: str
    category: str
    method: str
    standard: AccuracyRow
    prompt_gt: AccuracyRow

    def as_dict(self) -> dict:
        return {
            "subset": self.subset,
            "category": self.category,
            "method": self.method,
            "standard": self.standard.percent,
            "prompt_gt": self.prompt_gt.percent,
        }


def ablation_table(
    verdicts: Iterable[Verdict],
    rows: Sequence[tuple[str, str, str]] | None = None,
    condition: str | None = "baseline",
) -> list[AblationRow]:
    """Standard vs prompt-grounded accuracy per (subset, category, method).

    Only verdicts for ``condition`` are used (``None`` pools all conditions).
    Without explicit ``rows`` every row seen under either source is reported.

    Raises:
        CoverageError: a requested row lacks one of the two sources.
    """
    selected = [v for v in verdicts if condition is None or v.condition == condition]
    grouped: Mapping = {
        tuple(dict(r.key)[k] for k in ("subset", "category", "method", "source")): r
        for r in aggregate_qa(selected, ("subset", "category", "method", "source"))
    }
    if rows is None:
        rows = sorted({k[:3] for k in grouped})
    out = []
    for row in rows:
        std = grouped.get((*row, "standard"))
        pgt = grouped.get((*row, "prompt_gt"))
        missing = [name for name, r in (("standard", std), ("prompt_gt", pgt)) if r is None]
        if missing:
            raise CoverageError(f"ablation row {row} has no {' or '.join(missing)} verdicts")
        out.append(AblationRow(*row, std, pgt))
    return out
