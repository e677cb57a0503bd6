from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from ..errors import InputError


@dataclass(frozen=True)
class QcRecord:
    """Manual prompt-to-scene check of one synthesized scene."""

    scene_id: str
    prompted_object_count: int
    missing_objects: int = 0
    excluded: bool = False

    def __post_init__(self):
        if self.prompted_object_count < 1:
            raise InputError(f"{self.scene_id}: prompted_object_count must be >= 1")
        if not 0 <= self.missing_objects <= self.prompted_object_count:
            raise InputError(f"{self.scene_id}: missing_objects out of range")

    @classmethod
    def from_dict(cls, d: Mapping) -> "QcRecord":
        return cls(
            scene_id=str(d["scene_id"]),
            prompted_object_count=int(d["prompted_object_count"]),
            missing_objects=int(d.get("missing_objects", 0)),
            excluded=bool(d.get("excluded", False)),
        )


@dataclass(frozen=True)
class FidelityStats:
    scene_match_rate: float
    object_fidelity_lower_bound: float
    scenes: int
    missing_objects: int

    def as_dict(self) -> dict:
        return {
            "scene_match_rate": self.scene_match_rate,
            "object_fidelity_lower_bound": self.object_fidelity_lower_bound,
            "scene_match_percent": round(100 * self.scene_match_rate, 1),
            "object_fidelity_percent": round(100 * self.object_fidelity_lower_bound, 1),
            "scenes": self.scenes,
            "missing_objects": self.missing_objects,
        }


def fidelity_stats(records: Sequence[QcRecord], min_objects_assumed: int) -> FidelityStats:
    """Scene-level full-match rate and a conservative object-level fidelity bound.

    The bound assumes each retained scene prompted ``min_objects_assumed``
    objects: ``1 - total_missing / (scenes * min_objects_assumed)``.
    Excluded records are dropped first. Computed with exact rationals.
    """
    if min_objects_assumed < 1:
        raise InputError("min_objects_assumed must be positive")
    kept = [r for r in records if not r.excluded]
    if not kept:
        raise InputError("no retained QC records")
    n = len(kept)
    missing = sum(r.missing_objects for r in kept)
    match = Fraction(sum(r.missing_objects == 0 for r in kept), n)
    bound = 1 - Fraction(missing, n * min_objects_assumed)
    return FidelityStats(float(match), float(bound), n, missing)
