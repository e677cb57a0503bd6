"""Candidate prompt pool: near-duplicate removal and max-diversity selection.

Prompts are compared through the cosine similarity of their embeddings.
Selection is greedy farthest-point traversal under the distance
``1 - cosine_similarity``, run independently for each subset.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import jsonio
from .errors import CapacityError, DegenerateInputError, InputError, PreconditionError

SUBSETS = ("furniture", "manipuland")
STATUS_KINDS = ("candidate", "duplicate_of", "selected", "rejected")
DEFAULT_DEDUP_THRESHOLD = 0.92


@dataclass(frozen=True)
class Status:
    kind: str = "candidate"
    of: int | None = None

    def __post_init__(self):
        if self.kind not in STATUS_KINDS:
            raise InputError(f"unknown status kind {self.kind!r}")
        if (self.kind == "duplicate_of") != (self.of is not None):
            raise InputError("'of' is required for duplicate_of and forbidden otherwise")

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.of is not None:
            d["of"] = self.of
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Status":
        return cls(d["kind"], d.get("of"))


CANDIDATE = Status()
SELECTED = Status("selected")
REJECTED = Status("rejected")


@dataclass(frozen=True)
class PromptRecord:
    id: int
    text: str
    subset: str
    embedding: tuple[float, ...] | None = None
    status: Status = field(default=CANDIDATE)

    def __post_init__(self):
        if isinstance(self.id, bool) or not isinstance(self.id, int) or self.id < 0:
            raise InputError(f"prompt id must be a non-negative integer, got {self.id!r}")
        if not self.text:
            raise InputError(f"prompt {self.id} has empty text")
        if self.subset not in SUBSETS:
            raise InputError(f"prompt {self.id}: unknown subset {self.subset!r}")
        if self.embedding is not None:
            object.__setattr__(self, "embedding", check_vector(self.embedding))
        if self.status.kind == "selected" and self.embedding is None:
            raise InputError(f"prompt {self.id} is selected but has no embedding")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "subset": self.subset,
            "embedding": list(self.embedding) if self.embedding is not None else None,
            "status": self.status.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "PromptRecord":
        emb = d.get("embedding")
        return cls(
            id=d["id"],
            text=d["text"],
            subset=d["subset"],
            embedding=tuple(float(v) for v in emb) if emb is not None else None,
            status=Status.from_dict(d.get("status", {"kind": "candidate"})),
        )


@dataclass(frozen=True)
class SelectionPlan:
    pool_size_target: int = 350
    select_count: int = 40
    quotas: Mapping[str, int] = field(
        default_factory=lambda: {"furniture": 24, "manipuland": 16}
    )
    dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD

    def __post_init__(self):
        if self.pool_size_target <= 0 or self.select_count <= 0:
            raise InputError("pool_size_target and select_count must be positive")
        if self.select_count > self.pool_size_target:
            raise InputError("select_count exceeds pool_size_target")
        for subset, q in self.quotas.items():
            if subset not in SUBSETS:
                raise InputError(f"unknown subset {subset!r} in quotas")
            if q < 0:
                raise InputError(f"negative quota for {subset!r}")
        if sum(self.quotas.values()) != self.select_count:
            raise InputError(
                f"quotas sum to {sum(self.quotas.values())}, expected {self.select_count}"
            )
        if not 0.0 < self.dedup_threshold <= 1.0:
            raise InputError("dedup_threshold must lie in (0, 1]")

    @classmethod
    def from_dict(cls, d: Mapping) -> "SelectionPlan":
        return cls(
            pool_size_target=int(d.get("pool_size_target", 350)),
            select_count=int(d.get("select_count", 40)),
            quotas=dict(d.get("quotas", {"furniture": 24, "manipuland": 16})),
            dedup_threshold=float(d.get("dedup_threshold", DEFAULT_DEDUP_THRESHOLD)),
        )

    def to_dict(self) -> dict:
        return {
            "pool_size_target": self.pool_size_target,
            "select_count": self.select_count,
            "quotas": dict(self.quotas),
            "dedup_threshold": self.dedup_threshold,
        }


def check_vector(values: Sequence[float]) -> tuple[float, ...]:
    vec = tuple(float(v) for v in values)
    if not vec:
        raise InputError("embedding must have positive dimension")
    if not all(math.isfinite(v) for v in vec):
        raise InputError("embedding contains non-finite entries")
    return vec


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    """Cosine of the angle between two embedding vectors.

    The result is symmetric in its arguments and clipped to [-1, 1].

    Raises:
        InputError: if the dimensions differ.
        DegenerateInputError: if either vector has zero norm.
    """
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.ndim != 1 or va.shape != vb.shape:
        raise InputError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    na = math.sqrt(float(np.dot(va, va)))
    nb = math.sqrt(float(np.dot(vb, vb)))
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError("cosine similarity is undefined for a zero vector")
    sim = float(np.dot(va, vb)) / (na * nb)
    return min(1.0, max(-1.0, sim))


def _matrix(records: Sequence[PromptRecord]) -> np.ndarray:
    """Pairwise similarity matrix, entry-for-entry equal to ``cosine_similarity``."""
    n = len(records)
    sims = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            sims[i, j] = sims[j, i] = cosine_similarity(records[i].embedding, records[j].embedding)
        sims[i, i] = cosine_similarity(records[i].embedding, records[i].embedding)
    return sims


def _require_embeddings(records: Iterable[PromptRecord]) -> None:
    dim = None
    for r in records:
        if r.embedding is None:
            raise PreconditionError(f"prompt {r.id} has no embedding")
        if dim is None:
            dim = len(r.embedding)
        elif len(r.embedding) != dim:
            raise PreconditionError(
                f"prompt {r.id} has embedding dim {len(r.embedding)}, expected {dim}"
            )


def dedup_pool(
    pool: Sequence[PromptRecord], threshold: float = DEFAULT_DEDUP_THRESHOLD
) -> list[PromptRecord]:
    """Mark near-duplicates, scanning candidates in ascending id order.

    A candidate whose similarity to an earlier retained candidate reaches
    ``threshold`` becomes ``duplicate_of`` the earliest such record. Records
    that are not candidates pass through untouched. Returns a new pool sorted
    by id.
    """
    if not 0.0 < threshold <= 1.0:
        raise InputError("threshold must lie in (0, 1]")
    ordered = sorted(pool, key=lambda r: r.id)
    _check_ids(ordered)
    candidates = [r for r in ordered if r.status.kind == "candidate"]
    _require_embeddings(candidates)

    retained: list[PromptRecord] = []
    verdict: dict[int, Status] = {}
    for rec in candidates:
        dup_of = None
        for kept in retained:
            if cosine_similarity(rec.embedding, kept.embedding) >= threshold:
                dup_of = kept.id
                break
        if dup_of is None:
            retained.append(rec)
        else:
            verdict[rec.id] = Status("duplicate_of", dup_of)
    return [replace(r, status=verdict[r.id]) if r.id in verdict else r for r in ordered]


def _check_ids(ordered: Sequence[PromptRecord]) -> None:
    for a, b in zip(ordered, ordered[1:]):
        if a.id == b.id:
            raise InputError(f"duplicate prompt id {a.id}")


def farthest_point_order(records: Sequence[PromptRecord], k: int) -> list[PromptRecord]:
    """Greedy farthest-point traversal of ``records`` returning ``k`` picks.

    Seeds with the smaller-id member of the maximum-distance pair and then
    repeatedly takes the record whose minimum distance to the picks so far is
    largest. Ties go to the smallest id.
    """
    recs = sorted(records, key=lambda r: r.id)
    if k <= 0:
        return []
    if len(recs) == 1:
        return list(recs)
    dist = 1.0 - _matrix(recs)
    n = len(recs)
    best = (-math.inf, 0)
    for i, j in itertools.combinations(range(n), 2):
        # strict comparison keeps the lexicographically first pair on ties
        if dist[i, j] > best[0]:
            best = (dist[i, j], i)
    picked = [best[1]]
    mind = dist[best[1]].copy()
    mind[best[1]] = -math.inf
    while len(picked) < k:
        nxt = int(np.argmax(mind))  # argmax returns the first maximum, i.e. smallest id
        picked.append(nxt)
        mind = np.minimum(mind, dist[nxt])
        mind[picked] = -math.inf
    return [recs[i] for i in picked]


def select_diverse(pool: Sequence[PromptRecord], plan: SelectionPlan) -> list[PromptRecord]:
    """Pick ``plan.quotas[subset]`` diverse prompts per subset.

    Only records with status ``candidate`` take part. Subsets are handled in
    name order; the returned records carry status ``selected`` and are listed
    in selection order.

    Raises:
        CapacityError: when a subset has fewer candidates than its quota.
    """
    retained = [r for r in pool if r.status.kind == "candidate"]
    _check_ids(sorted(retained, key=lambda r: r.id))
    _require_embeddings(retained)
    out: list[PromptRecord] = []
    for subset in sorted(plan.quotas):
        quota = plan.quotas[subset]
        members = [r for r in retained if r.subset == subset]
        if len(members) < quota:
            raise CapacityError(subset, quota - len(members))
        out.extend(replace(r, status=SELECTED) for r in farthest_point_order(members, quota))
    return out


def apply_selection(
    pool: Sequence[PromptRecord], selection: Sequence[PromptRecord]
) -> list[PromptRecord]:
    """Mark selected records and reject the remaining candidates."""
    chosen = {r.id for r in selection}
    out = []
    for r in sorted(pool, key=lambda r: r.id):
        if r.id in chosen:
            out.append(replace(r, status=SELECTED))
        elif r.status.kind == "candidate":
            out.append(replace(r, status=REJECTED))
        else:
            out.append(r)
    return out


def plan_summary(plan: SelectionPlan, pool: Sequence[PromptRecord]) -> dict:
    counts = {s: {k: 0 for k in STATUS_KINDS} for s in SUBSETS}
    for r in pool:
        counts[r.subset][r.status.kind] += 1
    totals = {k: sum(counts[s][k] for s in SUBSETS) for k in STATUS_KINDS}
    return {
        "pool_size": len(pool),
        "pool_size_target": plan.pool_size_target,
        "select_count": plan.select_count,
        "quotas": dict(plan.quotas),
        "by_subset": counts,
        "totals": totals,
    }


def read_pool(path: Path) -> list[PromptRecord]:
    return [PromptRecord.from_dict(d) for d in jsonio.read_jsonl(path)]


def write_pool(path: Path, pool: Iterable[PromptRecord]) -> None:
    rows = [r.to_dict() for r in sorted(pool, key=lambda r: r.id)]
    jsonio.write_jsonl(path, rows, digits=None)
