import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scenebench.errors import (
    CapacityError,
    DegenerateInputError,
    InputError,
    PreconditionError,
)
from scenebench.prompt_pool import (
    CANDIDATE,
    PromptRecord,
    SelectionPlan,
    Status,
    apply_selection,
    cosine_similarity,
    dedup_pool,
    farthest_point_order,
    plan_summary,
    read_pool,
    select_diverse,
    write_pool,
)


def rec(i, vec, subset="furniture", status=CANDIDATE):
    return PromptRecord(i, f"prompt {i}", subset, tuple(vec), status)


def min_pairwise(vectors, dist):
    return min(dist(a, b) for a, b in itertools.combinations(vectors, 2))


def cos_dist(a, b):
    return 1.0 - float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))


def chord_dist(a, b):
    return math.sqrt(max(0.0, 2.0 * cos_dist(a, b)))


# -- cosine similarity -----------------------------------------------------


def test_cosine_examples():
    assert cosine_similarity([1, 0], [1, 0]) == pytest.approx(1.0)
    assert cosine_similarity([1, 0], [0, 1]) == pytest.approx(0.0)
    assert cosine_similarity([1, 0], [-1, 0]) == pytest.approx(-1.0)
    assert cosine_similarity([3, 4], [6, 8]) == pytest.approx(1.0)


def test_cosine_errors():
    with pytest.raises(InputError):
        cosine_similarity([1, 0], [1, 0, 0])
    with pytest.raises(DegenerateInputError):
        cosine_similarity([0, 0], [1, 0])


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=3),
    st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=3),
)
def test_cosine_symmetric_and_bounded(a, b):
    if np.linalg.norm(a) < 1e-6 or np.linalg.norm(b) < 1e-6:
        return
    s = cosine_similarity(a, b)
    assert -1.0 <= s <= 1.0
    assert s == cosine_similarity(b, a)


# -- records and plans -----------------------------------------------------


def test_record_validation():
    with pytest.raises(InputError):
        PromptRecord(-1, "x", "furniture")
    with pytest.raises(InputError):
        PromptRecord(0, "", "furniture")
    with pytest.raises(InputError):
        PromptRecord(0, "x", "kitchenware")
    with pytest.raises(InputError):
        PromptRecord(0, "x", "furniture", status=Status("selected"))
    with pytest.raises(InputError):
        Status("duplicate_of")


def test_plan_validation():
    assert SelectionPlan().quotas == {"furniture": 24, "manipuland": 16}
    with pytest.raises(InputError):
        SelectionPlan(quotas={"furniture": 20, "manipuland": 16})
    with pytest.raises(InputError):
        SelectionPlan(pool_size_target=10, select_count=40)
    with pytest.raises(InputError):
        SelectionPlan(dedup_threshold=0.0)


def test_pool_round_trip(tmp_path):
    pool = [rec(0, [0.1, 0.2]), rec(1, [1 / 3, 2 / 3], status=Status("duplicate_of", 0))]
    write_pool(tmp_path / "p.jsonl", pool)
    assert read_pool(tmp_path / "p.jsonl") == pool


# -- dedup -----------------------------------------------------------------


def test_dedup_marks_earliest_retained():
    pool = [
        rec(2, [1.0, 0.01]),
        rec(0, [1.0, 0.0]),
        rec(1, [0.0, 1.0]),
        rec(3, [0.02, 1.0]),
    ]
    out = dedup_pool(pool, 0.99)
    assert [r.id for r in out] == [0, 1, 2, 3]
    assert out[2].status == Status("duplicate_of", 0)
    assert out[3].status == Status("duplicate_of", 1)
    assert out[0].status == out[1].status == CANDIDATE


def test_dedup_chain_refers_to_retained_only():
    # 1 duplicates 0, 2 is close to 1 but not to 0: 2 stays, since 1 was not retained
    a = [1.0, 0.0]
    b = [math.cos(0.3), math.sin(0.3)]
    c = [math.cos(0.6), math.sin(0.6)]
    out = dedup_pool([rec(0, a), rec(1, b), rec(2, c)], math.cos(0.35))
    assert out[1].status == Status("duplicate_of", 0)
    assert out[2].status == CANDIDATE


def test_dedup_threshold_is_inclusive():
    out = dedup_pool([rec(0, [1.0, 0.0]), rec(1, [2.0, 0.0])], 1.0)
    assert out[1].status.kind == "duplicate_of"


def test_dedup_requires_embeddings():
    with pytest.raises(PreconditionError):
        dedup_pool([PromptRecord(0, "x", "furniture")])
    with pytest.raises(PreconditionError):
        dedup_pool([rec(0, [1, 0]), rec(1, [1, 0, 0])])


def test_dedup_rejects_duplicate_ids():
    with pytest.raises(InputError):
        dedup_pool([rec(0, [1, 0]), rec(0, [0, 1])])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.3, 0.99))
def test_dedup_is_idempotent(seed, t):
    vecs = np.random.default_rng(seed).normal(size=(12, 3))
    once = dedup_pool([rec(i, v) for i, v in enumerate(vecs)], t)
    assert dedup_pool(once, t) == once


# -- selection -------------------------------------------------------------


def test_farthest_point_seed_and_ties():
    # 0 and 2 are antipodal; 1 and 3 tie at 90 degrees from both, smaller id wins
    recs = [rec(0, [1, 0]), rec(1, [0, 1]), rec(2, [-1, 0]), rec(3, [0, -1])]
    assert [r.id for r in farthest_point_order(recs, 4)] == [0, 2, 1, 3]


def test_farthest_point_degenerate_sizes():
    assert farthest_point_order([rec(5, [1, 0])], 1)[0].id == 5
    assert farthest_point_order([rec(5, [1, 0])], 0) == []


def test_select_quota_and_capacity():
    pool = [rec(i, [math.cos(i), math.sin(i)], "furniture" if i < 5 else "manipuland") for i in range(8)]
    plan = SelectionPlan(8, 3, {"furniture": 2, "manipuland": 1})
    chosen = select_diverse(pool, plan)
    assert [r.subset for r in chosen] == ["furniture", "furniture", "manipuland"]
    assert all(r.status.kind == "selected" for r in chosen)
    with pytest.raises(CapacityError) as err:
        select_diverse(pool, SelectionPlan(8, 4, {"furniture": 0, "manipuland": 4}))
    assert err.value.shortfall == 1


def test_select_ignores_duplicates():
    pool = [rec(0, [1, 0]), rec(1, [-1, 0], status=Status("duplicate_of", 0)), rec(2, [0, 1])]
    chosen = select_diverse(pool, SelectionPlan(3, 2, {"furniture": 2}))
    assert sorted(r.id for r in chosen) == [0, 2]


def test_apply_selection_and_summary():
    pool = [rec(0, [1, 0]), rec(1, [0, 1]), rec(2, [1, 0.01], status=Status("duplicate_of", 0))]
    plan = SelectionPlan(3, 1, {"furniture": 1})
    final = apply_selection(pool, select_diverse(pool, plan))
    kinds = [r.status.kind for r in final]
    assert kinds == ["selected", "rejected", "duplicate_of"]
    s = plan_summary(plan, final)
    assert s["totals"] == {"candidate": 0, "duplicate_of": 1, "selected": 1, "rejected": 1}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(3, 10))
def test_greedy_half_bound_in_chord_metric(seed, dim, n):
    """The greedy traversal is a 2-approximation of max-min dispersion in a metric.

    Selection order only depends on the ordering of distances, and chord
    distance is a monotone function of 1 - cos that satisfies the triangle
    inequality, so the bound is checked in chord distance at low dimension.
    """
    rng = np.random.default_rng(seed)
    vecs = rng.normal(size=(n, dim))
    k = int(rng.integers(2, n + 1))
    recs = [rec(i, v) for i, v in enumerate(vecs)]
    picked = [np.array(r.embedding) for r in farthest_point_order(recs, k)]
    greedy = min_pairwise(picked, chord_dist)
    best = max(min_pairwise([vecs[i] for i in c], chord_dist) for c in itertools.combinations(range(n), k))
    assert greedy >= 0.5 * best - 1e-12
