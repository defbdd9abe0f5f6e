from __future__ import annotations

import numpy as np
import pytest

from streamgrowth.labels import (
    TaskSpec,
    absolute_label,
    growth_fraction,
    make_labels,
    relative_growth_label,
    self_growth_label,
    top_decile_threshold,
)

from conftest import make_dataset, make_record, snap


def _snapshots(values_by_month):
    return [
        snap(m, followers=v, ccv=v, views=v, cheers=v)
        for m, v in enumerate(values_by_month)
    ]


def _dataset(values_by_sid: dict[str, list[float]]):
    return make_dataset(
        [make_record(sid, snapshots=_snapshots(vals)) for sid, vals in values_by_sid.items()]
    )


def test_task_spec_validation():
    TaskSpec("absolute", "followers", 1, 2)
    with pytest.raises(ValueError, match="self_growth"):
        TaskSpec("self_growth", "followers", 1, 2)
    with pytest.raises(ValueError, match="t >= 1"):
        TaskSpec("absolute", "followers", 0, 2)
    with pytest.raises(ValueError, match="horizon"):
        TaskSpec("absolute", "followers", 8, 5)
    with pytest.raises(ValueError, match="task"):
        TaskSpec("clairvoyance", "followers", 1, 2)


def test_top_decile_threshold():
    assert top_decile_threshold(range(1, 11)) == 10  # 10 values -> top 1
    assert top_decile_threshold(range(100)) == 90  # 100 values -> top 10
    assert top_decile_threshold([5.0]) == 5.0


def test_absolute_only_highest_of_ten():
    data = _dataset({f"s{i}": [0.0, 0.0, 0.0, float(i)] for i in range(10)})
    labels = absolute_label(data, TaskSpec("absolute", "followers", 2, 2))
    assert labels.bits == {f"s{i}": int(i == 9) for i in range(10)}


def test_absolute_all_tied_includes_boundary():
    data = _dataset({f"s{i}": [1.0, 1.0, 1.0] for i in range(8)})
    labels = absolute_label(data, TaskSpec("absolute", "followers", 1, 2))
    assert set(labels.bits.values()) == {1}


def test_absolute_rank_11_of_100_excluded():
    data = _dataset({f"s{i:03d}": [0.0, float(i)] for i in range(100)})
    labels = absolute_label(data, TaskSpec("absolute", "followers", 1, 1))
    # values 0..99; top decile is 90..99, so rank 11 (value 89) misses
    assert labels.bits["s089"] == 0
    assert labels.bits["s090"] == 1
    assert sum(labels.bits.values()) == 10


def test_relative_growth_worked_example():
    # 10% growth vs median growth of 5% -> positive
    data = _dataset(
        {
            "fast": [100.0, 100.0, 110.0],
            "median": [100.0, 100.0, 105.0],
            "flat": [100.0, 100.0, 100.0],
        }
    )
    labels = relative_growth_label(data, TaskSpec("relative_growth", "followers", 1, 2))
    assert labels.bits == {"fast": 1, "median": 0, "flat": 0}


def test_relative_growth_exactly_median_is_negative():
    data = _dataset({"a": [10.0, 12.0], "b": [10.0, 12.0]})
    labels = relative_growth_label(data, TaskSpec("relative_growth", "followers", 1, 1))
    assert labels.bits == {"a": 0, "b": 0}


def test_growth_fraction_zero_start_guard():
    assert growth_fraction(0.0, 7.0) == 7.0
    assert growth_fraction(0.5, 7.0) == 6.5  # denominator floored at 1
    assert growth_fraction(100.0, 110.0) == pytest.approx(0.1)


def test_relative_growth_difference_mode():
    data = _dataset(
        {
            "small_base": [1.0, 1.0, 3.0],  # +2 absolute, 200% fractional
            "big_base": [100.0, 100.0, 110.0],  # +10 absolute, 10% fractional
            "flat": [50.0, 50.0, 50.0],
        }
    )
    spec = TaskSpec("relative_growth", "followers", 1, 2)
    frac = relative_growth_label(data, spec, mode="fractional")
    diff = relative_growth_label(data, spec, mode="difference")
    assert frac.bits["small_base"] == 1 and frac.bits["big_base"] == 0
    assert diff.bits["small_base"] == 0 and diff.bits["big_base"] == 1


def test_self_growth_thresholds():
    # value at age a is snapshot a-1: gain = snapshots[t+delta-1] - snapshots[t-1]
    data = _dataset(
        {
            "fast": [0.0, 5.0, 9.0, 13.0, 13.0],  # +13 over delta=3 (threshold 12)
            "exact": [0.0, 4.0, 8.0, 12.0, 12.0],  # +12 exactly
            "slow": [0.0, 1.0, 2.0, 3.0, 3.0],
        }
    )
    labels = self_growth_label(data, TaskSpec("self_growth", "concurrent_viewers", 1, 3))
    assert labels.bits == {"fast": 1, "exact": 1, "slow": 0}


def test_self_growth_inclusive_boundary_delta_two():
    data = _dataset({"a": [0.0, 4.0, 8.0], "b": [0.0, 4.0, 7.9]})
    labels = self_growth_label(data, TaskSpec("self_growth", "concurrent_viewers", 1, 2))
    assert labels.bits == {"a": 1, "b": 0}  # gain 8 >= 4*2; 7.9 < 8


def test_self_growth_negative_gain():
    data = make_dataset(
        [
            make_record("a", snapshots=[snap(m, ccv=v) for m, v in enumerate([5.0, 5.0, 1.0])]),
            make_record("b", snapshots=[snap(m, ccv=v) for m, v in enumerate([0.0, 1.0, 9.0])]),
        ]
    )
    labels = self_growth_label(data, TaskSpec("self_growth", "concurrent_viewers", 1, 2))
    assert labels.bits == {"a": 0, "b": 1}


def test_positive_rate_invariants_random_population():
    rng = np.random.default_rng(11)
    values = {}
    for i in range(173):
        base = float(rng.integers(0, 50))
        growth = rng.integers(0, 10, size=5).astype(float)
        series = base + np.concatenate([[0.0], np.cumsum(growth)])
        values[f"s{i}"] = list(series)
    data = _dataset(values)

    labels = absolute_label(data, TaskSpec("absolute", "followers", 1, 2))
    end_values = [values[sid][2] for sid in labels.bits]
    threshold = top_decile_threshold(end_values)
    tie_mass = sum(1 for v in end_values if v == threshold) / len(end_values)
    rate = sum(labels.bits.values()) / len(labels.bits)
    assert 0.10 <= rate <= 0.10 + tie_mass

    rel = relative_growth_label(data, TaskSpec("relative_growth", "followers", 1, 2))
    rel_rate = sum(rel.bits.values()) / len(rel.bits)
    assert rel_rate <= 0.5


def test_labels_independent_of_iteration_order():
    values = {f"s{i}": [float(i), float(i * 2), float(i * 3)] for i in range(20)}
    data_fwd = _dataset(values)
    data_rev = _dataset(dict(reversed(values.items())))
    spec = TaskSpec("relative_growth", "followers", 1, 2)
    assert make_labels(data_fwd, spec).bits == make_labels(data_rev, spec).bits


def test_eligibility_requires_snapshot_coverage():
    data = make_dataset(
        [
            make_record("long", snapshots=_snapshots([1.0] * 6)),
            make_record("short", snapshots=_snapshots([1.0] * 3)),
        ]
    )
    labels = absolute_label(data, TaskSpec("absolute", "followers", 2, 2))
    assert "short" not in labels.bits and "long" in labels.bits
