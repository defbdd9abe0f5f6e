"""Binary outcome variables for the prediction tasks.

Three tasks over the four popularity measures:

* ``absolute``        — in the top 10% of the measure at age ``t+delta``
* ``relative_growth`` — fractional growth over ``[t, t+delta]`` above the
                        population median growth
* ``self_growth``     — concurrent viewership gained at >= 4 viewers/month,
                        the pace that reaches partner-tier audience size
                        (about 100 average concurrent viewers) in two years
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

from .data import Dataset, MEASURES, measure_value

TASKS = ("absolute", "relative_growth", "self_growth")

SELF_GROWTH_VIEWERS_PER_MONTH = 4.0
MAX_HORIZON_MONTHS = 12


@dataclass(frozen=True)
class TaskSpec:
    task: str
    measure: str
    t: int
    delta: int

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.measure not in MEASURES:
            raise ValueError(f"unknown measure {self.measure!r}")
        if self.task == "self_growth" and self.measure != "concurrent_viewers":
            raise ValueError("self_growth is defined on concurrent_viewers only")
        if self.t < 1 or self.delta < 1:
            raise ValueError(f"need t >= 1 and delta >= 1, got t={self.t} delta={self.delta}")
        if self.t + self.delta > MAX_HORIZON_MONTHS:
            raise ValueError(
                f"window [{self.t}, {self.t + self.delta}] exceeds the "
                f"{MAX_HORIZON_MONTHS}-month analysis horizon"
            )


@dataclass
class LabelSet:
    spec: TaskSpec
    bits: dict[str, int]


def eligible_ids(dataset: Dataset, spec: TaskSpec) -> list[str]:
    """Streamers with snapshots through the end of the task window."""
    need = spec.t + spec.delta
    return [sid for sid in dataset.streamer_ids() if dataset.streamers[sid].n_months >= need]


def top_decile_threshold(values) -> float:
    """Smallest value still inside the top 10%: the k-th largest with
    ``k = ceil(0.1 * n)``, so ``v >= threshold`` marks the top decile
    (boundary ties included)."""
    ordered = sorted(values, reverse=True)
    if not ordered:
        raise ValueError("top_decile_threshold of empty value set")
    k = max(1, math.ceil(0.1 * len(ordered)))
    return float(ordered[k - 1])


def absolute_label(dataset: Dataset, spec: TaskSpec) -> LabelSet:
    """1 iff the measure at age ``t+delta`` reaches the top-decile value."""
    ids = eligible_ids(dataset, spec)
    if not ids:
        raise ValueError("no streamer covers the task window")
    end = spec.t + spec.delta
    values = {
        sid: measure_value(dataset.streamers[sid], spec.measure, end) for sid in ids
    }
    threshold = top_decile_threshold(values.values())
    return LabelSet(spec, {sid: int(values[sid] >= threshold) for sid in ids})


def growth_fraction(value_start: float, value_end: float) -> float:
    """Fractional growth with the denominator floored at 1 so zero-start
    streamers stay finite and comparable."""
    return (value_end - value_start) / max(value_start, 1.0)


def relative_growth_label(
    dataset: Dataset, spec: TaskSpec, mode: str = "fractional"
) -> LabelSet:
    """1 iff the streamer's growth over the window beats the median growth.

    ``mode="fractional"`` (default) uses percentage-style growth; the
    ``"difference"`` mode uses the raw end-minus-start difference instead and
    is provided for comparison only.
    """
    if mode not in ("fractional", "difference"):
        raise ValueError(f"unknown growth mode {mode!r}")
    ids = eligible_ids(dataset, spec)
    if not ids:
        raise ValueError("no streamer covers the task window")
    growths = {}
    for sid in ids:
        record = dataset.streamers[sid]
        start = measure_value(record, spec.measure, spec.t)
        end = measure_value(record, spec.measure, spec.t + spec.delta)
        growths[sid] = (
            growth_fraction(start, end) if mode == "fractional" else end - start
        )
    cut = statistics.median(growths.values())
    return LabelSet(spec, {sid: int(growths[sid] > cut) for sid in ids})


def self_growth_label(dataset: Dataset, spec: TaskSpec) -> LabelSet:
    """1 iff concurrent viewership grew by at least 4 viewers per month."""
    if spec.measure != "concurrent_viewers":
        raise ValueError("self_growth is defined on concurrent_viewers only")
    ids = eligible_ids(dataset, spec)
    if not ids:
        raise ValueError("no streamer covers the task window")
    needed = SELF_GROWTH_VIEWERS_PER_MONTH * spec.delta
    bits = {}
    for sid in ids:
        record = dataset.streamers[sid]
        gain = measure_value(record, spec.measure, spec.t + spec.delta) - measure_value(
            record, spec.measure, spec.t
        )
        bits[sid] = int(gain >= needed)
    return LabelSet(spec, bits)


def make_labels(dataset: Dataset, spec: TaskSpec, growth_mode: str = "fractional") -> LabelSet:
    if spec.task == "absolute":
        return absolute_label(dataset, spec)
    if spec.task == "relative_growth":
        return relative_growth_label(dataset, spec, mode=growth_mode)
    return self_growth_label(dataset, spec)
