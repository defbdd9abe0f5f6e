"""Rule-following bits: percentile cutoff search and feature binarization.

For each feature, a cutoff is picked on a 101-point percentile grid so that
the share of "popular" streamers above the cutoff differs most from the share
of "unpopular" streamers above it.  A streamer follows the rule (bit = 1)
when their raw windowed feature value is strictly above the cutoff.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .features import FEATURE_NAMES

K_GRID = tuple(i / 100.0 for i in range(101))


def percentile(values: Sequence[float], k: float) -> float:
    """Nearest-rank percentile: the ``ceil(k*n)``-th smallest value (1-based),
    the minimum for k = 0."""
    if len(values) == 0:
        raise ValueError("percentile of empty value set")
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"percentile fraction {k} outside [0, 1]")
    ordered = sorted(values)
    idx = max(math.ceil(k * len(ordered)) - 1, 0)
    return float(ordered[idx])


def compute_cutoff(
    values: Sequence[float], popular_mask: Sequence[bool]
) -> tuple[float, float]:
    """Pick the percentile cutoff separating popular from unpopular streamers.

    Sweeps k over {0.00, 0.01, ..., 1.00}; for each k the candidate cutoff is
    the k-th percentile of all values pooled, and the objective is
    ``|pop_k - unpop_k|`` where ``pop_k`` is the fraction of popular
    streamers strictly above the candidate (``unpop_k`` likewise).  Returns
    ``(k_star, c_f)`` for the maximizing k, ties broken by smallest k.
    """
    vals = np.asarray(values, dtype=float)
    mask = np.asarray(popular_mask, dtype=bool)
    if vals.shape != mask.shape:
        raise ValueError("values and popular_mask length mismatch")
    n_pop = int(mask.sum())
    n_unpop = int((~mask).sum())
    if n_pop == 0 or n_unpop == 0:
        raise ValueError("need at least one popular and one unpopular streamer")

    ordered = np.sort(vals)
    n = len(ordered)
    idx = np.maximum(np.ceil(np.array(K_GRID) * n).astype(int) - 1, 0)
    thresholds = ordered[idx]

    pop_sorted = np.sort(vals[mask])
    unpop_sorted = np.sort(vals[~mask])
    # integer counts strictly above each threshold; the objective arithmetic
    # (count/total) is kept in this exact form so ties break identically to a
    # plain exhaustive scan
    pop_above = n_pop - np.searchsorted(pop_sorted, thresholds, side="right")
    unpop_above = n_unpop - np.searchsorted(unpop_sorted, thresholds, side="right")
    objective = np.abs(pop_above / n_pop - unpop_above / n_unpop)

    best = int(np.argmax(objective))  # first max = smallest k
    return K_GRID[best], float(thresholds[best])


@dataclass(frozen=True)
class CutoffEntry:
    k_star: float
    c_f: float


@dataclass
class CutoffTable:
    """Per-feature cutoffs, tagged with the popularity measure and the age
    window whose end defined "popular" when they were fit."""

    measure: str
    t: int
    delta: int
    entries: dict[str, CutoffEntry] = field(default_factory=dict)

    def cutoff(self, feature: str) -> float:
        try:
            return self.entries[feature].c_f
        except KeyError:
            raise KeyError(f"no cutoff fitted for feature {feature!r}") from None


def fit_cutoff_table(
    feature_rows: Mapping[str, Mapping[str, float]],
    popular_ids: Iterable[str],
    measure: str,
    t: int,
    delta: int,
    method: str = "argmax",
) -> CutoffTable:
    """Fit cutoffs for all features from per-streamer raw feature vectors.

    ``method`` is ``"argmax"`` for the popular/unpopular separation search or
    ``"median"`` for the plain median alternative (k fixed at 0.5).
    """
    if method not in ("argmax", "median"):
        raise ValueError(f"unknown cutoff method {method!r}")
    ids = sorted(feature_rows)
    popular = set(popular_ids)
    mask = [sid in popular for sid in ids]
    table = CutoffTable(measure=measure, t=t, delta=delta)
    for name in FEATURE_NAMES:
        values = [feature_rows[sid][name] for sid in ids]
        if method == "median":
            table.entries[name] = CutoffEntry(0.5, percentile(values, 0.5))
        else:
            k_star, c_f = compute_cutoff(values, mask)
            table.entries[name] = CutoffEntry(k_star, c_f)
    return table


def binarize(raw: Mapping[str, float], table: CutoffTable) -> dict[str, int]:
    """Rule bits: 1 iff the raw value is strictly above the fitted cutoff."""
    return {name: int(raw[name] > table.cutoff(name)) for name in FEATURE_NAMES}


def write_cutoff_csv(table: CutoffTable, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["measure", "feature", "k_star", "c_f"])
        for name in FEATURE_NAMES:
            entry = table.entries[name]
            writer.writerow([table.measure, name, repr(entry.k_star), repr(entry.c_f)])


def read_cutoff_csv(path: str | Path, t: int = 0, delta: int = 0) -> CutoffTable:
    table: CutoffTable | None = None
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if table is None:
                table = CutoffTable(measure=row["measure"], t=t, delta=delta)
            table.entries[row["feature"]] = CutoffEntry(
                float(row["k_star"]), float(row["c_f"])
            )
    if table is None:
        raise ValueError(f"empty cutoff table file {path}")
    return table
