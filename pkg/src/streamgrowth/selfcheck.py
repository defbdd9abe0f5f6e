"""Built-in oracle suite.

Slow, obviously-correct reference implementations of the numeric primitives,
plus a runner that compares them against the fast paths on random inputs.
The reference implementations deliberately avoid the code under test: plain
loops, no shared helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import glm
from .binarize import compute_cutoff


def auc_bruteforce(scores, labels) -> float:
    """All-pairs concordance count, ties worth half."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y != 1]
    if not pos or not neg:
        raise ValueError("need both classes")
    total = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                total += 1.0
            elif sp == sn:
                total += 0.5
    return total / (len(pos) * len(neg))


def cutoff_scan_bruteforce(values, popular_mask) -> tuple[float, float]:
    """Exhaustive 101-point grid scan with plain loops."""
    vals = list(values)
    mask = list(popular_mask)
    ordered = sorted(vals)
    n = len(ordered)
    n_pop = sum(1 for m in mask if m)
    n_unpop = n - n_pop
    best_k, best_thr, best_obj = 0.0, ordered[0], -1.0
    for i in range(101):
        k = i / 100.0
        thr = ordered[max(math.ceil(k * n) - 1, 0)]
        pop_above = sum(1 for v, m in zip(vals, mask) if m and v > thr)
        unpop_above = sum(1 for v, m in zip(vals, mask) if not m and v > thr)
        obj = abs(pop_above / n_pop - unpop_above / n_unpop)
        if obj > best_obj:
            best_k, best_thr, best_obj = k, thr, obj
    return best_k, best_thr


def sched_regularity_tabulation(day_indices) -> float:
    """Direct week-by-weekday table: mark each (week, weekday) cell that has a
    broadcast, then sum max(column_count - 1, 0) over weekdays."""
    if not day_indices:
        return 0.0
    n_weeks = max(d // 7 for d in day_indices) + 1
    table = [[False] * 7 for _ in range(n_weeks)]
    for d in day_indices:
        table[d // 7][d % 7] = True
    score = 0
    for weekday in range(7):
        count = sum(1 for week in range(n_weeks) if table[week][weekday])
        score += max(count - 1, 0)
    return float(score)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_auc(rng: np.random.Generator, instances: int = 200) -> CheckResult:
    worst = 0.0
    for _ in range(instances):
        n = int(rng.integers(2, 201))
        # coarse score grid forces plenty of ties
        scores = rng.integers(0, 10, size=n) / 10.0
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        worst = max(worst, abs(glm.auc(scores, labels) - auc_bruteforce(scores, labels)))
    return CheckResult(
        "auc_pair_count_equivalence", worst < 1e-12, f"max |fast - brute| = {worst:.3g}"
    )


def _check_gradient(rng: np.random.Generator, instances: int = 50) -> CheckResult:
    worst = 0.0
    for _ in range(instances):
        n = int(rng.integers(4, 51))
        d = int(rng.integers(1, 11))
        rows = rng.normal(size=(n, d))
        y = rng.integers(0, 2, size=n)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        design = glm.design_matrix([f"x{i}" for i in range(d)], rows, y)
        coef = rng.normal(scale=0.5, size=d + 1)
        worst = max(worst, glm.gradient_check(design, coef, h=1e-5))
    return CheckResult(
        "gradient_finite_difference", worst < 1e-6, f"max scaled error = {worst:.3g}"
    )


def _check_cutoff(rng: np.random.Generator, instances: int = 100) -> CheckResult:
    for i in range(instances):
        n = int(rng.integers(5, 120))
        if rng.random() < 0.5:
            values = rng.integers(0, 6, size=n).astype(float)  # heavy ties
        else:
            values = np.round(rng.lognormal(0.0, 1.0, size=n), 2)
        mask = rng.random(n) < 0.3
        if mask.all() or not mask.any():
            mask[0] = not mask[0]
        fast = compute_cutoff(values, mask)
        brute = cutoff_scan_bruteforce(values, mask)
        if fast != brute:
            return CheckResult(
                "cutoff_exhaustive_scan", False, f"instance {i}: {fast} != {brute}"
            )
    return CheckResult("cutoff_exhaustive_scan", True, f"{instances} instances exact")


def _check_regularity(rng: np.random.Generator, instances: int = 100) -> CheckResult:
    from .data import Broadcast, DAY_SECONDS
    from .features import sched_regularity

    for i in range(instances):
        n = int(rng.integers(0, 40))
        days = sorted(int(d) for d in rng.integers(0, 60, size=n))
        broadcasts = [
            Broadcast(
                start=d * DAY_SECONDS + float(rng.integers(0, DAY_SECONDS)),
                duration_min=30.0,
                games=(),
                avg_ccv=0.0,
                had_zero_viewers=False,
            )
            for d in days
        ]
        got = sched_regularity(broadcasts, 0.0)
        want = sched_regularity_tabulation(days)
        if got != want:
            return CheckResult(
                "sched_regularity_tabulation", False, f"instance {i}: {got} != {want}"
            )
    return CheckResult("sched_regularity_tabulation", True, f"{instances} instances exact")


def run_selfcheck(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        _check_auc(rng),
        _check_gradient(rng),
        _check_cutoff(rng),
        _check_regularity(rng),
    ]
