"""Acceptance suite.

Each criterion prints one ``criterion N: PASS/FAIL`` line (visible with
``pytest -s``) and asserts at its stated tolerance.  The planted-effect
criteria run the full pipeline on the synthetic generator at 2000 streamers
over 14 months for five seeds and both a planted effect (behavior_effect
0.8) and a planted null (0.0).
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from streamgrowth.binarize import compute_cutoff
from streamgrowth.cli import main
from streamgrowth.experiments import (
    coefficient_table,
    leakage_audit,
    run_interval_sweep,
)
from streamgrowth.features import FEATURE_NAMES
from streamgrowth.glm import auc, design_matrix, fit_logistic, gradient_check, welch_t_test
from streamgrowth.selfcheck import (
    auc_bruteforce,
    cutoff_scan_bruteforce,
    sched_regularity_tabulation,
)
from streamgrowth.synthgen import DRIVING_FEATURES, SynthConfig, generate

ACCEPTANCE_SEEDS = (1, 2, 3, 4, 5)
DELTAS = (2, 4, 6)
PER_SEED_BUDGET_SECONDS = 120.0


def _report(criterion: int, ok: bool, detail: str) -> None:
    print(f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def test_criterion_1_auc_matches_bruteforce():
    rng = np.random.default_rng(101)
    start = time.time()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 201))
        scores = rng.integers(0, 12, size=n) / 12.0
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        worst = max(worst, abs(auc(scores, labels) - auc_bruteforce(scores, labels)))
    elapsed = time.time() - start
    _report(
        1,
        worst < 1e-12 and elapsed < 5.0,
        f"max |fast-brute| = {worst:.2e} over 200 instances in {elapsed:.2f}s",
    )


def test_criterion_2_gradient_matches_finite_differences():
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(4, 51))
        d = int(rng.integers(1, 11))
        design = design_matrix(
            [f"x{i}" for i in range(d)],
            rng.normal(size=(n, d)),
            _mixed_labels(rng, n),
        )
        coef = rng.normal(scale=0.5, size=d + 1)
        worst = max(worst, gradient_check(design, coef, h=1e-5))
    _report(2, worst < 1e-6, f"max scaled gradient error = {worst:.2e} over 50 instances")


def _mixed_labels(rng, n):
    y = rng.integers(0, 2, size=n)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    return y


def test_criterion_3_intercept_only_closed_form():
    worst = 0.0
    for rate in (0.25, 0.5, 0.75):
        n = 64
        y = np.zeros(n)
        y[: int(rate * n)] = 1.0
        fit = fit_logistic(design_matrix([], np.zeros((n, 0)), y))
        worst = max(worst, abs(fit.coefficients[0] - math.log(rate / (1 - rate))))
    _report(3, worst < 1e-6, f"max |intercept - logit(rate)| = {worst:.2e}")


def test_criterion_4_cutoff_matches_exhaustive_scan():
    rng = np.random.default_rng(104)
    exact = True
    for _ in range(100):
        n = int(rng.integers(4, 150))
        values = (
            rng.integers(0, 7, size=n).astype(float)
            if rng.random() < 0.5
            else np.round(rng.lognormal(0, 1, size=n), 2)
        )
        mask = rng.random(n) < 0.3
        if mask.all() or not mask.any():
            mask[0] = not mask[0]
        fast = compute_cutoff(values, mask)
        if fast != cutoff_scan_bruteforce(values, mask):
            exact = False
            break
        # monotone-transform equivariance: same k*, identical bits
        transformed = 3.0 * values**3 + 1.0
        k2, c2 = compute_cutoff(transformed, mask)
        if k2 != fast[0] or not np.array_equal(values > fast[1], transformed > c2):
            exact = False
            break
    _report(4, exact, "100 instances exact, bits invariant under increasing transform")


def test_criterion_5_schedule_regularity_matches_tabulation():
    from streamgrowth.data import Broadcast, DAY_SECONDS
    from streamgrowth.features import sched_regularity

    rng = np.random.default_rng(105)
    exact = True
    for _ in range(100):
        days = [int(d) for d in rng.integers(0, 70, size=int(rng.integers(0, 40)))]
        broadcasts = [
            Broadcast(d * DAY_SECONDS + float(rng.uniform(0, DAY_SECONDS - 1)), 30.0, (), 0.0, False)
            for d in days
        ]
        if sched_regularity(broadcasts, 0.0) != sched_regularity_tabulation(days):
            exact = False
            break
    _report(5, exact, "100 random broadcast patterns exact")


def test_criterion_6_welch_reference_values():
    res = welch_t_test([2.0, 4.0, 6.0], [1.0, 2.0, 3.0])
    hand_ok = abs(res.statistic - 1.549) < 1e-3 and abs(res.df - 50.0 / 17.0) < 1e-3
    same = welch_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    ident_ok = abs(same.statistic) < 1e-9 and abs(same.p_value - 1.0) < 1e-9
    _report(
        6,
        hand_ok and ident_ok,
        f"t={res.statistic:.4f} df={res.df:.3f}; identical samples t={same.statistic:.1e} p={same.p_value:.10f}",
    )


@pytest.fixture(scope="module")
def planted_runs():
    """Full pipeline per seed and behavior_effect; datasets are dropped after
    use so only summaries stay in memory."""
    runs = {
        "gain": {d: [] for d in DELTAS},
        "null_gain": {d: [] for d in DELTAS},
        "seconds": [],
        "nesting": [],
        "coef": {name: [] for name in FEATURE_NAMES},
        "significant": {name: [] for name in FEATURE_NAMES},
        "coef_status": [],
        "audit": None,
    }
    for seed in ACCEPTANCE_SEEDS:
        for beta, gain_key in ((0.8, "gain"), (0.0, "null_gain")):
            start = time.time()
            dataset = generate(
                SynthConfig(n_streamers=2000, n_months=14, seed=seed, behavior_effect=beta)
            )
            sweep = run_interval_sweep(
                dataset, "relative_growth", "followers", DELTAS, split_seed=seed
            )
            runs["seconds"].append(time.time() - start)
            assert not sweep.skipped, sweep.skipped
            for cell in sweep.cells:
                runs[gain_key][cell.x].append(cell.gain)
                runs["nesting"].append(
                    (cell.behavior_ll, cell.baseline_ll, f"seed {seed} beta {beta} delta {cell.x}")
                )
            if beta == 0.8:
                [table] = coefficient_table(
                    dataset, measures=("followers",), split_seed=seed
                )
                runs["coef_status"].append(table.status)
                for row in table.rows:
                    runs["coef"][row.feature].append(row.coefficient)
                    runs["significant"][row.feature].append(row.p_value < 0.05)
                if runs["audit"] is None:
                    runs["audit"] = leakage_audit(dataset, sweep)
            del dataset
    return runs


def test_criterion_7_planted_effect_detection(planted_runs):
    gains = {d: float(np.mean(planted_runs["gain"][d])) for d in DELTAS}
    nulls = {d: float(np.mean(planted_runs["null_gain"][d])) for d in DELTAS}
    slowest = max(planted_runs["seconds"])
    ok = (
        all(gains[d] >= 0.05 for d in DELTAS)
        and all(abs(nulls[d]) <= 0.02 for d in DELTAS)
        and slowest < PER_SEED_BUDGET_SECONDS
    )
    _report(
        7,
        ok,
        "mean gains " + " ".join(f"d{d}={gains[d]:+.3f}" for d in DELTAS)
        + "; null " + " ".join(f"d{d}={nulls[d]:+.3f}" for d in DELTAS)
        + f"; slowest seed {slowest:.0f}s",
    )


def test_criterion_8_planted_coefficient_recovery(planted_runs):
    assert all(s == "ok" for s in planted_runs["coef_status"])
    driving_mean = {f: float(np.mean(planted_runs["coef"][f])) for f in DRIVING_FEATURES}
    all_significant = all(
        all(planted_runs["significant"][f]) for f in DRIVING_FEATURES
    )
    floor = 0.5 * min(driving_mean.values())
    offenders = [
        (f, abs(float(np.mean(planted_runs["coef"][f]))))
        for f in FEATURE_NAMES
        if f not in DRIVING_FEATURES
        and abs(float(np.mean(planted_runs["coef"][f]))) > floor
    ]
    ok = all_significant and not offenders and floor > 0
    _report(
        8,
        ok,
        f"drivers {({f: round(v, 2) for f, v in driving_mean.items()})} all significant={all_significant}; "
        f"limit {floor:.3f}; offenders={offenders or 'none'}",
    )


def test_criterion_9_nesting_property(planted_runs):
    violations = [
        label
        for behavior_ll, baseline_ll, label in planted_runs["nesting"]
        if behavior_ll < baseline_ll
    ]
    _report(
        9,
        not violations,
        f"{len(planted_runs['nesting'])} fitted cells, behavior ll >= baseline ll"
        + ("" if not violations else f"; violations: {violations}"),
    )


def test_criterion_10_leakage_audit(planted_runs):
    audit = planted_runs["audit"]
    _report(
        10,
        audit is not None and audit.ok,
        f"{audit.checked} fitted statistics recomputed bit-exactly from the training mask"
        + ("" if audit.ok else f"; mismatches {audit.mismatches}"),
    )


def test_criterion_11_pipeline_determinism(tmp_path):
    manifests = []
    for run, jobs in (("one", "1"), ("two", "3")):
        data = tmp_path / run / "data"
        out = tmp_path / run / "report"
        assert main(
            [
                "synth", "--out", str(data),
                "--n-streamers", "120", "--n-months", "13", "--seed", "6",
            ]
        ) == 0
        assert main(
            [
                "analyze", "--dataset", str(data), "--out", str(out),
                "--task", "relative_growth", "--task", "absolute",
                "--measure", "followers", "--measure", "concurrent_viewers",
                "--delta", "2", "--delta", "4", "--split-seed", "6",
                "--jobs", jobs,
            ]
        ) == 0
        manifests.append((out / "manifest.txt").read_text())
    _report(
        11,
        manifests[0] == manifests[1],
        f"{len(manifests[0].splitlines())} hashed files identical across reruns and --jobs",
    )


def test_criterion_12_skew_calibration():
    dataset = generate(SynthConfig())
    final = sorted(
        (r.snapshots[-1].followers for r in dataset.streamers.values()), reverse=True
    )
    k = math.ceil(len(final) / 10)
    share = sum(final[:k]) / sum(final)
    zero_cheer = sum(
        1 for r in dataset.streamers.values() if r.snapshots[-1].cheers == 0
    ) / len(dataset.streamers)
    ok = 0.70 <= share <= 0.90 and 0.40 <= zero_cheer <= 0.50
    _report(
        12,
        ok,
        f"top-decile follower share {share:.3f} in [0.70, 0.90]; "
        f"zero-cheer fraction {zero_cheer:.3f} in [0.40, 0.50]",
    )
