"""Experiment orchestration: paired baseline/behavior sweeps, coefficient
tables, and the descriptive effort / timing / population analyses.

Modeling protocol
-----------------
* One 80-20 streamer split per run (``split_seed``), drawn once on the whole
  dataset and shared by every cell, so no streamer ever appears on both
  sides of any fitted statistic.
* All fitted statistics (rule cutoffs, z-score parameters) come from the
  training side only.  Outcome labels (medians, top-decile thresholds) are
  population statistics and use everyone.
* The baseline model sees, per instance ``(streamer, t)``: current value and
  monthly history of all four popularity measures through age ``t``,
  cumulative counts of past monthly rule bits, account age, and third-party
  account flags.  The behavior model appends the 24 rule bits computed over
  ``[t, t+delta)``.  It is warm-started from the baseline solution, so its
  training log-likelihood can never fall below the baseline's.
* Interval sweeps pool instances across start ages into a single model per
  interval size (history zero-padded to a fixed width); the age sweep fits
  one model per start age.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .binarize import CutoffTable, binarize, fit_cutoff_table
from .data import Dataset, MEASURES, MONTH_SECONDS, PLATFORMS, measure_value, window_events
from .features import FEATURE_NAMES, compute_features
from .glm import (
    DesignMatrix,
    ModelFit,
    auc,
    coef_t_test,
    fit_least_squares,
    fit_logistic,
    predict_scores,
    welch_t_test,
    WelchResult,
)
from .labels import TASKS, TaskSpec, make_labels, top_decile_threshold

# history slots in pooled fits: start ages run 1..11, so months 0..10
BASELINE_PAD_MONTHS = 11
AFFILIATE_MIN_HOURS = 500.0 / 60.0  # 500 broadcast minutes per month
FULL_TIME_HOURS = 160.0  # 40 h/week
FIRST_YEAR_MONTHS = 12
DEFAULT_BOOTSTRAP = 200


@dataclass(frozen=True)
class InstanceConfig:
    task: str
    measure: str
    delta: int
    include_behavior: bool
    split_seed: int
    test_fraction: float = 0.2

    def __post_init__(self) -> None:
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError("test_fraction must be in (0, 1)")


def split_streamers(
    ids, split_seed: int, test_fraction: float = 0.2
) -> tuple[list[str], list[str]]:
    """Deterministic 80-20 split; ids are sorted before shuffling so the
    split depends only on the id set and the seed."""
    ordered = sorted(ids)
    rng = np.random.default_rng([split_seed, len(ordered)])
    perm = rng.permutation(len(ordered))
    n_test = max(1, int(round(test_fraction * len(ordered))))
    test = {ordered[i] for i in perm[:n_test]}
    return [s for s in ordered if s not in test], sorted(test)


class ExperimentContext:
    """Shared split plus caches for features, cutoff tables and label sets."""

    def __init__(
        self,
        dataset: Dataset,
        split_seed: int = 0,
        cutoff_method: str = "argmax",
        growth_mode: str = "fractional",
        test_fraction: float = 0.2,
    ):
        self.dataset = dataset
        self.split_seed = split_seed
        self.cutoff_method = cutoff_method
        self.growth_mode = growth_mode
        self.train_ids, self.test_ids = split_streamers(
            dataset.streamer_ids(), split_seed, test_fraction
        )
        self._train_set = frozenset(self.train_ids)
        self._monthly: dict[tuple[str, int], dict[str, float]] = {}
        self._window: dict[tuple[str, int, int], dict[str, float]] = {}
        self._month_tables: dict[tuple[str, int], CutoffTable] = {}
        self._window_tables: dict[tuple[str, int, int], CutoffTable] = {}
        self._baseline_rows: dict[tuple[str, str, int, int], np.ndarray] = {}
        self._labels: dict[tuple[str, str, int, int], dict[str, int]] = {}

    def is_train(self, sid: str) -> bool:
        return sid in self._train_set

    def alive_ids(self, through_age: int) -> list[str]:
        return [
            sid
            for sid in self.dataset.streamer_ids()
            if self.dataset.streamers[sid].n_months >= through_age
        ]

    def window_features(self, sid: str, t: int, delta: int) -> dict[str, float]:
        key = (sid, t, delta)
        got = self._window.get(key)
        if got is None:
            got = compute_features(
                self.dataset.streamers[sid], t, delta, self.dataset.game_table
            )
            self._window[key] = got
        return got

    def monthly_features(self, sid: str, m: int) -> dict[str, float]:
        key = (sid, m)
        got = self._monthly.get(key)
        if got is None:
            got = compute_features(
                self.dataset.streamers[sid], m, 1, self.dataset.game_table
            )
            self._monthly[key] = got
        return got

    def month_cutoffs(self, measure: str, m: int) -> CutoffTable:
        """Cutoffs for the one-month window [m, m+1), train-fit; popular =
        training top decile of the measure at the window's end."""
        key = (measure, m)
        got = self._month_tables.get(key)
        if got is None:
            got = self._fit_table(measure, m, 1)
            self._month_tables[key] = got
        return got

    def window_cutoffs(self, measure: str, t: int, delta: int) -> CutoffTable:
        key = (measure, t, delta)
        got = self._window_tables.get(key)
        if got is None:
            got = self._fit_table(measure, t, delta)
            self._window_tables[key] = got
        return got

    def _fit_table(self, measure: str, t: int, delta: int) -> CutoffTable:
        end = t + delta
        ids = [sid for sid in self.train_ids if self.dataset.streamers[sid].n_months >= end]
        if len(ids) < 2:
            raise ValueError(f"not enough training streamers alive through month {end}")
        values = {
            sid: measure_value(self.dataset.streamers[sid], measure, end) for sid in ids
        }
        threshold = top_decile_threshold(values.values())
        popular = {sid for sid in ids if values[sid] >= threshold}
        if len(popular) == len(ids):
            # fully tied measure (e.g. all-zero cheers): no popular/unpopular
            # contrast exists, fall back to median cutoffs
            rows = {sid: self.window_features(sid, t, delta) for sid in ids}
            return fit_cutoff_table(rows, popular, measure, t, delta, method="median")
        rows = {sid: self.window_features(sid, t, delta) for sid in ids}
        return fit_cutoff_table(rows, popular, measure, t, delta, method=self.cutoff_method)

    def labels(self, task: str, measure: str, t: int, delta: int) -> dict[str, int]:
        key = (task, measure, t, delta)
        got = self._labels.get(key)
        if got is None:
            got = make_labels(
                self.dataset, TaskSpec(task, measure, t, delta), self.growth_mode
            ).bits
            self._labels[key] = got
        return got


# -- input row construction -------------------------------------------------


def baseline_columns(measure_pad: int) -> list[str]:
    cols = [f"cur_{m}" for m in MEASURES]
    for m in MEASURES:
        cols.extend(f"hist_{m}_m{i}" for i in range(measure_pad))
    cols.extend(f"pastbits_{name}" for name in FEATURE_NAMES)
    cols.append("age")
    cols.extend(f"has_{p}" for p in PLATFORMS)
    return cols


def build_baseline_inputs(
    ctx: ExperimentContext,
    sid: str,
    t: int,
    measure: str,
    pad_months: int | None = None,
) -> tuple[list[str], np.ndarray]:
    """Everything known about a streamer at age ``t``, as a flat row.

    ``pad_months`` fixes the history width (zero-filled above ``t``) so rows
    from different start ages can be pooled; ``None`` keeps the natural
    width ``t``.  Past rule bits are accumulated into one count per feature,
    using the train-fit monthly cutoff tables for ``measure``.
    """
    if t < 1:
        raise ValueError("baseline inputs need at least one month of history")
    pad = t if pad_months is None else pad_months
    if pad < t:
        raise ValueError(f"pad_months={pad} smaller than start age {t}")
    cache_key = (measure, sid, t, pad)
    cached = ctx._baseline_rows.get(cache_key)
    if cached is not None:
        return baseline_columns(pad), cached

    record = ctx.dataset.streamers[sid]
    row = []
    for m in MEASURES:
        row.append(measure_value(record, m, t))
    for m in MEASURES:
        attr_values = [measure_value(record, m, i + 1) for i in range(t)]
        row.extend(attr_values)
        row.extend([0.0] * (pad - t))
    past_counts = dict.fromkeys(FEATURE_NAMES, 0.0)
    for m in range(t):
        bits = binarize(ctx.monthly_features(sid, m), ctx.month_cutoffs(measure, m))
        for name, bit in bits.items():
            past_counts[name] += bit
    row.extend(past_counts[name] for name in FEATURE_NAMES)
    row.append(float(t))
    row.extend(
        float(record.account.has_platform(p)) for p in PLATFORMS
    )
    values = np.asarray(row, dtype=float)
    ctx._baseline_rows[cache_key] = values
    return baseline_columns(pad), values


def build_behavior_inputs(
    ctx: ExperimentContext,
    sid: str,
    t: int,
    delta: int,
    measure: str,
    pad_months: int | None = None,
) -> tuple[list[str], np.ndarray]:
    """Baseline row plus the 24 rule bits over ``[t, t+delta)``."""
    cols, base = build_baseline_inputs(ctx, sid, t, measure, pad_months)
    table = ctx.window_cutoffs(measure, t, delta)
    bits = binarize(ctx.window_features(sid, t, delta), table)
    cols = cols + [f"bit_{name}" for name in FEATURE_NAMES]
    values = np.concatenate([base, [float(bits[name]) for name in FEATURE_NAMES]])
    return cols, values


# -- cell assembly and fitting ------------------------------------------------


@dataclass
class ZScoreParams:
    columns: list[str]
    mean: np.ndarray
    std: np.ndarray

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.std


def _fit_zscore(x: np.ndarray, columns: list[str]) -> ZScoreParams:
    # bits and flags stay raw; everything else is standardized on train stats
    scaled = [not c.startswith(("has_", "bit_")) for c in columns]
    mean = np.where(scaled, x.mean(axis=0), 0.0)
    std = np.where(scaled, x.std(axis=0), 1.0)
    std[std == 0.0] = 1.0
    return ZScoreParams(list(columns), mean, std)


@dataclass
class FittedStats:
    """Everything fitted on the training split, persisted for the leakage
    audit: cutoff tables and z-score parameters."""

    measure: str
    month_tables: dict[int, CutoffTable]
    window_tables: dict[tuple[int, int], CutoffTable]
    zscore: ZScoreParams
    pad_months: int


@dataclass
class CellResult:
    x: int  # delta for interval sweeps, start age for age sweeps
    start_ages: list[int]
    delta: int
    n_train: int
    n_test: int
    auc_baseline: float
    se_baseline: float
    auc_behavior: float
    se_behavior: float
    gain: float
    baseline_ll: float
    behavior_ll: float
    baseline_fit: ModelFit
    behavior_fit: ModelFit
    stats: FittedStats
    status: str = "ok"


@dataclass
class SweepResult:
    kind: str  # "interval" or "age"
    task: str
    measure: str
    split_seed: int
    cutoff_method: str
    train_ids: list[str]
    test_ids: list[str]
    cells: list[CellResult] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)


def _bootstrap_se(
    scores: np.ndarray, labels: np.ndarray, rng: np.random.Generator, n_boot: int
) -> float:
    n = len(scores)
    values = []
    for _ in range(n_boot):
        for _attempt in range(100):
            idx = rng.integers(0, n, size=n)
            y = labels[idx]
            if y.min() != y.max():
                values.append(auc(scores[idx], y))
                break
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1))


def _assemble_cell(
    ctx: ExperimentContext,
    task: str,
    measure: str,
    delta: int,
    start_ages: list[int],
    use_least_squares: bool = False,
    bootstrap_n: int = DEFAULT_BOOTSTRAP,
    x_value: int | None = None,
) -> CellResult | str:
    """Build one pooled cell, fit both models, score the test pool.

    Returns the CellResult, or a reason string when the cell is degenerate
    (single-class labels, no eligible instances, non-convergence).
    """
    # pad history only to the pool's maximum start age: wider padding adds
    # exactly-zero columns that make the information matrix singular
    pad = max(start_ages)
    rows_train, rows_test = [], []
    bits_train, bits_test = [], []
    y_train, y_test = [], []
    used_windows: dict[tuple[int, int], CutoffTable] = {}
    columns = None

    for t in start_ages:
        alive = ctx.alive_ids(t + delta)
        if not alive:
            continue
        labels = ctx.labels(task, measure, t, delta)
        used_windows[(t, delta)] = ctx.window_cutoffs(measure, t, delta)
        for sid in alive:
            cols, base = build_baseline_inputs(ctx, sid, t, measure, pad_months=pad)
            table = used_windows[(t, delta)]
            bit_values = binarize(ctx.window_features(sid, t, delta), table)
            bits = [float(bit_values[name]) for name in FEATURE_NAMES]
            columns = cols
            if ctx.is_train(sid):
                rows_train.append(base)
                bits_train.append(bits)
                y_train.append(labels[sid])
            else:
                rows_test.append(base)
                bits_test.append(bits)
                y_test.append(labels[sid])

    if not rows_train or not rows_test:
        return "no eligible instances"
    y_train = np.asarray(y_train, dtype=float)
    y_test = np.asarray(y_test, dtype=float)
    if y_train.min() == y_train.max() or y_test.min() == y_test.max():
        return "single-class labels"

    x_base_train = np.vstack(rows_train)
    x_base_test = np.vstack(rows_test)
    zscore = _fit_zscore(x_base_train, columns)
    x_base_train = zscore.transform(x_base_train)
    x_base_test = zscore.transform(x_base_test)

    bit_cols = [f"bit_{name}" for name in FEATURE_NAMES]
    ones_train = np.ones((len(y_train), 1))
    ones_test = np.ones((len(y_test), 1))
    base_design = DesignMatrix(
        ["intercept"] + columns, np.hstack([ones_train, x_base_train]), y_train
    )
    behav_design = DesignMatrix(
        ["intercept"] + columns + bit_cols,
        np.hstack([ones_train, x_base_train, np.asarray(bits_train)]),
        y_train,
    )

    if use_least_squares:
        base_fit = fit_least_squares(base_design)
        behav_fit = fit_least_squares(behav_design)
    else:
        base_fit = fit_logistic(base_design)
        warm = np.concatenate([base_fit.coefficients, np.zeros(len(bit_cols))])
        behav_fit = fit_logistic(behav_design, init=warm)
        if not base_fit.converged or not behav_fit.converged:
            flags = []
            if base_fit.separated or behav_fit.separated:
                flags.append("perfect separation")
            if not flags:
                flags.append("no convergence")
            return ", ".join(flags)

    base_design_test = DesignMatrix(
        base_design.columns, np.hstack([ones_test, x_base_test]), y_test
    )
    behav_design_test = DesignMatrix(
        behav_design.columns,
        np.hstack([ones_test, x_base_test, np.asarray(bits_test)]),
        y_test,
    )
    scores_base = predict_scores(base_fit, base_design_test)
    scores_behav = predict_scores(behav_fit, behav_design_test)

    x_val = delta if x_value is None else x_value
    boot_rng = np.random.default_rng(
        [ctx.split_seed, TASKS.index(task), MEASURES.index(measure), delta, x_val]
    )
    auc_base = auc(scores_base, y_test)
    se_base = _bootstrap_se(scores_base, y_test, boot_rng, bootstrap_n)
    auc_behav = auc(scores_behav, y_test)
    se_behav = _bootstrap_se(scores_behav, y_test, boot_rng, bootstrap_n)

    month_tables = {
        m: ctx.month_cutoffs(measure, m) for m in range(max(start_ages))
    }
    return CellResult(
        x=x_val,
        start_ages=list(start_ages),
        delta=delta,
        n_train=len(y_train),
        n_test=len(y_test),
        auc_baseline=auc_base,
        se_baseline=se_base,
        auc_behavior=auc_behav,
        se_behavior=se_behav,
        gain=auc_behav - auc_base,
        baseline_ll=base_fit.log_likelihood,
        behavior_ll=behav_fit.log_likelihood,
        baseline_fit=base_fit,
        behavior_fit=behav_fit,
        stats=FittedStats(measure, month_tables, used_windows, zscore, pad),
    )


def pooled_start_ages(dataset: Dataset, delta: int) -> list[int]:
    """Start ages 1..12-delta, restricted to windows the data can label."""
    max_months = max(r.n_months for r in dataset.streamers.values())
    last = min(FIRST_YEAR_MONTHS, max_months) - delta
    return list(range(1, last + 1))


def run_interval_sweep(
    dataset: Dataset,
    task: str,
    measure: str,
    deltas,
    split_seed: int = 0,
    cutoff_method: str = "argmax",
    bootstrap_n: int = DEFAULT_BOOTSTRAP,
    use_least_squares: bool = False,
    ctx: ExperimentContext | None = None,
) -> SweepResult:
    """AUC of both models per interval size, instances pooled across start
    ages (one fitted model per interval size and model family)."""
    if ctx is None:
        ctx = ExperimentContext(dataset, split_seed, cutoff_method)
    result = SweepResult(
        "interval", task, measure, ctx.split_seed, ctx.cutoff_method,
        list(ctx.train_ids), list(ctx.test_ids),
    )
    for delta in sorted(deltas):
        ages = pooled_start_ages(dataset, delta)
        if not ages:
            result.skipped.append(f"delta={delta}: no start ages available")
            continue
        cell = _assemble_cell(
            ctx, task, measure, delta, ages,
            use_least_squares=use_least_squares, bootstrap_n=bootstrap_n,
        )
        if isinstance(cell, str):
            result.skipped.append(f"delta={delta}: {cell}")
        else:
            result.cells.append(cell)
    return result


def run_age_sweep(
    dataset: Dataset,
    task: str,
    measure: str,
    delta: int = 2,
    split_seed: int = 0,
    cutoff_method: str = "argmax",
    bootstrap_n: int = DEFAULT_BOOTSTRAP,
    use_least_squares: bool = False,
    ctx: ExperimentContext | None = None,
) -> SweepResult:
    """AUC of both models per start age at a fixed interval size."""
    if ctx is None:
        ctx = ExperimentContext(dataset, split_seed, cutoff_method)
    result = SweepResult(
        "age", task, measure, ctx.split_seed, ctx.cutoff_method,
        list(ctx.train_ids), list(ctx.test_ids),
    )
    for t in pooled_start_ages(dataset, delta):
        cell = _assemble_cell(
            ctx, task, measure, delta, [t],
            use_least_squares=use_least_squares, bootstrap_n=bootstrap_n, x_value=t,
        )
        if isinstance(cell, str):
            result.skipped.append(f"age={t}: {cell}")
        else:
            result.cells.append(cell)
    return result


# -- coefficient table --------------------------------------------------------


STAR_LEVELS = ((0.05, "**"), (0.1, "*"))


def significance_stars(p_value: float) -> str:
    for level, stars in STAR_LEVELS:
        if p_value < level:
            return stars
    return ""


@dataclass
class CoefficientRow:
    feature: str
    coefficient: float
    std_err: float
    p_value: float
    stars: str
    dropped_for_refit: bool = False
    refit_coefficient: float = math.nan
    refit_p_value: float = math.nan
    refit_stars: str = ""


@dataclass
class MeasureCoefficients:
    measure: str
    rows: list[CoefficientRow] = field(default_factory=list)
    correlated_pairs: list[tuple[str, str, float]] = field(default_factory=list)
    stable: bool = True
    status: str = "ok"


def coefficient_table(
    dataset: Dataset,
    measures=("followers", "cumulative_views", "concurrent_viewers"),
    delta: int = 2,
    split_seed: int = 0,
    cutoff_method: str = "argmax",
    correlation_limit: float = 0.8,
    ctx: ExperimentContext | None = None,
) -> list[MeasureCoefficients]:
    """Behavior-bit coefficients of the pooled behavior model for relative
    growth, one column set per measure, with the collinearity re-check:
    highly correlated bit pairs are dropped and the model refit, and the
    significance pattern of the surviving features is compared."""
    if ctx is None:
        ctx = ExperimentContext(dataset, split_seed, cutoff_method)
    out = []
    for measure in measures:
        entry = MeasureCoefficients(measure=measure)
        out.append(entry)
        ages = pooled_start_ages(dataset, delta)
        cell = _assemble_cell(
            ctx, "relative_growth", measure, delta, ages, bootstrap_n=0
        )
        if isinstance(cell, str):
            entry.status = f"skipped: {cell}"
            entry.stable = False
            continue
        fit = cell.behavior_fit
        bit_cols = [f"bit_{name}" for name in FEATURE_NAMES]
        p_values = coef_t_test(fit, columns=bit_cols)
        for name in FEATURE_NAMES:
            col = f"bit_{name}"
            i = fit.columns.index(col)
            p = p_values[col]
            entry.rows.append(
                CoefficientRow(
                    feature=name,
                    coefficient=float(fit.coefficients[i]),
                    std_err=float(fit.standard_errors[i]),
                    p_value=p,
                    stars=significance_stars(p),
                )
            )

        # collinearity re-check on the training bits
        x_bits = _training_bits(ctx, measure, delta, ages)
        dropped = _correlated_features(x_bits, correlation_limit, entry.correlated_pairs)
        if dropped:
            refit = _refit_without(ctx, "relative_growth", measure, delta, ages, dropped)
            if isinstance(refit, str):
                entry.status = f"refit skipped: {refit}"
                entry.stable = False
            else:
                kept_p = coef_t_test(
                    refit, columns=[f"bit_{n}" for n in FEATURE_NAMES if n not in dropped]
                )
                entry.stable = True
                for row in entry.rows:
                    if row.feature in dropped:
                        row.dropped_for_refit = True
                        continue
                    col = f"bit_{row.feature}"
                    i = refit.columns.index(col)
                    row.refit_coefficient = float(refit.coefficients[i])
                    row.refit_p_value = kept_p[col]
                    row.refit_stars = significance_stars(kept_p[col])
                    if row.refit_stars != row.stars:
                        entry.stable = False
    return out


def _training_bits(ctx, measure, delta, ages) -> np.ndarray:
    rows = []
    for t in ages:
        table = ctx.window_cutoffs(measure, t, delta)
        for sid in ctx.alive_ids(t + delta):
            if ctx.is_train(sid):
                bits = binarize(ctx.window_features(sid, t, delta), table)
                rows.append([float(bits[n]) for n in FEATURE_NAMES])
    return np.asarray(rows)


def _correlated_features(x_bits, limit, pairs_out) -> set[str]:
    dropped = set()
    std = x_bits.std(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(x_bits, rowvar=False)
    for i in range(len(FEATURE_NAMES)):
        for j in range(i + 1, len(FEATURE_NAMES)):
            if std[i] == 0 or std[j] == 0:
                continue
            r = corr[i, j]
            if np.isfinite(r) and abs(r) > limit:
                pairs_out.append((FEATURE_NAMES[i], FEATURE_NAMES[j], float(r)))
                dropped.add(FEATURE_NAMES[j])
    return dropped


def _refit_without(ctx, task, measure, delta, ages, dropped: set[str]):
    pad = max(ages)
    rows, bits, ys = [], [], []
    kept = [n for n in FEATURE_NAMES if n not in dropped]
    columns = None
    for t in ages:
        labels = ctx.labels(task, measure, t, delta)
        table = ctx.window_cutoffs(measure, t, delta)
        for sid in ctx.alive_ids(t + delta):
            if not ctx.is_train(sid):
                continue
            cols, base = build_baseline_inputs(ctx, sid, t, measure, pad_months=pad)
            columns = cols
            bit_values = binarize(ctx.window_features(sid, t, delta), table)
            rows.append(base)
            bits.append([float(bit_values[n]) for n in kept])
            ys.append(labels[sid])
    y = np.asarray(ys, dtype=float)
    if y.min() == y.max():
        return "single-class labels"
    x_base = np.vstack(rows)
    zscore = _fit_zscore(x_base, columns)
    x = np.hstack([np.ones((len(y), 1)), zscore.transform(x_base), np.asarray(bits)])
    design = DesignMatrix(
        ["intercept"] + columns + [f"bit_{n}" for n in kept], x, y
    )
    fit = fit_logistic(design)
    if not fit.converged:
        return "no convergence"
    return fit


# -- leakage audit ------------------------------------------------------------


@dataclass
class AuditReport:
    ok: bool
    checked: int
    mismatches: list[str] = field(default_factory=list)


def leakage_audit(dataset: Dataset, sweep: SweepResult) -> AuditReport:
    """Recompute every train-fitted statistic of a sweep from its training
    mask and compare bit-exactly against the persisted values."""
    fresh = ExperimentContext(dataset, sweep.split_seed, sweep.cutoff_method)
    report = AuditReport(ok=True, checked=0)
    if fresh.train_ids != sweep.train_ids:
        report.ok = False
        report.mismatches.append("training mask differs")
        return report
    for cell in sweep.cells:
        stats = cell.stats
        for m, table in stats.month_tables.items():
            report.checked += 1
            if fresh.month_cutoffs(stats.measure, m).entries != table.entries:
                report.ok = False
                report.mismatches.append(f"month table {stats.measure}/{m}")
        for (t, delta), table in stats.window_tables.items():
            report.checked += 1
            if fresh.window_cutoffs(stats.measure, t, delta).entries != table.entries:
                report.ok = False
                report.mismatches.append(f"window table {stats.measure}/{t}+{delta}")
        # z-score parameters from the training rows only
        rows = []
        for t in cell.start_ages:
            for sid in fresh.alive_ids(t + cell.delta):
                if fresh.is_train(sid):
                    _, base = build_baseline_inputs(
                        fresh, sid, t, stats.measure, pad_months=stats.pad_months
                    )
                    rows.append(base)
        recomputed = _fit_zscore(np.vstack(rows), stats.zscore.columns)
        report.checked += 1
        if not (
            np.array_equal(recomputed.mean, stats.zscore.mean)
            and np.array_equal(recomputed.std, stats.zscore.std)
        ):
            report.ok = False
            report.mismatches.append(f"zscore {stats.measure} x={cell.x}")
    return report


# -- descriptive analyses -----------------------------------------------------


def _first_year_end(record) -> int:
    return min(FIRST_YEAR_MONTHS, record.n_months)


@dataclass
class EffortReport:
    n_streamers: int
    median_monthly_hours: float
    affiliate_fraction: float
    full_time_fraction: float
    monthly_hours: dict[str, float]
    empty_fraction: dict[str, float]
    share_over_quarter_empty: float
    share_under_5pct_empty: float
    median_empty_fraction: float
    welch: dict[str, WelchResult | None]


def effort_analysis(dataset: Dataset) -> EffortReport:
    """Broadcast-hours effort profile over the first year, with the
    full-time-versus-rest popularity comparisons."""
    monthly_hours: dict[str, float] = {}
    empty_fraction: dict[str, float] = {}
    for sid in dataset.streamer_ids():
        record = dataset.streamers[sid]
        end = _first_year_end(record)
        per_month = []
        n_broadcasts = 0
        n_empty = 0
        for m in range(end):
            broadcasts, _ = window_events(record, m, 1)
            per_month.append(sum(b.duration_min for b in broadcasts) / 60.0)
            n_broadcasts += len(broadcasts)
            n_empty += sum(1 for b in broadcasts if b.had_zero_viewers)
        monthly_hours[sid] = float(np.mean(per_month)) if per_month else 0.0
        empty_fraction[sid] = (n_empty / n_broadcasts) if n_broadcasts else 0.0

    hours = np.array([monthly_hours[sid] for sid in sorted(monthly_hours)])
    empties = np.array([empty_fraction[sid] for sid in sorted(empty_fraction)])
    full_time_ids = {sid for sid, h in monthly_hours.items() if h >= FULL_TIME_HOURS}

    welch: dict[str, WelchResult | None] = {}
    for measure in ("followers", "concurrent_viewers", "cheers"):
        a, b = [], []
        for sid in dataset.streamer_ids():
            record = dataset.streamers[sid]
            value = measure_value(record, measure, _first_year_end(record))
            (a if sid in full_time_ids else b).append(value)
        if len(a) >= 2 and len(b) >= 2:
            try:
                welch[measure] = welch_t_test(a, b)
            except ValueError:
                welch[measure] = None
        else:
            welch[measure] = None

    return EffortReport(
        n_streamers=len(monthly_hours),
        median_monthly_hours=float(np.median(hours)),
        affiliate_fraction=float(np.mean(hours >= AFFILIATE_MIN_HOURS)),
        full_time_fraction=float(np.mean(hours >= FULL_TIME_HOURS)),
        monthly_hours=monthly_hours,
        empty_fraction=empty_fraction,
        share_over_quarter_empty=float(np.mean(empties > 0.25)),
        share_under_5pct_empty=float(np.mean(empties < 0.05)),
        median_empty_fraction=float(np.median(empties)),
        welch=welch,
    )


@dataclass
class TimingGroup:
    platform: str
    month_offset: int
    n: int
    mean_peak_followers: float
    se_peak_followers: float
    mean_peak_ccv: float
    se_peak_ccv: float


@dataclass
class TimingReport:
    groups: list[TimingGroup]
    welch: dict[tuple[str, str], WelchResult | None]
    notes: list[str]


def social_timing_analysis(dataset: Dataset) -> TimingReport:
    """Peak first-year popularity grouped by when each third-party account
    was created relative to the streaming account, with before/after tests."""
    peaks: dict[str, tuple[float, float]] = {}
    for sid in dataset.streamer_ids():
        record = dataset.streamers[sid]
        end = _first_year_end(record)
        snaps = record.snapshots[:end]
        peaks[sid] = (
            max(s.followers for s in snaps),
            max(s.avg_concurrent_viewers for s in snaps),
        )

    groups: list[TimingGroup] = []
    welch: dict[tuple[str, str], WelchResult | None] = {}
    notes: list[str] = []
    for platform in PLATFORMS:
        by_offset: dict[int, list[str]] = {}
        before_ids, after_ids = [], []
        for sid in dataset.streamer_ids():
            record = dataset.streamers[sid]
            created = record.account.platform_created(platform)
            if created is None:
                continue
            offset = math.floor(
                (created - record.account.twitch_created) / MONTH_SECONDS
            )
            by_offset.setdefault(offset, []).append(sid)
            if created < record.account.twitch_created:
                before_ids.append(sid)
            else:
                after_ids.append(sid)
        for offset in sorted(by_offset):
            ids = by_offset[offset]
            fol = np.array([peaks[sid][0] for sid in ids])
            ccv = np.array([peaks[sid][1] for sid in ids])
            groups.append(
                TimingGroup(
                    platform=platform,
                    month_offset=offset,
                    n=len(ids),
                    mean_peak_followers=float(fol.mean()),
                    se_peak_followers=float(fol.std(ddof=1) / math.sqrt(len(fol)))
                    if len(fol) > 1
                    else 0.0,
                    mean_peak_ccv=float(ccv.mean()),
                    se_peak_ccv=float(ccv.std(ddof=1) / math.sqrt(len(ccv)))
                    if len(ccv) > 1
                    else 0.0,
                )
            )
        for mi, name in ((0, "peak_followers"), (1, "peak_ccv")):
            key = (platform, name)
            if len(before_ids) < 2 or len(after_ids) < 2:
                welch[key] = None
                notes.append(f"{platform}/{name}: skipped, needs 2 per side")
                continue
            try:
                welch[key] = welch_t_test(
                    [peaks[sid][mi] for sid in before_ids],
                    [peaks[sid][mi] for sid in after_ids],
                )
            except ValueError as exc:
                welch[key] = None
                notes.append(f"{platform}/{name}: skipped, {exc}")
    return TimingReport(groups=groups, welch=welch, notes=notes)


@dataclass
class PopulationReport:
    top_decile_share: dict[str, float]
    zero_cheer_fraction: float
    ccdf: list[tuple[str, int, float, float]]  # measure, age, value, frac >= value
    lorenz: list[tuple[str, str, float, float]]  # "lorenz", measure, top frac, share


def population_stats(dataset: Dataset, ccdf_ages=(1, 3, 6, 9, 12)) -> PopulationReport:
    """Concentration of each popularity measure plus CCDF tables by age."""
    shares = {}
    lorenz: list[tuple[str, str, float, float]] = []
    year_values: dict[str, np.ndarray] = {}
    for measure in MEASURES:
        values = np.array(
            [
                measure_value(r, measure, _first_year_end(r))
                for r in dataset.streamers.values()
            ]
        )
        year_values[measure] = values
        total = values.sum()
        if total <= 0:
            shares[measure] = 0.0
            continue
        ordered = np.sort(values)[::-1]
        k = max(1, math.ceil(0.1 * len(ordered)))
        shares[measure] = float(ordered[:k].sum() / total)
        cumulative = np.cumsum(ordered) / total
        n = len(ordered)
        for pct in range(1, 101):
            idx = min(n - 1, max(0, math.ceil(pct / 100 * n) - 1))
            lorenz.append(("lorenz", measure, pct / 100, float(cumulative[idx])))

    zero_cheer = float(np.mean(year_values["cheers"] == 0))

    ccdf = []
    max_age = max(r.n_months for r in dataset.streamers.values())
    for age in ccdf_ages:
        if age > max_age:
            continue
        alive = [r for r in dataset.streamers.values() if r.n_months >= age]
        for measure in MEASURES:
            values = np.sort(np.array([measure_value(r, measure, age) for r in alive]))
            n = len(values)
            for pct in range(0, 101, 2):
                idx = min(n - 1, max(0, math.ceil(pct / 100 * n) - 1))
                value = float(values[idx])
                frac_ge = float(np.sum(values >= value) / n)
                ccdf.append((measure, age, value, frac_ge))
    return PopulationReport(
        top_decile_share=shares,
        zero_cheer_fraction=zero_cheer,
        ccdf=ccdf,
        lorenz=lorenz,
    )


@dataclass
class CutoffExample:
    feature: str
    measure: str
    t: int
    delta: int
    k_star: float
    c_f: float
    popular_values: list[float]
    unpopular_values: list[float]


def cutoff_example(
    dataset: Dataset, feature: str = "n_tweet", measure: str = "followers",
    t: int = 1, delta: int = 2,
) -> CutoffExample:
    """Illustrative popular/unpopular value distributions for one feature,
    with the cutoff the search picks (computed on the full population: this
    feeds a descriptive figure, not a model input)."""
    from .binarize import compute_cutoff

    ids = [
        sid for sid in dataset.streamer_ids()
        if dataset.streamers[sid].n_months >= t + delta
    ]
    values = {
        sid: compute_features(dataset.streamers[sid], t, delta, dataset.game_table)[feature]
        for sid in ids
    }
    level = {sid: measure_value(dataset.streamers[sid], measure, t + delta) for sid in ids}
    threshold = top_decile_threshold(level.values())
    popular = [sid for sid in ids if level[sid] >= threshold]
    mask = [sid in set(popular) for sid in ids]
    k_star, c_f = compute_cutoff([values[sid] for sid in ids], mask)
    popular_set = set(popular)
    return CutoffExample(
        feature=feature,
        measure=measure,
        t=t,
        delta=delta,
        k_star=k_star,
        c_f=c_f,
        popular_values=sorted(values[sid] for sid in ids if sid in popular_set),
        unpopular_values=sorted(values[sid] for sid in ids if sid not in popular_set),
    )
