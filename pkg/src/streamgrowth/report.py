"""Report rendering: delimited outputs plus one SVG figure per analysis.

Figures are matplotlib SVGs written deterministically (fixed hash salt, no
creation date) with the plotted numbers embedded as a CSV table inside a
trailing XML comment, so re-runs diff cleanly and every chart is
machine-readable without parsing paths.
"""

from __future__ import annotations

import csv
import hashlib
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .data import MEASURES
from .experiments import (
    CutoffExample,
    EffortReport,
    MeasureCoefficients,
    PopulationReport,
    SweepResult,
    TimingReport,
)

matplotlib.rcParams.update(
    {
        "svg.hashsalt": "streamgrowth",
        "svg.fonttype": "none",
        "figure.dpi": 100,
        "axes.grid": True,
        "grid.alpha": 0.3,
    }
)

_BASELINE_STYLE = dict(color="#c44e52", marker="o", label="history only")
_BEHAVIOR_STYLE = dict(color="#4c72b0", marker="s", label="history + behavior")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.12g}"
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def save_figure(fig, path: Path, table_header: list[str], table_rows: list[list]) -> None:
    """Write the SVG and append the data table as a trailing XML comment."""
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    lines = [",".join(table_header)]
    lines.extend(",".join(fmt(v) for v in row) for row in table_rows)
    table = "\n".join(lines).replace("--", "- -")
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(f"<!-- data-table\n{table}\n-->\n")


# -- delimited outputs --------------------------------------------------------


def auc_curve_rows(sweeps: list[SweepResult]) -> list[list]:
    rows = []
    for sweep in sweeps:
        for cell in sweep.cells:
            rows.append(
                [
                    sweep.kind,
                    sweep.task,
                    sweep.measure,
                    cell.x,
                    cell.auc_baseline,
                    cell.se_baseline,
                    cell.auc_behavior,
                    cell.se_behavior,
                    cell.gain,
                    cell.n_train,
                    cell.n_test,
                    "ok",
                ]
            )
        for note in sweep.skipped:
            rows.append([sweep.kind, sweep.task, sweep.measure, "", "", "", "", "", "", "", "", note])
    return rows


AUC_HEADER = [
    "sweep", "task", "measure", "x",
    "auc_baseline", "se_baseline", "auc_behavior", "se_behavior",
    "gain", "n_train", "n_test", "status",
]


def write_auc_curves(path: Path, sweeps: list[SweepResult]) -> None:
    write_csv(path, AUC_HEADER, auc_curve_rows(sweeps))


def write_coefficients(path: Path, tables: list[MeasureCoefficients]) -> None:
    rows = []
    for table in tables:
        if not table.rows:
            rows.append([table.measure, "", "", "", "", "", "", "", "", "", table.status])
        for r in table.rows:
            rows.append(
                [
                    table.measure,
                    r.feature,
                    r.coefficient,
                    r.std_err,
                    r.p_value,
                    r.stars,
                    int(r.dropped_for_refit),
                    r.refit_coefficient,
                    r.refit_p_value,
                    r.refit_stars,
                    table.status,
                ]
            )
    write_csv(
        path,
        [
            "measure", "feature", "coefficient", "std_err", "p_value", "stars",
            "dropped_for_refit", "refit_coefficient", "refit_p_value", "refit_stars",
            "status",
        ],
        rows,
    )


def write_effort(path: Path, report: EffortReport) -> None:
    rows = [
        ["summary", "n_streamers", report.n_streamers, "", "", ""],
        ["summary", "median_monthly_hours", report.median_monthly_hours, "", "", ""],
        ["summary", "affiliate_fraction", report.affiliate_fraction, "", "", ""],
        ["summary", "full_time_fraction", report.full_time_fraction, "", "", ""],
        ["summary", "share_over_quarter_empty", report.share_over_quarter_empty, "", "", ""],
        ["summary", "share_under_5pct_empty", report.share_under_5pct_empty, "", "", ""],
        ["summary", "median_empty_fraction", report.median_empty_fraction, "", "", ""],
    ]
    for measure, res in sorted(report.welch.items()):
        if res is None:
            rows.append(["welch", measure, "", "", "", "skipped"])
        else:
            rows.append(["welch", measure, res.effect, res.statistic, res.df, res.p_value])
    write_csv(path, ["kind", "name", "value_or_effect", "t", "df", "p_value"], rows)


def write_timing(path: Path, report: TimingReport) -> None:
    rows = []
    for g in report.groups:
        rows.append(
            [
                "group", g.platform, g.month_offset, g.n,
                g.mean_peak_followers, g.se_peak_followers,
                g.mean_peak_ccv, g.se_peak_ccv, "", "",
            ]
        )
    for (platform, name), res in sorted(report.welch.items()):
        if res is None:
            rows.append(["welch", platform, "", "", "", "", "", "", name, "skipped"])
        else:
            rows.append(
                [
                    "welch", platform, "", res.n_a + res.n_b,
                    res.effect, res.statistic, res.df, res.p_value, name, "ok",
                ]
            )
    write_csv(
        path,
        [
            "kind", "platform", "month_offset", "n",
            "mean_or_effect_followers", "se_or_t", "mean_or_df_ccv", "se_or_p",
            "welch_target", "status",
        ],
        rows,
    )


def write_population(path: Path, report: PopulationReport) -> None:
    rows = []
    for measure in MEASURES:
        rows.append(["top_decile_share", measure, "", "", report.top_decile_share[measure]])
    rows.append(["zero_cheer_fraction", "cheers", "", "", report.zero_cheer_fraction])
    for _, measure, top_frac, share in report.lorenz:
        rows.append(["lorenz", measure, "", top_frac, share])
    for measure, age, value, frac in report.ccdf:
        rows.append(["ccdf", measure, age, value, frac])
    write_csv(path, ["kind", "measure", "age_months", "value", "fraction"], rows)


def write_manifest(outdir: Path, exclude: tuple[str, ...] = ("manifest.txt",)) -> Path:
    """Sorted `sha256  filename` lines for every produced file."""
    manifest = outdir / "manifest.txt"
    lines = []
    for path in sorted(outdir.rglob("*")):
        if not path.is_file() or path.name in exclude:
            continue
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        lines.append(f"{digest}  {path.relative_to(outdir).as_posix()}")
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


# -- figures ------------------------------------------------------------------


def fig_popularity_skew(report: PopulationReport, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    table_rows = []
    for measure in MEASURES:
        points = sorted(
            ((frac, share) for kind, m, frac, share in report.lorenz if m == measure),
        )
        if not points:
            continue
        xs = [p[0] * 100 for p in points]
        ys = [p[1] * 100 for p in points]
        split = max(1, round(len(xs) * 0.1))
        ax.plot(xs[:split + 1], ys[:split + 1], linestyle="--", alpha=0.9)
        ax.plot(xs[split:], ys[split:], label=measure)
        table_rows.extend([measure, f, s] for f, s in points)
    ax.set_xlabel("top % of streamers")
    ax.set_ylabel("% of total held")
    ax.set_title("Popularity concentration (dashed: top decile)")
    ax.legend()
    save_figure(fig, path, ["measure", "top_fraction", "share"], table_rows)


def fig_cutoff_example(example: CutoffExample, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    bins = 40
    ax.hist(example.unpopular_values, bins=bins, density=True, alpha=0.55, label="unpopular")
    ax.hist(example.popular_values, bins=bins, density=True, alpha=0.55, label="popular")
    ax.axvline(example.c_f, color="black", linestyle="--",
               label=f"cutoff (k*={example.k_star:.2f})")
    ax.set_xlabel(example.feature)
    ax.set_ylabel("density")
    ax.set_title(f"Cutoff choice for {example.feature} ({example.measure})")
    ax.legend()
    rows = [["popular", v] for v in example.popular_values]
    rows += [["unpopular", v] for v in example.unpopular_values]
    rows.append(["cutoff", example.c_f])
    save_figure(fig, path, ["group", "value"], rows)


def fig_ccdf_by_age(report: PopulationReport, path: Path) -> None:
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    rows = []
    for ax, measure in zip(axes.flat, MEASURES):
        ages = sorted({age for m, age, _, _ in report.ccdf if m == measure})
        for age in ages:
            points = [
                (value, frac)
                for m, a, value, frac in report.ccdf
                if m == measure and a == age
            ]
            points.sort()
            ax.plot([p[0] for p in points], [p[1] for p in points], label=f"{age} mo")
            rows.extend([measure, age, v, f] for v, f in points)
        ax.set_xscale("symlog")
        ax.set_title(measure)
        ax.set_xlabel("value")
        ax.set_ylabel("fraction of streamers >= value")
        ax.legend(fontsize=7)
    fig.tight_layout()
    save_figure(fig, path, ["measure", "age_months", "value", "fraction_ge"], rows)


def _plot_sweep_cells(ax, sweep: SweepResult) -> None:
    xs = [c.x for c in sweep.cells]
    ax.errorbar(
        xs, [c.auc_baseline for c in sweep.cells],
        yerr=[c.se_baseline for c in sweep.cells], capsize=3, **_BASELINE_STYLE,
    )
    ax.errorbar(
        xs, [c.auc_behavior for c in sweep.cells],
        yerr=[c.se_behavior for c in sweep.cells], capsize=3, **_BEHAVIOR_STYLE,
    )
    ax.axhline(0.5, color="gray", linewidth=0.8, linestyle=":")
    ax.set_ylim(0.4, 1.0)


def _sweep_grid(sweeps: list[SweepResult], path: Path, xlabel: str, title: str) -> None:
    tasks = sorted({s.task for s in sweeps})
    measures = [m for m in MEASURES if any(s.measure == m for s in sweeps)]
    fig, axes = plt.subplots(
        len(tasks), len(measures),
        figsize=(3.2 * len(measures), 2.8 * len(tasks)),
        squeeze=False,
    )
    for i, task in enumerate(tasks):
        for j, measure in enumerate(measures):
            ax = axes[i][j]
            found = [s for s in sweeps if s.task == task and s.measure == measure]
            if found:
                _plot_sweep_cells(ax, found[0])
            ax.set_title(f"{task} / {measure}", fontsize=8)
            if i == len(tasks) - 1:
                ax.set_xlabel(xlabel)
            if j == 0:
                ax.set_ylabel("test AUC")
    handles, labels = axes[0][0].get_legend_handles_labels()
    if handles:
        fig.legend(handles, labels, loc="lower center", ncol=2, fontsize=8)
    fig.suptitle(title)
    fig.tight_layout(rect=(0, 0.05, 1, 0.97))
    save_figure(fig, path, AUC_HEADER, auc_curve_rows(sweeps))


def fig_auc_by_interval(sweeps: list[SweepResult], path: Path) -> None:
    _sweep_grid(sweeps, path, "interval size (months)", "AUC by prediction interval")


def fig_auc_by_age(sweeps: list[SweepResult], path: Path) -> None:
    _sweep_grid(sweeps, path, "start age (months)", "AUC by account age at window start")


def fig_self_growth(sweep: SweepResult, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    _plot_sweep_cells(ax, sweep)
    ax.set_xlabel("interval size (months)")
    ax.set_ylabel("test AUC")
    ax.set_title("Predicting steady concurrent-viewer growth (>= 4/month)")
    ax.legend(fontsize=8)
    save_figure(fig, path, AUC_HEADER, auc_curve_rows([sweep]))


def fig_effort_box(report: EffortReport, path: Path) -> None:
    hours = sorted(report.monthly_hours.values())
    fig, ax = plt.subplots(figsize=(4.5, 4))
    ax.boxplot([hours], tick_labels=["all streamers"], whis=(5, 95), showfliers=False)
    ax.axhline(160.0, color="#c44e52", linestyle="--", label="full time (160 h)")
    ax.axhline(500.0 / 60.0, color="#55a868", linestyle="--", label="affiliate minimum (8.3 h)")
    ax.set_ylabel("broadcast hours per month")
    ax.set_yscale("symlog")
    ax.set_title("Monthly broadcasting effort")
    ax.legend(fontsize=8)
    save_figure(
        fig, path, ["streamer_rank", "mean_monthly_hours"],
        [[i, h] for i, h in enumerate(hours)],
    )


def fig_empty_broadcast_cdf(report: EffortReport, path: Path) -> None:
    fracs = sorted(report.empty_fraction.values())
    n = len(fracs)
    xs = [0.0] + fracs
    ys = [0.0] + [(i + 1) / n for i in range(n)]
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.step(xs, ys, where="post")
    ax.axvline(0.25, color="#c44e52", linestyle="--", label="25% empty")
    ax.set_xlabel("fraction of broadcasts with zero viewers")
    ax.set_ylabel("fraction of streamers")
    ax.set_title("Broadcasting to an empty room")
    ax.legend(fontsize=8)
    save_figure(fig, path, ["empty_fraction", "cdf"], list(zip(xs, ys)))


def fig_social_timing(report: TimingReport, path: Path) -> None:
    platforms = sorted({g.platform for g in report.groups})
    fig, axes = plt.subplots(2, max(len(platforms), 1), figsize=(3.2 * max(len(platforms), 1), 6), squeeze=False)
    rows = []
    for j, platform in enumerate(platforms):
        groups = [g for g in report.groups if g.platform == platform]
        xs = [g.month_offset for g in groups]
        axes[0][j].errorbar(
            xs, [g.mean_peak_followers for g in groups],
            yerr=[g.se_peak_followers for g in groups], marker="o", capsize=2,
        )
        axes[0][j].set_title(f"peak followers ({platform})", fontsize=9)
        axes[1][j].errorbar(
            xs, [g.mean_peak_ccv for g in groups],
            yerr=[g.se_peak_ccv for g in groups], marker="o", capsize=2, color="#55a868",
        )
        axes[1][j].set_title(f"peak concurrent viewers ({platform})", fontsize=9)
        axes[1][j].set_xlabel("account created (months after streaming start)")
        rows.extend(
            [g.platform, g.month_offset, g.n, g.mean_peak_followers,
             g.se_peak_followers, g.mean_peak_ccv, g.se_peak_ccv]
            for g in groups
        )
    fig.tight_layout()
    save_figure(
        fig, path,
        ["platform", "month_offset", "n", "mean_peak_followers",
         "se_peak_followers", "mean_peak_ccv", "se_peak_ccv"],
        rows,
    )
