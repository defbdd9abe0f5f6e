"""Command-line interface.

Subcommands::

    synth     write a synthetic dataset (seeded, deterministic)
    validate  load a dataset directory and report schema/invariant errors
    features  dump the 24 windowed features for every eligible streamer
    analyze   run the full analysis bundle into an output directory
    oracle    run the built-in oracle suite and print pass/fail

Every command exits nonzero with a one-line ``error: ...`` reason on
failure.  ``analyze`` writes ``manifest.txt`` (content hash per produced
file) and ``runconfig.txt`` (the resolved analysis configuration); reruns
with identical inputs and seeds reproduce identical manifests, regardless of
``--jobs``.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .binarize import write_cutoff_csv
from .data import Dataset, DatasetError, MEASURES
from .features import FEATURE_NAMES
from .io import load_dataset, save_dataset
from .labels import TASKS
from . import report as rpt
from .experiments import (
    ExperimentContext,
    coefficient_table,
    cutoff_example,
    effort_analysis,
    leakage_audit,
    population_stats,
    run_age_sweep,
    run_interval_sweep,
    social_timing_analysis,
)
from .selfcheck import run_selfcheck
from .synthgen import SynthConfig, generate, load_config

DEFAULT_DELTAS = (2, 4, 6, 8, 10)
COEFFICIENT_MEASURES = ("followers", "cumulative_views", "concurrent_viewers")


@dataclass
class RunConfig:
    dataset: str
    out: str
    tasks: list[str] = field(default_factory=lambda: list(TASKS))
    measures: list[str] = field(default_factory=lambda: list(MEASURES))
    deltas: list[int] = field(default_factory=lambda: list(DEFAULT_DELTAS))
    split_seed: int = 0
    cutoff_method: str = "argmax"
    growth_mode: str = "fractional"
    least_squares: bool = False
    audit: bool = False
    jobs: int = 1

    def validate(self) -> None:
        if not self.tasks:
            raise ValueError("at least one task must be selected")
        for task in self.tasks:
            if task not in TASKS:
                raise ValueError(f"unknown task {task!r}")
        for measure in self.measures:
            if measure not in MEASURES:
                raise ValueError(f"unknown measure {measure!r}")
        if self.cutoff_method not in ("argmax", "median"):
            raise ValueError(f"unknown cutoff method {self.cutoff_method!r}")
        if self.growth_mode not in ("fractional", "difference"):
            raise ValueError(f"unknown growth mode {self.growth_mode!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def resolved_lines(self, dataset_digest: str) -> list[str]:
        # jobs is an execution detail (must not affect outputs); dataset and
        # output paths vary between runs, so the dataset enters by content hash
        items = {
            "dataset_sha256": dataset_digest,
            "tasks": ",".join(self.tasks),
            "measures": ",".join(self.measures),
            "deltas": ",".join(str(d) for d in self.deltas),
            "split_seed": self.split_seed,
            "cutoff_method": self.cutoff_method,
            "growth_mode": self.growth_mode,
            "least_squares": int(self.least_squares),
        }
        return [f"{k} = {v}" for k, v in items.items()]


def _dataset_digest(path: str) -> str:
    import hashlib

    from .io import REQUIRED_FILES

    digest = hashlib.sha256()
    for name in REQUIRED_FILES:
        digest.update(name.encode())
        digest.update((Path(path) / name).read_bytes())
    return digest.hexdigest()


def _apply_config_file(config: RunConfig, path: str) -> None:
    """Config file keys override flags (documented precedence)."""
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in ("task", "tasks"):
            config.tasks = [t.strip() for t in value.split(",") if t.strip()]
        elif key in ("measure", "measures"):
            config.measures = [m.strip() for m in value.split(",") if m.strip()]
        elif key in ("delta", "deltas"):
            config.deltas = [int(d) for d in value.split(",") if d.strip()]
        elif key == "split_seed":
            config.split_seed = int(value)
        elif key == "cutoff_method":
            config.cutoff_method = value
        elif key == "growth_mode":
            config.growth_mode = value
        elif key == "least_squares":
            config.least_squares = value.lower() in ("1", "true", "yes")
        elif key == "jobs":
            config.jobs = int(value)
        else:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")


def cmd_synth(args) -> int:
    if args.config:
        config = load_config(args.config)
    else:
        config = SynthConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.n_streamers is not None:
        config.n_streamers = args.n_streamers
    if args.n_months is not None:
        config.n_months = args.n_months
    if args.behavior_effect is not None:
        config.behavior_effect = args.behavior_effect
    config.validate()
    dataset = generate(config)
    save_dataset(dataset, args.out)
    n_events = sum(
        len(r.broadcasts) + len(r.posts) for r in dataset.streamers.values()
    )
    print(
        f"synth: wrote {config.n_streamers} streamers, {n_events} events, "
        f"{config.n_months} months to {args.out} (seed={config.seed}, "
        f"behavior_effect={config.behavior_effect})"
    )
    return 0


def cmd_validate(args) -> int:
    dataset = load_dataset(args.dataset)
    n_b = sum(len(r.broadcasts) for r in dataset.streamers.values())
    n_p = sum(len(r.posts) for r in dataset.streamers.values())
    months = sorted({r.n_months for r in dataset.streamers.values()})
    print(
        f"ok: {len(dataset.streamers)} streamers, {n_b} broadcasts, {n_p} posts, "
        f"snapshot months {months[0]}..{months[-1]}"
    )
    return 0


def cmd_features(args) -> int:
    dataset = load_dataset(args.dataset)
    t, delta = args.t, args.delta
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    from .features import compute_features

    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["streamer", "t", "delta", *FEATURE_NAMES])
        for sid in dataset.streamer_ids():
            record = dataset.streamers[sid]
            if record.n_months < t + delta:
                continue
            vec = compute_features(record, t, delta, dataset.game_table)
            writer.writerow([sid, t, delta] + [rpt.fmt(vec[n]) for n in FEATURE_NAMES])
    print(f"features: wrote {out}")
    return 0


def _sweep_jobs(config: RunConfig, dataset: Dataset, ctx: ExperimentContext):
    """Independent analysis jobs keyed for a deterministic ordered reduction."""
    jobs = {}
    for task in config.tasks:
        for measure in config.measures:
            if task == "self_growth" and measure != "concurrent_viewers":
                continue
            jobs[("interval", task, measure)] = (
                lambda t=task, m=measure: run_interval_sweep(
                    dataset, t, m, config.deltas,
                    cutoff_method=config.cutoff_method,
                    use_least_squares=config.least_squares, ctx=ctx,
                )
            )
            if task == "relative_growth" and 2 in range(1, 12):
                jobs[("age", task, measure)] = (
                    lambda t=task, m=measure: run_age_sweep(
                        dataset, t, m, delta=2,
                        cutoff_method=config.cutoff_method,
                        use_least_squares=config.least_squares, ctx=ctx,
                    )
                )
    return jobs


def cmd_analyze(args) -> int:
    config = RunConfig(dataset=args.dataset, out=args.out)
    if args.task:
        config.tasks = args.task
    if args.measure:
        config.measures = args.measure
    if args.delta:
        config.deltas = args.delta
    config.split_seed = args.split_seed
    config.cutoff_method = args.cutoff_method
    config.growth_mode = args.growth_mode
    config.least_squares = args.least_squares
    config.audit = args.audit
    config.jobs = args.jobs
    if args.config:
        _apply_config_file(config, args.config)
    config.validate()

    dataset = load_dataset(config.dataset)
    outdir = Path(config.out)
    outdir.mkdir(parents=True, exist_ok=True)
    ctx = ExperimentContext(
        dataset, config.split_seed, config.cutoff_method, config.growth_mode
    )

    jobs = _sweep_jobs(config, dataset, ctx)
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            futures = {key: pool.submit(fn) for key, fn in jobs.items()}
            results = {key: futures[key].result() for key in sorted(futures)}
    else:
        results = {key: jobs[key]() for key in sorted(jobs)}

    interval_sweeps = [results[k] for k in sorted(results) if k[0] == "interval"]
    age_sweeps = [results[k] for k in sorted(results) if k[0] == "age"]
    all_sweeps = interval_sweeps + age_sweeps

    coef_measures = [m for m in config.measures if m in COEFFICIENT_MEASURES]
    tables = (
        coefficient_table(
            dataset, coef_measures, split_seed=config.split_seed,
            cutoff_method=config.cutoff_method, ctx=ctx,
        )
        if "relative_growth" in config.tasks and coef_measures
        else []
    )
    effort = effort_analysis(dataset)
    timing = social_timing_analysis(dataset)
    population = population_stats(dataset)

    rpt.write_auc_curves(outdir / "auc_curves.csv", all_sweeps)
    if tables:
        rpt.write_coefficients(outdir / "coefficients.csv", tables)
    rpt.write_effort(outdir / "effort.csv", effort)
    rpt.write_timing(outdir / "timing.csv", timing)
    rpt.write_population(outdir / "population.csv", population)

    cutoff_dir = outdir / "cutoffs"
    cutoff_dir.mkdir(exist_ok=True)
    for (measure, t, delta), table in sorted(ctx._window_tables.items()):
        write_cutoff_csv(table, cutoff_dir / f"{measure}_t{t}_d{delta}.csv")
    for (measure, m), table in sorted(ctx._month_tables.items()):
        write_cutoff_csv(table, cutoff_dir / f"{measure}_month{m}.csv")

    from .io import write_labels_csv
    from .labels import LabelSet, TaskSpec

    label_sets = [
        LabelSet(TaskSpec(task, measure, t, delta), bits)
        for (task, measure, t, delta), bits in sorted(ctx._labels.items())
    ]
    write_labels_csv(label_sets, outdir / "labels.csv")

    rpt.fig_popularity_skew(population, outdir / "popularity_skew.svg")
    rpt.fig_ccdf_by_age(population, outdir / "ccdf_by_age.svg")
    try:
        example = cutoff_example(dataset)
        rpt.fig_cutoff_example(example, outdir / "feature_cutoff_example.svg")
    except ValueError as exc:
        (outdir / "feature_cutoff_example.skipped.txt").write_text(f"{exc}\n")
    if interval_sweeps:
        rpt.fig_auc_by_interval(
            [s for s in interval_sweeps if s.task != "self_growth"],
            outdir / "auc_by_interval.svg",
        )
    if age_sweeps:
        rpt.fig_auc_by_age(age_sweeps, outdir / "auc_by_age.svg")
    self_sweeps = [s for s in interval_sweeps if s.task == "self_growth"]
    if self_sweeps:
        rpt.fig_self_growth(self_sweeps[0], outdir / "auc_self_growth.svg")
    rpt.fig_effort_box(effort, outdir / "effort_hours_box.svg")
    rpt.fig_empty_broadcast_cdf(effort, outdir / "empty_broadcast_cdf.svg")
    rpt.fig_social_timing(timing, outdir / "social_timing.svg")

    if config.audit:
        lines = []
        for sweep in interval_sweeps:
            audit = leakage_audit(dataset, sweep)
            lines.append(
                f"{sweep.task}/{sweep.measure}: "
                f"{'ok' if audit.ok else 'LEAK'} ({audit.checked} checks)"
            )
            lines.extend(f"  mismatch: {m}" for m in audit.mismatches)
        (outdir / "audit.txt").write_text("\n".join(lines) + "\n")

    (outdir / "runconfig.txt").write_text(
        "\n".join(config.resolved_lines(_dataset_digest(config.dataset))) + "\n"
    )
    manifest = rpt.write_manifest(outdir)
    print(f"analyze: wrote {sum(1 for _ in outdir.rglob('*') if _.is_file())} files; manifest {manifest}")
    return 0


def cmd_oracle(args) -> int:
    results = run_selfcheck(args.seed)
    failed = 0
    for res in results:
        print(f"{'pass' if res.passed else 'FAIL'}  {res.name}: {res.detail}")
        failed += 0 if res.passed else 1
    if failed:
        print(f"error: {failed} oracle check(s) failed", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamgrowth",
        description="Windowed behavioral features and popularity-growth analysis",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    synth = sub.add_parser("synth", help="generate a synthetic dataset")
    synth.add_argument("--out", required=True)
    synth.add_argument("--config", help="key = value generator config file")
    synth.add_argument("--seed", type=int)
    synth.add_argument("--n-streamers", type=int, dest="n_streamers")
    synth.add_argument("--n-months", type=int, dest="n_months")
    synth.add_argument("--behavior-effect", type=float, dest="behavior_effect")
    synth.set_defaults(fn=cmd_synth)

    validate = sub.add_parser("validate", help="validate a dataset directory")
    validate.add_argument("--dataset", required=True)
    validate.set_defaults(fn=cmd_validate)

    features = sub.add_parser("features", help="dump windowed features as CSV")
    features.add_argument("--dataset", required=True)
    features.add_argument("--t", type=int, required=True)
    features.add_argument("--delta", type=int, required=True)
    features.add_argument("--out", required=True)
    features.set_defaults(fn=cmd_features)

    analyze = sub.add_parser("analyze", help="run the full report bundle")
    analyze.add_argument("--dataset", required=True)
    analyze.add_argument("--out", required=True)
    analyze.add_argument("--task", action="append", choices=TASKS)
    analyze.add_argument("--measure", action="append", choices=MEASURES)
    analyze.add_argument("--delta", action="append", type=int)
    analyze.add_argument("--split-seed", type=int, default=0, dest="split_seed")
    analyze.add_argument(
        "--cutoff-method", choices=("argmax", "median"), default="argmax",
        dest="cutoff_method",
    )
    analyze.add_argument(
        "--growth-mode", choices=("fractional", "difference"), default="fractional",
        dest="growth_mode",
    )
    analyze.add_argument("--least-squares", action="store_true", dest="least_squares")
    analyze.add_argument("--audit", action="store_true")
    analyze.add_argument("--jobs", type=int, default=1)
    analyze.add_argument("--config", help="key = value run config (overrides flags)")
    analyze.set_defaults(fn=cmd_analyze)

    oracle = sub.add_parser("oracle", help="run the built-in oracle suite")
    oracle.add_argument("--seed", type=int, default=0)
    oracle.set_defaults(fn=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DatasetError as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
