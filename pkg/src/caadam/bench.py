"""Repeated-trial benchmark grid and Welch-test comparison reports.

A grid cell is one (architecture, optimizer) pair; every cell runs the same
list of trial seeds (``base_seed + trial_index``), so optimizers compared
within a cell see identical data splits and identical initial weights.
Each trial derives three independent seeds from its trial seed — split,
weight init, batch shuffle — through a single master generator.

``trials.json`` contains only deterministic fields and is byte-identical
across identically configured runs; wall-clock timings go to a separate
``timings.json`` with the same row order.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .data import (
    CLASSIFICATION_TASK,
    DEFAULT_SPLIT,
    Dataset,
    benchmark_regression,
    load_csv,
    split_standardize,
    synth_classification,
    synth_regression,
)
from .errors import ConfigError
from .linalg import make_rng
from .nn import CLASSIFICATION, REGRESSION, NetworkSpec, init_network
from .optim import OptimizerConfig, make_optimizer
from .scaling import ScalingStrategy
from .stats import significance_stars, welch_t_test
from .train import STOP_DIVERGED, TrainConfig, export_log_csv, train, evaluate

TRIALS_VERSION = 1

METRIC_RMSE = "rmse"
METRIC_ACCURACY = "accuracy"


@dataclass(frozen=True)
class OptimizerEntry:
    """One optimizer column of the grid: a display label plus its config."""

    label: str
    config: OptimizerConfig

    def __post_init__(self):
        if not self.label or "|" in self.label:
            raise ConfigError(f"bad optimizer label {self.label!r}")


def default_label(config: OptimizerConfig) -> str:
    if config.scaling is None:
        return config.algorithm
    return f"{config.algorithm}-{config.scaling.kind}"


def arch_label(hidden_sizes) -> str:
    return "x".join(str(s) for s in hidden_sizes)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: dict
    architectures: tuple[tuple[int, ...], ...]
    optimizers: tuple[OptimizerEntry, ...]
    train: TrainConfig = TrainConfig()
    trials: int = 30
    base_seed: int = 0
    split: tuple[float, float, float] = DEFAULT_SPLIT

    def __post_init__(self):
        object.__setattr__(
            self, "architectures", tuple(tuple(int(s) for s in a) for a in self.architectures)
        )
        object.__setattr__(self, "optimizers", tuple(self.optimizers))
        object.__setattr__(self, "split", tuple(float(f) for f in self.split))
        if self.trials < 2:
            raise ConfigError(f"trials must be >= 2, got {self.trials}")
        if not self.architectures:
            raise ConfigError("at least one architecture is required")
        for a in self.architectures:
            if not a or any(s < 1 for s in a):
                raise ConfigError(f"architectures must be non-empty positive sizes, got {a}")
        if not self.optimizers:
            raise ConfigError("at least one optimizer is required")
        labels = [e.label for e in self.optimizers]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate optimizer labels: {labels}")
        if not any(e.config.algorithm == "adam" and e.config.scaling is None
                   for e in self.optimizers):
            raise ConfigError("the grid needs a plain 'adam' entry as comparison baseline")


@dataclass(frozen=True)
class TrialResult:
    cell: str  # "<arch>|<optimizer>"
    architecture: str
    optimizer: str
    seed: int
    metric: float  # NaN when the trial diverged
    metric_name: str
    epochs_run: int
    wall_time_s: float
    stop_reason: str


# ---------------------------------------------------------------------------
# config parsing

_OPTIMIZER_KEYS = {
    "algorithm", "label", "learning_rate", "beta1", "beta2", "eps",
    "decay", "weight_decay", "scaling", "gamma", "sigma",
}

_TRAIN_KEYS = {
    "batch_size", "max_epochs", "early_stop_patience", "early_stop_min_delta",
    "lr_reduce_factor", "lr_reduce_patience", "min_lr", "initial_lr",
}

_EXPERIMENT_KEYS = {
    "dataset", "architectures", "optimizers", "train", "trials", "base_seed", "split",
}


def optimizer_entry_from_dict(spec: dict) -> OptimizerEntry:
    """Build one optimizer column from its config mapping.

    ``scaling``/``gamma``/``sigma`` select and tune a connection- or
    depth-aware scaling strategy; they are rejected for algorithms that do
    not take one.  Unknown keys are errors rather than silently ignored.
    """
    unknown = set(spec) - _OPTIMIZER_KEYS
    if unknown:
        raise ConfigError(f"unknown optimizer config keys: {sorted(unknown)}")
    if "algorithm" not in spec:
        raise ConfigError(f"optimizer entry needs an 'algorithm': {spec}")
    algorithm = spec["algorithm"]

    scaling = None
    if "scaling" in spec:
        if algorithm != "caadam":
            raise ConfigError(f"'scaling' is only valid for caadam, not {algorithm!r}")
        strategy_args = {"kind": spec["scaling"]}
        if "gamma" in spec:
            strategy_args["gamma"] = float(spec["gamma"])
        if "sigma" in spec:
            strategy_args["multiplicative_sigma"] = spec["sigma"]
        scaling = ScalingStrategy(**strategy_args)
    elif algorithm == "caadam":
        raise ConfigError("caadam needs a 'scaling' strategy")
    elif "gamma" in spec or "sigma" in spec:
        raise ConfigError("'gamma'/'sigma' are only valid together with 'scaling'")

    kwargs = {}
    for key in ("learning_rate", "beta1", "beta2", "eps", "decay", "weight_decay"):
        if key in spec:
            kwargs[key] = float(spec[key])
    config = OptimizerConfig(algorithm=algorithm, scaling=scaling, **kwargs)
    return OptimizerEntry(label=spec.get("label", default_label(config)), config=config)


def experiment_from_dict(payload: dict) -> ExperimentConfig:
    """Parse the experiment config mapping used by config files."""
    if not isinstance(payload, dict):
        raise ConfigError(f"experiment config must be a mapping, got {type(payload).__name__}")
    unknown = set(payload) - _EXPERIMENT_KEYS
    if unknown:
        raise ConfigError(f"unknown experiment config keys: {sorted(unknown)}")
    for key in ("dataset", "architectures", "optimizers"):
        if key not in payload:
            raise ConfigError(f"experiment config needs {key!r}")

    train_spec = payload.get("train", {})
    unknown = set(train_spec) - _TRAIN_KEYS
    if unknown:
        raise ConfigError(f"unknown train config keys: {sorted(unknown)}")
    train_cfg = TrainConfig(**train_spec)

    kwargs = {}
    if "trials" in payload:
        kwargs["trials"] = int(payload["trials"])
    if "base_seed" in payload:
        kwargs["base_seed"] = int(payload["base_seed"])
    if "split" in payload:
        split = payload["split"]
        if len(split) != 3:
            raise ConfigError(f"split must have 3 fractions, got {split}")
        kwargs["split"] = tuple(float(f) for f in split)
    return ExperimentConfig(
        dataset=dict(payload["dataset"]),
        architectures=tuple(tuple(a) for a in payload["architectures"]),
        optimizers=tuple(optimizer_entry_from_dict(o) for o in payload["optimizers"]),
        train=train_cfg,
        **kwargs,
    )


# ---------------------------------------------------------------------------
# dataset specs


def load_dataset(spec: dict) -> Dataset:
    """Build the experiment dataset from its config mapping."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "benchmark_regression":
        out = benchmark_regression()
    elif kind == "synth_regression":
        out = synth_regression(
            n=int(spec.pop("n", 2000)),
            m=int(spec.pop("m", 8)),
            noise_std=float(spec.pop("noise_std", 0.0)),
            seed=int(spec.pop("seed", 0)),
            scale=float(spec.pop("scale", 1.0)),
        )
    elif kind == "synth_classification":
        out = synth_classification(
            n=int(spec.pop("n", 2000)),
            m=int(spec.pop("m", 8)),
            classes=int(spec.pop("classes", 3)),
            spread=float(spec.pop("spread", 1.0)),
            seed=int(spec.pop("seed", 0)),
        )
    elif kind == "csv":
        try:
            path = spec.pop("path")
            target = spec.pop("target")
        except KeyError as exc:
            raise ConfigError(f"csv dataset needs a {exc.args[0]!r} option") from exc
        out = load_csv(path, target=target, task=spec.pop("task", "regression"))
    else:
        raise ConfigError(f"unknown dataset kind {kind!r}")
    if spec:
        raise ConfigError(
            f"unknown dataset option(s) for kind {kind!r}: {sorted(spec)}"
        )
    return out


# ---------------------------------------------------------------------------
# trials


def network_spec_for(dataset: Dataset, hidden_sizes) -> NetworkSpec:
    if dataset.task == CLASSIFICATION_TASK:
        return NetworkSpec(dataset.n_features, tuple(hidden_sizes),
                           dataset.n_classes, output_head=CLASSIFICATION)
    return NetworkSpec(dataset.n_features, tuple(hidden_sizes), 1,
                       output_head=REGRESSION)


def trial_setup(dataset: Dataset, hidden_sizes, split, trial_seed: int):
    """Everything a trial shares across optimizers: the data split, the
    initial network, and the batch-shuffle seed.

    The three role seeds are derived from one master generator keyed only by
    ``trial_seed``, so two optimizers compared at the same trial seed start
    from identical splits and identical initial weights by construction.
    Returns (split_dataset, network, shuffle_seed).
    """
    master = make_rng(trial_seed)
    split_seed, init_seed, shuffle_seed = (int(s) for s in master.integers(0, 2**63, size=3))
    split_ds = split_standardize(dataset, split, seed=split_seed)
    net = init_network(network_spec_for(dataset, hidden_sizes), make_rng(init_seed))
    return split_ds, net, shuffle_seed


def run_trial(dataset: Dataset, hidden_sizes, entry: OptimizerEntry,
              train_cfg: TrainConfig, split, trial_seed: int,
              log_path=None) -> TrialResult:
    """One seeded trial: split, init, train, evaluate on the test split."""
    split_ds, net, shuffle_seed = trial_setup(dataset, hidden_sizes, split, trial_seed)
    opt = make_optimizer(entry.config, net)
    cfg = replace(train_cfg, seed=shuffle_seed)

    started = time.monotonic()
    net, log = train(net, opt, split_ds, cfg)
    wall = time.monotonic() - started

    if log.stop_reason == STOP_DIVERGED:
        metric = math.nan
    else:
        metric = evaluate(net, split_ds.test)
    metric_name = METRIC_ACCURACY if dataset.task == CLASSIFICATION_TASK else METRIC_RMSE

    if log_path is not None:
        os.makedirs(os.path.dirname(log_path), exist_ok=True)
        export_log_csv(log, log_path)

    return TrialResult(
        cell=f"{arch_label(hidden_sizes)}|{entry.label}",
        architecture=arch_label(hidden_sizes),
        optimizer=entry.label,
        seed=trial_seed,
        metric=metric,
        metric_name=metric_name,
        epochs_run=log.epochs_run,
        wall_time_s=wall,
        stop_reason=log.stop_reason,
    )


def _trial_log_path(log_dir, hidden_sizes, entry_label: str, seed: int):
    if log_dir is None:
        return None
    cell_dir = f"{arch_label(hidden_sizes)}__{entry_label}"
    return os.path.join(log_dir, cell_dir, f"trial_{seed}.csv")


_WORKER_STATE: dict = {}


def _worker_init(dataset, train_cfg, split, log_dir):
    _WORKER_STATE.update(dataset=dataset, train_cfg=train_cfg,
                         split=split, log_dir=log_dir)


def _worker_run(task):
    hidden_sizes, entry, trial_seed = task
    return run_trial(
        _WORKER_STATE["dataset"], hidden_sizes, entry,
        _WORKER_STATE["train_cfg"], _WORKER_STATE["split"], trial_seed,
        log_path=_trial_log_path(_WORKER_STATE["log_dir"], hidden_sizes,
                                 entry.label, trial_seed),
    )


def run_experiment(cfg: ExperimentConfig, dataset: Dataset | None = None,
                   workers: int = 1, log_dir=None,
                   progress=None) -> list[TrialResult]:
    """Run the full grid; returns results sorted by (cell, seed).

    ``workers > 1`` fans trials out to a process pool; the result list is
    identical either way.  ``log_dir`` writes one loss-curve CSV per trial
    under ``<log_dir>/<arch>__<optimizer>/trial_<seed>.csv``.
    """
    if dataset is None:
        dataset = load_dataset(cfg.dataset)
    tasks = [
        (hidden, entry, cfg.base_seed + k)
        for hidden in cfg.architectures
        for entry in cfg.optimizers
        for k in range(cfg.trials)
    ]
    results: list[TrialResult] = []
    if workers <= 1:
        for hidden, entry, seed in tasks:
            res = run_trial(dataset, hidden, entry, cfg.train, cfg.split, seed,
                            log_path=_trial_log_path(log_dir, hidden, entry.label, seed))
            results.append(res)
            if progress is not None:
                progress(res)
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_worker_init,
            initargs=(dataset, cfg.train, cfg.split, log_dir),
        ) as pool:
            for res in pool.map(_worker_run, tasks):
                results.append(res)
                if progress is not None:
                    progress(res)
    results.sort(key=lambda r: (r.cell, r.seed))
    return results


# ---------------------------------------------------------------------------
# report


@dataclass
class CellStats:
    cell: str
    architecture: str
    optimizer: str
    n_trials: int
    n_diverged: int
    metric_mean: float
    metric_std: float
    epochs_mean: float
    epochs_std: float
    time_mean: float
    time_std: float
    metric_improvement_pct: float
    metric_t: float
    metric_p: float
    metric_stars: str
    time_improvement_pct: float
    time_t: float
    time_p: float
    time_stars: str


@dataclass
class ComparisonReport:
    baseline: str
    metric_name: str
    higher_is_better: bool
    cells: list[CellStats] = field(default_factory=list)
    method: str = "welch_t_test"


def _mean_std(values) -> tuple[float, float]:
    xs = [float(v) for v in values if not math.isnan(float(v))]
    if not xs:
        return math.nan, math.nan
    mean = math.fsum(xs) / len(xs)
    if len(xs) < 2:
        return mean, math.nan
    var = math.fsum((v - mean) ** 2 for v in xs) / (len(xs) - 1)
    return mean, math.sqrt(var)


def _improvement_pct(base_mean: float, cell_mean: float, higher_is_better: bool) -> float:
    if math.isnan(base_mean) or math.isnan(cell_mean) or base_mean == 0.0:
        return math.nan
    if higher_is_better:
        return (cell_mean - base_mean) / base_mean * 100.0
    return (base_mean - cell_mean) / base_mean * 100.0


def _compare(cell_values, base_values) -> tuple[float, float, str]:
    cell = [v for v in cell_values if not math.isnan(v)]
    base = [v for v in base_values if not math.isnan(v)]
    if len(cell) < 2 or len(base) < 2:
        return math.nan, math.nan, ""
    res = welch_t_test(cell, base)
    return res.t, res.p, significance_stars(res.p)


def build_report(trials: list[TrialResult], baseline: str = "adam") -> ComparisonReport:
    """Group trials per cell and compare every cell against the same-architecture
    baseline cell with Welch's t-test.  Diverged trials count toward
    ``n_diverged`` and are excluded from every statistic."""
    if not trials:
        raise ConfigError("no trials to report on")
    by_cell: dict[tuple[str, str], list[TrialResult]] = {}
    for tr in trials:
        by_cell.setdefault((tr.architecture, tr.optimizer), []).append(tr)

    metric_name = trials[0].metric_name
    higher_is_better = metric_name == METRIC_ACCURACY
    report = ComparisonReport(baseline=baseline, metric_name=metric_name,
                              higher_is_better=higher_is_better)

    architectures = sorted({arch for arch, _ in by_cell})
    for arch in architectures:
        if (arch, baseline) not in by_cell:
            raise ConfigError(
                f"baseline optimizer {baseline!r} has no trials for architecture {arch}"
            )

    for (arch, opt), rows in sorted(by_cell.items()):
        base_rows = by_cell[(arch, baseline)]
        valid = [r for r in rows if r.stop_reason != STOP_DIVERGED]
        base_valid = [r for r in base_rows if r.stop_reason != STOP_DIVERGED]

        metric_mean, metric_std = _mean_std([r.metric for r in valid])
        epochs_mean, epochs_std = _mean_std([r.epochs_run for r in valid])
        time_mean, time_std = _mean_std([r.wall_time_s for r in valid])
        base_metric_mean, _ = _mean_std([r.metric for r in base_valid])
        base_time_mean, _ = _mean_std([r.wall_time_s for r in base_valid])

        metric_t, metric_p, metric_stars = _compare(
            [r.metric for r in valid], [r.metric for r in base_valid])
        time_t, time_p, time_stars = _compare(
            [r.wall_time_s for r in valid], [r.wall_time_s for r in base_valid])

        report.cells.append(CellStats(
            cell=f"{arch}|{opt}",
            architecture=arch,
            optimizer=opt,
            n_trials=len(rows),
            n_diverged=len(rows) - len(valid),
            metric_mean=metric_mean,
            metric_std=metric_std,
            epochs_mean=epochs_mean,
            epochs_std=epochs_std,
            time_mean=time_mean,
            time_std=time_std,
            metric_improvement_pct=_improvement_pct(
                base_metric_mean, metric_mean, higher_is_better),
            metric_t=metric_t,
            metric_p=metric_p,
            metric_stars=metric_stars,
            time_improvement_pct=_improvement_pct(base_time_mean, time_mean, False),
            time_t=time_t,
            time_p=time_p,
            time_stars=time_stars,
        ))
    return report


def format_report_table(report: ComparisonReport) -> str:
    """Plain-text summary table; one row per grid cell."""
    direction = "higher is better" if report.higher_is_better else "lower is better"
    lines = [
        f"Comparison vs '{report.baseline}' per architecture "
        f"(Welch's unequal-variance t-test, two-sided).",
        f"Metric: {report.metric_name} ({direction}). "
        "Stars: *** p<0.001, ** p<0.01, * p<0.05.",
        "",
    ]
    header = (f"{'cell':<34} {'n':>3} {'div':>3}  {report.metric_name + ' mean±std':>22} "
              f"{'impr%':>8} {'p':>10} {'sig':<3}  {'epochs':>14} {'time[s]':>14}")
    lines.append(header)
    lines.append("-" * len(header))
    for c in report.cells:
        metric = f"{c.metric_mean:.6f}±{c.metric_std:.6f}" if not math.isnan(c.metric_mean) else "-"
        impr = f"{c.metric_improvement_pct:+.2f}" if not math.isnan(c.metric_improvement_pct) else "-"
        p = f"{c.metric_p:.4g}" if not math.isnan(c.metric_p) else "-"
        epochs = f"{c.epochs_mean:.2f}±{c.epochs_std:.2f}" if not math.isnan(c.epochs_mean) else "-"
        wall = f"{c.time_mean:.2f}±{c.time_std:.2f}" if not math.isnan(c.time_mean) else "-"
        lines.append(f"{c.cell:<34} {c.n_trials:>3} {c.n_diverged:>3}  {metric:>22} "
                     f"{impr:>8} {p:>10} {c.metric_stars:<3}  {epochs:>14} {wall:>14}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# persistence


def _metric_to_json(value: float):
    return None if math.isnan(value) else value


def save_trials(trials: list[TrialResult], path) -> None:
    """Deterministic trial record: no wall-clock fields, stable ordering."""
    rows = [
        {
            "cell": t.cell,
            "architecture": t.architecture,
            "optimizer": t.optimizer,
            "seed": t.seed,
            "metric": _metric_to_json(t.metric),
            "epochs_run": t.epochs_run,
            "stop_reason": t.stop_reason,
        }
        for t in sorted(trials, key=lambda t: (t.cell, t.seed))
    ]
    payload = {
        "version": TRIALS_VERSION,
        "metric": trials[0].metric_name if trials else METRIC_RMSE,
        "results": rows,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def save_timings(trials: list[TrialResult], path) -> None:
    """Wall-clock sidecar, same row order as the trial record."""
    rows = [
        {"cell": t.cell, "seed": t.seed, "wall_time_s": t.wall_time_s}
        for t in sorted(trials, key=lambda t: (t.cell, t.seed))
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"results": rows}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_trials(path, timings_path=None) -> list[TrialResult]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("version") != TRIALS_VERSION:
        raise ConfigError(f"{path}: unsupported trials version {payload.get('version')!r}")
    timings: dict[tuple[str, int], float] = {}
    if timings_path is not None and os.path.exists(timings_path):
        with open(timings_path, encoding="utf-8") as fh:
            for row in json.load(fh)["results"]:
                timings[(row["cell"], row["seed"])] = float(row["wall_time_s"])
    metric_name = payload.get("metric", METRIC_RMSE)
    out = []
    for row in payload["results"]:
        arch, _, opt = row["cell"].partition("|")
        metric = row["metric"]
        out.append(TrialResult(
            cell=row["cell"],
            architecture=row.get("architecture", arch),
            optimizer=row.get("optimizer", opt),
            seed=int(row["seed"]),
            metric=math.nan if metric is None else float(metric),
            metric_name=metric_name,
            epochs_run=int(row["epochs_run"]),
            wall_time_s=timings.get((row["cell"], row["seed"]), math.nan),
            stop_reason=row["stop_reason"],
        ))
    out.sort(key=lambda t: (t.cell, t.seed))
    return out


_REPORT_COLUMNS = [
    "architecture", "optimizer", "n_trials", "n_diverged",
    "metric_mean", "metric_std", "metric_improvement_pct",
    "metric_t", "metric_p", "metric_stars",
    "epochs_mean", "epochs_std",
    "time_mean", "time_std", "time_improvement_pct",
    "time_t", "time_p", "time_stars",
]


def report_to_dict(report: ComparisonReport) -> dict:
    return {
        "method": report.method,
        "baseline": report.baseline,
        "metric": report.metric_name,
        "higher_is_better": report.higher_is_better,
        "cells": [
            {col: getattr(c, col) for col in _REPORT_COLUMNS} for c in report.cells
        ],
    }


def save_report(report: ComparisonReport, json_path=None, csv_path=None) -> None:
    if json_path is not None:
        payload = report_to_dict(report)
        for cell in payload["cells"]:
            for key, value in cell.items():
                if isinstance(value, float) and math.isnan(value):
                    cell[key] = None
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if csv_path is not None:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(_REPORT_COLUMNS)
            for c in report.cells:
                row = []
                for col in _REPORT_COLUMNS:
                    value = getattr(c, col)
                    if isinstance(value, float):
                        row.append("" if math.isnan(value) else repr(value))
                    else:
                        row.append(value)
                writer.writerow(row)
