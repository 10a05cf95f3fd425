"""Command-line front end.

Subcommands:

* ``train``      — one training run (first architecture x first optimizer
                   of the config), writing a loss-curve CSV and metrics JSON.
* ``benchmark``  — the full repeated-trial grid, writing trials.json,
                   timings.json, report.json/report.csv, and per-trial logs.
* ``report``     — rebuild a comparison report from an existing trials.json.
* ``curves``     — merge per-trial loss-curve CSVs into one long-format CSV.

Exit codes: 0 success, 1 config error, 2 data error, 3 every trial diverged.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import replace

from . import bench
from .data import CLASSIFICATION_TASK
from .errors import ConfigError, DataError
from .linalg import make_rng
from .nn import init_network
from .optim import make_optimizer
from .train import STOP_DIVERGED, export_log_csv, train, evaluate

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_DIVERGED = 3


def _load_config(path) -> bench.ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return bench.experiment_from_dict(payload)


def _cmd_train(args) -> int:
    cfg = _load_config(args.config)
    dataset = bench.load_dataset(cfg.dataset)
    hidden = cfg.architectures[0]
    entry = cfg.optimizers[0]

    master = make_rng(cfg.base_seed)
    split_seed, init_seed, shuffle_seed = (int(s) for s in master.integers(0, 2**63, size=3))
    split_ds = bench.split_standardize(dataset, cfg.split, seed=split_seed)
    net = init_network(bench.network_spec_for(dataset, hidden), make_rng(init_seed))
    opt = make_optimizer(entry.config, net)

    started = time.monotonic()
    net, log = train(net, opt, split_ds, replace(cfg.train, seed=shuffle_seed))
    wall = time.monotonic() - started

    os.makedirs(args.out, exist_ok=True)
    export_log_csv(log, os.path.join(args.out, "log.csv"))
    if log.stop_reason == STOP_DIVERGED:
        metric = None
    else:
        metric = evaluate(net, split_ds.test)
    metric_name = (bench.METRIC_ACCURACY if dataset.task == CLASSIFICATION_TASK
                   else bench.METRIC_RMSE)
    metrics = {
        "architecture": bench.arch_label(hidden),
        "optimizer": entry.label,
        "metric": metric,
        "metric_name": metric_name,
        "epochs_run": log.epochs_run,
        "best_val_loss": None if math.isinf(log.best_val_loss) else log.best_val_loss,
        "stop_reason": log.stop_reason,
        "wall_time_s": wall,
    }
    with open(os.path.join(args.out, "metrics.json"), "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{entry.label} on {bench.arch_label(hidden)}: "
          f"{metric_name}={'n/a' if metric is None else f'{metric:.6f}'} "
          f"after {log.epochs_run} epochs ({log.stop_reason}); outputs in {args.out}")
    return EXIT_DIVERGED if log.stop_reason == STOP_DIVERGED else EXIT_OK


def _cmd_benchmark(args) -> int:
    cfg = _load_config(args.config)
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    os.makedirs(args.out, exist_ok=True)
    log_dir = os.path.join(args.out, "logs")

    done = {"n": 0}
    total = len(cfg.architectures) * len(cfg.optimizers) * cfg.trials

    def progress(res):
        done["n"] += 1
        if not args.quiet:
            print(f"[{done['n']:>4}/{total}] {res.cell} seed={res.seed} "
                  f"epochs={res.epochs_run} ({res.stop_reason})")

    trials = bench.run_experiment(cfg, workers=args.parallel, log_dir=log_dir,
                                  progress=progress)
    bench.save_trials(trials, os.path.join(args.out, "trials.json"))
    bench.save_timings(trials, os.path.join(args.out, "timings.json"))
    if all(t.stop_reason == STOP_DIVERGED for t in trials):
        print("every trial diverged; no report written", file=sys.stderr)
        return EXIT_DIVERGED
    report = bench.build_report(trials, baseline=args.baseline)
    bench.save_report(report, os.path.join(args.out, "report.json"),
                      os.path.join(args.out, "report.csv"))
    print()
    print(bench.format_report_table(report))
    print(f"\noutputs in {args.out}")
    return EXIT_OK


def _cmd_report(args) -> int:
    trials = bench.load_trials(args.trials, timings_path=args.timings)
    if all(t.stop_reason == STOP_DIVERGED for t in trials):
        print("every trial diverged; nothing to compare", file=sys.stderr)
        return EXIT_DIVERGED
    report = bench.build_report(trials, baseline=args.baseline)
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        bench.save_report(report, os.path.join(args.out, "report.json"),
                          os.path.join(args.out, "report.csv"))
    print(bench.format_report_table(report))
    return EXIT_OK


def _cmd_curves(args) -> int:
    rows = []
    for dirpath, _, filenames in os.walk(args.logs):
        for name in sorted(filenames):
            if not name.endswith(".csv"):
                continue
            cell = os.path.relpath(dirpath, args.logs).replace("__", "|")
            seed = ""
            stem = name[:-4]
            if stem.startswith("trial_"):
                seed = stem[len("trial_"):]
            with open(os.path.join(dirpath, name), newline="", encoding="utf-8") as fh:
                reader = csv.DictReader(fh)
                expected = ["epoch", "train_loss", "val_loss", "lr"]
                if reader.fieldnames != expected:
                    raise DataError(
                        f"{os.path.join(dirpath, name)}: expected columns {expected}, "
                        f"got {reader.fieldnames}")
                for rec in reader:
                    rows.append([cell, seed, rec["epoch"], rec["train_loss"],
                                 rec["val_loss"], rec["lr"]])
    if not rows:
        raise DataError(f"no loss-curve CSVs found under {args.logs}")
    rows.sort(key=lambda r: (r[0], r[1], int(r[2])))
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cell", "seed", "epoch", "train_loss", "val_loss", "lr"])
        writer.writerows(rows)
    print(f"merged {len(rows)} epoch rows into {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caadam",
        description="Train MLPs and benchmark connection-aware optimizers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="single training run (first architecture "
                                           "and first optimizer of the config)")
    p_train.add_argument("--config", required=True, help="experiment config JSON")
    p_train.add_argument("--out", required=True, help="output directory")
    p_train.set_defaults(func=_cmd_train)

    p_bench = sub.add_parser("benchmark", help="run the repeated-trial grid")
    p_bench.add_argument("--config", required=True, help="experiment config JSON")
    p_bench.add_argument("--out", required=True, help="output directory")
    p_bench.add_argument("--trials", type=int, default=None,
                         help="override trials per cell")
    p_bench.add_argument("--parallel", type=int, default=1,
                         help="worker processes (default 1)")
    p_bench.add_argument("--baseline", default="adam",
                         help="baseline optimizer label (default adam)")
    p_bench.add_argument("--quiet", action="store_true", help="suppress per-trial lines")
    p_bench.set_defaults(func=_cmd_benchmark)

    p_report = sub.add_parser("report", help="rebuild a report from trials.json")
    p_report.add_argument("--trials", required=True, help="trials.json path")
    p_report.add_argument("--timings", default=None, help="optional timings.json path")
    p_report.add_argument("--baseline", default="adam",
                          help="baseline optimizer label (default adam)")
    p_report.add_argument("--out", default=None, help="directory for report.json/csv")
    p_report.set_defaults(func=_cmd_report)

    p_curves = sub.add_parser("curves", help="merge per-trial loss-curve CSVs")
    p_curves.add_argument("--logs", required=True, help="benchmark logs directory")
    p_curves.add_argument("--out", required=True, help="merged CSV path")
    p_curves.set_defaults(func=_cmd_curves)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
