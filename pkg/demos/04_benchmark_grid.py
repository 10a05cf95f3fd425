"""A miniature benchmark: several optimizers, repeated trials, and a
Welch-tested comparison table.

Every cell (architecture x optimizer) is run over the same set of trial
seeds; within a trial seed, every optimizer sees the identical split and
identical initial weights, so differences come from the update rules alone.
The table reports mean +/- std of the test metric, the improvement over the
adam baseline, and the two-sided Welch p-value with significance stars.

The command-line equivalent of this script is:

    caadam benchmark --config <json with the settings below> --out <dir>

which additionally persists trials.json / timings.json / report.json and
per-trial loss curves.
"""

from caadam.bench import (
    ExperimentConfig,
    OptimizerEntry,
    build_report,
    format_report_table,
    run_experiment,
)
from caadam.optim import OptimizerConfig
from caadam.scaling import ScalingStrategy
from caadam.train import TrainConfig

config = ExperimentConfig(
    dataset={"kind": "synth_regression", "n": 600, "m": 8,
             "noise_std": 0.5, "seed": 11},
    architectures=((16,), (32, 16)),
    optimizers=(
        OptimizerEntry("adam", OptimizerConfig("adam")),
        OptimizerEntry("caadam-multiplicative", OptimizerConfig(
            "caadam", scaling=ScalingStrategy("multiplicative"))),
        OptimizerEntry("caadam-depth", OptimizerConfig(
            "caadam", scaling=ScalingStrategy("depth_based"))),
        OptimizerEntry("rmsprop", OptimizerConfig("rmsprop")),
    ),
    train=TrainConfig(max_epochs=60),
    trials=5,
    base_seed=2000,
)

total = len(config.architectures) * len(config.optimizers) * config.trials
print(f"running {total} trials "
      f"({len(config.architectures)} architectures x "
      f"{len(config.optimizers)} optimizers x {config.trials} seeds)...\n")

done = []


def tick(result):
    done.append(result)
    print(f"  [{len(done):>2}/{total}] {result.cell} seed={result.seed} "
          f"-> {result.metric_name} {result.metric:.4f} "
          f"in {result.epochs_run} epochs")


trials = run_experiment(config, progress=tick)

print()
print(format_report_table(build_report(trials)))
print("\nStars: *** p<0.001, ** p<0.01, * p<0.05 (two-sided Welch t-test")
print("against the adam cell of the same architecture).")
