"""
Executes an ExperimentPlan: every (variant, replicate) run, then the files.

Runs are independent, so with more than one worker they go to a process pool.
Outputs are always merged in (variant, replicate) order.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import django
from django.conf import settings

from experiments import writers
from experiments.config import Variant
from simulation.engine import RunResult, SimConfig, run

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunSpec:
    variant: int
    replicate: int
    seed: int
    config: SimConfig


@dataclass(frozen=True)
class RunOutcome:
    spec: RunSpec
    result: RunResult


@dataclass(frozen=True)
class PlanResult:
    out_dir: Path
    outcomes: tuple
    files: tuple


def plan_variants(plan, sweep=True):
    if sweep:
        return plan.variants, plan.sweep_keys
    return (Variant(index=0, overrides=(), config=plan.base),), ()


def run_specs(plan, sweep=True):
    variants, _keys = plan_variants(plan, sweep=sweep)
    specs = []
    for variant in variants:
        config = variant.config
        for replicate in range(plan.replicates):
            seed = plan.seed_for(variant.index, replicate)
            specs.append(
                RunSpec(
                    variant=variant.index,
                    replicate=replicate,
                    seed=seed,
                    config=replace(config, seed=seed),
                )
            )
    return specs


def execute(spec):
    # Module level so worker processes can unpickle it.
    return RunOutcome(spec=spec, result=run(spec.config))


def execute_all(specs, workers=1):
    if workers > 1 and len(specs) > 1:
        logger.info(f"Running {len(specs)} runs on {workers} workers")
        with ProcessPoolExecutor(max_workers=workers, initializer=django.setup) as pool:
            return list(pool.map(execute, specs))
    return [execute(spec) for spec in specs]


def metrics_path(out_dir, spec):
    return Path(out_dir) / "metrics" / f"v{spec.variant}_r{spec.replicate}.csv"


def snapshot_path(out_dir, spec, iteration):
    name = f"v{spec.variant}_r{spec.replicate}_t{iteration}.txt"
    return Path(out_dir) / "snapshots" / name


def write_outputs(plan, outcomes, out_dir, threshold, sweep=True):
    out_dir = Path(out_dir)
    files = []
    metrics_by_variant = {}
    for outcome in outcomes:
        spec, result = outcome.spec, outcome.result
        files.append(
            writers.write_metrics_csv(
                metrics_path(out_dir, spec), result.metrics, spec.config.fitness
            )
        )
        for iteration, text in sorted(result.snapshots.items()):
            files.append(
                writers.write_snapshot(snapshot_path(out_dir, spec, iteration), text)
            )
        metrics_by_variant.setdefault(spec.variant, []).append(result.metrics)

    files.append(
        writers.write_summary_csv(
            out_dir / "summary.csv",
            *plan_variants(plan, sweep=sweep),
            metrics_by_variant,
            threshold,
        )
    )
    files.append(writers.write_runs_csv(out_dir / "runs.csv", outcomes, threshold))
    return files


def run_plan(plan, out_dir=None, sweep=True, workers=None):
    """
    Run every replicate of every variant (only the base configuration when
    `sweep` is False) and write metrics, snapshots, summary and run tables.
    """
    simulation_settings = settings.CULTURESIM
    out_dir = Path(out_dir or plan.output_dir)
    workers = workers or simulation_settings["WORKERS"]
    threshold = simulation_settings["CONVERGENCE_THRESHOLD"]

    specs = run_specs(plan, sweep=sweep)
    logger.info(
        f"Executing {len(specs)} runs "
        f"({len(specs) // plan.replicates} variants x {plan.replicates} replicates)"
    )
    outcomes = sorted(
        execute_all(specs, workers=workers),
        key=lambda outcome: (outcome.spec.variant, outcome.spec.replicate),
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    files = write_outputs(plan, outcomes, out_dir, threshold, sweep=sweep)
    logger.info(f"Wrote {len(files)} files to {out_dir}")
    return PlanResult(out_dir=out_dir, outcomes=tuple(outcomes), files=tuple(files))
