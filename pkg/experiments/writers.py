"""
File formats written by the experiment runner.

All CSVs use "\\n" line endings and render floats with repr() so values read
back exactly.
"""

import csv
import logging
from collections import Counter
from pathlib import Path

import numpy as np

from culture.actions import action_from_index
from simulation.metrics import convergence_iteration, csv_header
from simulation.world import EMPTY_CELL, parse_snapshot

logger = logging.getLogger(__name__)

SUMMARY_STATS = ("mean_fitness", "diversity", "top_fraction")
CONVERGENCE_STAT = "convergence_iteration"
RUNS_HEADER = [
    "variant_id",
    "replicate",
    "seed",
    "convergence_iteration",
    "final_mean_fitness",
    "final_diversity",
]
# Legend glyphs, most common action first.
GLYPHS = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"


def render_value(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _writer(handle):
    return csv.writer(handle, lineterminator="\n")


def write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = _writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([render_value(value) for value in row])
    logger.debug(f"Wrote {path}")
    return path


def write_metrics_csv(path, metrics, spec):
    return write_rows(path, csv_header(spec), (row.csv_values() for row in metrics))


def sample_stats(values):
    """(mean, sample sd, n); sd is 0.0 for a single value."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return None, None, 0
    sd = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return float(np.mean(values)), sd, int(values.size)


def summary_header(sweep_keys):
    return ["variant_id", *sweep_keys, "iteration", "stat", "mean", "sd", "n"]


def summary_rows(variant, replicate_metrics, threshold):
    """
    Rows for one variant: per-iteration stats over replicates, then the
    convergence row (over converged replicates only).
    """
    parameters = [value for _key, value in variant.overrides]
    rows = []
    iterations = len(replicate_metrics[0])
    for t in range(iterations):
        for stat in SUMMARY_STATS:
            mean, sd, n = sample_stats(
                [getattr(metrics[t], stat) for metrics in replicate_metrics]
            )
            rows.append([variant.index, *parameters, t, stat, mean, sd, n])

    converged = [
        iteration
        for iteration in (
            convergence_iteration(metrics, threshold) for metrics in replicate_metrics
        )
        if iteration >= 0
    ]
    mean, sd, n = sample_stats(converged)
    if n == 0:
        mean, sd = -1, 0.0
    rows.append([variant.index, *parameters, None, CONVERGENCE_STAT, mean, sd, n])
    return rows


def write_summary_csv(path, variants, sweep_keys, metrics_by_variant, threshold):
    rows = []
    for variant in variants:
        if variant.index in metrics_by_variant:
            rows.extend(
                summary_rows(variant, metrics_by_variant[variant.index], threshold)
            )
    return write_rows(path, summary_header(sweep_keys), rows)


def write_runs_csv(path, outcomes, threshold):
    rows = []
    for outcome in outcomes:
        final = outcome.result.metrics[-1]
        rows.append(
            [
                outcome.spec.variant,
                outcome.spec.replicate,
                outcome.spec.seed,
                convergence_iteration(outcome.result.metrics, threshold),
                final.mean_fitness,
                final.diversity,
            ]
        )
    return write_rows(path, RUNS_HEADER, rows)


def write_snapshot(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    return path


def landscape_header():
    return ["action_index", "p0", "p1", "p2", "p3", "p4", "p5", "fitness"]


def landscape_rows(landscape):
    for action, value in landscape.rows:
        yield [action.index, *(int(part) for part in action), value]


def write_landscape_csv(handle, landscape):
    """The brute-force oracle: one row per action, in index order."""
    writer = _writer(handle)
    writer.writerow(landscape_header())
    for row in landscape_rows(landscape):
        writer.writerow([render_value(value) for value in row])


def render_snapshot_legend(text):
    """
    An aligned glyph grid for a snapshot plus a legend, one glyph per action.

    Glyphs go to actions by population count (descending), then index.
    Actions beyond the glyph alphabet share '*'.
    """
    grid = parse_snapshot(text)
    counts = Counter(index for row in grid for index in row if index is not None)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    glyphs = {
        index: GLYPHS[position] if position < len(GLYPHS) else "*"
        for position, (index, _count) in enumerate(ranked)
    }

    lines = [
        " ".join(EMPTY_CELL if index is None else glyphs[index] for index in row)
        for row in grid
    ]
    lines.append("")
    width = len(str(max(counts.values()))) if counts else 1
    for index, count in ranked:
        action = action_from_index(index)
        lines.append(f"{glyphs[index]} = {index:>3} ({action}) {count:>{width}}")
    lines.append(f"{EMPTY_CELL} = empty")
    return "\n".join(lines) + "\n"
