from django.conf import settings

from simulation.metrics import convergence_iteration

METRIC_FIELDS = (
    "iteration",
    "mean_fitness",
    "diversity",
    "top_action_index",
    "top_fraction",
    "entropy",
)


def metrics_data(rows):
    return [{name: getattr(row, name) for name in METRIC_FIELDS} for row in rows]


def result_fields(result):
    """Model fields for a SimulationRun built from a finished RunResult."""
    final = result.metrics[-1]
    return {
        "seed": result.config.seed,
        "iterations": result.config.iterations,
        "population": len(result.records),
        "final_mean_fitness": final.mean_fitness,
        "final_diversity": final.diversity,
        "convergence_iteration": convergence_iteration(
            result.metrics, settings.CULTURESIM["CONVERGENCE_THRESHOLD"]
        ),
        "metrics": metrics_data(result.metrics),
    }


def run_data(run, include_metrics=False):
    data = {
        "id": run.id,
        "label": run.label,
        "seed": run.seed,
        "iterations": run.iterations,
        "population": run.population,
        "final_mean_fitness": run.final_mean_fitness,
        "final_diversity": run.final_diversity,
        "convergence_iteration": run.convergence_iteration,
        "created_at": run.created_at,
    }
    if include_metrics:
        data["config"] = run.config_text
        data["metrics"] = run.metrics
    return data
