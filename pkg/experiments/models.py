from django.db import models


class SimulationRun(models.Model):
    label = models.CharField(
        max_length=255,
        help_text="Free-form label for the run",
        blank=True,
        default="",
    )
    seed = models.PositiveBigIntegerField(help_text="Seed the run was executed with")
    config_text = models.TextField(
        help_text="Configuration text the run was parsed from", blank=True, default=""
    )
    iterations = models.PositiveIntegerField(help_text="Number of iterations run")
    population = models.PositiveIntegerField(help_text="Number of agents")
    final_mean_fitness = models.FloatField(
        help_text="Mean fitness at the last iteration"
    )
    final_diversity = models.PositiveIntegerField(
        help_text="Distinct actions at the last iteration"
    )
    convergence_iteration = models.IntegerField(
        help_text="First iteration with 90% of agents on an optimum, -1 if never"
    )
    metrics = models.JSONField(
        help_text="Per-iteration metrics rows", default=list, blank=True
    )
    created_at = models.DateTimeField(
        auto_now_add=True, help_text="Run creation timestamp"
    )

    class Meta:
        db_table = "Simulation_Run"
        verbose_name = "Simulation Run"
        verbose_name_plural = "Simulation Runs"
        ordering = ["-created_at"]

    def __str__(self):
        return f"{self.label or 'Run'} (seed {self.seed})"
