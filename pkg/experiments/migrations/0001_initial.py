# Generated by Django 5.2.7 on 2026-10-17 10:12

from django.db import migrations, models


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="SimulationRun",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "label",
                    models.CharField(
                        blank=True,
                        default="",
                        help_text="Free-form label for the run",
                        max_length=255,
                    ),
                ),
                (
                    "seed",
                    models.PositiveBigIntegerField(
                        help_text="Seed the run was executed with"
                    ),
                ),
                (
                    "config_text",
                    models.TextField(
                        blank=True,
                        default="",
                        help_text="Configuration text the run was parsed from",
                    ),
                ),
                (
                    "iterations",
                    models.PositiveIntegerField(help_text="Number of iterations run"),
                ),
                (
                    "population",
                    models.PositiveIntegerField(help_text="Number of agents"),
                ),
                (
                    "final_mean_fitness",
                    models.FloatField(help_text="Mean fitness at the last iteration"),
                ),
                (
                    "final_diversity",
                    models.PositiveIntegerField(
                        help_text="Distinct actions at the last iteration"
                    ),
                ),
                (
                    "convergence_iteration",
                    models.IntegerField(
                        help_text=(
                            "First iteration with 90% of agents on an optimum, "
                            "-1 if never"
                        )
                    ),
                ),
                (
                    "metrics",
                    models.JSONField(
                        blank=True,
                        default=list,
                        help_text="Per-iteration metrics rows",
                    ),
                ),
                (
                    "created_at",
                    models.DateTimeField(
                        auto_now_add=True, help_text="Run creation timestamp"
                    ),
                ),
            ],
            options={
                "verbose_name": "Simulation Run",
                "verbose_name_plural": "Simulation Runs",
                "db_table": "Simulation_Run",
                "ordering": ["-created_at"],
            },
        ),
    ]
