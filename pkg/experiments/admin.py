from django.contrib import admin

from experiments.models import SimulationRun


@admin.register(SimulationRun)
class SimulationRunAdmin(admin.ModelAdmin):
    list_display = (
        "id",
        "label",
        "seed",
        "population",
        "final_mean_fitness",
        "final_diversity",
        "convergence_iteration",
        "created_at",
    )
    search_fields = ("label", "seed")
    list_display_links = ("label",)
    readonly_fields = ("metrics", "created_at")
    ordering = ("-created_at",)
