from django.urls import path

from experiments import views

app_name = "experiments"

urlpatterns = [
    # Fitness landscape oracle
    path(
        "landscape/<str:fitness>",
        views.LandscapeView.as_view(),
        name="get-landscape",
    ),
    # Run a configuration or list stored runs
    path(
        "runs",
        views.SimulationRunsView.as_view(),
        name="runs",
    ),
    path(
        "runs/<int:run_id>",
        views.GetSimulationRunView.as_view(),
        name="get-run",
    ),
]
