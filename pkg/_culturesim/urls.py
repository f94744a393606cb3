"""
URL configuration for the culturesim project.

The JSON API lives under /api/experiments/ (oracle landscape and run history);
the admin lists stored simulation runs.
"""

from django.contrib import admin
from django.urls import include, path

urlpatterns = [
    path("admin/", admin.site.urls),
    path("api/experiments/", include("experiments.urls")),
]
