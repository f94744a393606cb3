import logging

from django.core.paginator import EmptyPage, PageNotAnInteger, Paginator
from django.http import JsonResponse
from rest_framework import status
from rest_framework.views import APIView

from _culturesim.helpers import api_exception
from culture.fitness import FitnessKind, FitnessSpec, enumerate_landscape
from experiments import models, serializers
from experiments.helpers import run_data

logger = logging.getLogger(__name__)


class LandscapeView(APIView):
    """
    Retrieve the fitness of every action under F1 or F2.
    """

    def get(self, request, *args, **kwargs):
        kind = kwargs.get("fitness")
        if kind not in (FitnessKind.F1.value, FitnessKind.F2.value):
            raise api_exception("Fitness must be F1 or F2.")

        landscape = enumerate_landscape(FitnessSpec(kind=kind))
        return JsonResponse(
            {
                "status": "success",
                "message": "Landscape retrieved successfully",
                "data": {
                    "fitness": kind,
                    "maximum": landscape.maximum,
                    "minimum": landscape.minimum,
                    "maximizers": [action.index for action in landscape.maximizers],
                    "actions": [
                        {
                            "action_index": action.index,
                            "action": str(action),
                            "fitness": value,
                        }
                        for action, value in landscape.rows
                    ],
                },
            },
            safe=False,
            status=status.HTTP_200_OK,
        )


class SimulationRunsView(APIView):
    """
    Run one configuration and store the result, or list stored runs.
    """

    def post(self, request, *args, **kwargs):
        serializer = serializers.CreateSimulationRunSerializer(data=request.data)
        if serializer.is_valid():
            run = serializer.save()
            logger.info(f"Stored simulation run {run['id']} (seed {run['seed']})")

            return JsonResponse(
                {
                    "status": "success",
                    "message": "Simulation run completed successfully",
                    "data": run,
                },
                status=status.HTTP_201_CREATED,
            )

        # Handle validation errors
        logger.warning(f"Rejected simulation run: {serializer.errors}")
        raise api_exception(serializer.errors)

    def get(self, request, *args, **kwargs):
        page_number = request.GET.get("page", 1)
        page_size = request.GET.get("page_size", 10)
        try:
            page_size = max(1, int(page_size))
        except ValueError:
            raise api_exception("page_size must be an integer.")

        runs = [run_data(run) for run in models.SimulationRun.objects.all()]

        # Paginate runs
        paginator = Paginator(runs, page_size)

        try:
            paginated_runs = paginator.page(int(page_number))
        except (PageNotAnInteger, ValueError):
            paginated_runs = paginator.page(1)
        except EmptyPage:
            # Return last page instead of empty list
            paginated_runs = paginator.page(paginator.num_pages)

        return JsonResponse(
            {
                "status": "success",
                "message": "Simulation runs retrieved successfully",
                "data": {
                    "runs": list(paginated_runs),
                    "pagination": {
                        "current_page": paginated_runs.number,
                        "page_size": page_size,
                        "total_pages": paginator.num_pages,
                        "total_runs": paginator.count,
                        "has_next": paginated_runs.has_next(),
                        "has_previous": paginated_runs.has_previous(),
                    },
                },
            },
            safe=False,
            status=status.HTTP_200_OK,
        )


class GetSimulationRunView(APIView):
    """
    Retrieve one stored simulation run with its metrics.
    """

    def get(self, request, *args, **kwargs):
        run_id = kwargs.get("run_id")
        try:
            run = models.SimulationRun.objects.get(id=run_id)
        except models.SimulationRun.DoesNotExist:
            raise api_exception("Simulation run with the given ID does not exist.", 404)

        return JsonResponse(
            {
                "status": "success",
                "message": "Simulation run retrieved successfully",
                "data": run_data(run, include_metrics=True),
            },
            safe=False,
            status=status.HTTP_200_OK,
        )
