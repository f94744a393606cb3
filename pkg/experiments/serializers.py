from fractions import Fraction

from rest_framework import serializers

from _culturesim.helpers import ConfigurationError
from culture.fitness import FitnessKind, FitnessSpec
from experiments.helpers import result_fields, run_data
from experiments.models import SimulationRun
from simulation.engine import (
    DEFAULT_RATE_OF_CHANGE,
    BroadcastPolicy,
    BroadcastSelection,
    SimConfig,
    UpdateMode,
    ratio_to_probability,
    run,
)
from simulation.streams import MASK64
from simulation.world import (
    Barrier,
    Placement,
    PlacementKind,
    Region,
    Topology,
    WorldSpec,
)


class ProbabilityField(serializers.FloatField):
    """A float in [0, 1]; also accepts fractions such as 1/6."""

    def __init__(self, **kwargs):
        kwargs.setdefault("min_value", 0.0)
        kwargs.setdefault("max_value", 1.0)
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        if isinstance(data, str) and "/" in data:
            try:
                data = float(Fraction(data.strip()))
            except (ValueError, ZeroDivisionError):
                self.fail("invalid")
        return super().to_internal_value(data)


class RatioField(serializers.CharField):
    """Invention to imitation ratio 'r:s', stored as the probability of inventing."""

    def to_internal_value(self, data):
        text = super().to_internal_value(data)
        try:
            return ratio_to_probability(text)
        except ConfigurationError as e:
            raise serializers.ValidationError(e.message)


class IntegerListField(serializers.Field):
    """Comma separated integers, e.g. '0, 4, 20'."""

    def to_internal_value(self, data):
        if isinstance(data, (list, tuple)):
            items = data
        else:
            items = [item for item in str(data).split(",") if item.strip()]
        try:
            return tuple(int(str(item).strip()) for item in items)
        except ValueError:
            raise serializers.ValidationError("Expected comma separated integers.")

    def to_representation(self, value):
        return ", ".join(str(item) for item in value)


class CellListField(serializers.Field):
    """Semicolon separated cells, e.g. '0,0; 3,4'."""

    def to_internal_value(self, data):
        cells = []
        for item in str(data).split(";"):
            if not item.strip():
                continue
            try:
                row, col = (int(part.strip()) for part in item.split(","))
            except ValueError:
                raise serializers.ValidationError(f"Invalid cell {item.strip()!r}.")
            cells.append((row, col))
        return tuple(cells)

    def to_representation(self, value):
        return "; ".join(f"{row},{col}" for row, col in value)


class ColumnInterfaceField(serializers.Field):
    """'3,4' (or just '3'): the interface between columns 3 and 4."""

    def to_internal_value(self, data):
        parts = [part.strip() for part in str(data).split(",")]
        try:
            cols = [int(part) for part in parts]
        except ValueError:
            raise serializers.ValidationError("Expected a column pair such as '3,4'.")
        if len(cols) == 1:
            cols.append(cols[0] + 1)
        if len(cols) != 2 or cols[1] != cols[0] + 1 or cols[0] < 0:
            raise serializers.ValidationError(
                "A barrier lies between adjacent columns c and c+1."
            )
        return cols[0]

    def to_representation(self, value):
        return f"{value},{value + 1}"


class FitnessSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=FitnessKind.values(), default="F1")
    weight_f1 = serializers.FloatField(min_value=0.0, default=0.0)
    weight_f2 = serializers.FloatField(min_value=0.0, default=0.0)

    def validate(self, attrs):
        if (
            attrs["kind"] == FitnessKind.WEIGHTED.value
            and attrs["weight_f1"] + attrs["weight_f2"] <= 0
        ):
            raise serializers.ValidationError(
                {"weight_f1": "A weighted fitness needs at least one positive weight."}
            )
        return attrs


class WorldSerializer(serializers.Serializer):
    rows = serializers.IntegerField(min_value=1, default=10)
    cols = serializers.IntegerField(min_value=1, default=10)
    topology = serializers.ChoiceField(choices=Topology.values(), default="torus")
    placement = serializers.ChoiceField(choices=PlacementKind.values(), default="full")
    density = ProbabilityField(required=False)
    cells = CellListField(required=False)

    def validate(self, attrs):
        placement = attrs["placement"]
        if placement == PlacementKind.RANDOM.value:
            density = attrs.get("density")
            if density is None or density <= 0:
                raise serializers.ValidationError(
                    {"density": "Random placement needs a density in (0, 1]."}
                )
        if placement == PlacementKind.EXPLICIT.value:
            cells = attrs.get("cells", ())
            if not cells:
                raise serializers.ValidationError(
                    {"cells": "Explicit placement needs at least one cell."}
                )
            if len(set(cells)) != len(cells):
                raise serializers.ValidationError({"cells": "A cell is listed twice."})
            for row, col in cells:
                if not (0 <= row < attrs["rows"] and 0 <= col < attrs["cols"]):
                    raise serializers.ValidationError(
                        {"cells": f"Cell {row},{col} is outside the world."}
                    )
        return attrs


class BarrierSerializer(serializers.Serializer):
    between_cols = ColumnInterfaceField()
    permeability = ProbabilityField(default=0.0)
    erosion_start = serializers.IntegerField(min_value=0, required=False)
    erosion_duration = serializers.IntegerField(min_value=1, required=False)

    def validate(self, attrs):
        if ("erosion_start" in attrs) != ("erosion_duration" in attrs):
            missing = (
                "erosion_duration" if "erosion_start" in attrs else "erosion_start"
            )
            raise serializers.ValidationError(
                {missing: "Erosion needs both erosion_start and erosion_duration."}
            )
        return attrs


class RegionSerializer(serializers.Serializer):
    top = serializers.IntegerField(min_value=0)
    left = serializers.IntegerField(min_value=0)
    bottom = serializers.IntegerField(min_value=0)
    right = serializers.IntegerField(min_value=0)
    invention_prob = ProbabilityField(required=False)
    invention_ratio = RatioField(required=False)
    rate_of_change = ProbabilityField(required=False)

    def validate(self, attrs):
        if "invention_prob" in attrs and "invention_ratio" in attrs:
            raise serializers.ValidationError(
                {"invention_ratio": "Set invention_prob or invention_ratio, not both."}
            )
        if attrs["top"] > attrs["bottom"]:
            raise serializers.ValidationError({"bottom": "bottom is above top."})
        if attrs["left"] > attrs["right"]:
            raise serializers.ValidationError({"right": "right is left of left."})
        return attrs


class BroadcastSerializer(serializers.Serializer):
    count = serializers.IntegerField(min_value=0, default=0)
    selection = serializers.ChoiceField(
        choices=BroadcastSelection.values(), default="random"
    )
    ids = IntegerListField(required=False)
    period = serializers.IntegerField(min_value=1, default=1)

    def validate(self, attrs):
        if attrs["selection"] == BroadcastSelection.FIXED.value and attrs["count"]:
            ids = attrs.get("ids", ())
            if len(ids) != attrs["count"]:
                raise serializers.ValidationError(
                    {"ids": f"Fixed selection needs exactly {attrs['count']} ids."}
                )
            if len(set(ids)) != len(ids):
                raise serializers.ValidationError({"ids": "Broadcaster ids repeat."})
        return attrs


class SimConfigSerializer(serializers.Serializer):
    """
    Validates the nested form of a configuration file and builds a SimConfig.
    """

    iterations = serializers.IntegerField(min_value=1, default=100)
    seed = serializers.IntegerField(min_value=0, max_value=MASK64, default=0)
    invention_prob = ProbabilityField(required=False)
    invention_ratio = RatioField(required=False)
    rate_of_change = ProbabilityField(default=DEFAULT_RATE_OF_CHANGE)
    mental_simulation = serializers.BooleanField(default=True)
    knowledge_operators = serializers.BooleanField(default=True)
    update_mode = serializers.ChoiceField(
        choices=UpdateMode.values(), default="synchronous"
    )
    snapshots = IntegerListField(required=False)
    fitness = FitnessSerializer()
    world = WorldSerializer()
    barriers = BarrierSerializer(many=True)
    regions = RegionSerializer(many=True)
    broadcast = BroadcastSerializer()

    def validate(self, attrs):
        if "invention_prob" in attrs and "invention_ratio" in attrs:
            raise serializers.ValidationError(
                {"invention_ratio": "Set invention_prob or invention_ratio, not both."}
            )

        world = attrs["world"]
        errors = {}
        for position, barrier in enumerate(attrs["barriers"]):
            if barrier["between_cols"] + 1 >= world["cols"]:
                errors[f"barriers.{position}.between_cols"] = (
                    f"The world has only {world['cols']} columns."
                )
        for position, region in enumerate(attrs["regions"]):
            if region["bottom"] >= world["rows"]:
                errors[f"regions.{position}.bottom"] = "Region lies below the world."
            if region["right"] >= world["cols"]:
                errors[f"regions.{position}.right"] = "Region lies right of the world."
        for t in attrs.get("snapshots", ()):
            if not 0 <= t <= attrs["iterations"]:
                errors["snapshots"] = f"Snapshot iteration {t} is outside the run."
        if errors:
            raise serializers.ValidationError(errors)
        return attrs

    def create(self, validated_data):
        world = validated_data["world"]
        placement = Placement(
            kind=world["placement"],
            density=world.get("density", 1.0),
            cells=world.get("cells", ()),
        )
        barriers = tuple(
            Barrier(
                left_col=barrier["between_cols"],
                base_permeability=barrier["permeability"],
                erosion_start=barrier.get("erosion_start"),
                erosion_duration=barrier.get("erosion_duration"),
            )
            for barrier in validated_data["barriers"]
        )
        regions = tuple(
            Region(
                top=region["top"],
                left=region["left"],
                bottom=region["bottom"],
                right=region["right"],
                invention_prob=region.get(
                    "invention_prob", region.get("invention_ratio")
                ),
                rate_of_change=region.get("rate_of_change"),
            )
            for region in validated_data["regions"]
        )
        fitness = validated_data["fitness"]
        broadcast = validated_data["broadcast"]
        return SimConfig(
            world=WorldSpec(
                rows=world["rows"],
                cols=world["cols"],
                topology=world["topology"],
                placement=placement,
                barriers=barriers,
                regions=regions,
            ),
            fitness=FitnessSpec(
                kind=fitness["kind"],
                weight_f1=fitness["weight_f1"],
                weight_f2=fitness["weight_f2"],
            ),
            iterations=validated_data["iterations"],
            invention_prob=validated_data.get(
                "invention_prob", validated_data.get("invention_ratio", 0.5)
            ),
            rate_of_change=validated_data["rate_of_change"],
            broadcast=BroadcastPolicy(
                count=broadcast["count"],
                selection=broadcast["selection"],
                fixed_ids=broadcast.get("ids", ()),
                period=broadcast["period"],
            ),
            mental_simulation=validated_data["mental_simulation"],
            knowledge_operators=validated_data["knowledge_operators"],
            seed=validated_data["seed"],
            update_mode=validated_data["update_mode"],
            snapshot_iterations=validated_data.get("snapshots", ()),
        )


class PlanOptionsSerializer(serializers.Serializer):
    replicates = serializers.IntegerField(min_value=1, default=1)
    output_dir = serializers.CharField(required=False, allow_blank=False)


class CreateSimulationRunSerializer(serializers.Serializer):
    """Body of POST /api/experiments/runs."""

    config = serializers.CharField(
        required=False, allow_blank=True, default="", trim_whitespace=False
    )
    seed = serializers.IntegerField(min_value=0, max_value=MASK64, required=False)
    label = serializers.CharField(max_length=255, required=False, allow_blank=True)

    def validate(self, attrs):
        from experiments.config import parse_config

        overrides = {}
        if "seed" in attrs:
            overrides["seed"] = str(attrs["seed"])
        try:
            attrs["plan"] = parse_config(attrs["config"], overrides=overrides)
        except ConfigurationError as e:
            raise serializers.ValidationError({"config": str(e)})
        return attrs

    def create(self, validated_data):
        plan = validated_data["plan"]
        result = run(plan.base)
        simulation_run = SimulationRun.objects.create(
            label=validated_data.get("label", ""),
            config_text=validated_data["config"],
            **result_fields(result),
        )
        return run_data(simulation_run, include_metrics=True)
