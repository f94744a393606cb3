"""
The experiment configuration format.

One `key = value` per line; `#` starts a comment line. Keys are dotted:

    world.rows = 8
    world.cols = 8
    barriers.0.between_cols = 3,4
    barriers.0.erosion_start = 10
    barriers.0.erosion_duration = 40
    invention_ratio = 2:1
    sweep.invention_ratio = 1:4, 1:1, 2:1, 4:1
    replicates = 20

Every rejection is a ConfigurationError carrying the offending line number.
"""

import itertools
import logging
import re
from dataclasses import dataclass

from django.conf import settings

from _culturesim.helpers import ConfigurationError
from experiments.serializers import PlanOptionsSerializer, SimConfigSerializer
from simulation.streams import derive_seed

logger = logging.getLogger(__name__)

SIMULATION_KEYS = {
    "iterations",
    "seed",
    "invention_prob",
    "invention_ratio",
    "rate_of_change",
    "mental_simulation",
    "knowledge_operators",
    "update_mode",
    "fitness.kind",
    "fitness.weight_f1",
    "fitness.weight_f2",
    "world.rows",
    "world.cols",
    "world.topology",
    "world.placement",
    "world.density",
    "world.cells",
    "broadcast.count",
    "broadcast.selection",
    "broadcast.ids",
    "broadcast.period",
    "output.snapshots",
}
PLAN_KEYS = {"replicates", "output.dir"}
INDEXED_KEYS = {
    "barriers": {"between_cols", "permeability", "erosion_start", "erosion_duration"},
    "regions": {
        "top",
        "left",
        "bottom",
        "right",
        "invention_prob",
        "invention_ratio",
        "rate_of_change",
    },
}
# List-valued keys cannot be swept: their values contain commas.
UNSWEEPABLE_KEYS = {"world.cells", "broadcast.ids", "output.snapshots"}
# Setting one of these (by sweep) clears the other.
EXCLUSIVE_KEYS = {
    "invention_prob": "invention_ratio",
    "invention_ratio": "invention_prob",
}

INDEXED_KEY = re.compile(r"^(barriers|regions)\.(\d+)\.([a-z_0-9]+)$")
LINE = re.compile(r"^\s*([A-Za-z0-9_.]+)\s*=\s*(.*?)\s*$")


@dataclass(frozen=True)
class Setting:
    value: str
    line: int = None


@dataclass(frozen=True)
class Sweep:
    key: str
    values: tuple
    line: int


@dataclass(frozen=True)
class Variant:
    index: int
    overrides: tuple
    config: object


@dataclass(frozen=True)
class ExperimentPlan:
    base: object
    variants: tuple
    sweeps: tuple
    replicates: int
    output_dir: str
    settings: tuple

    @property
    def snapshot_iterations(self):
        return self.base.snapshot_iterations

    @property
    def sweep_keys(self):
        return tuple(sweep.key for sweep in self.sweeps)

    def seed_for(self, variant, replicate):
        return derive_seed(self.base.seed, variant, replicate)


def is_known_key(key):
    if key in SIMULATION_KEYS or key in PLAN_KEYS:
        return True
    match = INDEXED_KEY.match(key)
    return bool(match) and match.group(3) in INDEXED_KEYS[match.group(1)]


def read_settings(text):
    """Parse lines into {key: Setting}; malformed, unknown or repeated keys fail."""
    found = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        match = LINE.match(raw)
        if not match:
            raise ConfigurationError(f"Malformed line {stripped!r}.", line=number)
        key, value = match.groups()
        known = is_known_key(key)
        if key.startswith("sweep."):
            target = key[len("sweep."):]
            known = is_known_key(target) and target not in PLAN_KEYS
            if target in UNSWEEPABLE_KEYS:
                raise ConfigurationError(f"{target} cannot be swept.", line=number)
        if not known:
            raise ConfigurationError(f"Unknown key {key!r}.", line=number)
        if key in found:
            raise ConfigurationError(
                f"Key {key!r} already set on line {found[key].line}.", line=number
            )
        if value == "":
            raise ConfigurationError(f"Key {key!r} has no value.", line=number)
        found[key] = Setting(value=value, line=number)
    return found


def _indexed_entries(values, group):
    entries = {}
    for key, setting in values.items():
        match = INDEXED_KEY.match(key)
        if match and match.group(1) == group:
            entries.setdefault(int(match.group(2)), {})[match.group(3)] = setting
    if sorted(entries) != list(range(len(entries))):
        first = min(
            setting.line or 0
            for fields in entries.values()
            for setting in fields.values()
        )
        raise ConfigurationError(
            f"{group} indices must be 0, 1, 2, ... without gaps.", line=first or None
        )
    return [
        {name: setting.value for name, setting in entries[i].items()}
        for i in range(len(entries))
    ]


def nested_data(values):
    """The serializer input for a flat {key: Setting} dict."""
    data = {"fitness": {}, "world": {}, "broadcast": {}}
    for key, setting in values.items():
        if INDEXED_KEY.match(key) or key in PLAN_KEYS:
            continue
        if key == "output.snapshots":
            data["snapshots"] = setting.value
        elif "." in key:
            group, name = key.split(".", 1)
            data[group][name] = setting.value
        else:
            data[key] = setting.value
    data["barriers"] = _indexed_entries(values, "barriers")
    data["regions"] = _indexed_entries(values, "regions")
    return data


def flatten_errors(errors, prefix=""):
    """Yield (dotted path, message) pairs from a DRF error structure."""
    if isinstance(errors, dict):
        for key, value in errors.items():
            name = str(key)
            path = name if not prefix else f"{prefix}.{name}"
            if name == "non_field_errors":
                path = prefix
            yield from flatten_errors(value, path)
    elif isinstance(errors, list):
        if all(isinstance(item, str) for item in errors):
            for item in errors:
                yield prefix, str(item)
        else:
            for position, item in enumerate(errors):
                yield from flatten_errors(item, f"{prefix}.{position}")
    else:
        yield prefix, str(errors)


def _line_for(path, values):
    key = "output.snapshots" if path == "snapshots" else path
    if key in values:
        return values[key].line
    lines = [
        setting.line
        for name, setting in values.items()
        if path and name.startswith(f"{path}.") and setting.line
    ]
    return min(lines) if lines else None


def build_config(values):
    """Validate a flat {key: Setting} dict into a SimConfig."""
    serializer = SimConfigSerializer(data=nested_data(values))
    if not serializer.is_valid():
        path, message = next(flatten_errors(serializer.errors))
        raise ConfigurationError(
            f"{path or 'config'}: {message}", _line_for(path, values)
        )
    try:
        return serializer.save()
    except ConfigurationError as e:
        raise ConfigurationError(e.message, e.line)


def _plan_options(values):
    data = {}
    if "replicates" in values:
        data["replicates"] = values["replicates"].value
    if "output.dir" in values:
        data["output_dir"] = values["output.dir"].value
    serializer = PlanOptionsSerializer(data=data)
    if not serializer.is_valid():
        path, message = next(flatten_errors(serializer.errors))
        key = "output.dir" if path == "output_dir" else path
        raise ConfigurationError(
            f"{key}: {message}", values[key].line if key in values else None
        )
    options = serializer.validated_data
    return options["replicates"], options.get(
        "output_dir", settings.CULTURESIM["OUTPUT_DIR"]
    )


def parse_config(text, overrides=None):
    """
    Parse configuration text into a validated ExperimentPlan.

    `overrides` ({key: value}) replace file values, e.g. a --seed given on the
    command line.
    """
    values = read_settings(text)
    for key, value in (overrides or {}).items():
        if not is_known_key(key):
            raise ConfigurationError(f"Unknown key {key!r}.")
        values[key] = Setting(value=str(value))

    sweeps = tuple(
        Sweep(
            key=key[len("sweep."):],
            values=tuple(
                item.strip() for item in setting.value.split(",") if item.strip()
            ),
            line=setting.line,
        )
        for key, setting in sorted(values.items(), key=lambda item: item[1].line or 0)
        if key.startswith("sweep.")
    )
    for sweep in sweeps:
        if not sweep.values:
            raise ConfigurationError(f"sweep.{sweep.key} lists no values.", sweep.line)

    base_values = {k: v for k, v in values.items() if not k.startswith("sweep.")}
    base = build_config(base_values)
    replicates, output_dir = _plan_options(base_values)

    variants = []
    combos = itertools.product(*(sweep.values for sweep in sweeps)) if sweeps else [()]
    for index, combo in enumerate(combos):
        variant_values = dict(base_values)
        for sweep, value in zip(sweeps, combo):
            variant_values.pop(EXCLUSIVE_KEYS.get(sweep.key), None)
            variant_values[sweep.key] = Setting(value=value, line=sweep.line)
        overrides_used = tuple(
            (sweep.key, value) for sweep, value in zip(sweeps, combo)
        )
        config = build_config(variant_values) if sweeps else base
        variants.append(Variant(index=index, overrides=overrides_used, config=config))

    logger.debug(f"Parsed plan: {len(variants)} variants x {replicates} replicates")
    return ExperimentPlan(
        base=base,
        variants=tuple(variants),
        sweeps=sweeps,
        replicates=replicates,
        output_dir=output_dir,
        settings=tuple(sorted((k, v.value) for k, v in values.items())),
    )


def load_config(path, overrides=None):
    """Read and parse a configuration file; a missing file is a configuration error."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except FileNotFoundError:
        raise ConfigurationError(f"Configuration file {path} does not exist.")
    except (IsADirectoryError, UnicodeDecodeError) as e:
        raise ConfigurationError(f"Cannot read configuration file {path}: {e}")
    return parse_config(text, overrides=overrides)
