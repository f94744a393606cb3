"""
The grid world: topology, agent placement, neighbourhoods and barriers.

Cells are (row, col) tuples. Neighbourhoods are Moore (8 cells). Barriers are
full-height vertical interfaces between column c and c + 1 that let imitation
through with a probability that may rise over the run.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

from _culturesim.helpers import ConfigurationError

logger = logging.getLogger(__name__)

EMPTY_CELL = "."


class Topology(Enum):
    TORUS = "torus"
    BOUNDED = "bounded"

    @classmethod
    def values(cls):
        return [member.value for member in cls]


class PlacementKind(Enum):
    FULL = "full"
    RANDOM = "random"
    EXPLICIT = "explicit"

    @classmethod
    def values(cls):
        return [member.value for member in cls]


@dataclass(frozen=True)
class Placement:
    kind: PlacementKind = PlacementKind.FULL
    density: float = 1.0
    cells: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", PlacementKind(self.kind))
        if self.kind is PlacementKind.RANDOM and not 0.0 < self.density <= 1.0:
            raise ConfigurationError(
                f"Placement density must lie in (0, 1], got {self.density}."
            )
        if self.kind is PlacementKind.EXPLICIT and not self.cells:
            raise ConfigurationError("Explicit placement needs at least one cell.")


@dataclass(frozen=True)
class Barrier:
    """Interface between column `left_col` and `left_col + 1`."""

    left_col: int
    base_permeability: float = 0.0
    erosion_start: int = None
    erosion_duration: int = None

    def __post_init__(self):
        if not 0.0 <= self.base_permeability <= 1.0:
            raise ConfigurationError(
                "Barrier permeability must lie in [0, 1], "
                f"got {self.base_permeability}."
            )
        if (self.erosion_start is None) != (self.erosion_duration is None):
            raise ConfigurationError(
                "An eroding barrier needs both erosion_start and erosion_duration."
            )
        if self.erosion_start is not None and self.erosion_start < 0:
            raise ConfigurationError("Barrier erosion_start must be >= 0.")
        if self.erosion_duration is not None and self.erosion_duration < 1:
            raise ConfigurationError("Barrier erosion_duration must be >= 1.")

    @property
    def between_cols(self):
        return (self.left_col, self.left_col + 1)

    @property
    def erodes(self):
        return self.erosion_start is not None


@dataclass(frozen=True)
class Region:
    """
    Inclusive rectangle of cells whose agents get their own parameters.

    None means "use the global value".
    """

    top: int
    left: int
    bottom: int
    right: int
    invention_prob: float = None
    rate_of_change: float = None

    def __post_init__(self):
        if self.top > self.bottom or self.left > self.right:
            raise ConfigurationError("Region corners are out of order.")
        for name in ("invention_prob", "rate_of_change"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"Region {name} must lie in [0, 1].")

    def contains(self, cell):
        row, col = cell
        return self.top <= row <= self.bottom and self.left <= col <= self.right


@dataclass(frozen=True)
class WorldSpec:
    rows: int = 10
    cols: int = 10
    topology: Topology = Topology.TORUS
    placement: Placement = field(default_factory=Placement)
    barriers: tuple = ()
    regions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        if self.rows < 1 or self.cols < 1:
            raise ConfigurationError(
                f"The world needs at least one cell, got {self.rows}x{self.cols}."
            )
        for barrier in self.barriers:
            if not 0 <= barrier.left_col < self.cols - 1:
                raise ConfigurationError(
                    f"Barrier between columns {barrier.between_cols} lies outside "
                    f"a world with {self.cols} columns."
                )
        for region in self.regions:
            if region.bottom >= self.rows or region.right >= self.cols or min(
                region.top, region.left
            ) < 0:
                raise ConfigurationError("Region lies outside the world.")
        if self.placement.kind is PlacementKind.EXPLICIT:
            cells = self.placement.cells
            if len(set(cells)) != len(cells):
                raise ConfigurationError("Explicit placement lists a cell twice.")
            for cell in cells:
                if not self.contains(cell):
                    raise ConfigurationError(f"Placed cell {cell} is out of bounds.")

    @property
    def size(self):
        return self.rows * self.cols

    def contains(self, cell):
        row, col = cell
        return 0 <= row < self.rows and 0 <= col < self.cols

    def region_for(self, cell):
        """Last configured region containing the cell, or None."""
        found = None
        for region in self.regions:
            if region.contains(cell):
                found = region
        return found


def neighbors(cell, spec):
    if not spec.contains(cell):
        raise ValueError(f"Cell {cell} is outside the {spec.rows}x{spec.cols} world.")
    row, col = cell
    found = []
    for d_row in (-1, 0, 1):
        for d_col in (-1, 0, 1):
            if d_row == 0 and d_col == 0:
                continue
            r, c = row + d_row, col + d_col
            if spec.topology is Topology.TORUS:
                r, c = r % spec.rows, c % spec.cols
            elif not (0 <= r < spec.rows and 0 <= c < spec.cols):
                continue
            # Tiny tori wrap onto the same cell more than once.
            if (r, c) != cell and (r, c) not in found:
                found.append((r, c))
    return found


def permeability(barrier, t):
    """Probability that imitation gets through the barrier at iteration t."""
    if t < 0:
        raise ValueError(f"Iteration must be >= 0, got {t}.")
    base = barrier.base_permeability
    if not barrier.erodes or t < barrier.erosion_start:
        return base
    elapsed = t - barrier.erosion_start
    if elapsed >= barrier.erosion_duration:
        return 1.0
    return base + (1.0 - base) * elapsed / barrier.erosion_duration


def crosses_barrier(a, b, barrier):
    low, high = sorted((a[1], b[1]))
    return low <= barrier.left_col and high >= barrier.left_col + 1


def crosses_seam(a, b):
    """True for torus links that wrap from the last column to the first."""
    return abs(a[1] - b[1]) > 1


def place_agents(spec, rng):
    """Occupied cells in row-major order; agent ids follow this order."""
    placement = spec.placement
    if placement.kind is PlacementKind.FULL:
        return [(r, c) for r in range(spec.rows) for c in range(spec.cols)]
    if placement.kind is PlacementKind.EXPLICIT:
        return sorted(placement.cells)
    count = max(1, round(placement.density * spec.size))
    chosen = rng.choice(spec.size, size=count, replace=False)
    return sorted(divmod(int(flat), spec.cols) for flat in chosen)


class World:
    """
    Occupancy of a WorldSpec plus the committed action of every agent.

    The engine owns the committed table; the observation phase only reads it.
    """

    def __init__(self, spec, cells):
        self.spec = spec
        self.cells = list(cells)
        self.occupant = {cell: agent_id for agent_id, cell in enumerate(self.cells)}
        self.committed = {}
        self._links = {
            agent_id: self._links_for(cell) for agent_id, cell in enumerate(self.cells)
        }

    def _links_for(self, cell):
        links = []
        for other in neighbors(cell, self.spec):
            if other not in self.occupant:
                continue
            crossed = ()
            if not crosses_seam(cell, other):
                crossed = tuple(
                    barrier
                    for barrier in self.spec.barriers
                    if crosses_barrier(cell, other, barrier)
                )
            links.append((self.occupant[other], crossed))
        return links

    @property
    def population(self):
        return len(self.cells)

    def neighbor_ids(self, agent_id):
        return [other for other, _ in self._links[agent_id]]

    def links(self, agent_id):
        """(neighbour id, barriers crossed to reach it) for occupied neighbours."""
        return self._links[agent_id]


def imitation_candidates(agent, world, t, rng, broadcaster=None):
    """
    Neighbours (and the agent's broadcaster) it may observe this iteration.

    Each neighbour behind a barrier survives with the barrier's current
    permeability. The result is in uniformly random order.
    """
    candidates = []
    for other, crossed in world.links(agent.id):
        if all(rng.random() < permeability(barrier, t) for barrier in crossed):
            candidates.append((other, world.committed[other]))
    if broadcaster is not None:
        source_id, action = broadcaster
        if source_id != agent.id and all(
            source_id != other for other, _ in candidates
        ):
            candidates.append((source_id, action))
    order = rng.permutation(len(candidates))
    return [candidates[i] for i in order]


def render_snapshot(world):
    """One line per row; each cell is the occupant's action index or '.'."""
    lines = []
    for row in range(world.spec.rows):
        cells = []
        for col in range(world.spec.cols):
            agent_id = world.occupant.get((row, col))
            if agent_id is None:
                cells.append(EMPTY_CELL)
            else:
                cells.append(str(world.committed[agent_id].index))
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


def parse_snapshot(text):
    """Inverse of render_snapshot: rows of action indices (None for empty)."""
    grid = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        row = []
        for token in line.split(" "):
            if token == EMPTY_CELL:
                row.append(None)
            elif token.isdigit() and int(token) < 729:
                row.append(int(token))
            else:
                raise ValueError(f"line {number}: invalid snapshot cell {token!r}")
        grid.append(row)
    if grid and len({len(row) for row in grid}) != 1:
        raise ValueError("Snapshot rows have different lengths.")
    return grid
