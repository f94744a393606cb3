"""
Body actions: the unit of cultural variation.

An action sets each of six body parts to one of three postures, giving 729
possible actions. Actions are immutable and hashable so populations can be
tallied with a Counter.
"""

from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

ACTION_COUNT = 729
PART_COUNT = 6


class Posture(IntEnum):
    LEFT = -1
    STATIONARY = 0
    RIGHT = 1

    @property
    def is_moving(self):
        return self is not Posture.STATIONARY

    @property
    def opposite(self):
        return Posture(-self.value)

    @property
    def symbol(self):
        return {Posture.LEFT: "L", Posture.STATIONARY: "S", Posture.RIGHT: "R"}[self]


class BodyPart(IntEnum):
    LEFT_ARM = 0
    RIGHT_ARM = 1
    LEFT_LEG = 2
    RIGHT_LEG = 3
    HEAD = 4
    HIPS = 5


LIMB_PAIRS = (
    (BodyPart.LEFT_ARM, BodyPart.RIGHT_ARM),
    (BodyPart.LEFT_LEG, BodyPart.RIGHT_LEG),
)

# Part -> the other member of its limb pair. Head and hips have none.
COUNTERPART = {
    BodyPart.LEFT_ARM: BodyPart.RIGHT_ARM,
    BodyPart.RIGHT_ARM: BodyPart.LEFT_ARM,
    BodyPart.LEFT_LEG: BodyPart.RIGHT_LEG,
    BodyPart.RIGHT_LEG: BodyPart.LEFT_LEG,
}


@dataclass(frozen=True)
class Action:
    parts: tuple

    def __post_init__(self):
        if len(self.parts) != PART_COUNT:
            raise ValueError(
                f"An action has exactly {PART_COUNT} parts, got {len(self.parts)}."
            )
        try:
            parts = tuple(Posture(value) for value in self.parts)
        except ValueError:
            raise ValueError(f"Invalid posture in {self.parts!r}.")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *values):
        return cls(tuple(values))

    @classmethod
    def stationary(cls):
        return cls((Posture.STATIONARY,) * PART_COUNT)

    def __getitem__(self, part):
        return self.parts[part]

    def __iter__(self):
        return iter(self.parts)

    def __str__(self):
        return " ".join(posture.symbol for posture in self.parts)

    @property
    def index(self):
        return action_index(self)

    def with_part(self, part, posture):
        parts = list(self.parts)
        parts[part] = Posture(posture)
        return Action(tuple(parts))

    def mirrored(self):
        """Swap Left and Right on every part."""
        return Action(tuple(posture.opposite for posture in self.parts))

    def distance(self, other):
        """Hamming distance: the number of parts set differently."""
        return sum(1 for mine, theirs in zip(self.parts, other.parts) if mine != theirs)


def action_index(action):
    """Little-endian base-3 index with digit = posture + 1, in [0, 728]."""
    return sum((posture + 1) * 3**i for i, posture in enumerate(action.parts))


@lru_cache(maxsize=ACTION_COUNT)
def action_from_index(index):
    if isinstance(index, bool) or not isinstance(index, int):
        raise ValueError(f"Action index must be an integer, got {index!r}.")
    if not 0 <= index < ACTION_COUNT:
        raise ValueError(f"Action index {index} is outside [0, {ACTION_COUNT - 1}].")
    parts = []
    for _ in range(PART_COUNT):
        index, digit = divmod(index, 3)
        parts.append(Posture(digit - 1))
    return Action(tuple(parts))


def all_actions():
    """Every action, ordered by index."""
    return [action_from_index(i) for i in range(ACTION_COUNT)]


@dataclass(frozen=True)
class TrendActivations:
    movement: float
    symmetry: float


def is_symmetric_pair(action, pair):
    first, second = pair
    return action[first].is_moving and action[first] == action[second].opposite


def trend_activations(action):
    """Closed-form MOVEMENT and SYMMETRY node activations."""
    moving = sum(1 for posture in action.parts if posture.is_moving)
    symmetric = sum(1 for pair in LIMB_PAIRS if is_symmetric_pair(action, pair))
    return TrendActivations(
        movement=moving / PART_COUNT, symmetry=symmetric / len(LIMB_PAIRS)
    )
