"""
Fitness functions.

F1 scores mating displays: every moving part counts, symmetric arm and leg
pairs earn a bonus, and moving the hips only pays while the head is still.
F2 scores tool making: arms working together in one direction with a steady
stance, hips following the arms.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from culture.actions import BodyPart, Posture, all_actions, is_symmetric_pair

logger = logging.getLogger(__name__)

F1_MAXIMUM = 13.0
F2_MAXIMUM = 10.0


class FitnessKind(Enum):
    F1 = "F1"
    F2 = "F2"
    WEIGHTED = "weighted"

    @classmethod
    def values(cls):
        return [member.value for member in cls]


@dataclass(frozen=True)
class FitnessSpec:
    kind: FitnessKind = FitnessKind.F1
    weight_f1: float = 0.0
    weight_f2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", FitnessKind(self.kind))
        if self.weight_f1 < 0 or self.weight_f2 < 0:
            raise ValueError("Fitness weights must be non-negative.")
        if self.kind is FitnessKind.WEIGHTED and self.weight_f1 + self.weight_f2 <= 0:
            raise ValueError("A weighted fitness needs at least one positive weight.")


def fitness_f1(action):
    arms = BodyPart.LEFT_ARM, BodyPart.RIGHT_ARM
    legs = BodyPart.LEFT_LEG, BodyPart.RIGHT_LEG
    moving = sum(1 for posture in action.parts if posture.is_moving)
    arm_bonus = 3 if is_symmetric_pair(action, arms) else 0
    leg_bonus = 3 if is_symmetric_pair(action, legs) else 0
    # Epistatic term: hip movement pays only while the head is still.
    hips_bonus = (
        2
        if action[BodyPart.HEAD] is Posture.STATIONARY
        and action[BodyPart.HIPS].is_moving
        else 0
    )
    return float(moving + arm_bonus + leg_bonus + hips_bonus)


def fitness_f2(action):
    left_arm, right_arm = action[BodyPart.LEFT_ARM], action[BodyPart.RIGHT_ARM]
    arms_moving = int(left_arm.is_moving) + int(right_arm.is_moving)
    arms_together = left_arm.is_moving and left_arm == right_arm
    steady_legs = (
        action[BodyPart.LEFT_LEG] is Posture.STATIONARY
        and action[BodyPart.RIGHT_LEG] is Posture.STATIONARY
    )
    still_head = action[BodyPart.HEAD] is Posture.STATIONARY
    hips_follow = arms_together and action[BodyPart.HIPS] == left_arm
    return float(
        arms_moving
        + 3 * arms_together
        + 2 * steady_legs
        + 1 * still_head
        + 2 * hips_follow
    )


@lru_cache(maxsize=None)
def fitness(action, spec):
    if spec.kind is FitnessKind.F1:
        return fitness_f1(action)
    if spec.kind is FitnessKind.F2:
        return fitness_f2(action)
    total = spec.weight_f1 + spec.weight_f2
    if total <= 0:
        raise ValueError("A weighted fitness needs at least one positive weight.")
    weighted = spec.weight_f1 * fitness_f1(action) + spec.weight_f2 * fitness_f2(action)
    return weighted / total


@dataclass(frozen=True)
class Landscape:
    """Every action with its fitness, ordered by action index."""

    spec: FitnessSpec
    rows: tuple

    @property
    def maximum(self):
        return max(value for _, value in self.rows)

    @property
    def minimum(self):
        return min(value for _, value in self.rows)

    @property
    def maximizers(self):
        best = self.maximum
        return tuple(action for action, value in self.rows if value == best)

    @property
    def minimizers(self):
        worst = self.minimum
        return tuple(action for action, value in self.rows if value == worst)


@lru_cache(maxsize=None)
def enumerate_landscape(spec):
    rows = tuple((action, fitness(action, spec)) for action in all_actions())
    landscape = Landscape(spec=spec, rows=rows)
    logger.debug(
        f"Landscape {spec.kind.value}: max {landscape.maximum} "
        f"attained by {len(landscape.maximizers)} actions"
    )
    return landscape


def global_optima(spec):
    """Indices of the actions attaining the landscape maximum."""
    return tuple(action.index for action in enumerate_landscape(spec).maximizers)
