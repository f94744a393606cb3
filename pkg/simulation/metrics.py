"""
Population statistics recorded after every iteration.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from _culturesim.helpers import EmptyPopulationError
from culture.actions import LIMB_PAIRS, BodyPart, Posture, is_symmetric_pair
from culture.fitness import fitness, global_optima

TRAITS = ("arms", "legs", "head_hips")


@dataclass(frozen=True)
class MetricsRow:
    iteration: int
    mean_fitness: float
    diversity: int
    top_action_index: int
    top_fraction: float
    entropy: float
    optimum_shares: dict = field(default_factory=dict)
    optimal_share: float = 0.0
    trait_shares: dict = field(default_factory=dict)

    def csv_values(self):
        values = [
            self.iteration,
            self.mean_fitness,
            self.diversity,
            self.top_action_index,
            self.top_fraction,
            self.entropy,
        ]
        shares = [self.optimum_shares[index] for index in sorted(self.optimum_shares)]
        return values + shares


def csv_header(spec):
    return [
        "iteration",
        "mean_fitness",
        "diversity",
        "top_action_index",
        "top_fraction",
        "entropy",
    ] + [f"opt_{index}" for index in sorted(global_optima(spec))]


def _require_population(actions):
    actions = list(actions)
    if not actions:
        raise EmptyPopulationError("Population statistics need at least one agent.")
    return actions


def diversity(actions):
    return len(set(_require_population(actions)))


def mean_fitness(actions, spec):
    actions = _require_population(actions)
    return float(np.mean([fitness(action, spec) for action in actions]))


def top_fraction(actions):
    """Modal action index and its share; ties go to the lowest index."""
    actions = _require_population(actions)
    counts = Counter(action.index for action in actions)
    index, count = min(counts.items(), key=lambda item: (-item[1], item[0]))
    return index, count / len(actions)


def entropy(actions):
    """Shannon entropy (bits) of the action distribution."""
    actions = _require_population(actions)
    counts = np.array(list(Counter(actions).values()), dtype=float)
    shares = counts / counts.sum()
    return float(-(shares * np.log2(shares)).sum()) + 0.0


def optimum_shares(actions, spec):
    actions = list(actions)
    counts = Counter(action.index for action in actions)
    total = len(actions)
    return {
        index: (counts.get(index, 0) / total if total else 0.0)
        for index in global_optima(spec)
    }


def head_hips_optimal(action):
    head, hips = action[BodyPart.HEAD], action[BodyPart.HIPS]
    return head is Posture.STATIONARY and hips.is_moving


def trait_shares(actions):
    """Share of agents with each trait in its optimal (F1) configuration."""
    actions = _require_population(actions)
    arms, legs = LIMB_PAIRS
    total = len(actions)
    return {
        "arms": sum(is_symmetric_pair(a, arms) for a in actions) / total,
        "legs": sum(is_symmetric_pair(a, legs) for a in actions) / total,
        "head_hips": sum(head_hips_optimal(a) for a in actions) / total,
    }


def measure(iteration, actions, spec):
    actions = _require_population(actions)
    index, fraction = top_fraction(actions)
    shares = optimum_shares(actions, spec)
    optima = set(shares)
    on_optimum = sum(1 for action in actions if action.index in optima)
    return MetricsRow(
        iteration=iteration,
        mean_fitness=mean_fitness(actions, spec),
        diversity=diversity(actions),
        top_action_index=index,
        top_fraction=fraction,
        entropy=entropy(actions),
        optimum_shares=shares,
        optimal_share=on_optimum / len(actions),
        trait_shares=trait_shares(actions),
    )


def convergence_iteration(rows, threshold=0.9):
    """First iteration with `threshold` of agents on a global optimum, or -1."""
    for row in rows:
        if row.optimal_share >= threshold:
            return row.iteration
    return -1


def trait_convergence_iteration(rows, trait, threshold=0.9):
    for row in rows:
        if row.trait_shares[trait] >= threshold:
            return row.iteration
    return -1
