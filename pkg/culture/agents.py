"""
Agent state and behaviour.

Agents keep only their currently implemented action. They get new ideas by
inventing (mutating the current action, biased by knowledge-based operators)
or by imitating a fitter neighbour, and implement an idea only when mental
simulation says it beats what they are doing now.
"""

from dataclasses import dataclass, replace

from _culturesim.helpers import ContractViolation
from culture.actions import (
    COUNTERPART,
    PART_COUNT,
    Action,
    Posture,
    trend_activations,
)
from culture.fitness import fitness

KBO_STEP = 0.1
KBO_START = 0.5


def _clamp_step(probability, delta):
    # Rounded so repeated 0.1 steps stay on the 0.1 grid.
    return round(min(1.0, max(0.0, probability + delta)), 10)


@dataclass(frozen=True)
class KboState:
    """
    Knowledge-based operator biases.

    p_im[i] is the probability that a mutation of moving part i keeps it
    moving; p_sym is the probability that a limb starting to move takes the
    direction opposite its moving pair counterpart.
    """

    p_im: tuple = (KBO_START,) * PART_COUNT
    p_sym: float = KBO_START

    def __post_init__(self):
        if len(self.p_im) != PART_COUNT:
            raise ValueError(f"p_im needs {PART_COUNT} entries.")
        if any(not 0.0 <= p <= 1.0 for p in self.p_im) or not 0.0 <= self.p_sym <= 1.0:
            raise ValueError("KBO probabilities must lie in [0, 1].")
        object.__setattr__(self, "p_im", tuple(float(p) for p in self.p_im))

    @property
    def p_dm(self):
        return tuple(1.0 - p for p in self.p_im)


@dataclass(frozen=True)
class AgentState:
    id: int
    position: tuple
    current_action: Action
    current_fitness: float
    kbo: KboState
    invention_prob: float
    rate_of_change: float

    @classmethod
    def initial(cls, agent_id, position, spec, invention_prob, rate_of_change):
        action = Action.stationary()
        return cls(
            id=agent_id,
            position=position,
            current_action=action,
            current_fitness=fitness(action, spec),
            kbo=KboState(),
            invention_prob=invention_prob,
            rate_of_change=rate_of_change,
        )


def update_kbo(kbo, old, new):
    """Move the biases 0.1 towards the trends of a newly learned action."""
    p_im = kbo.p_im
    if new.movement > old.movement:
        p_im = tuple(_clamp_step(p, KBO_STEP) for p in p_im)
    elif new.movement < old.movement:
        p_im = tuple(_clamp_step(p, -KBO_STEP) for p in p_im)

    p_sym = kbo.p_sym
    if new.symmetry > old.symmetry:
        p_sym = _clamp_step(p_sym, KBO_STEP)
    elif new.symmetry < old.symmetry:
        p_sym = _clamp_step(p_sym, -KBO_STEP)

    return KboState(p_im=p_im, p_sym=p_sym)


def _new_direction(parts, part, kbo, rng):
    counterpart = COUNTERPART.get(part)
    if counterpart is not None and parts[counterpart].is_moving:
        partner = parts[counterpart]
        return partner.opposite if rng.random() < kbo.p_sym else partner
    return Posture.LEFT if rng.random() < 0.5 else Posture.RIGHT


def invent(action, kbo, rate, rng):
    """
    Mutate each part independently with probability `rate`.

    A mutated part always ends up in a different posture: a still part starts
    moving (direction steered by p_sym when its pair counterpart moves), a
    moving part stops with probability 1 - p_im, otherwise reverses.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"Rate of conceptual change must lie in [0, 1], got {rate}.")

    parts = list(action.parts)
    for part in range(PART_COUNT):
        if rng.random() >= rate:
            continue
        current = parts[part]
        if current is Posture.STATIONARY:
            parts[part] = _new_direction(parts, part, kbo, rng)
        elif rng.random() < 1.0 - kbo.p_im[part]:
            parts[part] = Posture.STATIONARY
        else:
            parts[part] = current.opposite
    return Action(tuple(parts))


def consider_adopt(candidate, agent, spec):
    """Mental simulation: is the candidate strictly fitter than the current action?"""
    return fitness(candidate, spec) > agent.current_fitness


def imitate_scan(agent, candidates, spec):
    """First candidate action strictly fitter than the agent's own, if any."""
    for _source_id, action in candidates:
        if consider_adopt(action, agent, spec):
            return action
    return None


def learn_and_implement(
    agent, new_action, spec, require_fitter=True, knowledge_operators=True
):
    if require_fitter and not consider_adopt(new_action, agent, spec):
        raise ContractViolation(
            f"Agent {agent.id} cannot learn {new_action}: it is not fitter than "
            f"the current action ({agent.current_fitness})."
        )
    kbo = agent.kbo
    if knowledge_operators:
        kbo = update_kbo(
            kbo,
            trend_activations(agent.current_action),
            trend_activations(new_action),
        )
    return replace(
        agent,
        kbo=kbo,
        current_action=new_action,
        current_fitness=fitness(new_action, spec),
    )
