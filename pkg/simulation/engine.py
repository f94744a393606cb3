"""
The iteration loop.

Every iteration each agent either invents or imitates, learns the new idea if
it is fitter, and implements it. In synchronous mode (the default) agents
observe only the actions committed at the start of the iteration and all
adoptions are committed together at the end, so processing order does not
matter. Each agent draws from its own random stream.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from _culturesim.helpers import ConfigurationError
from culture.agents import (
    AgentState,
    consider_adopt,
    imitate_scan,
    invent,
    learn_and_implement,
)
from culture.fitness import FitnessSpec, global_optima
from simulation.metrics import measure
from simulation.streams import MASK64, RunStreams
from simulation.world import (
    World,
    WorldSpec,
    imitation_candidates,
    place_agents,
    render_snapshot,
)

logger = logging.getLogger(__name__)

DEFAULT_RATE_OF_CHANGE = 1 / 6


class UpdateMode(Enum):
    SYNCHRONOUS = "synchronous"
    SEQUENTIAL = "sequential"

    @classmethod
    def values(cls):
        return [member.value for member in cls]


class BroadcastSelection(Enum):
    FIXED = "fixed"
    RANDOM = "random"
    FITTEST = "fittest"

    @classmethod
    def values(cls):
        return [member.value for member in cls]


class IdeaSource(Enum):
    INVENTION = "invention"
    IMITATION = "imitation"


def ratio_to_probability(ratio):
    """'2:1' -> 2/3: the per-iteration probability of inventing."""
    try:
        invent_part, imitate_part = (
            Fraction(part.strip()) for part in ratio.split(":")
        )
    except (ValueError, ZeroDivisionError):
        raise ConfigurationError(f"Invalid invention to imitation ratio {ratio!r}.")
    if invent_part < 0 or imitate_part < 0 or invent_part + imitate_part == 0:
        raise ConfigurationError(f"Invalid invention to imitation ratio {ratio!r}.")
    return float(invent_part / (invent_part + imitate_part))


@dataclass(frozen=True)
class BroadcastPolicy:
    count: int = 0
    selection: BroadcastSelection = BroadcastSelection.RANDOM
    fixed_ids: tuple = ()
    period: int = 1

    def __post_init__(self):
        object.__setattr__(self, "selection", BroadcastSelection(self.selection))
        object.__setattr__(self, "fixed_ids", tuple(self.fixed_ids))
        if self.count < 0:
            raise ConfigurationError("Broadcaster count must be >= 0.")
        if self.period < 1:
            raise ConfigurationError("Broadcast period must be >= 1.")
        if self.selection is BroadcastSelection.FIXED and self.count:
            if len(self.fixed_ids) != self.count:
                raise ConfigurationError(
                    f"Expected {self.count} broadcaster ids, got {len(self.fixed_ids)}."
                )
            if len(set(self.fixed_ids)) != len(self.fixed_ids):
                raise ConfigurationError("Broadcaster ids must be distinct.")

    @property
    def enabled(self):
        return self.count > 0


@dataclass(frozen=True)
class SimConfig:
    world: WorldSpec = field(default_factory=WorldSpec)
    fitness: FitnessSpec = field(default_factory=FitnessSpec)
    iterations: int = 100
    invention_prob: float = 0.5
    rate_of_change: float = DEFAULT_RATE_OF_CHANGE
    broadcast: BroadcastPolicy = field(default_factory=BroadcastPolicy)
    mental_simulation: bool = True
    knowledge_operators: bool = True
    seed: int = 0
    update_mode: UpdateMode = UpdateMode.SYNCHRONOUS
    snapshot_iterations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "update_mode", UpdateMode(self.update_mode))
        object.__setattr__(
            self, "snapshot_iterations", tuple(sorted(set(self.snapshot_iterations)))
        )
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1.")
        if not 0.0 <= self.invention_prob <= 1.0:
            raise ConfigurationError("invention_prob must lie in [0, 1].")
        if not 0.0 <= self.rate_of_change <= 1.0:
            raise ConfigurationError("rate_of_change must lie in [0, 1].")
        if not 0 <= self.seed <= MASK64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer.")
        for t in self.snapshot_iterations:
            if not 0 <= t <= self.iterations:
                raise ConfigurationError(
                    f"Snapshot iteration {t} is outside [0, {self.iterations}]."
                )


@dataclass
class AgentRecord:
    """What one agent did over a run."""

    agent_id: int
    inventions: int = 0
    imitations: int = 0
    adopted_inventions: int = 0
    adopted_imitations: int = 0
    first_optimal_iteration: int = -1

    @property
    def imitation_frequency(self):
        """Share of adopted actions that came from imitation, or None."""
        adopted = self.adopted_inventions + self.adopted_imitations
        return self.adopted_imitations / adopted if adopted else None


@dataclass
class SimulationState:
    iteration: int
    agents: list
    world: World
    records: list

    @property
    def actions(self):
        return [agent.current_action for agent in self.agents]


@dataclass(frozen=True)
class RunResult:
    config: SimConfig
    metrics: list
    snapshots: dict
    records: list
    fitness_history: list
    agents: tuple = ()


def select_broadcasters(policy, agents, t, rng):
    if not policy.enabled or t % policy.period != 0:
        return []
    if policy.count > len(agents):
        raise ConfigurationError(
            f"Cannot pick {policy.count} broadcasters from {len(agents)} agents."
        )
    if policy.selection is BroadcastSelection.FIXED:
        return list(policy.fixed_ids)
    if policy.selection is BroadcastSelection.RANDOM:
        ids = [agent.id for agent in agents]
        chosen = rng.choice(len(ids), size=policy.count, replace=False)
        return sorted(ids[int(i)] for i in chosen)
    ranked = sorted(agents, key=lambda agent: (-agent.current_fitness, agent.id))
    return [agent.id for agent in ranked[: policy.count]]


def choose_broadcaster_for(agent, broadcasters, actions):
    """The broadcaster whose action is closest to the agent's own; ties to lowest id."""
    options = [
        (agent.current_action.distance(actions[source]), source)
        for source in broadcasters
        if source != agent.id
    ]
    if not options:
        return None
    _, source = min(options)
    return source, actions[source]


def effective_parameters(config, cell):
    region = config.world.region_for(cell)
    invention_prob, rate = config.invention_prob, config.rate_of_change
    if region is not None:
        if region.invention_prob is not None:
            invention_prob = region.invention_prob
        if region.rate_of_change is not None:
            rate = region.rate_of_change
    return invention_prob, rate


def initial_state(config, streams):
    cells = place_agents(config.world, streams.placement)
    policy = config.broadcast
    if policy.count > len(cells):
        raise ConfigurationError(
            f"broadcast.count {policy.count} exceeds the population of {len(cells)}."
        )
    for source in policy.fixed_ids:
        if not 0 <= source < len(cells):
            raise ConfigurationError(f"Broadcaster id {source} is not an agent.")

    world = World(config.world, cells)
    agents = []
    for agent_id, cell in enumerate(cells):
        invention_prob, rate = effective_parameters(config, cell)
        agents.append(
            AgentState.initial(agent_id, cell, config.fitness, invention_prob, rate)
        )
    world.committed = {agent.id: agent.current_action for agent in agents}
    records = [AgentRecord(agent_id=agent.id) for agent in agents]
    state = SimulationState(iteration=0, agents=agents, world=world, records=records)
    _note_optima(state, config)
    return state


def _note_optima(state, config):
    optima = set(global_optima(config.fitness))
    for agent, record in zip(state.agents, state.records):
        if record.first_optimal_iteration < 0 and agent.current_action.index in optima:
            record.first_optimal_iteration = state.iteration


def _acquire_idea(agent, state, config, t, rng, broadcasters):
    """Returns (candidate action or None, source, adopt)."""
    record = state.records[agent.id]
    if rng.random() < agent.invention_prob:
        record.inventions += 1
        candidate = invent(agent.current_action, agent.kbo, agent.rate_of_change, rng)
        adopt = not config.mental_simulation or consider_adopt(
            candidate, agent, config.fitness
        )
        return candidate, IdeaSource.INVENTION, adopt

    record.imitations += 1
    broadcaster = choose_broadcaster_for(agent, broadcasters, state.world.committed)
    candidates = imitation_candidates(agent, state.world, t, rng, broadcaster)
    if config.mental_simulation:
        candidate = imitate_scan(agent, candidates, config.fitness)
    elif candidates:
        candidate = candidates[int(rng.integers(len(candidates)))][1]
    else:
        candidate = None
    return candidate, IdeaSource.IMITATION, candidate is not None


def step(state, config, t, streams, order=None):
    """
    Advance the population from iteration t - 1 to t.

    `order` overrides the ascending-id processing order.
    """
    sequential = config.update_mode is UpdateMode.SEQUENTIAL
    agents = list(state.agents)
    world = state.world
    next_state = SimulationState(
        iteration=t, agents=agents, world=world, records=state.records
    )
    broadcasters = select_broadcasters(config.broadcast, agents, t, streams.broadcast)

    staged = {}
    for agent_id in order if order is not None else range(len(agents)):
        agent = agents[agent_id]
        rng = streams.agent(agent_id)
        candidate, source, adopt = _acquire_idea(
            agent, next_state, config, t, rng, broadcasters
        )
        if not adopt or candidate is None or candidate == agent.current_action:
            continue

        learned = learn_and_implement(
            agent,
            candidate,
            config.fitness,
            require_fitter=config.mental_simulation,
            knowledge_operators=config.knowledge_operators,
        )
        record = state.records[agent_id]
        if source is IdeaSource.INVENTION:
            record.adopted_inventions += 1
        else:
            record.adopted_imitations += 1

        if sequential:
            agents[agent_id] = learned
            world.committed = {**world.committed, agent_id: learned.current_action}
        else:
            staged[agent_id] = learned

    if staged:
        committed = dict(world.committed)
        for agent_id, learned in staged.items():
            agents[agent_id] = learned
            committed[agent_id] = learned.current_action
        world.committed = committed

    _note_optima(next_state, config)
    return next_state


def run(config, order=None):
    """Run one configuration; a pure function of the config (seed included)."""
    streams = RunStreams(config.seed)
    state = initial_state(config, streams)
    logger.info(
        f"Starting run: seed {config.seed}, {len(state.agents)} agents, "
        f"{config.iterations} iterations"
    )

    metrics = [measure(0, state.actions, config.fitness)]
    history = [tuple(agent.current_fitness for agent in state.agents)]
    snapshots = {}
    if 0 in config.snapshot_iterations:
        snapshots[0] = render_snapshot(state.world)

    for t in range(1, config.iterations + 1):
        ordering = order(t, len(state.agents)) if order is not None else None
        state = step(state, config, t, streams, order=ordering)
        row = measure(t, state.actions, config.fitness)
        metrics.append(row)
        history.append(tuple(agent.current_fitness for agent in state.agents))
        if t in config.snapshot_iterations:
            snapshots[t] = render_snapshot(state.world)
        logger.debug(
            f"t={t} mean_fitness={row.mean_fitness:.3f} diversity={row.diversity} "
            f"top={row.top_action_index} ({row.top_fraction:.2f})"
        )

    final = metrics[-1]
    logger.info(
        f"Finished run: seed {config.seed}, mean fitness {final.mean_fitness:.3f}, "
        f"diversity {final.diversity}"
    )
    return RunResult(
        config=config,
        metrics=metrics,
        snapshots=snapshots,
        records=state.records,
        fitness_history=history,
        agents=tuple(state.agents),
    )
