from dataclasses import replace

from _culturesim import BaseTestCase
from _culturesim.helpers import ConfigurationError
from culture.actions import Action
from culture.agents import AgentState
from culture.fitness import FitnessSpec, fitness
from simulation.engine import (
    AgentRecord,
    BroadcastPolicy,
    IdeaSource,
    SimConfig,
    SimulationState,
    UpdateMode,
    _acquire_idea,
    choose_broadcaster_for,
    ratio_to_probability,
    run,
    select_broadcasters,
)
from simulation.world import World, WorldSpec


def reversed_order(t, size):
    return list(reversed(range(size)))


class RunTestCase(BaseTestCase):
    """
    Test case for whole simulation runs.
    """

    def test_single_iteration_records_two_rows(self):
        """
        Test iterations=1 records the initial row and one more.
        """

        result = run(self.make_config(iterations=1))
        self.assertEqual([row.iteration for row in result.metrics], [0, 1])
        self.assertEqual(result.metrics[0].mean_fitness, 0.0)
        self.assertEqual(result.metrics[0].diversity, 1)
        self.assertEqual(result.metrics[0].top_action_index, 364)

    def test_runs_are_deterministic(self):
        """
        Test the same config and seed produce identical runs.
        """

        config = self.make_config(iterations=25, seed=7, snapshot_iterations=(0, 25))
        first, second = run(config), run(config)
        self.assertEqual(first.metrics, second.metrics)
        self.assertEqual(first.snapshots, second.snapshots)
        self.assertEqual(first.agents, second.agents)

    def test_seed_changes_the_run(self):
        """
        Test different seeds give different trajectories.
        """

        first = run(self.make_config(rows=6, cols=6, iterations=20, seed=1))
        second = run(self.make_config(rows=6, cols=6, iterations=20, seed=2))
        self.assertNotEqual(first.agents, second.agents)

    def test_synchronous_order_independence(self):
        """
        Test reversing the processing order leaves a synchronous run unchanged.
        """

        config = self.make_config(rows=6, cols=6, iterations=30, seed=5)
        forward = run(config)
        backward = run(config, order=reversed_order)
        self.assertEqual(forward.metrics, backward.metrics)
        self.assertEqual(forward.agents, backward.agents)

    def test_fitness_never_decreases(self):
        """
        Test with mental simulation on no agent ever loses fitness.
        """

        for mode in UpdateMode:
            config = self.make_config(iterations=40, seed=3, update_mode=mode)
            history = run(config).fitness_history
            for before, after in zip(history, history[1:]):
                for old, new in zip(before, after):
                    self.assertLessEqual(old, new)

    def test_imitation_only_population_stays_still(self):
        """
        Test nobody changes when every agent only imitates still neighbours.
        """

        result = run(self.make_config(iterations=15, invention_prob=0.0))
        for row in result.metrics:
            self.assertEqual(row.diversity, 1)
            self.assertEqual(row.mean_fitness, 0.0)
        self.assertTrue(all(record.inventions == 0 for record in result.records))

    def test_zero_rate_of_change_stays_still(self):
        """
        Test inventing with rate 0 never produces a new action.
        """

        result = run(
            self.make_config(iterations=15, invention_prob=1.0, rate_of_change=0.0)
        )
        self.assertEqual(result.metrics[-1].diversity, 1)
        self.assertEqual(result.metrics[-1].top_action_index, 364)

    def test_records_count_every_turn(self):
        """
        Test each agent takes exactly one turn per iteration.
        """

        result = run(self.make_config(iterations=12))
        for record in result.records:
            self.assertEqual(record.inventions + record.imitations, 12)
            self.assertLessEqual(
                record.adopted_inventions + record.adopted_imitations, 12
            )

    def test_snapshots_are_rendered_on_request(self):
        """
        Test snapshots exist exactly for the requested iterations.
        """

        result = run(self.make_config(rows=2, cols=3, snapshot_iterations=(0, 4)))
        self.assertEqual(sorted(result.snapshots), [0, 4])
        self.assertEqual(result.snapshots[0], "364 364 364\n364 364 364\n")

    def test_sequential_mode_is_deterministic(self):
        """
        Test sequential updates are reproducible for a fixed seed.
        """

        config = self.make_config(iterations=20, seed=9, update_mode="sequential")
        self.assertEqual(run(config).metrics, run(config).metrics)

    def test_population_fills_the_grid(self):
        """
        Test full placement puts one agent on every cell.
        """

        result = run(self.make_config(rows=3, cols=5, iterations=1))
        self.assertEqual(len(result.agents), 15)
        self.assertEqual(len({agent.position for agent in result.agents}), 15)

    def test_too_many_broadcasters_is_a_configuration_error(self):
        """
        Test more broadcasters than agents is rejected before running.
        """

        config = self.make_config(rows=2, cols=2, broadcast=BroadcastPolicy(count=5))
        with self.assertRaises(ConfigurationError):
            run(config)

    def test_without_mental_simulation_fitness_can_drop(self):
        """
        Test agents that skip mental simulation adopt less fit actions too.
        """

        config = self.make_config(iterations=30, seed=4, mental_simulation=False)
        history = run(config).fitness_history
        dropped = any(
            new < old
            for before, after in zip(history, history[1:])
            for old, new in zip(before, after)
        )
        self.assertTrue(dropped)


class AcquireIdeaTestCase(BaseTestCase):
    """
    Test case for one agent's invent-or-imitate turn.
    """

    def setUp(self):
        super().setUp()
        self.fit = self.make_action("L", "R", "S", "S", "S", "S")
        self.left = self.make_action("L", "S", "S", "S", "S", "S")
        self.right = self.make_action("S", "S", "L", "S", "S", "S")
        self.world = World(
            WorldSpec(rows=1, cols=3, topology="bounded"), [(0, 0), (0, 1), (0, 2)]
        )
        self.world.committed = {0: self.left, 1: self.fit, 2: self.right}

    def make_state(self, action, invention_prob):
        spec = FitnessSpec()
        agents = [AgentState.initial(i, (0, i), spec, 0.0, 1.0) for i in range(3)]
        agents[1] = replace(
            agents[1],
            current_action=action,
            current_fitness=fitness(action, spec),
            invention_prob=invention_prob,
        )
        records = [AgentRecord(agent_id=i) for i in range(3)]
        return SimulationState(
            iteration=1, agents=agents, world=self.world, records=records
        )

    def test_imitation_without_mental_simulation_is_uniform(self):
        """
        Test a random neighbour is copied whatever its fitness.
        """

        config = self.make_config(mental_simulation=False)
        state = self.make_state(self.fit, invention_prob=0.0)
        chosen = []
        for seed in range(200):
            candidate, source, adopt = _acquire_idea(
                state.agents[1], state, config, 1, self.make_rng(seed), []
            )
            self.assertIs(source, IdeaSource.IMITATION)
            self.assertTrue(adopt)
            chosen.append(candidate)
        self.assertEqual(set(chosen), {self.left, self.right})
        self.assertTrue(70 <= chosen.count(self.left) <= 130)
        self.assertEqual(state.records[1].imitations, 200)

    def test_imitation_with_mental_simulation_needs_a_fitter_neighbour(self):
        config = self.make_config()
        state = self.make_state(self.fit, invention_prob=0.0)
        candidate, _, adopt = _acquire_idea(
            state.agents[1], state, config, 1, self.make_rng(), []
        )
        self.assertIsNone(candidate)
        self.assertFalse(adopt)

    def test_invention_without_mental_simulation_is_always_adopted(self):
        """
        Test an invented action replaces an optimum without evaluation.
        """

        optimum = self.make_action("L", "R", "L", "R", "S", "L")
        state = self.make_state(optimum, invention_prob=1.0)
        for mental_simulation in (False, True):
            config = self.make_config(mental_simulation=mental_simulation)
            candidate, source, adopt = _acquire_idea(
                state.agents[1], state, config, 1, self.make_rng(3), []
            )
            self.assertIs(source, IdeaSource.INVENTION)
            self.assertLess(fitness(candidate, FitnessSpec()), 13)
            self.assertEqual(adopt, not mental_simulation)


class AgentRecordTestCase(BaseTestCase):
    def test_imitation_frequency_counts_adopted_actions(self):
        """
        Test the frequency ignores turns that changed nothing.
        """

        record = AgentRecord(
            agent_id=0,
            inventions=10,
            imitations=30,
            adopted_inventions=3,
            adopted_imitations=1,
        )
        self.assertEqual(record.imitation_frequency, 0.25)
        self.assertIsNone(AgentRecord(agent_id=1, imitations=5).imitation_frequency)


class SimConfigTestCase(BaseTestCase):
    """
    Test case for SimConfig validation and ratio parsing.
    """

    def test_defaults(self):
        """
        Test the default configuration.
        """

        config = SimConfig()
        self.assertEqual(config.world, WorldSpec())
        self.assertEqual(config.fitness, FitnessSpec(kind="F1"))
        self.assertEqual(config.iterations, 100)
        self.assertEqual(config.invention_prob, 0.5)
        self.assertAlmostEqual(config.rate_of_change, 1 / 6)
        self.assertIs(config.update_mode, UpdateMode.SYNCHRONOUS)

    def test_invalid_values_are_rejected(self):
        """
        Test out-of-range values raise ConfigurationError.
        """

        invalid = [
            {"iterations": 0},
            {"invention_prob": 1.5},
            {"rate_of_change": -0.1},
            {"seed": -1},
            {"iterations": 5, "snapshot_iterations": (6,)},
            {"update_mode": "parallel"},
        ]
        for changes in invalid:
            with self.subTest(changes=changes):
                with self.assertRaises((ConfigurationError, ValueError)):
                    SimConfig(**changes)

    def test_snapshot_iterations_are_sorted_and_unique(self):
        """
        Test snapshot iterations are normalised.
        """

        config = SimConfig(iterations=10, snapshot_iterations=(10, 0, 10))
        self.assertEqual(config.snapshot_iterations, (0, 10))

    def test_ratio_to_probability(self):
        """
        Test invention:imitation ratios become invention probabilities.
        """

        self.assertAlmostEqual(ratio_to_probability("2:1"), 2 / 3)
        self.assertEqual(ratio_to_probability("1:1"), 0.5)
        self.assertEqual(ratio_to_probability("0:1"), 0.0)
        self.assertEqual(ratio_to_probability("1:0"), 1.0)
        self.assertEqual(ratio_to_probability(" 1 : 3 "), 0.25)

    def test_invalid_ratios(self):
        """
        Test malformed and degenerate ratios are rejected.
        """

        for ratio in ("0:0", "2", "a:b", "1:-1", "1:2:3"):
            with self.subTest(ratio=ratio):
                with self.assertRaises(ConfigurationError):
                    ratio_to_probability(ratio)


class BroadcastTestCase(BaseTestCase):
    """
    Test case for broadcaster selection and assignment.
    """

    def setUp(self):
        super().setUp()
        spec = FitnessSpec()
        fitnesses = [5, 13, 8, 13]
        self.agents = [
            replace(
                AgentState.initial(agent_id, (0, agent_id), spec, 0.5, 1 / 6),
                current_fitness=value,
            )
            for agent_id, value in enumerate(fitnesses)
        ]

    def test_disabled_policy_selects_nobody(self):
        """
        Test count 0 never selects broadcasters.
        """

        policy = BroadcastPolicy()
        chosen = select_broadcasters(policy, self.agents, 1, self.make_rng())
        self.assertEqual(chosen, [])

    def test_fixed_selection(self):
        """
        Test fixed ids are used as given on broadcast iterations only.
        """

        policy = BroadcastPolicy(count=2, selection="fixed", fixed_ids=(3, 1), period=2)
        rng = self.make_rng()
        self.assertEqual(select_broadcasters(policy, self.agents, 2, rng), [3, 1])
        self.assertEqual(select_broadcasters(policy, self.agents, 3, rng), [])

    def test_fittest_selection_breaks_ties_by_id(self):
        """
        Test the fittest agents are chosen, lowest id first on ties.
        """

        policy = BroadcastPolicy(count=3, selection="fittest")
        chosen = select_broadcasters(policy, self.agents, 1, self.make_rng())
        self.assertEqual(chosen, [1, 3, 2])

    def test_random_selection(self):
        """
        Test random selection picks distinct agents reproducibly.
        """

        policy = BroadcastPolicy(count=2, selection="random")
        first = select_broadcasters(policy, self.agents, 1, self.make_rng(8))
        second = select_broadcasters(policy, self.agents, 1, self.make_rng(8))
        self.assertEqual(first, second)
        self.assertEqual(len(set(first)), 2)
        self.assertEqual(first, sorted(first))

    def test_too_many_broadcasters(self):
        """
        Test asking for more broadcasters than agents is rejected.
        """

        policy = BroadcastPolicy(count=5)
        with self.assertRaises(ConfigurationError):
            select_broadcasters(policy, self.agents, 1, self.make_rng())

    def test_invalid_policies(self):
        """
        Test bad counts, periods and fixed ids are rejected.
        """

        with self.assertRaises(ConfigurationError):
            BroadcastPolicy(count=-1)
        with self.assertRaises(ConfigurationError):
            BroadcastPolicy(count=1, period=0)
        with self.assertRaises(ConfigurationError):
            BroadcastPolicy(count=2, selection="fixed", fixed_ids=(1,))
        with self.assertRaises(ConfigurationError):
            BroadcastPolicy(count=2, selection="fixed", fixed_ids=(1, 1))

    def test_closest_broadcaster_is_chosen(self):
        """
        Test an agent listens to the broadcaster nearest its own action.
        """

        actions = {
            0: Action.stationary(),
            1: self.make_action(*"LRLRSR"),
            2: self.make_action(*"LSSSSS"),
            3: self.make_action(*"SSSSSL"),
        }
        agent = self.agents[0]
        self.assertEqual(
            choose_broadcaster_for(agent, [1, 2, 3], actions), (2, actions[2])
        )
        self.assertEqual(choose_broadcaster_for(agent, [1], actions), (1, actions[1]))

    def test_broadcaster_ignores_itself(self):
        """
        Test a broadcaster never listens to its own broadcast.
        """

        actions = {0: Action.stationary()}
        self.assertIsNone(choose_broadcaster_for(self.agents[0], [0], actions))
