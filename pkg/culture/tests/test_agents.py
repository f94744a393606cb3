from _culturesim import BaseTestCase
from _culturesim.helpers import ContractViolation
from culture.actions import Action, Posture, TrendActivations
from culture.agents import (
    AgentState,
    KboState,
    consider_adopt,
    imitate_scan,
    invent,
    learn_and_implement,
    update_kbo,
)
from culture.fitness import FitnessSpec

F1 = FitnessSpec(kind="F1")


class KboTestCase(BaseTestCase):
    """
    Test case for knowledge-based operator updates.
    """

    def test_rising_movement_raises_every_p_im(self):
        """
        Test p_im steps up by 0.1 when movement increases.
        """

        kbo = update_kbo(
            KboState(), TrendActivations(0.2, 0.0), TrendActivations(0.5, 0.0)
        )
        self.assertEqual(kbo.p_im, (0.6,) * 6)
        self.assertEqual(kbo.p_sym, 0.5)

    def test_falling_trends_lower_probabilities(self):
        """
        Test p_im and p_sym step down when the trends decrease.
        """

        kbo = update_kbo(
            KboState(), TrendActivations(0.5, 1.0), TrendActivations(0.2, 0.5)
        )
        self.assertEqual(kbo.p_im, (0.4,) * 6)
        self.assertEqual(kbo.p_sym, 0.4)

    def test_upper_clamp(self):
        """
        Test a probability near 1 is clamped at 1.
        """

        kbo = KboState(p_im=(0.95,) * 6, p_sym=1.0)
        updated = update_kbo(kbo, TrendActivations(0, 0), TrendActivations(1, 1))
        self.assertEqual(updated.p_im, (1.0,) * 6)
        self.assertEqual(updated.p_sym, 1.0)

    def test_lower_clamp(self):
        """
        Test a probability near 0 is clamped at 0.
        """

        kbo = KboState(p_im=(0.05,) * 6, p_sym=0.0)
        updated = update_kbo(kbo, TrendActivations(1, 1), TrendActivations(0, 0))
        self.assertEqual(updated.p_im, (0.0,) * 6)
        self.assertEqual(updated.p_sym, 0.0)

    def test_equal_trends_leave_kbo_unchanged(self):
        """
        Test no trend signal means no update.
        """

        kbo = KboState(p_im=(0.3, 0.4, 0.5, 0.6, 0.7, 0.8), p_sym=0.2)
        trends = TrendActivations(0.5, 0.5)
        self.assertEqual(update_kbo(kbo, trends, trends), kbo)

    def test_repeated_steps_stay_on_grid(self):
        """
        Test many steps up and down stay in [0, 1] on the 0.1 grid.
        """

        kbo = KboState()
        up = (TrendActivations(0, 0), TrendActivations(1, 1))
        down = (TrendActivations(1, 1), TrendActivations(0, 0))
        for trends in [up] * 7 + [down] * 13 + [up] * 3:
            kbo = update_kbo(kbo, *trends)
            for p in (*kbo.p_im, kbo.p_sym):
                self.assertTrue(0.0 <= p <= 1.0)
                self.assertAlmostEqual(p * 10, round(p * 10))
        self.assertEqual(kbo.p_sym, 0.3)

    def test_out_of_range_probabilities_are_rejected(self):
        """
        Test KboState refuses probabilities outside [0, 1].
        """

        with self.assertRaises(ValueError):
            KboState(p_sym=1.5)
        with self.assertRaises(ValueError):
            KboState(p_im=(0.5,) * 5)


class InventTestCase(BaseTestCase):
    """
    Test case for invention by biased mutation.
    """

    def test_rate_zero_is_identity(self):
        """
        Test no part changes when the rate of change is 0.
        """

        rng = self.make_rng(3)
        action = self.make_action(*"LRSSRS")
        for _ in range(200):
            self.assertEqual(invent(action, KboState(), 0.0, rng), action)

    def test_rate_one_moves_every_stationary_part(self):
        """
        Test every still part starts moving at rate 1.
        """

        rng = self.make_rng(4)
        for _ in range(200):
            invented = invent(Action.stationary(), KboState(), 1.0, rng)
            self.assertTrue(all(posture.is_moving for posture in invented))

    def test_every_mutation_changes_the_part(self):
        """
        Test mutated parts never keep their posture.
        """

        rng = self.make_rng(5)
        action = self.make_action(*"LRSRLS")
        for _ in range(200):
            invented = invent(action, KboState(), 1.0, rng)
            self.assertEqual(invented.distance(action), 6)

    def test_no_change_probability(self):
        """
        Test rate 1/6 leaves the action unchanged (5/6)^6 of the time.
        """

        rng = self.make_rng(6)
        still = Action.stationary()
        trials = 100_000
        unchanged = sum(
            invent(still, KboState(), 1 / 6, rng) == still for _ in range(trials)
        )
        self.assertAlmostEqual(unchanged / trials, (5 / 6) ** 6, delta=0.01)

    def test_full_symmetry_bias(self):
        """
        Test p_sym 1 always moves a limb opposite its moving counterpart.
        """

        rng = self.make_rng(7)
        kbo = KboState(p_sym=1.0)
        for _ in range(200):
            invented = invent(Action.stationary(), kbo, 1.0, rng)
            self.assertEqual(invented[0], invented[1].opposite)
            self.assertEqual(invented[2], invented[3].opposite)

    def test_no_decreased_movement_reverses(self):
        """
        Test p_im 1 reverses moving parts instead of stopping them.
        """

        rng = self.make_rng(8)
        kbo = KboState(p_im=(1.0,) * 6)
        moving = self.make_action(*"LLLLLL")
        for _ in range(50):
            invented = invent(moving, kbo, 1.0, rng)
            self.assertEqual(invented, self.make_action(*"RRRRRR"))

    def test_full_decreased_movement_stops(self):
        """
        Test p_im 0 stops every mutated moving part.
        """

        rng = self.make_rng(9)
        kbo = KboState(p_im=(0.0,) * 6)
        invented = invent(self.make_action(*"LRLRLR"), kbo, 1.0, rng)
        self.assertEqual(invented, Action.stationary())

    def test_invalid_rate_is_rejected(self):
        """
        Test a rate outside [0, 1] is rejected.
        """

        with self.assertRaises(ValueError):
            invent(Action.stationary(), KboState(), 1.5, self.make_rng())


class AdoptionTestCase(BaseTestCase):
    """
    Test case for mental simulation, imitation scanning and learning.
    """

    def agent_with(self, action):
        agent = AgentState.initial(0, (0, 0), F1, 0.5, 1 / 6)
        return learn_and_implement(agent, action, F1, require_fitter=False)

    def test_fitter_candidate_is_adopted(self):
        """
        Test a strictly fitter candidate passes mental simulation.
        """

        agent = self.agent_with(self.make_action(*"LRSSSS"))  # fitness 5
        self.assertTrue(consider_adopt(self.make_action(*"LRLRSR"), agent, F1))

    def test_equal_candidate_is_rejected(self):
        """
        Test an equally fit candidate is rejected.
        """

        agent = self.agent_with(self.make_action(*"LRSSSS"))
        self.assertFalse(consider_adopt(self.make_action(*"RLSSSS"), agent, F1))

    def test_optimal_agent_rejects_everything(self):
        """
        Test nothing beats a global optimum.
        """

        agent = self.agent_with(self.make_action(*"LRLRSR"))
        candidates = [
            (1, Action.stationary()),
            (2, self.make_action(*"RLRLSL")),
            (3, self.make_action(*"LRLRRR")),
        ]
        self.assertIsNone(imitate_scan(agent, candidates, F1))

    def test_scan_skips_less_fit_candidates(self):
        """
        Test the scan returns the fitter candidate in either order.
        """

        agent = self.agent_with(self.make_action(*"LRSSSR"))  # fitness 8
        weaker = (1, self.make_action(*"LRSSSS"))  # fitness 5
        stronger = (2, self.make_action(*"LRLRSS"))  # fitness 10
        self.assertEqual(imitate_scan(agent, [weaker, stronger], F1), stronger[1])
        self.assertEqual(imitate_scan(agent, [stronger, weaker], F1), stronger[1])

    def test_empty_scan(self):
        """
        Test an empty candidate list yields nothing.
        """

        self.assertIsNone(imitate_scan(self.agent_with(Action.stationary()), [], F1))

    def test_learning_updates_kbo_and_fitness(self):
        """
        Test learning (L, R, S, S, S, S) from stillness raises both biases.
        """

        agent = AgentState.initial(0, (0, 0), F1, 0.5, 1 / 6)
        learned = learn_and_implement(agent, self.make_action(*"LRSSSS"), F1)
        self.assertEqual(learned.current_fitness, 5)
        self.assertEqual(learned.kbo.p_im, (0.6,) * 6)
        self.assertEqual(learned.kbo.p_sym, 0.6)
        self.assertEqual(agent.current_fitness, 0)

    def test_equal_trends_keep_kbo(self):
        """
        Test a fitter action with the same trends replaces the action only.
        """

        agent = self.agent_with(self.make_action(*"LRSSLS"))  # head moving: 6
        better = self.make_action(*"LRSSSL")  # hips moving, head still: 8
        learned = learn_and_implement(agent, better, F1)
        self.assertEqual(learned.kbo, agent.kbo)
        self.assertEqual(learned.current_action, better)
        self.assertGreater(learned.current_fitness, agent.current_fitness)

    def test_learning_without_knowledge_operators(self):
        """
        Test the biases stay put when knowledge operators are off.
        """

        agent = AgentState.initial(0, (0, 0), F1, 0.5, 1 / 6)
        learned = learn_and_implement(
            agent, self.make_action(*"LRSSSS"), F1, knowledge_operators=False
        )
        self.assertEqual(learned.kbo, KboState())

    def test_learning_a_less_fit_action_is_a_violation(self):
        """
        Test learn_and_implement refuses an action that is not fitter.
        """

        agent = self.agent_with(self.make_action(*"LRSSSS"))
        with self.assertRaises(ContractViolation):
            learn_and_implement(agent, Action.stationary(), F1)
        with self.assertRaises(ContractViolation):
            learn_and_implement(agent, agent.current_action, F1)

    def test_initial_agent_is_still(self):
        """
        Test agents start all-Stationary with neutral biases.
        """

        agent = AgentState.initial(3, (1, 2), F1, 0.5, 1 / 6)
        self.assertEqual(agent.current_action, Action.stationary())
        self.assertEqual(agent.current_fitness, 0)
        self.assertEqual(agent.kbo.p_im, (0.5,) * 6)
        self.assertEqual(agent.kbo.p_dm, (0.5,) * 6)
        self.assertIs(agent.current_action[0], Posture.STATIONARY)
