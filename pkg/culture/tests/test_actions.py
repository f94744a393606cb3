from _culturesim import BaseTestCase
from culture.actions import (
    ACTION_COUNT,
    Action,
    BodyPart,
    Posture,
    action_from_index,
    action_index,
    all_actions,
    trend_activations,
)


class ActionIndexTestCase(BaseTestCase):
    """
    Test case for the canonical action index.
    """

    def test_all_stationary_index(self):
        """
        Test the all-Stationary action has index 364.
        """

        self.assertEqual(action_index(Action.stationary()), 364)

    def test_all_left_index(self):
        """
        Test the all-Left action has index 0.
        """

        self.assertEqual(action_index(self.make_action(*"LLLLLL")), 0)

    def test_single_moving_arm_index(self):
        """
        Test moving only the left arm to the right gives index 365.
        """

        action = Action.stationary().with_part(BodyPart.LEFT_ARM, Posture.RIGHT)
        self.assertEqual(action.index, 365)

    def test_index_is_a_bijection(self):
        """
        Test every index in [0, 728] maps to a distinct action and back.
        """

        actions = all_actions()
        self.assertEqual(len(actions), ACTION_COUNT)
        self.assertEqual(len(set(actions)), ACTION_COUNT)
        for index, action in enumerate(actions):
            self.assertEqual(action.index, index)
            self.assertEqual(action_from_index(index), action)

    def test_index_out_of_range_is_rejected(self):
        """
        Test action_from_index rejects values outside [0, 728].
        """

        for index in (-1, ACTION_COUNT, 10_000):
            with self.assertRaises(ValueError):
                action_from_index(index)
        with self.assertRaises(ValueError):
            action_from_index("12")


class ActionTypeTestCase(BaseTestCase):
    """
    Test case for the Action value type.
    """

    def test_wrong_length_is_rejected(self):
        """
        Test an action needs exactly six parts.
        """

        with self.assertRaises(ValueError):
            Action((0, 0, 0))
        with self.assertRaises(ValueError):
            Action((0,) * 7)

    def test_invalid_posture_is_rejected(self):
        """
        Test only Left, Stationary and Right are representable.
        """

        with self.assertRaises(ValueError):
            Action((0, 0, 0, 0, 0, 2))

    def test_actions_are_hashable_values(self):
        """
        Test equal actions compare and hash equal.
        """

        first = self.make_action("L", "R", "S", "S", "S", "S")
        second = Action.of(-1, 1, 0, 0, 0, 0)
        self.assertEqual(first, second)
        self.assertEqual(len({first, second}), 1)
        self.assertEqual(str(first), "L R S S S S")

    def test_distance_counts_differing_parts(self):
        """
        Test Hamming distance between actions.
        """

        still = Action.stationary()
        self.assertEqual(still.distance(still), 0)
        self.assertEqual(still.distance(self.make_action(*"LRSSSS")), 2)
        self.assertEqual(still.distance(self.make_action(*"LRLRLR")), 6)

    def test_mirrored_swaps_directions(self):
        """
        Test mirroring swaps Left and Right and keeps Stationary.
        """

        action = self.make_action(*"LRSSRS")
        self.assertEqual(action.mirrored(), self.make_action(*"RLSSLS"))


class TrendActivationsTestCase(BaseTestCase):
    """
    Test case for the MOVEMENT and SYMMETRY activations.
    """

    def test_stationary_has_no_trends(self):
        """
        Test the all-Stationary action activates neither trend.
        """

        trends = trend_activations(Action.stationary())
        self.assertEqual(trends.movement, 0)
        self.assertEqual(trends.symmetry, 0)

    def test_one_opposite_arm_pair(self):
        """
        Test opposite moving arms give movement 2/6 and symmetry 1/2.
        """

        trends = trend_activations(self.make_action(*"LRSSSS"))
        self.assertAlmostEqual(trends.movement, 2 / 6)
        self.assertEqual(trends.symmetry, 0.5)

    def test_all_moving_both_pairs_opposite(self):
        """
        Test every part moving with both pairs opposite gives 1 and 1.
        """

        trends = trend_activations(self.make_action(*"LRLRRR"))
        self.assertEqual(trends.movement, 1)
        self.assertEqual(trends.symmetry, 1)

    def test_same_direction_pair_is_not_symmetric(self):
        """
        Test arms moving the same way add movement but no symmetry.
        """

        trends = trend_activations(self.make_action(*"LLSSSS"))
        self.assertAlmostEqual(trends.movement, 2 / 6)
        self.assertEqual(trends.symmetry, 0)

    def test_activations_stay_in_unit_interval(self):
        """
        Test activations lie in [0, 1] for every action.
        """

        for action in all_actions():
            trends = trend_activations(action)
            self.assertTrue(0 <= trends.movement <= 1)
            self.assertTrue(0 <= trends.symmetry <= 1)
