"""
Grid transition systems, environment truth and reward traces.
"""
from unittest import TestCase

import numpy as np

from rhcplan import AtomSet, build_grid_dts, transition_weight, chebyshev_ball, EnvironmentTruth, \
    observe_rewards, RewardTrace, SELF_LOOP_WEIGHT


class TestGrid(TestCase):

    def setUp(self):
        self.d = build_grid_dts(3, 2, (0, 0), labels={(2, 1): ['a']}, atoms=['a', 'Obstacle'])

    def test_size(self):
        d = self.d
        self.assertEqual(d.n, 6)
        # 6 self-loops, 8 horizontal and 6 vertical moves
        self.assertEqual(len(d.src), 20)
        self.assertEqual(d.width, 3)
        self.assertEqual(d.height, 2)

    def test_cells(self):
        d = self.d
        self.assertEqual(d.cell(2, 1), 5)
        self.assertEqual(d.xy(5), (2, 1))
        with self.assertRaises(ValueError):
            d.cell(3, 0)

    def test_weights(self):
        d = self.d
        self.assertEqual(transition_weight(d, 0, 1), 1.0)
        self.assertEqual(d.transition_weight(4, 4), SELF_LOOP_WEIGHT)
        with self.assertRaises(KeyError):
            d.transition_weight(0, 4)

    def test_labels(self):
        d = self.d
        self.assertEqual(d.known[5], 1)
        self.assertEqual(d.label(5), frozenset({'a'}))
        self.assertEqual(d.label(0), frozenset())
        self.assertEqual(list(d.label_frame().label), ['{}'] * 5 + ['{a}'])

    def test_successors(self):
        np.testing.assert_array_equal(self.d.successors(4), [1, 3, 4, 5])

    def test_invalid(self):
        with self.assertRaises(ValueError):
            build_grid_dts(0, 2, 0)
        with self.assertRaises(ValueError):
            build_grid_dts(2, 2, (2, 0))
        with self.assertRaises(ValueError):
            build_grid_dts(2, 2, 4)


class TestBall(TestCase):

    def test_radius(self):
        coords = build_grid_dts(3, 2, 0).coords
        np.testing.assert_array_equal(chebyshev_ball(coords, 0, 1), [0, 1, 3, 4])
        np.testing.assert_array_equal(chebyshev_ball(coords, 4, 1), np.arange(6))
        np.testing.assert_array_equal(chebyshev_ball(coords, 2, 0), [2])
        with self.assertRaises(ValueError):
            chebyshev_ball(coords, 0, -1)


class TestEnvironment(TestCase):

    def setUp(self):
        self.atoms = AtomSet(['a', 'Obstacle'])
        d = build_grid_dts(3, 1, 0, labels={2: ['a']}, atoms=self.atoms)
        self.env = EnvironmentTruth(d.coords, self.atoms, d.known)

    def test_record(self):
        env = self.env
        env.record(0, [1], np.arange(3.0), np.zeros(3, dtype=np.int64))
        np.testing.assert_array_equal(env.true_labels(0), [0, 2, 1])
        np.testing.assert_array_equal(env.obstacle_set(), [1])
        env.record(1, [], np.arange(3.0), [0, 0, 1])
        np.testing.assert_array_equal(env.true_labels(), [0, 0, 0])
        # earlier steps stay queryable
        np.testing.assert_array_equal(env.true_labels(0), [0, 2, 1])
        self.assertEqual(env.k, 1)

    def test_unknown_step(self):
        with self.assertRaises(KeyError):
            self.env.true_labels(3)

    def test_obstacle_needs_atom(self):
        atoms = AtomSet(['a'])
        env = EnvironmentTruth(self.env.coords, atoms, np.zeros(3, dtype=np.int64))
        with self.assertRaises(ValueError):
            env.record(0, [1], np.zeros(3), np.zeros(3, dtype=np.int64))

    def test_observe_rewards(self):
        self.env.record(0, [], np.array([5.0, 7.0, 9.0]), np.zeros(3, dtype=np.int64))
        self.assertEqual(observe_rewards(self.env, 0, 1, 0), {0: 5.0, 1: 7.0})
        self.assertEqual(observe_rewards(self.env, 0, 0, 0), {0: 5.0})


class TestRewardTrace(TestCase):

    def test_cumulative(self):
        t = RewardTrace()
        for x in [1, 2.5, 0]:
            t.add(x)
        self.assertEqual(len(t), 3)
        self.assertEqual(t.cumulative, 3.5)
        self.assertEqual(list(t.series()), [1.0, 3.5, 3.5])
