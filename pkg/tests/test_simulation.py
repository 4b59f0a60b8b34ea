"""
Scenarios, the simulated environment, missions, their logs and artifacts, and the
benchmark.
"""
import json
import tempfile
from pathlib import Path
from unittest import TestCase
from unittest.mock import patch

import numpy as np
import pandas as pd

from fixtures import TINY_SCENARIO, tiny_doc, long_test
from rhcplan import Scenario, ScenarioError, MissionLog, load_scenario, bundled_scenarios, step_environment, \
    export_artifacts, run_benchmark, bench_scenario, run_mission, nba_accepts_lasso


def tiny(**changes):
    return Scenario(tiny_doc(**changes), source='test')


class TestScenario(TestCase):

    def test_bundled(self):
        self.assertEqual(bundled_scenarios(), ['sequence', 'surveillance', 'surveillance_feasible'])
        with self.assertRaises(FileNotFoundError):
            load_scenario('no_such_scenario')

    def test_surveillance(self):
        sc = load_scenario('surveillance')
        self.assertEqual((sc.width, sc.height, sc.initial), (10, 10, 0))
        self.assertEqual(sc.toggles, [(sc.atoms.mask(['Survey']), None, 101, 200)])
        self.assertEqual(len(sc.walkers), 4)
        self.assertEqual(sc.static_obstacles, [44, 45, 64])
        self.assertEqual((sc.parameters.horizon, sc.parameters.radius, sc.parameters.seed), (4, 4, 7))
        self.assertEqual(sc.static[sc._cell([8, 8], 'x')], sc.atoms.mask(['Survey']))

    def test_sequence(self):
        sc = load_scenario('sequence')
        self.assertEqual((sc.width, sc.height), (8, 4))
        self.assertEqual((sc.reward_low, sc.reward_high), (5.0, 15.0))
        self.assertEqual(sc.initial, 24)

    def test_tiny(self):
        sc = tiny()
        self.assertEqual(sc.static_obstacles, [6])
        self.assertEqual(sc.walkers, [5])
        # radius follows the horizon when not given
        self.assertEqual(sc.parameters.radius, 3)
        self.assertEqual(sc.initial_knowledge, 'static')

    def test_errors(self):
        cases = [
            (dict(version=2), 'version'),
            (dict(hard='a &&'), 'hard'),
            (dict(soft='[]<> C'), 'soft'),
            (dict(grid={'width': 4, 'height': 3, 'initial': [4, 0]}), 'grid.initial'),
            (dict(grid={'width': 4, 'height': 3}), 'grid.initial'),
            (dict(labels={'Obstacle': [[1, 1]]}), 'labels.Obstacle'),
            (dict(labels={'C': [[1, 1]]}), 'labels.C'),
            (dict(obstacles={'static': [[0, 0]]}), 'grid.initial'),
            (dict(obstacles={'walkers': [{'start': [3, 0]}]}), 'obstacles.walkers[0].start'),
            (dict(obstacles={'walkers': [{'begin': [1, 1]}]}), 'obstacles.walkers[0].start'),
            (dict(obstacles={'script': {'x': []}}), 'obstacles.script.x'),
            (dict(toggles=[{'atom': 'A', 'off': [5, 1]}]), 'toggles[0].off'),
            (dict(toggles=[{'atom': 'C', 'off': [1, 5]}]), 'toggles[0].atom'),
            (dict(rewards={'low': 5, 'high': 1}), 'rewards'),
            (dict(parameters={'x': 1}), 'parameters.x'),
            (dict(parameters={'horizon': 0}), 'parameters.horizon'),
            (dict(parameters={'beta': 0}), 'parameters.beta'),
            (dict(initial_knowledge='all'), 'initial_knowledge'),
        ]
        for changes, path in cases:
            with self.subTest(path=path, changes=changes):
                with self.assertRaises(ScenarioError) as cm:
                    tiny(**changes)
                self.assertEqual(cm.exception.path, path)

    def test_missing_field(self):
        doc = tiny_doc()
        del doc['hard']
        with self.assertRaises(ScenarioError) as cm:
            Scenario(doc)
        self.assertEqual(cm.exception.path, 'hard')

    def test_obstacles_need_atom(self):
        with self.assertRaises(ScenarioError) as cm:
            tiny(atoms=['A', 'B'], hard='[]!A')
        self.assertEqual(cm.exception.path, 'obstacles')

    def test_with_parameters(self):
        sc = tiny()
        sc.nbas()
        sc2 = sc.with_parameters(horizon=2, seed=None)
        self.assertEqual((sc2.parameters.horizon, sc2.parameters.radius, sc2.parameters.seed), (2, 2, 0))
        self.assertEqual(sc.parameters.horizon, 3)
        self.assertIs(sc2.nbas()[0], sc.nbas()[0])

    def test_load_from_path(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'tiny.json'
            path.write_text(json.dumps(TINY_SCENARIO), encoding='utf-8')
            self.assertEqual(load_scenario(path).name, 'tiny')
            path.write_text('{"version": 1,', encoding='utf-8')
            with self.assertRaises(ScenarioError):
                load_scenario(path)


class TestEnvironment(TestCase):

    def test_order(self):
        world = tiny().world()
        with self.assertRaises(ValueError):
            step_environment(world, 1, 0)
        step_environment(world, 0, 0)
        with self.assertRaises(ValueError):
            step_environment(world, 0, 0)

    def test_walkers(self):
        world = tiny().world()
        env = world.env
        agent = 4
        for k in range(40):
            step_environment(world, k, agent)
            obs = set(env.obstacle_set(k).tolist())
            self.assertIn(6, obs)
            self.assertEqual(len(obs), 2)
            # never onto labelled cells, nor onto the agent after the start
            self.assertFalse(obs & {3, 8})
            if k > 0:
                self.assertNotIn(agent, obs)
            self.assertTrue(np.all(env.true_labels(k)[sorted(obs)] & env.obstacle_bit))

    def test_seeded(self):
        a, b = tiny().world(), tiny().world()
        for k in range(10):
            step_environment(a, k, 0)
            step_environment(b, k, 0)
            np.testing.assert_array_equal(a.env.obstacle_set(k), b.env.obstacle_set(k))
            np.testing.assert_array_equal(a.env.rewards(k), b.env.rewards(k))

    def test_rewards(self):
        world = tiny().world()
        rng = np.random.default_rng([0, 0])
        for k in range(5):
            step_environment(world, k, 0)
            np.testing.assert_array_equal(world.env.rewards(k), rng.uniform(5, 15, 12))

    def test_toggle(self):
        sc = load_scenario('surveillance')
        world = sc.world()
        survey = sc._cell([8, 8], 'x')
        bit = sc.atoms.mask(['Survey'])
        for k in range(102):
            step_environment(world, k, 0)
        self.assertTrue(world.env.true_labels(100)[survey] & bit)
        self.assertFalse(world.env.true_labels(101)[survey] & bit)
        # knowledge only changes through sensing
        self.assertTrue(world.d.known[survey] & bit)

    def test_truth_knowledge(self):
        world = tiny(initial_knowledge='truth').world()
        step_environment(world, 0, 0)
        bit = world.env.obstacle_bit
        self.assertTrue(world.d.known[6] & bit)
        self.assertTrue(world.d.known[5] & bit)

    def test_script(self):
        world = tiny(obstacles={'script': {'0': [[3, 2]], '2': [[0, 0]]}}).world()
        for k in range(3):
            step_environment(world, k, 0)
        self.assertEqual(world.env.obstacle_set(0).tolist(), [11])
        self.assertEqual(world.env.obstacle_set(1).tolist(), [])
        # an obstacle scripted onto the agent is dropped
        self.assertEqual(world.env.obstacle_set(2).tolist(), [])


class TestMission(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.sc = tiny()
        cls.log = run_mission(cls.sc, audit=True)

    def test_shape(self):
        log = self.log
        self.assertEqual(len(log), 13)
        self.assertEqual(log.frame.k.tolist(), list(range(13)))
        self.assertEqual(int(log.frame.cell.iloc[0]), 0)
        # one plan for the start and one per later step
        self.assertEqual(len(log.timing), 12)
        self.assertEqual(len(run_mission(self.sc, steps=0)), 1)

    def test_moves(self):
        fr = self.log.frame
        step = np.abs(np.diff(fr.x)) + np.abs(np.diff(fr.y))
        self.assertTrue(np.all(step <= 1))
        self.assertTrue(np.all(fr.h == 0))

    def test_safe(self):
        fr = self.log.frame
        self.assertFalse(fr.entered_obstacle.any())
        self.assertEqual(int(self.log.summary().obstacle_entries.iloc[0]), 0)
        for cell, obs in zip(fr.cell, fr.obstacles):
            self.assertNotIn(str(cell), obs.split())

    def test_reward(self):
        c = self.log.cumulative_reward
        self.assertEqual(c.iloc[0], 0.0)
        self.assertTrue(np.all(np.diff(c) >= 5.0))

    def test_audit(self):
        fr = self.log.frame
        self.assertTrue(fr.fallback_ok.all())
        self.assertTrue(fr.f_star_same.all())

    def test_deterministic(self):
        self.assertEqual(run_mission(self.sc).to_text(), run_mission(self.sc).to_text())

    def test_exhaustive_agrees(self):
        a = run_mission(self.sc, steps=5)
        b = run_mission(self.sc, steps=5, exhaustive=True)
        pd.testing.assert_frame_equal(a.frame, b.frame)

    def test_summary(self):
        s = self.log.summary()
        self.assertEqual(int(s.steps.iloc[0]), 12)
        self.assertEqual(s.scenario.iloc[0], 'tiny')
        self.assertAlmostEqual(float(s.reward.iloc[0]), float(self.log.cumulative_reward.iloc[-1]))
        self.assertEqual(len(self.log.relaxations), int(s.relaxations.iloc[0]))

    def test_executed_lasso(self):
        lasso = self.log.executed_lasso()
        if lasso is not None:
            states = self.log.frame.state.tolist()
            self.assertEqual(lasso.prefix + lasso.cycle, states[:len(lasso.prefix) + len(lasso.cycle)])
            self.assertEqual(len(lasso.word.cycle), len(lasso.cycle))

    def test_write_read(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'mission.log'
            self.log.write(path)
            log = MissionLog.read(path)
            self.assertEqual(log.meta, self.log.meta)
            pd.testing.assert_frame_equal(log.frame, self.log.frame, check_dtype=False)
            (Path(tmp) / 'other.log').write_text('k\tcell\n0\t0\n', encoding='utf-8')
            with self.assertRaises(ValueError):
                MissionLog.read(Path(tmp) / 'other.log')

    def test_artifacts(self):
        with tempfile.TemporaryDirectory() as tmp:
            paths = export_artifacts(self.log, Path(tmp) / 'out')
            self.assertEqual(len(paths), 9)
            for name, path in paths.items():
                with self.subTest(name=name):
                    self.assertGreater(path.stat().st_size, 0)
            self.assertIn('<svg', paths['render.svg'].read_text(encoding='utf-8'))
            self.assertIn('tiny', paths['summary.html'].read_text(encoding='utf-8'))
            energy = pd.read_csv(paths['energy.csv'])
            self.assertEqual(list(energy.columns), ['k', 'J'])
            self.assertEqual(len(pd.read_csv(paths['trajectory.csv'])), 13)

    def test_empty_artifacts(self):
        log = MissionLog.from_rows([], [], self.sc)
        self.assertTrue(log.empty)
        with tempfile.TemporaryDirectory() as tmp:
            paths = export_artifacts(log, tmp)
            self.assertEqual(len(paths), 9)
            self.assertTrue(all(p.stat().st_size == 0 for p in paths.values()))


class TestLongMissions(TestCase):

    @long_test
    def test_surveillance_feasible(self):
        sc = load_scenario('surveillance_feasible')
        log = run_mission(sc, audit=True)
        fr = log.frame
        self.assertEqual(len(log), 201)
        self.assertFalse(fr.entered_obstacle.any())
        self.assertTrue(fr.fallback_ok.all())
        # the soft task is satisfiable, so it is never violated
        self.assertEqual(int(fr.v.sum()), 0)
        lasso = log.executed_lasso()
        self.assertIsNotNone(lasso)
        b_h, b_s = sc.nbas()
        self.assertTrue(nba_accepts_lasso(b_h, lasso.word))
        self.assertTrue(nba_accepts_lasso(b_s, lasso.word))

    @long_test
    def test_surveillance_toggle(self):
        log = run_mission(load_scenario('surveillance'))
        fr = log.frame
        self.assertEqual(len(log), 201)
        self.assertFalse(fr.entered_obstacle.any())
        self.assertTrue(np.all(fr.h == 0))
        J = log.energy_trace
        self.assertGreaterEqual(int((J.loc[1:100] == 0).sum()), 2)
        self.assertGreaterEqual(int((J.loc[101:200] == 0).sum()), 2)
        # Survey disappears: sensing it raises the energy again
        self.assertTrue(np.any(np.diff(J.loc[100:200].to_numpy()) > 0))

    @long_test
    def test_seeded_missions(self):
        sc = load_scenario('surveillance')
        for seed in range(10):
            with self.subTest(seed=seed):
                fr = run_mission(sc.with_parameters(seed=seed), audit=True).frame
                self.assertEqual(len(fr), 201)
                self.assertTrue(np.all(fr.h == 0))
                self.assertFalse(fr.entered_obstacle.any())
                self.assertTrue(fr.fallback_ok.all())
                self.assertTrue(fr.f_star_same.all())
                # without new annotations the terminal energy drops while no zero is in sight
                te = fr.terminal_energy.to_numpy(dtype=float)
                for r in range(2, len(fr)):
                    if fr.case.iloc[r] == 1 and fr.tier.iloc[r] == 0 and fr.changed.iloc[r] == 0:
                        self.assertLess(te[r], te[r - 1])
                    if fr.tier.iloc[r] == 0:
                        self.assertTrue(np.isfinite(te[r]))

    @long_test
    def test_bench_time_grows_with_horizon(self):
        df = run_benchmark([(10, 1), (10, 4), (10, 8)], reps=3, steps=20)
        self.assertEqual(df.Q.tolist(), [100] * 3)
        self.assertTrue(np.all(df.S_P == df.Q * df.S_h * df.S_s))
        self.assertTrue(np.all(np.diff(df['mean'].to_numpy()) >= 0))

    @long_test
    def test_bench_grid_sizes(self):
        df = run_benchmark([(30, 2), (50, 2)], reps=1, steps=2)
        self.assertEqual(df.Q.tolist(), [900, 2500])
        self.assertTrue(np.all(df.S_P == df.Q * df.S_h * df.S_s))


class TestBenchmark(TestCase):

    def test_bench_scenario(self):
        sc = bench_scenario(4, 2, steps=3)
        self.assertEqual((sc.width, sc.parameters.horizon, sc.parameters.steps), (4, 2, 3))
        with self.assertRaises(ValueError):
            bench_scenario(1, 2)

    def test_row(self):
        df = run_benchmark([(4, 2)], reps=1, steps=3)
        self.assertEqual(list(df.columns), ['size', 'Q', 'S_h', 'S_s', 'S_P', 'edges', 'N', 'reps', 'min',
                                            'max', 'mean', 'skipped'])
        row = df.iloc[0]
        self.assertEqual(row.Q, 16)
        self.assertEqual(row.S_P, row.Q * row.S_h * row.S_s)
        self.assertFalse(row.skipped)
        self.assertTrue(0 <= row['min'] <= row['mean'] <= row['max'])

    def test_memory_guard(self):
        with patch('rhcplan.simulation.available_memory', return_value=0):
            df = run_benchmark([(4, 2)], steps=3)
        self.assertTrue(df.skipped.iloc[0])
        self.assertEqual(int(df.reps.iloc[0]), 0)
        with self.assertRaises(ValueError):
            run_benchmark([(4, 2)], reps=0)
