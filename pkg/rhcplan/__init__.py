# coding: utf-8 -*-

from . parser import LtlLexer, LtlParser, LtlSyntaxError, HoaLexer, HoaParser, parse_ltl, parse_hoa, grammar
from . utilities import Answer, logger_level, knobble_fonts, popcount, \
    rhcplan_dir, process_memory, available_memory, nice_title, cells_frame, \
    topology, reachable_from, on_cycle
from . ltl import AtomSet, LtlAst, LassoWord, Atom, Not, And, Or, Next, Eventually, Always, \
    Until, Release, Implies, TRUE, FALSE, nnf, satisfying_positions, evaluate_word
from . automata import Nba, NbaFormatError, universal_nba, translate_to_nba, import_nba, export_nba, \
    from_hoa, read_nba, nba_accepts_lasso
from . transition_system import Dts, build_grid_dts, transition_weight, chebyshev_ball, \
    EnvironmentTruth, observe_rewards, RewardTrace
from . product import RelaxedProduct, build_relaxed_product, build_strict_product, eval_labels, \
    label_distance, violation_cost, trajectory_weight
from . energy import EnergyTable, compute_f_star, compute_energy, shortest_distance, verify_decrease, \
    live_states, live_energy, min_violation_lasso
from . sensing import SenseReport, UpdateDelta, sense, apply_update
from . planner import PredictedTrajectory, PlannerState, Constraint, NoFeasibleStart, EmptyCandidates, \
    plan_initial, plan_step, fallback_path, constraint, is_candidate, enumerate_paths, utility, \
    discount, run_mission
from . simulation import Scenario, ScenarioError, Parameters, World, MissionLog, BenchRecord, \
    load_scenario, bundled_scenarios, step_environment, export_artifacts, run_benchmark, bench_scenario
from . constants import *

import sys

# knobble warnings
if not sys.warnoptions:
    import warnings
    warnings.simplefilter("ignore")


__docformat__ = 'restructuredtext'
__project__ = 'rhcplan'
__author__ = "rhcplan contributors"
__license__ = "BSD 3-Clause New License"
__status__ = "alpha"
# only need to change here, feeds setup.py (build)
__version__ = "0.1.0"

# set up
from pathlib import Path
base_dir = Path.home() / 'rhcplan'
base_dir.mkdir(exist_ok=True)

for p in ['scenarios', 'runs']:
    (base_dir / p).mkdir(exist_ok=True)

del p, base_dir


# as a default turn off all logging
logger_level(30)
knobble_fonts()

# module level doc-string
__doc__ = """
:mod:`rhcplan` plans motion for an agent on a weighted transition system against a hard
LTL task that must never be violated and a soft LTL task that may be relaxed. It builds
a relaxed product automaton, an energy function measuring progress towards accepting
states, and replans over a short horizon as the agent senses obstacles, labels and
rewards around it.
"""
