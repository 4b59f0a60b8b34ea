"""
Command line interface: ``rhcplan translate | build | plan | bench | render``.

Diagnostics go to stderr through logging, data to stdout. Exit codes are listed in
``constants.EXIT_CODES``.
"""

import argparse
import json
import logging
from pathlib import Path
import sys

import pandas as pd

from .automata import translate_to_nba, export_nba, read_nba, NbaFormatError
from .constants import *
from .energy import compute_f_star, compute_energy, min_violation_lasso
from .parser import parse_ltl, LtlSyntaxError
from .planner import run_mission, NoFeasibleStart
from .product import build_relaxed_product
from .simulation import (load_scenario, step_environment, export_artifacts, run_benchmark, default_out_dir,
                         MissionLog, ScenarioError)
from .utilities import logger_level

logger = logging.getLogger(__name__)

BAD_INPUT = (LtlSyntaxError, NbaFormatError, ScenarioError, FileNotFoundError, json.JSONDecodeError)


class BenchMemoryError(MemoryError):
    """ Every requested benchmark row tripped the memory guard. """


def _epilog():
    codes = '\n'.join(f'  {k}  {v}' for k, v in EXIT_CODES.items())
    return f'exit codes:\n{codes}\n\nscenario files use schema version {SCHEMA_VERSION}'


def _out_dir(args, name):
    return Path(args.out) if args.out else default_out_dir(name)


def _scenario(args):
    sc = load_scenario(args.scenario)
    sc = sc.with_parameters(seed=getattr(args, 'seed', None), horizon=getattr(args, 'horizon', None),
                            beta=getattr(args, 'beta', None), kappa=getattr(args, 'kappa', None),
                            radius=getattr(args, 'radius', None), steps=getattr(args, 'steps', None))
    hard, soft = getattr(args, 'hard_nba', None), getattr(args, 'soft_nba', None)
    if hard or soft:
        sc.set_nbas(read_nba(hard, sc.atoms) if hard else None, read_nba(soft, sc.atoms) if soft else None)
    return sc


def cmd_translate(args):
    atoms = args.atoms.split(',') if args.atoms else None
    f = parse_ltl(args.formula, atoms)
    b = translate_to_nba(f, atoms)
    if args.out:
        export_nba(b, args.out)
        print(f'states\t{b.n_states}\naccepting\t{len(b.accepting)}')
    else:
        print(json.dumps(export_nba(b), indent=2))
    logger.info(f'cmd_translate | {b}')
    return 0


def cmd_build(args):
    sc = _scenario(args)
    world = sc.world()
    step_environment(world, 0, world.d.initial)
    p = build_relaxed_product(world.d, world.b_h, world.b_s, sc.parameters.beta)
    f = compute_f_star(p)
    energy = compute_energy(p, f)
    out = _out_dir(args, sc.name)
    out.mkdir(parents=True, exist_ok=True)
    p.dump(out / 'product.tsv')
    energy.export(out / 'energy_table.csv')
    print(p.describe(f).to_string(index=False))
    lasso = min_violation_lasso(p, f)
    if lasso is None:
        print('no accepting lasso through h = 0 edges')
    else:
        print(f'min violation lasso: weight {lasso.weight:.2f}, violation {lasso.violation}, '
              f'prefix {len(lasso.prefix)}, cycle {len(lasso.cycle)}\nword {lasso.word}')
    return 0


def cmd_plan(args):
    sc = _scenario(args)
    log = run_mission(sc, audit=args.audit, exhaustive=args.exhaustive)
    export_artifacts(log, _out_dir(args, sc.name))
    print(log.summary().to_string(index=False))
    return 0


def _rows(text):
    rows = []
    for item in text.split(','):
        try:
            size, n = item.lower().split('x')
            rows.append((int(size), int(n)))
        except ValueError:
            raise argparse.ArgumentTypeError(f'rows are SIZExN, e.g. 10x4, not {item!r}')
    return rows


def cmd_bench(args):
    rows = args.rows if args.rows else BENCH_ROWS
    df = run_benchmark(rows, reps=args.reps, steps=args.steps, seed=args.seed, jobs=args.jobs)
    out = Path(args.out) if args.out else default_out_dir('bench') / 'bench.csv'
    out.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(out, index=False)
    print(df.to_string(index=False))
    if len(df) and df.skipped.all():
        raise BenchMemoryError('Every benchmark row exceeds the memory guard')
    return 0


def cmd_render(args):
    d = Path(args.dir)
    log = MissionLog.read(d / 'mission.log')
    timing = d / 'timing.csv'
    if timing.exists() and timing.stat().st_size:
        log.timing = pd.read_csv(timing).seconds.tolist()
    export_artifacts(log, Path(args.out) if args.out else d)
    print(log.summary().to_string(index=False))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog='rhcplan', description='Receding horizon LTL planning with hard and '
                                 'soft constraints.', epilog=_epilog(),
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument('-v', '--verbose', action='count', default=0, help='-v info, -vv debug')
    ap.add_argument('-q', '--quiet', action='store_true', help='errors only')
    sub = ap.add_subparsers(dest='command', required=True)

    p = sub.add_parser('translate', help='translate an LTL formula to a Buchi automaton file')
    p.add_argument('formula')
    p.add_argument('--atoms', help='comma separated atom names; default the atoms used')
    p.add_argument('-o', '--out', help='output file; default JSON to stdout')
    p.set_defaults(func=cmd_translate)

    def scenario_args(p):
        p.add_argument('scenario', help='scenario file or bundled name')
        p.add_argument('-o', '--out', help='output directory, default ~/rhcplan/runs/<name>')
        p.add_argument('--seed', type=int)
        p.add_argument('--horizon', type=int)
        p.add_argument('--beta', type=float)
        p.add_argument('--kappa', type=float)
        p.add_argument('--radius', type=int)
        p.add_argument('--steps', type=int)
        p.add_argument('--hard-nba', help='automaton file (.json or .hoa) replacing the hard task')
        p.add_argument('--soft-nba', help='automaton file (.json or .hoa) replacing the soft task')

    p = sub.add_parser('build', help='build the product and energy table, report sizes')
    scenario_args(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser('plan', help='run a mission and write its artifacts')
    scenario_args(p)
    p.add_argument('--audit', action='store_true', help='record fallback and F* checks per step')
    p.add_argument('--exhaustive', action='store_true', help='plan by enumeration, small scenarios only')
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser('bench', help='planning time on growing grids')
    p.add_argument('--rows', type=_rows, help='comma separated SIZExN, default ' +
                   ','.join(f'{s}x{n}' for s, n in BENCH_ROWS))
    p.add_argument('--reps', type=int, default=1)
    p.add_argument('--steps', type=int, default=BENCH_STEPS)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--jobs', type=int, default=1)
    p.add_argument('-o', '--out', help='csv file, default ~/rhcplan/runs/bench/bench.csv')
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser('render', help='re-render artifacts from a mission.log directory')
    p.add_argument('dir')
    p.add_argument('-o', '--out', help='output directory, default the input directory')
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    logger_level(40 if args.quiet else {0: 30, 1: 20}.get(args.verbose, 10))
    try:
        return args.func(args)
    except BAD_INPUT as e:
        print(f'rhcplan: {e}', file=sys.stderr)
        return 2
    except NoFeasibleStart as e:
        print(f'rhcplan: {e}', file=sys.stderr)
        return 3
    except MemoryError as e:
        print(f'rhcplan: {e}', file=sys.stderr)
        return 4
    except OSError as e:
        print(f'rhcplan: cannot write output: {e}', file=sys.stderr)
        return 5
