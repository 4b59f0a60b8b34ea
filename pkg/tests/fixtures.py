"""
Shared builders for the tests.

``line_world`` is a 3x1 grid with ``a`` on the right cell, a one-state hard automaton
for ``[]!Obstacle`` and a two-state soft automaton for ``[]<> a``, written out by hand.
Product state ``2 * q + s`` is cell ``q`` with soft state ``s``; soft state 1 accepts.
"""

import os
import unittest

import numpy as np

from rhcplan import AtomSet, build_grid_dts, import_nba, build_relaxed_product, translate_to_nba, \
    parse_ltl, LassoWord, Atom, Not, And, Or, Next, Eventually, Always, Until

LONG = os.environ.get('RHCPLAN_LONG') == '1'
long_test = unittest.skipUnless(LONG, 'set RHCPLAN_LONG=1 for full length missions')

HARD_DOC = {'atoms': ['Obstacle'], 'states': ['h0'], 'initial': ['h0'], 'accepting': ['h0'],
            'transitions': [{'from': 'h0', 'to': 'h0', 'labels': [[]]}]}

SOFT_DOC = {'atoms': ['a'], 'states': ['s0', 's1'], 'initial': ['s0'], 'accepting': ['s1'],
            'transitions': [{'from': 's0', 'to': 's0', 'labels': [[]]},
                            {'from': 's0', 'to': 's1', 'labels': [['a']]},
                            {'from': 's1', 'to': 's0', 'labels': [[]]},
                            {'from': 's1', 'to': 's1', 'labels': [['a']]}]}

LINE_ATOMS = AtomSet(['a', 'Obstacle'])
A, OBS = 1, 2

# energies of the line world for beta = 10, without and with an obstacle on cell 1
LINE_J = [3.0, 0.0, 2.0, 0.0, 1.0, 0.0]
LINE_J_BLOCKED = [11.0, 0.0, np.inf, 0.0, 1.0, 0.0]
LINE_LIVE_BLOCKED = [11.0, 0.0, np.inf, np.inf, 1.0, 0.0]


def line_dts(obstacle=False):
    labels = {2: ['a']}
    if obstacle:
        labels[1] = ['Obstacle']
    return build_grid_dts(3, 1, 0, labels=labels, atoms=LINE_ATOMS)


def line_world(obstacle=False, beta=10):
    """ ``(d, b_h, b_s, p)`` for the line world. """
    d = line_dts(obstacle)
    b_h, b_s = import_nba(HARD_DOC), import_nba(SOFT_DOC)
    return d, b_h, b_s, build_relaxed_product(d, b_h, b_s, beta)


SOFT_FORMULAS = ['[]<> a', '[]<> a && []<> b', '[](a -> X(!a U b))', '<>[] !b', '[]<> (a && X b)']
RANDOM_ATOMS = AtomSet(['a', 'b', 'Obstacle'])


def random_world(seed, obstacles=True):
    """
    Small random grid world, 2-3 columns by 1-2 rows, with random a/b labels and
    obstacles off the initial cell 0.

    :return: ``(d, b_h, b_s)``
    """
    rng = np.random.default_rng(seed)
    w, h = int(rng.integers(2, 4)), int(rng.integers(1, 3))
    labels = {}
    for q in range(1, w * h):
        names = [x for x in ('a', 'b') if rng.random() < 0.4]
        if obstacles and rng.random() < 0.2:
            names.append('Obstacle')
        labels[q] = names
    d = build_grid_dts(w, h, 0, labels=labels, atoms=RANDOM_ATOMS)
    b_h = translate_to_nba(parse_ltl('[]!Obstacle'), RANDOM_ATOMS)
    b_s = translate_to_nba(parse_ltl(SOFT_FORMULAS[seed % len(SOFT_FORMULAS)]), RANDOM_ATOMS)
    return d, b_h, b_s


def random_formula(rng, depth, atoms=('a', 'b')):
    """ Random LtlAst of at most ``depth`` operator levels. """
    if depth == 0 or rng.random() < 0.25:
        return Atom(atoms[int(rng.integers(len(atoms)))])
    k = int(rng.integers(7))
    f = random_formula(rng, depth - 1, atoms)
    if k == 0:
        return Not(f)
    if k == 1:
        return Next(f)
    if k == 2:
        return Eventually(f)
    if k == 3:
        return Always(f)
    g = random_formula(rng, depth - 1, atoms)
    return [And, Or, Until][k - 4](f, g)


def random_lasso(rng, atoms=('a', 'b')):
    """ Random lasso word with a prefix of 0-3 and a cycle of 1-3 letters. """
    def letter():
        return frozenset(a for a in atoms if rng.random() < 0.5)
    return LassoWord([letter() for _ in range(int(rng.integers(0, 4)))],
                     [letter() for _ in range(int(rng.integers(1, 4)))])


TINY_SCENARIO = {
    'version': 1,
    'name': 'tiny',
    'grid': {'width': 4, 'height': 3, 'initial': [0, 0]},
    'atoms': ['A', 'B', 'Obstacle'],
    'labels': {'A': [[3, 0]], 'B': [[0, 2]]},
    'hard': '[]!Obstacle',
    'soft': '[]<>A && []<>B',
    'rewards': {'low': 5, 'high': 15, 'seed': 0},
    'obstacles': {'static': [[2, 1]], 'walkers': [{'start': [1, 1]}], 'seed': 1},
    'parameters': {'beta': 500, 'kappa': 100, 'horizon': 3, 'steps': 12, 'seed': 0},
}


def tiny_doc(**changes):
    """ Copy of the tiny scenario document with top-level fields replaced. """
    doc = {k: (dict(v) if isinstance(v, dict) else v) for k, v in TINY_SCENARIO.items()}
    doc.update(changes)
    return doc
