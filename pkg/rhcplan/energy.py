"""
Shortest distances over a relaxed product, the largest self-reachable accepting set F*
and the energy function J, the weighted distance to F*.

Distances only use edges with ``h = 0``; their weight is ``omega``. F* is computed on the
full unweighted graph, so it depends on the product topology only and survives label
updates unchanged.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .constants import INF
from .ltl import LassoWord
from .utilities import Answer, reachable_from, on_cycle, topology

logger = logging.getLogger(__name__)


def shortest_distance(p, src, dst):
    """
    Lowest total weight of a trajectory from ``src`` to ``dst`` through ``h = 0`` edges;
    0 when ``src == dst`` and ``inf`` when unreachable.
    """
    if src == dst:
        return 0.0
    d = dijkstra(p.finite_adjacency(), directed=True, indices=int(src))
    return float(d[int(dst)])


def compute_f_star(p):
    """
    Boolean mask of F*: accepting states from which a path of length at least one leads
    back into F*. Equivalently the accepting states with a successor that can reach an
    accepting state lying on a cycle.
    """
    adj = p.adjacency()
    acc = p.accepting
    targets = np.flatnonzero(acc & on_cycle(adj))
    back = reachable_from(adj.T.tocsr(), targets)
    # a successor in the backward closure
    has = np.zeros(p.n, dtype=bool)
    has[p.src[back[p.dst]]] = True
    f = acc & has
    logger.info(f'compute_f_star | {int(f.sum())} of {int(acc.sum())} accepting states')
    return f


class EnergyTable(object):
    """
    Energy of every product state: ``J[s]`` is the weighted distance to F*, 0 on F* and
    ``inf`` when F* cannot be reached through ``h = 0`` edges.
    """

    def __init__(self, J, f_star):
        self.J = np.asarray(J, dtype=float)
        self.f_star = np.asarray(f_star, dtype=bool)

    def __getitem__(self, s):
        return self.J[s]

    def __len__(self):
        return len(self.J)

    def __eq__(self, other):
        return isinstance(other, EnergyTable) and np.array_equal(self.J, other.J) \
            and np.array_equal(self.f_star, other.f_star)

    def __repr__(self):
        fin = np.isfinite(self.J)
        return f'EnergyTable(states={len(self.J)}, F*={int(self.f_star.sum())}, finite={int(fin.sum())})'

    @property
    def finite(self):
        return np.isfinite(self.J)

    def frame(self):
        return pd.DataFrame({'state': np.arange(len(self.J)), 'J': self.J, 'f_star': self.f_star})

    def export(self, path):
        """ Write ``state, J, f_star`` as csv. """
        self.frame().to_csv(Path(path), index=False)


def compute_energy(p, f):
    """
    Energy table from one multi-source Dijkstra over the reversed ``h = 0`` graph
    started at every member of F*.

    :param f: F* boolean mask from :func:`compute_f_star`
    """
    f = np.asarray(f, dtype=bool)
    members = np.flatnonzero(f)
    if len(members) == 0:
        return EnergyTable(np.full(p.n, INF), f)
    rev = p.finite_adjacency().T.tocsr()
    J = dijkstra(rev, directed=True, indices=members, min_only=True)
    J[members] = 0.0
    return EnergyTable(J, f)


def verify_decrease(p, f, table):
    """
    Check that every state with ``0 < J < inf`` has an ``h = 0`` successor of strictly
    lower energy, and that ``J = 0`` exactly on F*.

    :return: Answer with ``violators`` (array of state ids), ``mismatched`` (states where
        ``J = 0`` and membership in F* disagree), ``checked`` and ``ok``
    """
    J = table.J
    ok = p.h == 0
    best = np.full(p.n, INF)
    np.minimum.at(best, p.src[ok], J[p.dst[ok]])
    need = (J > 0) & np.isfinite(J)
    violators = np.flatnonzero(need & ~(best < J))
    mismatched = np.flatnonzero((J == 0) != np.asarray(f, dtype=bool))
    if len(violators):
        logger.warning(f'verify_decrease | {len(violators)} states without a decreasing successor')
    if len(mismatched):
        logger.warning(f'verify_decrease | {len(mismatched)} states where J = 0 disagrees with F*')
    return Answer(violators=violators, mismatched=mismatched, checked=int(need.sum()),
                  ok=len(violators) == 0 and len(mismatched) == 0)


def live_states(p, f):
    """
    States with an infinite ``h = 0`` continuation that visits F* infinitely often:
    those that can reach, through ``h = 0`` edges, an F* state lying on an ``h = 0``
    cycle.
    """
    ok = p.h == 0
    adj = topology(p.n, p.src[ok], p.dst[ok])
    targets = np.flatnonzero(np.asarray(f, dtype=bool) & on_cycle(adj))
    return reachable_from(adj.T.tocsr(), targets)


def _path(pred, src, dst):
    # walk a dijkstra predecessor row back from dst to src
    out = [dst]
    while out[-1] != src:
        out.append(int(pred[out[-1]]))
        if out[-1] < 0:
            raise ValueError(f'No path from {src} to {dst}')
    return out[::-1]


def min_violation_lasso(p, f, batch=32):
    """
    Cheapest accepting lasso from an initial state: minimises the weight of the prefix to
    an accepting state ``a`` plus the weight of the cheapest cycle through ``a``, over
    ``h = 0`` edges.

    :param f: F* mask; lasso states are drawn from it
    :param batch: accepting states per Dijkstra call
    :return: Answer with ``prefix`` and ``cycle`` (product state ids; the cycle starts at
        the accepting state), ``weight``, ``violation`` (sum of v along prefix and cycle),
        ``cells`` and ``word`` (LassoWord of known labels), or None if there is none
    """
    adj = p.finite_adjacency()
    fwd, pred0, sources = dijkstra(adj, directed=True, indices=p.initial, min_only=True,
                                   return_predecessors=True)
    cand = np.flatnonzero(np.asarray(f, dtype=bool) & np.isfinite(fwd))
    if len(cand) == 0:
        return None
    rev = adj.T.tocsr()
    ok = p.h == 0
    src, dst, w = p.src[ok], p.dst[ok], p.omega[ok]
    best = (INF, None, None)
    for i in range(0, len(cand), batch):
        chunk = cand[i:i + batch]
        # back[j, t]: distance t -> chunk[j]
        back, pred = dijkstra(rev, directed=True, indices=chunk, return_predecessors=True)
        for j, a in enumerate(chunk):
            out = src == a
            if not out.any():
                continue
            cyc = w[out] + back[j, dst[out]]
            k = int(np.argmin(cyc))
            total = fwd[a] + cyc[k]
            if total < best[0]:
                best = (total, a, (int(dst[out][k]), pred[j]))
    total, a, closing = best
    if a is None:
        return None
    a = int(a)
    prefix = _path(pred0, int(sources[a]), a)[:-1]
    t, pred = closing
    # predecessors on the reversed graph point one step closer to a
    cycle = [a, t]
    while cycle[-1] != a:
        cycle.append(int(pred[cycle[-1]]))
    cycle = cycle[:-1]
    states = prefix + cycle + [a]
    idx = [p.edge_index(x, y) for x, y in zip(states[:-1], states[1:])]
    cells = p.cell(np.array(prefix + cycle))
    letters = [p.d.label(c) for c in cells]
    word = LassoWord(letters[:len(prefix)], letters[len(prefix):])
    ans = Answer(prefix=prefix, cycle=cycle, weight=float(total), violation=int(p.v[idx].sum()),
                 cells=[int(c) for c in cells], word=word)
    logger.info(f'min_violation_lasso | weight {total:.1f}, prefix {len(prefix)}, cycle {len(cycle)}')
    return ans


def live_energy(p, f):
    """
    Energy restricted to the live states (see :func:`live_states`): distances to the
    live members of F* through ``h = 0`` edges that stay live. Finite exactly on the
    live states, so every state of positive finite value has a live successor of lower
    value and every zero has a live successor of finite value.

    :return: EnergyTable whose ``f_star`` is the live part of F*
    """
    f = np.asarray(f, dtype=bool)
    live = live_states(p, f)
    ok = (p.h == 0) & live[p.src] & live[p.dst]
    members = np.flatnonzero(f & live)
    if len(members) == 0:
        return EnergyTable(np.full(p.n, INF), f & live)
    rev = coo_matrix((p.omega[ok], (p.dst[ok], p.src[ok])), shape=(p.n, p.n)).tocsr()
    J = dijkstra(rev, directed=True, indices=members, min_only=True)
    J[members] = 0.0
    J[~live] = INF
    return EnergyTable(J, f & live)
