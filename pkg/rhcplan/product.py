"""
Strict and relaxed products of a transition system with a hard and a soft automaton.

Product state ``(q, s_h, s_s)`` has id ``(q * n_h + s_h) * n_s + s_s``. Edges are held
as flat numpy arrays sorted by ``(src, dst)``; each carries the ids of its transition
system, hard and soft component edges and the annotations

* ``h``: 0 when the known label of ``q`` enables the hard move, else ``inf``
* ``v``: Hamming distance from the known label of ``q`` to the nearest label enabling
  the soft move
* ``omega``: ``h + w(q, q') + beta * v``

Annotations depend on the label knowledge only through the source cell, so
:meth:`RelaxedProduct.refresh` recomputes them for the edges leaving relabelled cells.
"""

import logging
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.sparse import coo_matrix

from .automata import universal_nba
from .constants import BETA, INF
from .utilities import popcount, topology

logger = logging.getLogger(__name__)


def eval_labels(l, atoms):
    """
    Characteristic 0/1 vector of label set ``l`` in the order of ``atoms``.

    :param l: iterable of atom names
    :param atoms: AtomSet
    """
    m = atoms.mask(l)
    return np.array([m >> i & 1 for i in range(len(atoms))], dtype=np.int64)


def label_distance(l, ll, atoms=None):
    """
    Hamming distance between two label sets. With ``atoms`` both are checked against the
    universe.
    """
    if atoms is not None:
        return int(np.abs(eval_labels(l, atoms) - eval_labels(ll, atoms)).sum())
    return len(frozenset(l) ^ frozenset(ll))


def violation_cost(s, t, current_label, soft_nba):
    """
    Distance from ``current_label`` to the nearest label enabling ``s -> t`` in
    ``soft_nba``; 0 when the label enables the move.

    :param current_label: iterable of names or a mask
    """
    x = soft_nba.label_sets(s, t)
    if not x:
        raise ValueError(f'({s}, {t}) is not a transition of the soft automaton')
    m = current_label if isinstance(current_label, (int, np.integer)) else soft_nba.atoms.mask(current_label)
    return int(popcount(np.fromiter(x, dtype=np.int64) ^ int(m)).min())


class RelaxedProduct(object):
    """
    Product automaton of a Dts with hard and soft Nbas, see module docstring. Build with
    :func:`build_relaxed_product` or :func:`build_strict_product`.
    """

    def __init__(self, d, b_h, b_s, beta=BETA, strict=False):
        if beta <= 0:
            raise ValueError(f'beta must be positive, not {beta}')
        self.d = d
        self.b_h = b_h.with_atoms(d.atoms)
        self.b_s = b_s.with_atoms(d.atoms)
        self.beta = float(beta)
        self.strict = strict
        self.n_q, self.n_h, self.n_s = d.n, self.b_h.n_states, self.b_s.n_states
        self.n = self.n_q * self.n_h * self.n_s
        self.initial = np.array(sorted(self.state_id(d.initial, sh, ss)
                                       for sh in self.b_h.initial for ss in self.b_s.initial), dtype=np.int64)
        if len(self.initial) == 0:
            raise ValueError('Product has no initial state')
        acc_h = np.zeros(self.n_h, dtype=bool)
        acc_h[list(self.b_h.accepting)] = True
        acc_s = np.zeros(self.n_s, dtype=bool)
        acc_s[list(self.b_s.accepting)] = True
        self.accepting = np.tile(np.outer(acc_h, acc_s).ravel(), self.n_q)
        self.version = 0
        self._build_edges()
        self._annotate(np.arange(len(self.src)))
        if strict:
            self._restrict()

    def __repr__(self):
        return (f'RelaxedProduct(Q={self.n_q}, S_h={self.n_h}, S_s={self.n_s}, S_P={self.n}, '
                f'edges={len(self.src)}, beta={self.beta}{", strict" if self.strict else ""})')

    def state_id(self, q, sh, ss):
        return (int(q) * self.n_h + int(sh)) * self.n_s + int(ss)

    def decode(self, s):
        """ ``(q, s_h, s_s)`` of product state id ``s``. """
        s = int(s)
        return s // (self.n_h * self.n_s), (s // self.n_s) % self.n_h, s % self.n_s

    def cell(self, s):
        """ Transition system projection; works elementwise on arrays. """
        return np.asarray(s) // (self.n_h * self.n_s)

    def _build_edges(self):
        d, bh, bs = self.d, self.b_h, self.b_s
        ed, eh, es = len(d.src), len(bh.edges), len(bs.edges)
        # cartesian product of component edges
        i_d = np.repeat(np.arange(ed), eh * es)
        i_h = np.tile(np.repeat(np.arange(eh), es), ed)
        i_s = np.tile(np.arange(es), ed * eh)
        src = (d.src[i_d] * self.n_h + bh.edge_src[i_h]) * self.n_s + bs.edge_src[i_s]
        dst = (d.dst[i_d] * self.n_h + bh.edge_dst[i_h]) * self.n_s + bs.edge_dst[i_s]
        order = np.lexsort((dst, src))
        self._set_edges(src[order], dst[order], i_d[order], i_h[order], i_s[order])

    def _set_edges(self, src, dst, e_d, e_h, e_s):
        self.src, self.dst = src, dst
        self.e_d, self.e_h, self.e_s = e_d, e_h, e_s
        self.out_ptr = np.searchsorted(src, np.arange(self.n + 1))
        self._key = src * self.n + dst
        # edges of one source cell are contiguous
        self.edge_cell = self.cell(src)
        self.cell_ptr = np.searchsorted(self.edge_cell, np.arange(self.n_q + 1))
        self.h = np.zeros(len(src))
        self.v = np.zeros(len(src), dtype=np.int64)
        self.omega = np.zeros(len(src))

    def _annotate(self, edges):
        """ (Re)compute h, v and omega on the given edge indices. """
        if len(edges) == 0:
            return
        known = self.d.known
        cells = self.edge_cell[edges]
        masks, inv = np.unique(known[cells], return_inverse=True)
        h_tab = np.array([~self.b_h.enabled(int(m)) for m in masks]).reshape(len(masks), -1)
        v_tab = np.array([self.b_s.distance(int(m)) for m in masks]).reshape(len(masks), -1)
        self.h[edges] = np.where(h_tab[inv, self.e_h[edges]], INF, 0.0)
        self.v[edges] = v_tab[inv, self.e_s[edges]]
        self.omega[edges] = self.h[edges] + self.d.weight[self.e_d[edges]] + self.beta * self.v[edges]

    def _restrict(self):
        keep = (self.h == 0) & (self.v == 0)
        self._set_edges(self.src[keep], self.dst[keep], self.e_d[keep], self.e_h[keep], self.e_s[keep])
        self._annotate(np.arange(len(self.src)))

    def cell_edges(self, cells):
        """ Indices of the edges leaving the given cells. """
        cells = np.unique(np.asarray(cells, dtype=np.int64))
        if len(cells) == 0:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.arange(self.cell_ptr[c], self.cell_ptr[c + 1]) for c in cells])

    def refresh(self, cells):
        """
        Recompute the annotations of edges leaving ``cells`` from the current label
        knowledge of ``self.d``.

        :return: indices of edges whose h or v changed
        """
        if self.strict:
            raise ValueError('A strict product is built for fixed labels and cannot be refreshed')
        edges = self.cell_edges(cells)
        old_h, old_v = self.h[edges].copy(), self.v[edges].copy()
        self._annotate(edges)
        changed = edges[(self.h[edges] != old_h) | (self.v[edges] != old_v)]
        if len(changed):
            self.version += 1
        logger.debug(f'RelaxedProduct.refresh | {len(edges)} edges recomputed, {len(changed)} changed')
        return changed

    def edge_index(self, s, t):
        """ Index of edge ``s -> t``; KeyError if there is none. """
        k = int(s) * self.n + int(t)
        i = np.searchsorted(self._key, k)
        if i == len(self._key) or self._key[i] != k:
            raise KeyError(f'({s}, {t}) is not a product transition')
        return int(i)

    def edge_indices(self, src, dst):
        """ Vectorised :meth:`edge_index`; -1 where there is no edge. """
        k = np.asarray(src, dtype=np.int64) * self.n + np.asarray(dst, dtype=np.int64)
        if len(self._key) == 0:
            return np.full(k.shape, -1, dtype=np.int64)
        i = np.minimum(np.searchsorted(self._key, k), len(self._key) - 1)
        return np.where(self._key[i] == k, i, -1)

    def out_edges(self, states):
        """ Indices of all edges leaving ``states`` (array), grouped by state. """
        states = np.asarray(states, dtype=np.int64)
        starts = self.out_ptr[states]
        counts = self.out_ptr[states + 1] - starts
        total = int(counts.sum())
        if total == 0:
            return np.zeros(0, dtype=np.int64)
        offsets = np.repeat(starts - np.cumsum(counts) + counts, counts)
        return offsets + np.arange(total)

    def successors(self, s):
        return self.dst[self.out_ptr[s]:self.out_ptr[s + 1]]

    def adjacency(self):
        """ Unweighted adjacency of the full product graph. """
        return topology(self.n, self.src, self.dst)

    def finite_adjacency(self):
        """ Weighted adjacency (omega) restricted to edges with ``h = 0``. """
        ok = self.h == 0
        return coo_matrix((self.omega[ok], (self.src[ok], self.dst[ok])), shape=(self.n, self.n)).tocsr()

    def states_frame(self):
        """ DataFrame of product states: id, components and acceptance. """
        ids = np.arange(self.n)
        return pd.DataFrame({'state': ids, 'q': ids // (self.n_h * self.n_s),
                             's_h': (ids // self.n_s) % self.n_h, 's_s': ids % self.n_s,
                             'initial': np.isin(ids, self.initial), 'accepting': self.accepting})

    def edges_frame(self):
        """ DataFrame of product edges with annotations. """
        return pd.DataFrame({'src': self.src, 'dst': self.dst, 'h': self.h, 'v': self.v,
                             'omega': self.omega})

    def dump(self, path=None):
        """
        Tab-separated listing of states then edges. Returns the text, and writes it to
        ``path`` when given.
        """
        buf = StringIO()
        buf.write(f'# {self!r}\n# states\n')
        self.states_frame().to_csv(buf, sep='\t', index=False)
        buf.write('# edges\n')
        self.edges_frame().to_csv(buf, sep='\t', index=False)
        txt = buf.getvalue()
        if path is not None:
            Path(path).write_text(txt, encoding='utf-8')
        return txt

    def describe(self, f_star=None):
        """ One-row summary; ``f_star`` (boolean mask) adds the F* count. """
        ans = pd.DataFrame({'Q': [self.n_q], 'S_h': [self.n_h], 'S_s': [self.n_s], 'S_P': [self.n],
                            'edges': [len(self.src)], 'hard_violating': [int(np.isinf(self.h).sum())],
                            'soft_violating': [int((self.v > 0).sum())], 'F_P': [int(self.accepting.sum())]})
        if f_star is not None:
            ans['F_star'] = int(np.asarray(f_star).sum())
        return ans


def build_relaxed_product(d, b_h, b_s, beta=BETA):
    """
    Relaxed product: every pair of component moves is an edge; labels only enter through
    the ``h`` and ``v`` annotations.

    :param d: Dts
    :param b_h: hard Nba
    :param b_s: soft Nba
    :param beta: violation penalty, > 0
    """
    p = RelaxedProduct(d, b_h, b_s, beta)
    logger.info(f'build_relaxed_product | {p}')
    return p


def build_strict_product(d, b_h, b_s=None, beta=BETA):
    """
    Classic product: edges only where the current labels enable both automaton moves, so
    ``h = 0`` and ``v = 0`` throughout. With ``b_s`` omitted the soft side is universal.
    """
    if b_s is None:
        b_s = universal_nba(d.atoms)
    p = RelaxedProduct(d, b_h, b_s, beta, strict=True)
    logger.info(f'build_strict_product | {p}')
    return p


def trajectory_weight(p, traj):
    """
    Total omega along consecutive pairs of ``traj``; ``inf`` through any ``h = inf``
    edge, 0 for a single state.

    :param traj: sequence of product state ids
    """
    traj = list(traj)
    if len(traj) < 2:
        return 0.0
    idx = [p.edge_index(a, b) for a, b in zip(traj[:-1], traj[1:])]
    return float(np.sum(p.omega[idx]))
