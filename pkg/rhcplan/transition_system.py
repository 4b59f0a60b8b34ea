"""
Weighted finite transition systems for the agent's motion: cells with planar
coordinates, transitions (a transition is the action), the agent's label knowledge and
the environment's true labels and rewards.
"""

import logging

import numpy as np
import pandas as pd

from .constants import SELF_LOOP_WEIGHT, OBSTACLE
from .ltl import AtomSet

logger = logging.getLogger(__name__)


def chebyshev_ball(coords, q, radius):
    """
    Cells within Chebyshev distance ``radius`` of cell ``q``, in increasing id order.

    :param coords: (n, 2) array of cell coordinates
    """
    if radius < 0:
        raise ValueError(f'Sensing radius must be >= 0, not {radius}')
    d = np.abs(coords - coords[q]).max(axis=1)
    return np.flatnonzero(d <= radius)


class Dts(object):
    """
    Weighted deterministic transition system. Cells are ``0..n-1``; ``known`` holds the
    agent's current belief of each cell's label as a bitmask over ``atoms``.

    :param coords: (n, 2) planar coordinates of the cells
    :param edges: iterable of ``(q, q')`` transitions
    :param initial: initial cell
    :param atoms: AtomSet
    :param labels: initial knowledge, array of masks or dict cell -> iterable of names
    :param weights: optional dict ``(q, q') -> weight``; default Euclidean distance with
        self-loops weighing ``SELF_LOOP_WEIGHT``
    :param width: grid width when the cells form a grid, used for display
    """

    def __init__(self, coords, edges, initial, atoms, labels=None, weights=None, width=None):
        self.coords = np.asarray(coords, dtype=float).reshape(-1, 2)
        self.n = len(self.coords)
        self.atoms = atoms if isinstance(atoms, AtomSet) else AtomSet(atoms)
        self.width = width
        self.height = None if width is None else self.n // width
        if not 0 <= initial < self.n:
            raise ValueError(f'Initial cell {initial} out of range 0..{self.n - 1}')
        self.initial = int(initial)
        edges = sorted({(int(a), int(b)) for a, b in edges})
        for a, b in edges:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f'Transition ({a}, {b}) refers to a cell out of range')
        self.src = np.array([e[0] for e in edges], dtype=np.int64)
        self.dst = np.array([e[1] for e in edges], dtype=np.int64)
        if weights is None:
            w = np.hypot(*(self.coords[self.dst] - self.coords[self.src]).T) if edges else np.zeros(0)
            w[self.src == self.dst] = SELF_LOOP_WEIGHT
        else:
            w = np.array([weights[e] for e in edges], dtype=float)
        if np.any(w <= 0):
            bad = [edges[i] for i in np.flatnonzero(w <= 0)]
            raise ValueError(f'Transition weights must be positive, not on {bad[:5]}')
        self.weight = w
        self._index = {e: i for i, e in enumerate(edges)}
        self.known = np.zeros(self.n, dtype=np.int64)
        if labels is not None:
            self.set_labels(labels)

    def __repr__(self):
        return f'Dts(cells={self.n}, transitions={len(self.src)}, initial={self.initial}, atoms={list(self.atoms)})'

    def set_labels(self, labels):
        """ Replace the label knowledge; masks array or dict cell -> names. """
        if isinstance(labels, dict):
            known = np.zeros(self.n, dtype=np.int64)
            for q, names in labels.items():
                known[int(q)] = self.atoms.mask(names)
        else:
            known = np.asarray(labels, dtype=np.int64).copy()
            if known.shape != (self.n,):
                raise ValueError(f'Label array must have shape ({self.n},)')
        self.known = known

    def label(self, q):
        """ Known label of cell ``q`` as a frozenset of names. """
        return self.atoms.labels(int(self.known[q]))

    def transition_index(self, q, qq):
        try:
            return self._index[(int(q), int(qq))]
        except KeyError:
            raise KeyError(f'({q}, {qq}) is not a transition')

    def transition_weight(self, q, qq):
        """ Weight of transition ``q -> qq``; KeyError for a non-transition. """
        return float(self.weight[self.transition_index(q, qq)])

    def successors(self, q):
        return self.dst[self.src == q]

    def cell(self, x, y):
        """ Cell id of grid coordinates. """
        if self.width is None:
            raise ValueError('Not a grid')
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise ValueError(f'Cell ({x}, {y}) outside the {self.width}x{self.height} grid')
        return int(y * self.width + x)

    def xy(self, q):
        x, y = self.coords[q]
        return int(x), int(y)

    def ball(self, q, radius):
        return chebyshev_ball(self.coords, q, radius)

    def label_frame(self):
        """ DataFrame of cells with coordinates and known labels. """
        return pd.DataFrame({'cell': np.arange(self.n), 'x': self.coords[:, 0].astype(int),
                             'y': self.coords[:, 1].astype(int),
                             'label': [self.atoms.format(int(m)) for m in self.known]})


def transition_weight(d, q, qq):
    """ Euclidean weight of ``q -> qq`` in ``d``. """
    return d.transition_weight(q, qq)


def build_grid_dts(width, height, initial, labels=None, atoms=None):
    """
    Grid world: one cell per unit square, 4-neighbour moves plus a self-loop on every
    cell. Cell ``(x, y)`` has id ``y * width + x``.

    :param width: number of columns, >= 1
    :param height: number of rows, >= 1
    :param initial: initial cell, ``(x, y)`` or cell id
    :param labels: dict cell -> names, where cell is ``(x, y)`` or an id, or a masks array
    :param atoms: AtomSet or names
    """
    if width < 1 or height < 1:
        raise ValueError(f'Grid dimensions must be >= 1, not {width}x{height}')
    atoms = AtomSet(atoms if atoms is not None else ()) if not isinstance(atoms, AtomSet) else atoms
    xs, ys = np.meshgrid(np.arange(width), np.arange(height))
    coords = np.column_stack([xs.ravel(), ys.ravel()])
    n = width * height
    edges = [(q, q) for q in range(n)]
    for q in range(n):
        x, y = q % width, q // width
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            if 0 <= x + dx < width and 0 <= y + dy < height:
                edges.append((q, (y + dy) * width + x + dx))
    if isinstance(initial, (tuple, list)):
        x, y = initial
        if not (0 <= x < width and 0 <= y < height):
            raise ValueError(f'Initial cell {tuple(initial)} outside the {width}x{height} grid')
        initial = y * width + x
    elif not 0 <= initial < n:
        raise ValueError(f'Initial cell {initial} out of range 0..{n - 1}')
    if isinstance(labels, dict):
        labels = {(c[1] * width + c[0] if isinstance(c, (tuple, list)) else c): v for c, v in labels.items()}
    d = Dts(coords, edges, initial, atoms, labels, width=width)
    logger.debug(f'build_grid_dts | {d}')
    return d


class EnvironmentTruth(object):
    """
    The world as it is at each step: true labels, obstacle cells and rewards. The state
    at step ``k`` is recorded when :meth:`record` is called by the environment driver, so
    past steps can be queried.

    :param coords: (n, 2) cell coordinates
    :param atoms: AtomSet
    :param static: masks of the static label placements (no obstacles)
    """

    def __init__(self, coords, atoms, static):
        self.coords = np.asarray(coords, dtype=float)
        self.atoms = atoms
        self.static = np.asarray(static, dtype=np.int64).copy()
        self.n = len(self.static)
        self.obstacle_bit = 1 << atoms.index[OBSTACLE] if OBSTACLE in atoms else 0
        self.k = -1
        self._labels = {}
        self._rewards = {}
        self._obstacles = {}

    def record(self, k, obstacles, rewards, removed):
        """
        Set the truth at step ``k``.

        :param obstacles: sorted array of obstacle cells
        :param rewards: array of per-cell rewards
        :param removed: array of per-cell masks of atoms switched off at step k
        """
        obstacles = np.asarray(sorted(obstacles), dtype=np.int64)
        labels = self.static & ~np.asarray(removed, dtype=np.int64)
        if len(obstacles) and not self.obstacle_bit:
            raise ValueError(f'Obstacles given but {OBSTACLE} is not an atom')
        labels[obstacles] |= self.obstacle_bit
        self._labels[k] = labels
        self._rewards[k] = np.asarray(rewards, dtype=float).copy()
        self._obstacles[k] = obstacles
        self.k = k

    def _check(self, k):
        k = self.k if k is None else k
        if k not in self._labels:
            raise KeyError(f'Environment has no record of step {k}, current step is {self.k}')
        return k

    def true_labels(self, k=None):
        """ Label masks of every cell at step ``k`` (default current). """
        return self._labels[self._check(k)]

    def obstacle_set(self, k=None):
        return self._obstacles[self._check(k)]

    def rewards(self, k=None):
        return self._rewards[self._check(k)]


def observe_rewards(env, q, radius, k):
    """
    Rewards of the cells within Chebyshev distance ``radius`` of ``q`` at step ``k``.

    :return: dict cell -> reward
    """
    cells = chebyshev_ball(env.coords, q, radius)
    r = env.rewards(k)
    return {int(c): float(r[c]) for c in cells}


class RewardTrace(object):
    """ Rewards collected step by step. """

    def __init__(self):
        self.values = []
        self.cumulative = 0.0

    def __len__(self):
        return len(self.values)

    def add(self, value):
        self.values.append(float(value))
        self.cumulative += float(value)
        return self.cumulative

    def series(self):
        """ Cumulative reward by step as a Series. """
        return pd.Series(np.cumsum(self.values), name='cumulative_reward', dtype=float)
