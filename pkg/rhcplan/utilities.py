import logging
import os
from pathlib import Path

import matplotlib as mpl
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import psutil
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from titlecase import titlecase

from .constants import *

logger = logging.getLogger(__name__)

# number of set bits for every 16 bit label mask
POPCOUNT = np.array([bin(i).count('1') for i in range(1 << MAX_ATOMS)], dtype=np.int16)


class Answer(dict):
    def __init__(self, **kwargs):
        """
        Generic answer wrapping class, a dict with attribute access.

        :param kwargs: key=value to wrap
        """
        super().__init__(kwargs)

    def __getattr__(self, item):
        try:
            return self[item]
        except KeyError:
            raise AttributeError(item)

    def __repr__(self):
        return str(self)

    def __str__(self):
        return '\n'.join([f'{k:<20s}\t{self.nice(v)}' for k, v in self.items()])

    @staticmethod
    def nice(x):
        """ return a nice rep of x """
        if type(x) in [str, float, int, bool]:
            return x
        elif isinstance(x, (list, tuple, set, frozenset)) and len(x) <= 8:
            return x
        else:
            return type(x)


def popcount(x):
    """ Bit counts of an integer array of label masks. """
    return POPCOUNT[np.asarray(x, dtype=np.int64)]


def rhcplan_dir(*parts):
    """
    Per-user working directory ``~/rhcplan/...``, created on demand.
    """
    p = Path.home() / 'rhcplan'
    for part in parts:
        p = p / part
    p.mkdir(parents=True, exist_ok=True)
    return p


def process_memory():
    """ Resident memory of this process in GB, logged at INFO. """
    process = psutil.Process(os.getpid())
    m = process.memory_info().rss / (1 << 30)
    logger.info(f'Memory usage = {m:.3f}GB')
    return m


def available_memory():
    """ Free memory in bytes. """
    return psutil.virtual_memory().available


def nice_title(txt):
    """ Title case a snake or kebab case name for plots and reports. """
    return titlecase(str(txt).replace('_', ' ').replace('-', ' '))


def cells_frame(cells, width):
    """
    DataFrame with cell id, x and y for a sequence of cell ids on a grid of given width.
    """
    cells = np.asarray(cells, dtype=int)
    return pd.DataFrame({'cell': cells, 'x': cells % width, 'y': cells // width})


def logger_level(level=30, name='rhcplan', verbose=False):
    """
    Change logger level all loggers containing name.
    Changing for EVERY logger is a really bad idea,
    you get the endless debug info out of matplotlib
    find_font, for example.

    :param level: logging level, 10 debug, 20 info, WL=25 progress, 30 warning
    :param name: substring of logger names to change
    :param verbose: print the resulting levels
    """
    logging.basicConfig(format='line %(lineno)4d|%(levelname)-10s| %(name)s.%(funcName)s|  %(message)-s',
                        datefmt='%M:%S')
    loggers = [logging.getLogger()]
    loggers = loggers + [logging.getLogger(name) for name in logging.root.manager.loggerDict]
    for lg in loggers:
        if lg.name.find(name) >= 0:
            lg.setLevel(level)
    # the package logger may not exist yet when called from __init__
    logging.getLogger(name).setLevel(level)
    if verbose:
        for lg in loggers:
            print(lg.name, lg.getEffectiveLevel())


def knobble_fonts():
    """
    Smaller base fonts and the house plot colours.
    """
    plt.rcParams['font.size'] = FONT_SIZE
    plt.rcParams['legend.fontsize'] = LEGEND_FONT
    plt.rcParams['axes.facecolor'] = PLOT_FACE_COLOR
    plt.rc('legend', fc=PLOT_FACE_COLOR, ec=PLOT_FACE_COLOR)
    plt.rcParams['figure.facecolor'] = FIGURE_BG_COLOR
    mpl.rcParams['font.family'] = 'sans-serif'
    mpl.rcParams['svg.hashsalt'] = 'rhcplan'
    pd.options.display.width = 120


def topology(n, src, dst):
    """
    Unweighted csr adjacency matrix (entries 1) for ``n`` nodes and edge arrays.
    """
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    return coo_matrix((np.ones(len(src), dtype=np.int32), (src, dst)), shape=(n, n)).tocsr()


def reachable_from(adj, sources):
    """
    Boolean mask of nodes reachable (in zero or more steps) from any source.

    :param adj: csr adjacency matrix
    :param sources: node indices
    """
    sources = np.unique(np.asarray(sources, dtype=np.int64))
    n = adj.shape[0]
    if len(sources) == 0 or n == 0:
        return np.zeros(n, dtype=bool)
    d = dijkstra(adj, directed=True, indices=sources, unweighted=True, min_only=True)
    return np.isfinite(d)


def on_cycle(adj):
    """
    Boolean mask of nodes lying on a cycle of length at least one: members of a strongly
    connected component with more than one node, or nodes with a self-loop.
    """
    n = adj.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    _, comp = connected_components(adj, directed=True, connection='strong')
    size = np.bincount(comp)
    return (size[comp] > 1) | (adj.diagonal() != 0)
