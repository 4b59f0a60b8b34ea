# mission figures

import matplotlib.pyplot as plt
from matplotlib import ticker
import matplotlib.patches as patches
import numpy as np
from .. constants import FIG_H, FIG_W, PLOT_FACE_COLOR
from .. utilities import knobble_fonts, nice_title

__all__ = ['render_mission', 'plot_energy', 'plot_reward']

# one colour per atom position, obstacles always black
LABEL_COLORS = ['C0', 'C1', 'C2', 'C4', 'C5', 'C6', 'C8', 'C9']


def render_mission(log):
    """
    Grid with the static labels, every cell an obstacle occupied during the mission
    (shaded by how often) and the executed trajectory.

    :param log: MissionLog
    :return: Figure
    """
    knobble_fonts()
    w, h = log.meta['width'], log.meta['height']
    scale = FIG_W / max(w, h)
    f, ax = plt.subplots(1, 1, figsize=(max(w * scale, FIG_H), max(h * scale, FIG_H) + 0.4),
                         constrained_layout=True)
    counts = np.zeros(w * h)
    for s in log.frame.obstacles:
        for c in str(s).split():
            counts[int(c)] += 1
    if counts.max() > 0:
        counts /= counts.max()
    for c in range(w * h):
        x, y = c % w, c // w
        if counts[c]:
            ax.add_patch(patches.Rectangle((x, y), 1, 1, fc='k', alpha=0.15 + 0.6 * counts[c], lw=0))
        m = log.meta['labels'][c]
        if m:
            names = sorted(log.atoms.labels(m))
            i = log.atoms.index[names[0]]
            ax.add_patch(patches.Rectangle((x, y), 1, 1, fc=LABEL_COLORS[i % len(LABEL_COLORS)], alpha=0.5, lw=0))
            ax.text(x + 0.5, y + 0.5, '\n'.join(names), ha='center', va='center', fontsize='xx-small')
    cells = log.frame.cell.to_numpy(dtype=int)
    xs, ys = cells % w + 0.5, cells // w + 0.5
    ax.plot(xs, ys, c='C3', lw=0.75, alpha=0.8)
    ax.plot(xs[:1], ys[:1], 'o', c='C3', ms=4)
    ax.plot(xs[-1:], ys[-1:], 's', c='C3', ms=4)
    ax.set(xlim=[0, w], ylim=[0, h], aspect='equal',
           title=nice_title(f'{log.meta["name"]} trajectory'))
    ax.xaxis.set_major_locator(ticker.MultipleLocator(1))
    ax.yaxis.set_major_locator(ticker.MultipleLocator(1))
    ax.tick_params(labelbottom=False, labelleft=False, length=0)
    ax.grid(lw=0.25, c='w')
    ax.set_facecolor(PLOT_FACE_COLOR)
    return f


def plot_energy(log):
    """ Energy of the executed state by step; soft violations marked, infinite values at the top. """
    knobble_fonts()
    f, ax = plt.subplots(1, 1, figsize=(FIG_W * 1.5, FIG_H), constrained_layout=True)
    J = log.energy_trace
    fin = np.isfinite(J)
    top = J[fin].max() * 1.1 + 1 if fin.any() else 1
    ax.step(J.index, J.where(fin, top), where='post', lw=1)
    ev = log.violation_events
    if len(ev):
        ax.plot(ev, J.where(fin, top).loc[ev], 'x', c='C3', ms=3, label='Soft violation')
        ax.legend(loc='upper right')
    ax.set(xlabel='Step', ylabel='Energy', title=nice_title(f'{log.meta["name"]} energy'), ylim=[0, top * 1.05])
    return f


def plot_reward(log):
    """ Cumulative collected reward by step. """
    knobble_fonts()
    f, ax = plt.subplots(1, 1, figsize=(FIG_W * 1.5, FIG_H), constrained_layout=True)
    cr = log.cumulative_reward
    ax.plot(cr.index, cr.to_numpy(), lw=1)
    ax.set(xlabel='Step', ylabel='Cumulative reward', title=nice_title(f'{log.meta["name"]} reward'))
    ax.yaxis.set_major_formatter(ticker.StrMethodFormatter('{x:,.0f}'))
    return f
