"""
Local sensing and the automaton update: compare true labels around the agent with the
agent's knowledge, patch the knowledge, re-annotate the affected product edges and
refresh the energy table. F* is never touched.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from .energy import compute_energy
from .transition_system import chebyshev_ball

logger = logging.getLogger(__name__)


@dataclass
class SenseReport:
    """
    Truth snapshot around the agent. ``sensed`` maps every cell in the ball to its true
    label mask; ``info`` maps the cells whose truth differs from the knowledge sensing
    was given to ``(known, true)`` masks.
    """
    k: int
    q: int
    radius: int
    sensed: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def empty(self):
        return len(self.info) == 0


@dataclass
class UpdateDelta:
    """ Outcome of :func:`apply_update`. """
    relabeled: list
    changed_edges: np.ndarray
    energy: object

    @property
    def empty(self):
        return len(self.relabeled) == 0 and len(self.changed_edges) == 0


def _diff(sensed, known):
    return {c: (int(known[c]), m) for c, m in sensed.items() if int(known[c]) != m}


def sense(env, q, radius, k, known=None):
    """
    Sense the true labels within Chebyshev distance ``radius`` of cell ``q`` at step
    ``k``. With ``known`` the report also carries the diff against it; the update
    diffs against the transition system's knowledge in any case.

    :param env: EnvironmentTruth
    :param known: Dts, or an array of known label masks
    """
    truth = env.true_labels(k)
    cells = chebyshev_ball(env.coords, q, radius)
    sensed = {int(c): int(truth[c]) for c in cells}
    info = {}
    if known is not None:
        info = _diff(sensed, known.known if hasattr(known, 'known') else np.asarray(known))
    return SenseReport(int(k), int(q), int(radius), sensed, info)


def apply_update(p, d, f, report, energy=None):
    """
    Patch the knowledge of ``d`` with the cells of ``report`` whose sensed labels differ
    from it, recompute the annotations of the product edges leaving the relabelled cells
    and refresh the energy table.

    :param p: RelaxedProduct built over ``d``
    :param f: F* mask, used as is
    :param energy: current EnergyTable, returned unchanged when there is nothing new
    """
    info = _diff(report.sensed, d.known)
    if not info:
        if energy is None:
            energy = compute_energy(p, f)
        return UpdateDelta([], np.zeros(0, dtype=np.int64), energy)
    relabeled = sorted(info)
    for c in relabeled:
        d.known[c] = info[c][1]
    changed = p.refresh(relabeled)
    if len(changed) == 0 and energy is not None:
        new = energy
    else:
        new = compute_energy(p, f)
    logger.log(20 if len(changed) else 10,
               f'apply_update | k={report.k} relabeled {len(relabeled)} cells, {len(changed)} annotations changed')
    return UpdateDelta(relabeled, changed, new)
