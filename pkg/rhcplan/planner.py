"""
Receding horizon planning over a relaxed product.

At each step the planner picks a length ``N`` trajectory from the current product state
that maximises

    U = -h(s_k, s_1) + R(s_1 ... s_N) * min(exp(-kappa * beta * v(s_k, s_1)), 1)

where ``R`` sums the observed rewards of the projected cells, subject to an energy
constraint that depends on the previous prediction:

1. ``G(s_k) > 0`` and no state of the previous prediction has zero energy: the terminal
   energy must drop below the previous terminal energy.
2. ``G(s_k) > 0`` and the previous prediction reaches zero energy first at index ``i0``:
   the new prediction must have zero energy at index ``i0 - 1``.
3. ``G(s_k) = 0``: the terminal energy must be finite.

``G`` is the live energy (:func:`rhcplan.energy.live_energy`), the energy function
restricted to states with an ``h = 0`` continuation visiting F* infinitely often. It
agrees with J on F*; a finite terminal value makes the whole trajectory hard admissible.
Every candidate also has ``h = 0`` on all of its transitions. When a label update makes
the active case unsatisfiable the planner relaxes in tiers: tier 1 only asks for a finite
terminal value, tier 2 only for ``h = 0`` transitions and a terminal state with some
``h = 0`` exit.

The horizon problem is solved exactly by a layered dynamic program. With ``kappa > 0``
candidates are ranked first by the number of soft violations along the whole
prediction, then by larger utility. Remaining ties go to the smaller terminal energy,
then the smaller accumulated weight, then the lexicographically smaller state sequence;
``exhaustive=True`` enumerates every walk instead.
"""

from dataclasses import dataclass
import logging
import math
import time

import numpy as np

from .constants import HORIZON, KAPPA, WL
from .energy import compute_energy, compute_f_star, live_energy
from .sensing import sense, apply_update
from .transition_system import observe_rewards

logger = logging.getLogger(__name__)


class NoFeasibleStart(RuntimeError):
    """ Every initial product state has infinite energy: there is no accepting run. """


class EmptyCandidates(RuntimeError):
    """ No trajectory passes even the weakest admissibility tier. """


@dataclass
class PredictedTrajectory:
    """
    Predicted states ``s_1 .. s_N``. ``i0`` is the 1-based index of the first
    zero-energy state, ``reward`` the summed reward, ``omega`` the accumulated weight
    including the transition into ``s_1``. ``source`` is the state the prediction leaves.
    """
    states: tuple
    utility: float = None
    terminal_energy: float = None
    i0: int = None
    reward: float = None
    omega: float = None
    tier: int = 0
    case: int = 0
    source: int = None

    def __len__(self):
        return len(self.states)

    @property
    def first(self):
        return self.states[0]

    @property
    def terminal(self):
        return self.states[-1]


@dataclass
class PlannerState:
    """ Planner memory between steps. """
    current: int
    prediction: PredictedTrajectory
    horizon: int = HORIZON
    kappa: float = KAPPA
    k: int = 0

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f'Horizon must be >= 1, not {self.horizon}')
        if self.kappa < 0:
            raise ValueError(f'kappa must be >= 0, not {self.kappa}')

    def advance(self, traj):
        """ Apply the first element of ``traj``. """
        self.current = int(traj.first)
        self.prediction = traj
        self.k += 1
        return self.current


def enumerate_paths(p, src, N):
    """
    Every length ``N`` walk from ``src`` through the product, depth first in increasing
    successor order. ``src`` itself is not part of the yielded states.
    """
    if N < 1:
        raise ValueError(f'Horizon must be >= 1, not {N}')
    stack = [(int(src), ())]
    while stack:
        s, path = stack.pop()
        if len(path) == N:
            yield PredictedTrajectory(states=path)
            continue
        for t in p.successors(s)[::-1]:
            stack.append((int(t), path + (int(t),)))


def discount(v, kappa, beta):
    """ ``min(exp(-kappa * beta * v), 1)``; underflows to 0 for large arguments. """
    return min(math.exp(-kappa * beta * float(v)), 1.0)


def reward_array(p, rewards):
    """ Per-cell reward array from an observed ``cell -> reward`` map; unobserved cells 0. """
    r = np.zeros(p.n_q)
    for c, x in rewards.items():
        r[int(c)] = x
    return r


def _fold(x):
    # sum from the back, as the dynamic program accumulates
    acc = 0.0
    for y in reversed(list(x)):
        acc = y + acc
    return acc


def utility(p, current, traj, rewards, kappa):
    """
    Utility of ``traj`` from ``current``; ``-inf`` when the first transition violates
    the hard constraint.

    :param traj: PredictedTrajectory or sequence of product state ids
    :param rewards: observed ``cell -> reward`` map
    """
    states = traj.states if isinstance(traj, PredictedTrajectory) else tuple(traj)
    e = p.edge_index(current, states[0])
    r = reward_array(p, rewards)
    S = _fold(r[p.cell(np.array(states))])
    return -p.h[e] + S * discount(p.v[e], kappa, p.beta)


@dataclass
class Constraint:
    """
    Candidate filter: ``terminal`` masks allowed terminal states, ``layers`` maps a
    1-based trajectory index to a mask of allowed states there.
    """
    tier: int
    case: int
    terminal: np.ndarray
    layers: dict


def _exits(p):
    ok = np.zeros(p.n, dtype=bool)
    ok[p.src[p.h == 0]] = True
    return ok


def constraint(state, p, guide, tier=0):
    """
    The constraint active at ``tier`` for the step after ``state``.

    :param guide: live energy table
    """
    G = guide.J
    live = np.isfinite(G)
    if tier == 2:
        return Constraint(2, 0, _exits(p), {})
    if tier == 1:
        return Constraint(1, 0, live, {})
    c = state.current
    prev = state.prediction.states
    if G[c] == 0:
        return Constraint(0, 3, live, {})
    zero = [i for i, s in enumerate(prev, 1) if G[s] == 0]
    if zero:
        i0 = zero[0]
        if i0 == 1:
            return Constraint(0, 3, live, {})
        return Constraint(0, 2, live, {i0 - 1: G == 0})
    return Constraint(0, 1, live & (G < G[prev[-1]]), {})


def is_candidate(p, current, states, con):
    """ True if ``states`` from ``current`` has ``h = 0`` transitions and meets ``con``. """
    seq = np.array((current,) + tuple(states), dtype=np.int64)
    idx = p.edge_indices(seq[:-1], seq[1:])
    if np.any(idx < 0) or np.any(p.h[idx] != 0):
        return False
    if not con.terminal[seq[-1]]:
        return False
    return all(mask[seq[i]] for i, mask in con.layers.items())


def _violation_weight(kappa):
    # any positive kappa ranks fewer predicted soft violations first
    return 1.0 if kappa > 0 else 0.0


def _layers(p, start, depth):
    layers = [np.unique(np.asarray(start, dtype=np.int64))]
    for _ in range(depth):
        e = p.out_edges(layers[-1])
        e = e[p.h[e] == 0]
        layers.append(np.unique(p.dst[e]))
    return layers


def _solve(p, layers, r, G, con, agnostic, vw=0.0):
    """
    Backward pass. Returns one table per layer: (states, reward, terminal energy,
    weight, violations, next state), keeping for each state its best feasible suffix.
    """
    depth = len(layers)
    last = layers[-1]
    keep = con.terminal[last]
    if depth in con.layers:
        keep &= con.layers[depth][last]
    st = last[keep]
    n = len(st)
    tab = [None] * depth
    tab[-1] = (st, r[p.cell(st)], G[st], np.zeros(n), np.zeros(n), np.full(n, -1, dtype=np.int64))
    for i in range(depth - 2, -1, -1):
        nst, nS, nG, nOm, nV, _ = tab[i + 1]
        L = layers[i]
        if i + 1 in con.layers:
            L = L[con.layers[i + 1][L]]
        e = p.out_edges(L)
        e = e[p.h[e] == 0]
        if len(nst) == 0 or len(e) == 0:
            empty = np.zeros(0, dtype=np.int64)
            tab[i] = (empty, np.zeros(0), np.zeros(0), np.zeros(0), np.zeros(0), empty)
            continue
        t = p.dst[e]
        pos = np.minimum(np.searchsorted(nst, t), len(nst) - 1)
        valid = nst[pos] == t
        e, t, pos = e[valid], t[valid], pos[valid]
        s = p.src[e]
        S = r[p.cell(s)] + nS[pos]
        GN = nG[pos]
        Om = p.omega[e] + nOm[pos]
        V = vw * p.v[e] + nV[pos]
        keys = (t, Om, GN, V, s) if agnostic else (t, Om, GN, -S, V, s)
        order = np.lexsort(keys)
        _, first = np.unique(s[order], return_index=True)
        pick = order[first]
        tab[i] = (s[pick], S[pick], GN[pick], Om[pick], V[pick], t[pick])
    return tab


def _walk(tab, first):
    path = [int(first)]
    for i in range(len(tab) - 1):
        j = np.searchsorted(tab[i][0], path[-1])
        path.append(int(tab[i][-1][j]))
    return tuple(path)


def _lookup(tab, s):
    st = tab[0][0]
    if len(st) == 0:
        return np.zeros(len(s), dtype=bool), np.zeros(len(s), dtype=np.int64)
    pos = np.minimum(np.searchsorted(st, s), len(st) - 1)
    return st[pos] == s, pos


def _step_dp(p, sources, N, r, G, con, kappa, agnostic=False):
    vw = _violation_weight(kappa)
    e1 = p.out_edges(np.atleast_1d(np.asarray(sources, dtype=np.int64)))
    e1 = e1[p.h[e1] == 0]
    if len(e1) == 0:
        return None
    s1 = p.dst[e1]
    layers = _layers(p, s1, N - 1)
    tab = _solve(p, layers, r, G, con, agnostic, vw)
    ok, pos = _lookup(tab, s1)
    if not ok.any():
        return None
    e1, s1, pos = e1[ok], s1[ok], pos[ok]
    c1 = np.array([discount(v, kappa, p.beta) for v in p.v[e1]])
    zero = (c1 == 0) | agnostic
    cols = [tab[0][j][pos] for j in (1, 2, 3, 4)]
    agn = tab if agnostic else None
    if zero.any() and not agnostic:
        # utility is 0 whatever the reward: order by violations, energy and weight only
        agn = _solve(p, layers, r, G, con, True, vw)
        _, apos = _lookup(agn, s1)
        cols = [np.where(zero, agn[0][j][apos], c) for j, c in zip((1, 2, 3, 4), cols)]
    S, GN, Om, V = cols
    U = -p.h[e1] + c1 * S
    Om = p.omega[e1] + Om
    V = vw * p.v[e1] + V
    src = p.src[e1]
    keys = (s1, src, Om, GN, V) if agnostic else (s1, src, Om, GN, -U, V)
    j = np.lexsort(keys)[0]
    states = _walk(agn if zero[j] else tab, s1[j])
    return PredictedTrajectory(states, utility=float(U[j]), terminal_energy=float(GN[j]),
                               reward=float(S[j]), omega=float(Om[j]), source=int(src[j]))


def _oracle(p, sources, N, r, G, con, kappa):
    vw = _violation_weight(kappa)
    best, best_key = None, None
    for c in sources:
        c = int(c)
        for traj in enumerate_paths(p, c, N):
            states = traj.states
            if not is_candidate(p, c, states, con):
                continue
            seq = (c,) + states
            idx = np.array([p.edge_index(a, b) for a, b in zip(seq[:-1], seq[1:])], dtype=np.int64)
            S = _fold(r[p.cell(np.array(states))])
            U = -p.h[idx[0]] + S * discount(p.v[idx[0]], kappa, p.beta)
            Om = p.omega[idx[0]] + _fold(p.omega[idx[1:]])
            V = vw * p.v[idx[0]] + _fold(vw * p.v[idx[1:]])
            key = (V, -U, G[states[-1]], Om, seq)
            if best_key is None or key < best_key:
                best_key = key
                best = PredictedTrajectory(states, utility=float(U), terminal_energy=float(G[states[-1]]),
                                           reward=float(S), omega=float(Om), source=c)
    return best


def _finish(traj, G, con):
    zero = [i for i, s in enumerate(traj.states, 1) if G[s] == 0]
    traj.i0 = zero[0] if zero else None
    traj.tier = con.tier
    traj.case = con.case
    return traj


def plan_initial(p, energy, rewards, N=HORIZON, kappa=KAPPA, guide=None, exhaustive=False):
    """
    Choose the start: the best length ``N`` trajectory leaving an initial product state
    of finite energy. Its first element is the first state applied; the initial state
    it leaves is ``trajectory.source``.

    :param energy: EnergyTable
    :param rewards: observed ``cell -> reward`` map
    :param guide: live energy table, computed from ``energy.f_star`` if omitted
    :return: ``(s_1, trajectory)``
    """
    if N < 1:
        raise ValueError(f'Horizon must be >= 1, not {N}')
    starts = p.initial[np.isfinite(energy.J[p.initial])]
    if len(starts) == 0:
        raise NoFeasibleStart('There is no accepting run: every initial product state has infinite energy')
    guide = live_energy(p, energy.f_star) if guide is None else guide
    G = guide.J
    r = reward_array(p, rewards)
    for tier in (0, 2):
        con = Constraint(tier, 0, np.isfinite(G) if tier == 0 else _exits(p), {})
        if exhaustive:
            best = _oracle(p, starts, N, r, G, con, kappa)
        else:
            best = _step_dp(p, starts, N, r, G, con, kappa)
        if best is not None:
            _finish(best, G, con)
            logger.info(f'plan_initial | start {best.source} -> {best.first}, utility {best.utility:.2f}, '
                        f'terminal energy {best.terminal_energy:.1f}')
            return best.first, best
        logger.log(WL, 'plan_initial | no start with a live terminal state, relaxing')
    raise NoFeasibleStart('No initial trajectory with hard admissible transitions')


def plan_step(state, p, energy, rewards, guide=None, exhaustive=False):
    """
    One receding horizon step from ``state.current``. Does not modify ``state``; call
    ``state.advance(trajectory)`` to apply the first element.

    :param energy: EnergyTable after this step's update
    :param rewards: observed ``cell -> reward`` map
    :param guide: live energy table, computed from ``energy.f_star`` if omitted
    :param exhaustive: enumerate every walk instead of the dynamic program
    :return: ``(s_k, trajectory)``
    """
    guide = live_energy(p, energy.f_star) if guide is None else guide
    G = guide.J
    r = reward_array(p, rewards)
    for tier in (0, 1, 2):
        con = constraint(state, p, guide, tier)
        if exhaustive:
            traj = _oracle(p, [state.current], state.horizon, r, G, con, state.kappa)
        else:
            traj = _step_dp(p, [state.current], state.horizon, r, G, con, state.kappa)
        if traj is not None:
            _finish(traj, G, con)
            logger.debug(f'plan_step | k={state.k + 1} case {con.case} tier {tier} -> {traj.states}')
            return traj.first, traj
        logger.log(WL, f'plan_step | k={state.k + 1} tier {tier} infeasible (case {con.case}), relaxing')
    raise EmptyCandidates(f'No admissible trajectory from product state {state.current} at step {state.k + 1}')


def fallback_path(state, p, energy, guide=None, tier=0):
    """
    Constructive candidate for ``tier``: the previous prediction shifted by one with a
    lowest-energy successor appended that meets the constraint. When label updates broke
    the shifted prediction, the lowest-energy feasible walk from the current state.

    :return: PredictedTrajectory, or None if the tier has no candidate
    """
    guide = live_energy(p, energy.f_star) if guide is None else guide
    G = guide.J
    con = constraint(state, p, guide, tier)
    c, N = state.current, state.horizon
    prev = tuple(state.prediction.states)
    base = prev[1:] if prev and prev[0] == c else None
    if base is not None and len(base) == N - 1:
        s = base[-1] if base else c
        lo, hi = p.out_ptr[s], p.out_ptr[s + 1]
        succ = p.dst[lo:hi][(p.h[lo:hi] == 0) & con.terminal[p.dst[lo:hi]]]
        if len(succ):
            t = int(succ[np.lexsort((succ, G[succ]))[0]])
            if is_candidate(p, c, base + (t,), con):
                return _finish(PredictedTrajectory(base + (t,), source=c), G, con)
    traj = _step_dp(p, [c], N, np.zeros(p.n_q), G, con, state.kappa, agnostic=True)
    return None if traj is None else _finish(traj, G, con)


def run_mission(scenario, steps=None, audit=False, exhaustive=False):
    """
    Run a mission: build the product, F* and the energy, then plan the start on the
    initial observation and apply its first predicted transition. Every later step
    evolves the environment, senses and updates, observes rewards, plans and applies the
    first predicted transition. Row ``k`` of the log is the state entered by the plan made
    on the environment at step ``k - 1``; row 0 is the initial product state.

    :param scenario: Scenario
    :param steps: number of steps, default the scenario's
    :param audit: also record per step whether the fallback construction is a candidate
        at the tier used and whether F* recomputed from scratch equals the offline one
    :param exhaustive: plan by enumeration (small scenarios only)
    :return: MissionLog
    """
    from .product import build_relaxed_product
    from .simulation import MissionLog, step_environment

    prm = scenario.parameters
    K = prm.steps if steps is None else int(steps)
    world = scenario.world()
    d, env = world.d, world.env
    q = d.initial
    step_environment(world, 0, q)
    p = build_relaxed_product(d, world.b_h, world.b_s, prm.beta)
    f = compute_f_star(p)
    energy = compute_energy(p, f)
    delta = apply_update(p, d, f, sense(env, q, prm.radius, 0), energy)
    energy = delta.energy
    guide = live_energy(p, f)
    t0 = time.perf_counter()
    s0, traj = plan_initial(p, energy, observe_rewards(env, q, prm.radius, 0), prm.horizon, prm.kappa,
                            guide=guide, exhaustive=exhaustive)
    timing = [time.perf_counter() - t0]
    state = PlannerState(int(s0), traj, prm.horizon, prm.kappa, 1)

    def row(k, t, s, traj, e, reward, label, delta, extra):
        q, sh, ss = p.decode(s)
        x, y = d.xy(q)
        ans = {'k': k, 'cell': q, 'x': x, 'y': y, 'state': s, 's_h': sh, 's_s': ss,
               'J': float(energy.J[s]), 'utility': traj.utility,
               'v': int(p.v[e]) if e is not None else 0, 'h': float(p.h[e]) if e is not None else 0.0,
               'reward': reward, 'tier': traj.tier, 'case': traj.case,
               'terminal_energy': traj.terminal_energy, 'label': int(label),
               'accepting': bool(p.accepting[s]),
               'entered_obstacle': bool(env.true_labels(t)[q] & env.obstacle_bit),
               'relabeled': len(delta.relabeled), 'changed': len(delta.changed_edges),
               'obstacles': ' '.join(str(c) for c in env.obstacle_set(t))}
        ans.update(extra)
        return ans

    extra = {'fallback_ok': True, 'f_star_same': True} if audit else {}
    rows = [row(0, 0, traj.source, traj, None, 0.0, d.known[q], delta, extra)]
    if K > 0:
        reward = float(env.rewards(0)[p.cell(s0)])
        rows.append(row(1, 0, int(s0), traj, p.edge_index(traj.source, s0), reward, d.known[q], delta, extra))
    for k in range(1, K):
        q = int(p.cell(state.current))
        step_environment(world, k, q)
        delta = apply_update(p, d, f, sense(env, q, prm.radius, k), energy)
        energy = delta.energy
        if len(delta.changed_edges):
            guide = live_energy(p, f)
        rewards = observe_rewards(env, q, prm.radius, k)
        t0 = time.perf_counter()
        s1, traj = plan_step(state, p, energy, rewards, guide=guide, exhaustive=exhaustive)
        timing.append(time.perf_counter() - t0)
        extra = {}
        if audit:
            fb = fallback_path(state, p, energy, guide, traj.tier)
            fb_ok = fb is not None and is_candidate(p, state.current, fb.states,
                                                    constraint(state, p, guide, traj.tier))
            extra = {'fallback_ok': fb_ok, 'f_star_same': bool(np.array_equal(compute_f_star(p), f))}
        e = p.edge_index(state.current, s1)
        label = d.known[q]
        state.advance(traj)
        reward = float(env.rewards(k)[p.cell(s1)])
        rows.append(row(k + 1, k, int(s1), traj, e, reward, label, delta, extra))
    log = MissionLog.from_rows(rows, timing, scenario, p, f)
    logger.log(WL, f'run_mission | {scenario.name}: {K} steps, reward {log.cumulative_reward.iloc[-1]:.1f}, '
                   f'{len(log.accepting_visits)} zero-energy visits, {len(log.relaxations)} relaxed steps')
    return log
