"""
Scenarios, the simulated environment, mission logs and the scalability benchmark.

A scenario is a versioned JSON document describing a grid world, its static labels,
obstacles (static cells and seeded random walkers), the reward distribution, label
toggles and the hard and soft LTL tasks. ``Scenario.world()`` materialises the agent's
transition system, the environment truth and the two automata; ``step_environment``
evolves the truth one step at a time.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from io import StringIO
import json
import logging
from pathlib import Path
import time

import numpy as np
import pandas as pd

from .automata import translate_to_nba
from .constants import *
from .ltl import AtomSet, LassoWord
from .parser import parse_ltl, LtlSyntaxError
from .transition_system import build_grid_dts, EnvironmentTruth
from .utilities import Answer, available_memory, process_memory, rhcplan_dir, cells_frame

logger = logging.getLogger(__name__)

SCENARIO_DIR = Path(__file__).parent / 'scenarios'


class ScenarioError(ValueError):
    """ Scenario schema violation; ``path`` is the dotted field path. """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f'{path}: {message}')


@dataclass
class Parameters:
    beta: float = BETA
    kappa: float = KAPPA
    horizon: int = HORIZON
    radius: int = None
    steps: int = STEPS
    seed: int = 0

    def __post_init__(self):
        if self.radius is None:
            self.radius = self.horizon
        if self.beta <= 0:
            raise ScenarioError('parameters.beta', f'must be positive, not {self.beta}')
        if self.kappa < 0:
            raise ScenarioError('parameters.kappa', f'must be >= 0, not {self.kappa}')
        if self.horizon < 1:
            raise ScenarioError('parameters.horizon', f'must be >= 1, not {self.horizon}')
        if self.radius < 0:
            raise ScenarioError('parameters.radius', f'must be >= 0, not {self.radius}')
        if self.steps < 0:
            raise ScenarioError('parameters.steps', f'must be >= 0, not {self.steps}')
        if self.radius == 0:
            logger.warning('Parameters | sensing radius 0: obstacles are only seen from inside')


@dataclass
class World:
    """ Mutable state of one mission: knowledge, truth, automata and the seeded streams. """
    scenario: object
    d: object
    env: EnvironmentTruth
    b_h: object
    b_s: object
    walkers: list
    rng_walk: np.random.Generator
    rng_reward: np.random.Generator
    k: int = -1


def _get(doc, key, path, kind=None, default=...):
    if key not in doc:
        if default is ...:
            raise ScenarioError(f'{path}{key}', 'required field missing')
        return default
    x = doc[key]
    if kind is not None and (not isinstance(x, kind) or isinstance(x, bool)):
        raise ScenarioError(f'{path}{key}', f'expected {kind}, not {type(x).__name__}')
    return x


class Scenario(object):
    """
    Validated scenario. Build with :func:`load_scenario` or ``Scenario(doc)``.

    :param doc: dict following the scenario schema
    :param source: where the document came from, for messages
    """

    def __init__(self, doc, source=None):
        if not isinstance(doc, dict):
            raise ScenarioError('<root>', 'scenario must be a JSON object')
        self.doc = doc
        self.source = source
        version = _get(doc, 'version', '', int)
        if version != SCHEMA_VERSION:
            raise ScenarioError('version', f'unsupported schema version {version}, expected {SCHEMA_VERSION}')
        self.name = _get(doc, 'name', '', str)
        self.description = _get(doc, 'description', '', str, '')

        grid = _get(doc, 'grid', '', dict)
        self.width = _get(grid, 'width', 'grid.', int)
        self.height = _get(grid, 'height', 'grid.', int)
        if self.width < 1 or self.height < 1:
            raise ScenarioError('grid', f'dimensions must be >= 1, not {self.width}x{self.height}')
        self.initial = self._cell(_get(grid, 'initial', 'grid.', list), 'grid.initial')

        atoms = _get(doc, 'atoms', '', list, list(DEFAULT_ATOMS))
        try:
            self.atoms = AtomSet(atoms)
        except ValueError as e:
            raise ScenarioError('atoms', str(e))

        self.static = np.zeros(self.width * self.height, dtype=np.int64)
        for a, cells in _get(doc, 'labels', '', dict, {}).items():
            if a not in self.atoms:
                raise ScenarioError(f'labels.{a}', f'unknown atom, expected one of {list(self.atoms)}')
            if a == OBSTACLE:
                raise ScenarioError(f'labels.{a}', 'place obstacles under obstacles.static')
            if not isinstance(cells, list):
                raise ScenarioError(f'labels.{a}', 'expected a list of [x, y] cells')
            for i, c in enumerate(cells):
                self.static[self._cell(c, f'labels.{a}[{i}]')] |= self.atoms.mask([a])

        self.hard_text = _get(doc, 'hard', '', str)
        self.soft_text = _get(doc, 'soft', '', str)
        self.hard = self._formula('hard')
        self.soft = self._formula('soft')

        r = _get(doc, 'rewards', '', dict, {})
        self.reward_low = float(_get(r, 'low', 'rewards.', (int, float), REWARD_LOW))
        self.reward_high = float(_get(r, 'high', 'rewards.', (int, float), REWARD_HIGH))
        self.reward_seed = _get(r, 'seed', 'rewards.', int, 0)
        if self.reward_high < self.reward_low:
            raise ScenarioError('rewards', f'high {self.reward_high} below low {self.reward_low}')

        o = _get(doc, 'obstacles', '', dict, {})
        self.static_obstacles = sorted({self._cell(c, f'obstacles.static[{i}]')
                                        for i, c in enumerate(_get(o, 'static', 'obstacles.', list, []))})
        self.walkers = []
        for i, w in enumerate(_get(o, 'walkers', 'obstacles.', list, [])):
            if not isinstance(w, dict):
                raise ScenarioError(f'obstacles.walkers[{i}]', 'expected an object')
            self.walkers.append(self._cell(_get(w, 'start', f'obstacles.walkers[{i}].', list),
                                           f'obstacles.walkers[{i}].start'))
        self.obstacle_seed = _get(o, 'seed', 'obstacles.', int, 1)
        self.script = {}
        for k, cells in _get(o, 'script', 'obstacles.', dict, {}).items():
            try:
                kk = int(k)
            except ValueError:
                raise ScenarioError(f'obstacles.script.{k}', 'step keys must be integers')
            if not isinstance(cells, list):
                raise ScenarioError(f'obstacles.script.{k}', 'expected a list of [x, y] cells')
            self.script[kk] = sorted({self._cell(c, f'obstacles.script.{k}[{i}]') for i, c in enumerate(cells)})
        if (self.static_obstacles or self.walkers or self.script) and OBSTACLE not in self.atoms:
            raise ScenarioError('obstacles', f'obstacles need the {OBSTACLE} atom')
        if len(set(self.walkers)) != len(self.walkers):
            raise ScenarioError('obstacles.walkers', 'walkers must start on distinct cells')
        for i, c in enumerate(self.walkers):
            if self.static[c] or c in self.static_obstacles:
                raise ScenarioError(f'obstacles.walkers[{i}].start', 'walkers cannot start on a labelled cell')
        at_start = set(self.static_obstacles) | set(self.walkers) | set(self.script.get(0, []))
        if self.initial in at_start:
            raise ScenarioError('grid.initial', f'initial cell is labelled {OBSTACLE} at step 0')

        self.toggles = []
        for i, t in enumerate(_get(doc, 'toggles', '', list, [])):
            path = f'toggles[{i}].'
            if not isinstance(t, dict):
                raise ScenarioError(f'toggles[{i}]', 'expected an object')
            a = _get(t, 'atom', path, str)
            if a not in self.atoms:
                raise ScenarioError(f'{path}atom', f'unknown atom {a}')
            cells = _get(t, 'cells', path, (str, list), 'all')
            if isinstance(cells, str):
                if cells != 'all':
                    raise ScenarioError(f'{path}cells', f'expected "all" or a list of cells, not {cells!r}')
                cells = None
            else:
                cells = [self._cell(c, f'{path}cells[{j}]') for j, c in enumerate(cells)]
            off = _get(t, 'off', path, list)
            if len(off) != 2 or not all(isinstance(x, int) for x in off) or off[0] > off[1]:
                raise ScenarioError(f'{path}off', f'expected [k0, k1] with k0 <= k1, not {off}')
            self.toggles.append((self.atoms.mask([a]), cells, off[0], off[1]))

        prm = _get(doc, 'parameters', '', dict, {})
        unknown = set(prm) - set(Parameters.__dataclass_fields__)
        if unknown:
            raise ScenarioError(f'parameters.{sorted(unknown)[0]}', 'unknown parameter')
        self.parameters = Parameters(**prm)
        self.initial_knowledge = _get(doc, 'initial_knowledge', '', str, 'static')
        if self.initial_knowledge not in ('static', 'truth'):
            raise ScenarioError('initial_knowledge', f'expected "static" or "truth", not {self.initial_knowledge!r}')
        self._nbas = None

    def __repr__(self):
        p = self.parameters
        return (f'Scenario({self.name}, {self.width}x{self.height}, N={p.horizon}, K={p.steps}, '
                f'beta={p.beta}, kappa={p.kappa}, seed={p.seed})')

    def _cell(self, c, path):
        if not (isinstance(c, list) and len(c) == 2 and all(isinstance(x, int) for x in c)):
            raise ScenarioError(path, f'expected [x, y], not {c!r}')
        x, y = c
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise ScenarioError(path, f'cell {c} outside the {self.width}x{self.height} grid')
        return y * self.width + x

    def _formula(self, key):
        try:
            return parse_ltl(getattr(self, f'{key}_text'), self.atoms)
        except LtlSyntaxError as e:
            raise ScenarioError(key, str(e)) from e

    def to_dict(self):
        return json.loads(json.dumps(self.doc))

    def with_parameters(self, **kwargs):
        """ Copy with parameters overridden; ``None`` values are ignored. """
        doc = self.to_dict()
        prm = doc.setdefault('parameters', {})
        for k, v in kwargs.items():
            if v is not None:
                prm[k] = v
        ans = Scenario(doc, self.source)
        ans._nbas = self._nbas
        return ans

    def nbas(self):
        """ Hard and soft automata, translated once per scenario. """
        if self._nbas is None:
            self._nbas = (translate_to_nba(self.hard, self.atoms), translate_to_nba(self.soft, self.atoms))
        return self._nbas

    def set_nbas(self, b_h=None, b_s=None):
        """ Replace the translated automata, e.g. with imported ones. """
        h, s = self.nbas()
        self._nbas = (h if b_h is None else b_h, s if b_s is None else b_s)

    def world(self):
        """ Fresh world at step -1; :func:`step_environment` records step 0. """
        b_h, b_s = self.nbas()
        d = build_grid_dts(self.width, self.height, self.initial, labels=self.static, atoms=self.atoms)
        env = EnvironmentTruth(d.coords, self.atoms, self.static)
        seed = self.parameters.seed
        return World(self, d, env, b_h, b_s, list(self.walkers),
                     np.random.default_rng([seed, self.obstacle_seed]),
                     np.random.default_rng([seed, self.reward_seed]))


def load_scenario(path):
    """
    Load a scenario from a path or by name. Search order: the path as given, then
    ``~/rhcplan/scenarios``, then the bundled scenarios. A ``.json`` suffix is added when
    there is none.

    :param path: file name or scenario name, e.g. ``'surveillance'``
    """
    p = Path(path)
    if p.suffix == '':
        p = p.with_suffix('.json')
    for candidate in (p, Path.home() / 'rhcplan/scenarios' / p.name, SCENARIO_DIR / p.name):
        if candidate.exists():
            break
    else:
        raise FileNotFoundError(f'Scenario {path} not found')
    try:
        doc = json.loads(candidate.read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise ScenarioError('<root>', f'invalid JSON at line {e.lineno}: {e.msg}')
    sc = Scenario(doc, source=str(candidate))
    logger.info(f'load_scenario | {sc} from {candidate}')
    return sc


def bundled_scenarios():
    """ Names of the scenarios shipped with the package. """
    return sorted(p.stem for p in SCENARIO_DIR.glob('*.json'))


def _moves(sc, c):
    x, y = c % sc.width, c // sc.width
    ans = [c]
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        if 0 <= x + dx < sc.width and 0 <= y + dy < sc.height:
            ans.append((y + dy) * sc.width + x + dx)
    return sorted(ans)


def step_environment(world, k, agent_cell):
    """
    Evolve the truth to step ``k`` and record it: move the walkers, resample the
    rewards, apply the label toggles. Steps must be recorded in order from 0.

    Walkers take one seeded 4-neighbour step (staying allowed), never onto the agent's
    cell, a statically labelled cell, a static obstacle or another walker. A scripted
    step pins the obstacle set instead.

    :param world: World from ``Scenario.world()``
    :param agent_cell: cell the agent occupies at step ``k``
    """
    if k != world.k + 1:
        raise ValueError(f'Environment is at step {world.k}, cannot record step {k}')
    sc = world.scenario
    if k > 0:
        blocked = set(sc.static_obstacles) | set(np.flatnonzero(sc.static).tolist()) | {int(agent_cell)}
        for i, c in enumerate(world.walkers):
            others = set(world.walkers[:i] + world.walkers[i + 1:])
            options = [m for m in _moves(sc, c) if m not in blocked and m not in others]
            if options:
                world.walkers[i] = int(options[world.rng_walk.integers(len(options))])
    if k in sc.script:
        obstacles = set(sc.script[k])
        if agent_cell in obstacles:
            logger.warning(f'step_environment | k={k} script puts an obstacle on the agent, dropped')
            obstacles.discard(agent_cell)
    else:
        obstacles = set(sc.static_obstacles) | set(world.walkers)
    rewards = world.rng_reward.uniform(sc.reward_low, sc.reward_high, world.env.n)
    removed = np.zeros(world.env.n, dtype=np.int64)
    for bit, cells, k0, k1 in sc.toggles:
        if k0 <= k <= k1:
            if cells is None:
                removed |= bit
            else:
                removed[cells] |= bit
    world.env.record(k, sorted(obstacles), rewards, removed)
    if k == 0 and sc.initial_knowledge == 'truth':
        world.d.set_labels(world.env.true_labels(0))
    world.k = k
    return world.env


class MissionLog(object):
    """
    Per-step mission records. Row ``k`` describes the state reached at step ``k``; row 0
    is the initial product state and row 1 the start chosen among its successors.
    ``label`` is the known label of the cell left at that step, the letter the automata
    read.

    :param frame: DataFrame of step records
    :param meta: dict with ``name``, ``width``, ``height``, ``atoms`` and ``labels``
        (static label mask per cell)
    :param timing: planning seconds per step, kept out of the deterministic log
    """

    COLUMNS = ['k', 'cell', 'x', 'y', 'state', 's_h', 's_s', 'J', 'utility', 'v', 'h', 'reward',
               'tier', 'case', 'terminal_energy', 'label', 'accepting', 'entered_obstacle',
               'relabeled', 'changed', 'obstacles']

    def __init__(self, frame, meta, timing=None):
        self.frame = frame
        self.meta = meta
        self.timing = list(timing or [])
        self.atoms = AtomSet(meta['atoms'])

    @classmethod
    def from_rows(cls, rows, timing, scenario, p=None, f=None):
        frame = pd.DataFrame(rows)
        if len(frame) == 0:
            frame = pd.DataFrame(columns=cls.COLUMNS)
        meta = {'name': scenario.name, 'width': scenario.width, 'height': scenario.height,
                'atoms': list(scenario.atoms), 'labels': [int(m) for m in scenario.static]}
        if f is not None:
            meta['f_star'] = int(np.asarray(f).sum())
        return cls(frame, meta, timing)

    def __len__(self):
        return len(self.frame)

    def __repr__(self):
        return f'MissionLog({self.meta["name"]}, steps={max(len(self) - 1, 0)})'

    @property
    def empty(self):
        return len(self.frame) == 0

    @property
    def energy_trace(self):
        return self.frame.set_index('k')['J'].astype(float)

    @property
    def cumulative_reward(self):
        return self.frame.set_index('k')['reward'].astype(float).cumsum().rename('cumulative_reward')

    @property
    def violation_events(self):
        """ Steps whose executed transition violates the soft task. """
        return self.frame.k[self.frame.v > 0].to_numpy()

    @property
    def accepting_visits(self):
        """ Steps at which the energy is 0. """
        return self.frame.k[self.frame.J == 0].to_numpy()

    @property
    def relaxations(self):
        return self.frame.k[self.frame.tier > 0].to_numpy()

    def timing_frame(self):
        return pd.DataFrame({'k': np.arange(len(self.timing)), 'seconds': self.timing})

    def summary(self):
        """ One-row summary DataFrame. """
        fr = self.frame
        t = np.array(self.timing) if self.timing else np.full(1, np.nan)
        return pd.DataFrame({
            'scenario': [self.meta['name']],
            'steps': [max(len(fr) - 1, 0)],
            'reward': [float(fr.reward.sum()) if len(fr) else 0.0],
            'violations': [len(self.violation_events)],
            'accepting_visits': [len(self.accepting_visits)],
            'relaxations': [len(self.relaxations)],
            'obstacle_entries': [int(fr.entered_obstacle.astype(bool).sum()) if len(fr) else 0],
            'final_J': [float(fr.J.iloc[-1]) if len(fr) else np.nan],
            'mean_time': [float(np.mean(t))],
            'max_time': [float(np.max(t))]})

    def executed_lasso(self):
        """
        Close the executed run into a lasso at the first repeated product state whose
        loop passes through an accepting product state.

        :return: Answer with ``prefix`` and ``cycle`` (product states), ``cells`` and
            ``word`` (LassoWord of the labels read), or None
        """
        states = self.frame.state.to_numpy(dtype=np.int64)
        acc = self.frame.accepting.astype(bool).to_numpy()
        labels = self.frame.label.to_numpy(dtype=np.int64)
        seen = {}
        for j, s in enumerate(states):
            s = int(s)
            if s in seen:
                i = seen[s]
                if acc[i:j].any():
                    # the letter read in state j' is the label recorded one step later
                    letters = [self.atoms.labels(int(m)) for m in labels[1:j + 1]]
                    cells = self.frame.cell.to_numpy()[:j]
                    return Answer(prefix=[int(x) for x in states[:i]], cycle=[int(x) for x in states[i:j]],
                                  cells=[int(c) for c in cells],
                                  word=LassoWord(letters[:i], letters[i:j]))
            seen[s] = j
        return None

    def to_text(self):
        """ Tab separated records preceded by ``# key=value`` metadata lines. """
        buf = StringIO()
        for k, v in self.meta.items():
            buf.write(f'# {k}={json.dumps(v)}\n')
        self.frame.to_csv(buf, sep='\t', index=False)
        return buf.getvalue()

    def write(self, path):
        Path(path).write_text(self.to_text(), encoding='utf-8')

    @classmethod
    def read(cls, path):
        """ Inverse of :meth:`write`; timing is not stored in the log. """
        lines = Path(path).read_text(encoding='utf-8').splitlines(keepends=True)
        meta = {}
        i = 0
        while i < len(lines) and lines[i].startswith('# '):
            k, v = lines[i][2:].rstrip('\n').split('=', 1)
            meta[k] = json.loads(v)
            i += 1
        for k in ('name', 'width', 'height', 'atoms', 'labels'):
            if k not in meta:
                raise ValueError(f'{path} is not a mission log: missing {k}')
        body = ''.join(lines[i:])
        if body.strip():
            frame = pd.read_csv(StringIO(body), sep='\t', keep_default_na=False, dtype={'obstacles': str})
        else:
            frame = pd.DataFrame(columns=cls.COLUMNS)
        return cls(frame, meta)


def export_artifacts(log, out_dir):
    """
    Write the mission artifacts into ``out_dir`` (created if needed): ``mission.log``,
    ``energy.csv``, ``reward.csv``, ``trajectory.csv``, ``timing.csv``, the SVG
    renderings ``render.svg``, ``energy.svg``, ``reward.svg`` and ``summary.html``.
    An empty log gives empty files.

    :raise OSError: directory not writable
    :return: dict name -> Path
    """
    from .extensions.figures import render_mission, plot_energy, plot_reward
    from .extensions.report import render_summary
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = ['mission.log', 'energy.csv', 'reward.csv', 'trajectory.csv', 'timing.csv',
             'render.svg', 'energy.svg', 'reward.svg', 'summary.html']
    paths = {n: out / n for n in names}
    if log.empty:
        for p in paths.values():
            p.write_text('', encoding='utf-8')
        logger.log(WL, f'export_artifacts | empty log, wrote empty files to {out}')
        return paths
    log.write(paths['mission.log'])
    log.energy_trace.reset_index().to_csv(paths['energy.csv'], index=False)
    rew = pd.DataFrame({'k': log.frame.k, 'reward': log.frame.reward.astype(float),
                        'cumulative_reward': log.cumulative_reward.to_numpy()})
    rew.to_csv(paths['reward.csv'], index=False)
    traj = cells_frame(log.frame.cell, log.meta['width'])
    traj.insert(0, 'k', log.frame.k.to_numpy())
    traj['label'] = [log.atoms.format(log.meta["labels"][c]) for c in traj.cell]
    traj['obstacles'] = log.frame.obstacles.to_numpy()
    traj.to_csv(paths['trajectory.csv'], index=False)
    log.timing_frame().to_csv(paths['timing.csv'], index=False)
    svgs = {'render.svg': render_mission(log), 'energy.svg': plot_energy(log), 'reward.svg': plot_reward(log)}
    for n, fig in svgs.items():
        fig.savefig(paths[n], format='svg', metadata={'Date': None})
    render_summary(log, {n: paths[n].read_text(encoding='utf-8') for n in svgs}, paths['summary.html'])
    for fig in svgs.values():
        plt.close(fig)
    logger.log(WL, f'export_artifacts | {len(names)} files written to {out}')
    return paths


def default_out_dir(name):
    """ ``~/rhcplan/runs/<name>``. """
    return rhcplan_dir('runs', name)


def bench_scenario(size, horizon, steps=BENCH_STEPS, seed=0):
    """
    Surveillance task on a ``size x size`` grid with the four task labels near the
    corners and no obstacles.
    """
    if size < 2:
        raise ValueError(f'Benchmark grid side must be >= 2, not {size}')
    base = load_scenario('surveillance').to_dict()
    m = size - 1
    doc = {'version': SCHEMA_VERSION, 'name': f'bench_{size}x{size}_N{horizon}',
           'grid': {'width': size, 'height': size, 'initial': [0, 0]},
           'atoms': base['atoms'],
           'labels': {'Base': [[1, 1]], 'Survey': [[m, m]], 'Report': [[1, m]], 'Supply': [[m, 1]]},
           'hard': base['hard'], 'soft': base['soft'],
           'rewards': base.get('rewards', {}),
           'parameters': {'beta': BETA, 'kappa': KAPPA, 'horizon': int(horizon), 'steps': int(steps),
                          'seed': int(seed)}}
    return Scenario(doc, source='bench')


@dataclass
class BenchRecord:
    size: int
    Q: int
    S_h: int
    S_s: int
    S_P: int
    edges: int
    N: int
    reps: int = 0
    min: float = np.nan
    max: float = np.nan
    mean: float = np.nan
    skipped: bool = False


def estimate_bytes(d, b_h, b_s):
    """ Estimated footprint of the product edge arrays. """
    return len(d.src) * len(b_h.edge_src) * len(b_s.edge_src) * BYTES_PER_EDGE


def _bench_row(size, horizon, reps, steps, seed):
    from .planner import run_mission
    sc = bench_scenario(size, horizon, steps, seed)
    b_h, b_s = sc.nbas()
    world = sc.world()
    n_q = world.d.n
    need = estimate_bytes(world.d, b_h, b_s)
    edges = need // BYTES_PER_EDGE
    rec = BenchRecord(size, n_q, b_h.n_states, b_s.n_states, n_q * b_h.n_states * b_s.n_states, edges, horizon)
    limit = available_memory() * MEMORY_FRACTION
    if need > limit:
        logger.log(WL, f'run_benchmark | skipping {size}x{size} N={horizon}: needs ~{need / (1 << 20):.0f}MB, '
                       f'limit {limit / (1 << 20):.0f}MB')
        rec.skipped = True
        return rec
    times = []
    for r in range(reps):
        t0 = time.perf_counter()
        log = run_mission(sc.with_parameters(seed=seed + r), steps=steps)
        times.extend(log.timing[1:])
        logger.info(f'run_benchmark | {size}x{size} N={horizon} rep {r}: {time.perf_counter() - t0:.2f}s')
    process_memory()
    t = np.array(times) if times else np.full(1, np.nan)
    rec.reps, rec.min, rec.max, rec.mean = reps, float(t.min()), float(t.max()), float(t.mean())
    logger.log(WL, f'run_benchmark | {size}x{size} N={horizon}: S_P={rec.S_P}, mean {rec.mean * 1000:.1f}ms')
    return rec


def run_benchmark(rows=BENCH_ROWS, reps=1, steps=BENCH_STEPS, seed=0, jobs=1):
    """
    Planning time per step over a fixed-step surveillance episode for each
    ``(grid side, horizon)`` row. Rows whose product would not fit in memory are
    reported with ``skipped`` set.

    :param rows: iterable of ``(size, horizon)``
    :param reps: episodes per row
    :param jobs: worker processes; rows run in parallel when > 1
    :return: DataFrame with one row per configuration
    """
    rows = [(int(s), int(n)) for s, n in rows]
    if reps < 1:
        raise ValueError(f'reps must be >= 1, not {reps}')
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futures = [ex.submit(_bench_row, s, n, reps, steps, seed) for s, n in rows]
            records = [f.result() for f in futures]
    else:
        records = [_bench_row(s, n, reps, steps, seed) for s, n in rows]
    return pd.DataFrame([asdict(r) for r in records])
