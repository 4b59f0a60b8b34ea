"""
Nondeterministic Buchi automata over the alphabet 2^atoms.

Transitions are stored per ``(src, dst)`` pair as the set of label masks that enable
the move. :func:`translate_to_nba` builds an automaton from an LTL formula with the
classic tableau construction (local-consistency nodes, generalized acceptance, counter
degeneralization), then trims and merges bisimilar states.
"""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from .ltl import AtomSet, nnf
from .parser import parse_hoa
from .utilities import popcount, topology, reachable_from, on_cycle

logger = logging.getLogger(__name__)

INIT = -1


class NbaFormatError(ValueError):
    """ Interchange document does not match the automaton schema. """


class Nba(object):
    """
    Nondeterministic Buchi automaton with states ``0..n-1``.

    :param atoms: AtomSet, the alphabet is its power set
    :param n_states: number of states
    :param initial: iterable of initial states
    :param accepting: iterable of accepting states
    :param transitions: dict ``(src, dst) -> iterable of label masks``; pairs with no
        enabling label are dropped
    :param names: optional external state names, default ``'0'..'n-1'``
    """

    def __init__(self, atoms, n_states, initial, accepting, transitions, names=None):
        self.atoms = atoms if isinstance(atoms, AtomSet) else AtomSet(atoms)
        self.n_states = int(n_states)
        self.initial = frozenset(int(i) for i in initial)
        self.accepting = frozenset(int(i) for i in accepting)
        self.names = [str(i) for i in range(self.n_states)] if names is None else [str(i) for i in names]
        if len(self.names) != self.n_states:
            raise ValueError(f'{len(self.names)} names given for {self.n_states} states')
        for s in self.initial | self.accepting:
            if not 0 <= s < self.n_states:
                raise ValueError(f'State {s} out of range 0..{self.n_states - 1}')
        self.transitions = {}
        for (s, t), masks in sorted(transitions.items()):
            if not (0 <= s < self.n_states and 0 <= t < self.n_states):
                raise ValueError(f'Transition ({s}, {t}) refers to a state out of range')
            masks = frozenset(int(m) for m in masks)
            if masks:
                self.transitions[(int(s), int(t))] = masks
        self.edges = list(self.transitions)
        self.edge_src = np.array([e[0] for e in self.edges], dtype=np.int64)
        self.edge_dst = np.array([e[1] for e in self.edges], dtype=np.int64)
        # flat CSR-like store of enabling masks, one segment per edge
        sizes = [len(self.transitions[e]) for e in self.edges]
        self._offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64) if sizes else np.zeros(0, np.int64)
        self._flat = np.array([m for e in self.edges for m in sorted(self.transitions[e])], dtype=np.int64)
        self._enabled = {}
        self._distance = {}

    def __repr__(self):
        return (f'Nba(states={self.n_states}, initial={sorted(self.initial)}, '
                f'accepting={sorted(self.accepting)}, edges={len(self.edges)}, atoms={list(self.atoms)})')

    def describe(self):
        """ One-row summary DataFrame. """
        return pd.DataFrame({'states': [self.n_states], 'initial': [len(self.initial)],
                             'accepting': [len(self.accepting)], 'edges': [len(self.edges)],
                             'atoms': [len(self.atoms)]})

    def successors(self, s, mask):
        """ States reachable from ``s`` reading label mask ``mask``. """
        return [t for (u, t), masks in self.transitions.items() if u == s and mask in masks]

    def label_sets(self, s, t):
        """ X(s, t): the label masks enabling ``s -> t`` (empty if no transition). """
        return self.transitions.get((s, t), frozenset())

    def enabled(self, mask):
        """
        Boolean array over ``self.edges``: True where ``mask`` enables the edge.
        """
        ans = self._enabled.get(mask)
        if ans is None:
            hit = (self._flat == mask).astype(np.int64)
            ans = np.add.reduceat(hit, self._offsets) > 0 if len(self.edges) else np.zeros(0, bool)
            self._enabled[mask] = ans
        return ans

    def distance(self, mask):
        """
        Integer array over ``self.edges``: the Hamming distance from ``mask`` to the
        nearest enabling label of each edge, 0 when ``mask`` enables it.
        """
        ans = self._distance.get(mask)
        if ans is None:
            if len(self.edges):
                ans = np.minimum.reduceat(popcount(self._flat ^ mask), self._offsets).astype(np.int64)
            else:
                ans = np.zeros(0, np.int64)
            self._distance[mask] = ans
        return ans

    def adjacency(self):
        """ Unweighted csr adjacency matrix of the state graph. """
        return topology(self.n_states, self.edge_src, self.edge_dst)

    def to_dict(self):
        """ Interchange document, see :func:`import_nba`. """
        return {
            'atoms': list(self.atoms),
            'states': list(self.names),
            'initial': [self.names[i] for i in sorted(self.initial)],
            'accepting': [self.names[i] for i in sorted(self.accepting)],
            'transitions': [{'from': self.names[s], 'to': self.names[t],
                             'labels': [sorted(self.atoms.labels(m), key=self.atoms.index.get)
                                        for m in sorted(masks)]}
                            for (s, t), masks in self.transitions.items()]
        }

    def with_atoms(self, atoms):
        """
        Same automaton re-expressed over a larger atom universe; atoms not in
        ``self.atoms`` are unconstrained.
        """
        atoms = atoms if isinstance(atoms, AtomSet) else AtomSet(atoms)
        if atoms == self.atoms:
            return self
        missing = [a for a in self.atoms if a not in atoms]
        if missing:
            raise ValueError(f'Atoms {missing} are not in the target universe {list(atoms)}')
        all_masks = np.arange(atoms.n_labels, dtype=np.int64)
        # project every target mask onto the old universe
        proj = np.zeros(atoms.n_labels, dtype=np.int64)
        for i, a in enumerate(self.atoms):
            proj |= ((all_masks >> atoms.index[a]) & 1) << i
        trans = {}
        for e, masks in self.transitions.items():
            keep = np.isin(proj, np.fromiter(masks, dtype=np.int64))
            trans[e] = all_masks[keep].tolist()
        return Nba(atoms, self.n_states, self.initial, self.accepting, trans, self.names)


def universal_nba(atoms):
    """ One accepting state with a self-loop on every label. """
    atoms = atoms if isinstance(atoms, AtomSet) else AtomSet(atoms)
    return Nba(atoms, 1, [0], [0], {(0, 0): range(atoms.n_labels)})


class _Node(object):
    __slots__ = ['id', 'incoming', 'new', 'old', 'next']

    def __init__(self, incoming, new, old, next):
        self.id = None
        self.incoming = incoming
        self.new = new
        self.old = old
        self.next = next


def _tableau(f, untils=()):
    """
    Expand the negation normal form of ``f`` into locally consistent nodes.
    Returns the closed nodes; ``INIT`` in ``node.incoming`` marks initial nodes.
    Closed nodes are merged when they agree on literals, next obligations and
    membership of every acceptance set, which leaves the language unchanged.
    """
    nodes = []
    closed = {}
    stack = [_Node({INIT}, {f}, set(), set())]
    while stack:
        node = stack.pop()
        if not node.new:
            key = (frozenset(h for h in node.old if h.kind in ('atom', 'not')), frozenset(node.next),
                   tuple(u not in node.old or u.right in node.old for u in untils))
            if key in closed:
                closed[key].incoming |= node.incoming
            else:
                node.id = len(nodes)
                nodes.append(node)
                closed[key] = node
                stack.append(_Node({node.id}, set(node.next), set(), set()))
            continue
        # smallest by text so state numbering does not depend on hash seeds
        g = min(node.new, key=str)
        node.new.discard(g)
        if g in node.old:
            stack.append(node)
            continue
        k = g.kind
        if k == 'false':
            continue
        if k in ('atom', 'not', 'true'):
            neg = g.left if k == 'not' else (g.__class__('not', (g,)) if k == 'atom' else None)
            if neg is not None and neg in node.old:
                continue
            node.old.add(g)
            stack.append(node)
        elif k == 'and':
            node.new |= {g.left, g.right} - node.old
            node.old.add(g)
            stack.append(node)
        elif k == 'next':
            node.old.add(g)
            node.next.add(g.left)
            stack.append(node)
        elif k in ('or', 'until', 'release'):
            if k == 'or':
                new1, next1, new2 = {g.left}, set(), {g.right}
            elif k == 'until':
                new1, next1, new2 = {g.left}, {g}, {g.right}
            else:
                new1, next1, new2 = {g.right}, {g}, {g.left, g.right}
            old = node.old | {g}
            stack.append(_Node(set(node.incoming), node.new | (new2 - old), set(old), set(node.next)))
            stack.append(_Node(set(node.incoming), node.new | (new1 - old), set(old), node.next | next1))
        else:
            raise ValueError(f'Formula not in negation normal form: {g}')
    return nodes


def _node_masks(node, atoms, all_masks):
    pos = neg = 0
    for g in node.old:
        if g.kind == 'atom':
            pos |= 1 << atoms.index[g.name]
        elif g.kind == 'not':
            neg |= 1 << atoms.index[g.left.name]
    keep = ((all_masks & pos) == pos) & ((all_masks & neg) == 0)
    return frozenset(all_masks[keep].tolist())


def _trim(n, initial, accepting, trans):
    """ Keep reachable states that can reach an accepting cycle; initial states always kept. """
    src = [s for s, _ in trans]
    dst = [t for _, t in trans]
    adj = topology(n, src, dst)
    reach = reachable_from(adj, sorted(initial))
    good = np.zeros(n, dtype=bool)
    good[sorted(accepting)] = True
    good &= on_cycle(adj)
    live = reachable_from(adj.T.tocsr(), np.flatnonzero(good))
    keep = reach & live
    keep[sorted(initial)] = True
    return keep


def _reduce(n, initial, accepting, trans):
    """
    Quotient by forward bisimulation. States with no incoming transition may also merge
    into a block with the same outgoing behaviour, their acceptance being irrelevant.
    Returns ``(n, initial, accepting, trans)`` of the quotient.
    """
    has_in = np.zeros(n, dtype=bool)
    for _, t in trans:
        has_in[t] = True
    out = [dict() for _ in range(n)]
    for (s, t), masks in trans.items():
        out[s][t] = masks
    orphan = [not has_in[i] for i in range(n)]
    key0 = ['orphan' if orphan[i] else i in accepting for i in range(n)]
    block = _relabel(key0)

    def signature(i):
        d = {}
        for t, masks in out[i].items():
            d[block[t]] = d.get(block[t], frozenset()) | masks
        return frozenset(d.items())

    while True:
        nb = _relabel([(block[i], signature(i)) for i in range(n)])
        if max(nb) == max(block):
            break
        block = nb
    # fold orphans into a block with identical outgoing behaviour
    by_signature = {}
    for i in range(n):
        if not orphan[i]:
            by_signature.setdefault(signature(i), block[i])
    remap = {}
    for i in range(n):
        if orphan[i] and signature(i) in by_signature:
            remap[block[i]] = by_signature[signature(i)]
    block = _relabel([remap.get(b, b) for b in block])
    new_init = {block[i] for i in initial}
    new_acc = {block[i] for i in accepting if not orphan[i]}
    new_trans = {}
    for (s, t), masks in trans.items():
        k = (block[s], block[t])
        new_trans[k] = new_trans.get(k, frozenset()) | masks
    return max(block) + 1, new_init, new_acc, new_trans


def _relabel(keys):
    seen = {}
    return [seen.setdefault(k, len(seen)) for k in keys]


def translate_to_nba(f, atoms=None, reduce=True):
    """
    Translate an LTL formula to an NBA accepting exactly its models.

    :param f: LtlAst
    :param atoms: AtomSet (or names) of the alphabet, default the atoms used in ``f``
    :param reduce: trim and merge bisimilar states
    :return: Nba
    """
    if atoms is None:
        atoms = AtomSet(f.atoms_used())
    elif not isinstance(atoms, AtomSet):
        atoms = AtomSet(atoms)
    missing = [a for a in f.atoms_used() if a not in atoms]
    if missing:
        raise ValueError(f'Formula uses atoms {missing} outside {list(atoms)}')
    g = nnf(f)
    untils = [h for h in g.subformulas() if h.kind == 'until']
    nodes = _tableau(g, untils)
    all_masks = np.arange(atoms.n_labels, dtype=np.int64)
    labels = [_node_masks(n, atoms, all_masks) for n in nodes]
    if untils:
        acc_sets = [{n.id for n in nodes if u not in n.old or u.right in n.old} for u in untils]
    else:
        acc_sets = [{n.id for n in nodes}]
    k = len(acc_sets)

    # counter degeneralization; state 0 is a fresh initial state
    index = {}
    trans = {}
    todo = []

    def state(node_id, i):
        key = (node_id, i)
        if key not in index:
            index[key] = len(index) + 1
            todo.append(key)
        return index[key]

    succ = {n.id: [] for n in nodes}
    for n in nodes:
        for m in n.incoming:
            if m != INIT:
                succ[m].append(n.id)
    for n in nodes:
        if INIT in n.incoming and labels[n.id]:
            trans[(0, state(n.id, 0))] = labels[n.id]
    while todo:
        m, i = todo.pop()
        j = (i + 1) % k if m in acc_sets[i] else i
        src = index[(m, i)]
        for nid in succ[m]:
            if labels[nid]:
                trans[(src, state(nid, j))] = labels[nid]
    n_states = len(index) + 1
    accepting = {v for (m, i), v in index.items() if i == 0 and m in acc_sets[0]}
    initial = {0}
    logger.debug(f'translate_to_nba | {len(nodes)} tableau nodes, {k} acceptance sets, {n_states} states')

    if reduce:
        keep = _trim(n_states, initial, accepting, trans)
        old = np.flatnonzero(keep)
        new = {o: i for i, o in enumerate(old)}
        trans = {(new[s], new[t]): v for (s, t), v in trans.items() if keep[s] and keep[t]}
        initial = {new[s] for s in initial}
        accepting = {new[s] for s in accepting if keep[s]}
        n_states, initial, accepting, trans = _reduce(len(old), initial, accepting, trans)

    ans = Nba(atoms, n_states, initial, accepting, trans)
    logger.info(f'translate_to_nba | {f} --> {ans}')
    return ans


def _masks_of(formula, atoms):
    """ Label masks satisfying a propositional formula. """
    all_masks = np.arange(atoms.n_labels, dtype=np.int64)

    def ev(g):
        k = g.kind
        if k == 'true':
            return np.ones(len(all_masks), dtype=bool)
        if k == 'false':
            return np.zeros(len(all_masks), dtype=bool)
        if k == 'atom':
            return ((all_masks >> atoms.index[g.name]) & 1).astype(bool)
        if k == 'not':
            return ~ev(g.left)
        if k == 'and':
            return ev(g.left) & ev(g.right)
        if k == 'or':
            return ev(g.left) | ev(g.right)
        raise NbaFormatError(f'Temporal operator {k} in a transition label')

    return all_masks[ev(formula)].tolist()


def import_nba(doc, atoms=None):
    """
    Build an Nba from an interchange document::

        {"atoms": ["a", "Obstacle"], "states": ["s0", "s1"], "initial": ["s0"],
         "accepting": ["s1"],
         "transitions": [{"from": "s0", "to": "s1", "labels": [["a"], []]}]}

    Each transition lists the label sets (lists of atom names) that enable it.

    :param doc: dict, JSON text or path to a JSON file
    :param atoms: optional larger atom universe to re-express the automaton over
    """
    if isinstance(doc, Path) or (isinstance(doc, str) and not doc.lstrip().startswith('{')):
        doc = Path(doc).read_text(encoding='utf-8')
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise NbaFormatError(f'Not valid JSON: {e}')
    if not isinstance(doc, dict):
        raise NbaFormatError('Automaton document must be a mapping')
    for field in ['atoms', 'states', 'initial', 'accepting', 'transitions']:
        if field not in doc:
            raise NbaFormatError(f'Missing field {field}')
        if not isinstance(doc[field], list):
            raise NbaFormatError(f'Field {field} must be a list')
    try:
        universe = AtomSet(doc['atoms'])
    except ValueError as e:
        raise NbaFormatError(f'atoms: {e}')
    names = [str(s) for s in doc['states']]
    if len(set(names)) != len(names):
        raise NbaFormatError('states: duplicate state ids')
    idx = {s: i for i, s in enumerate(names)}

    def lookup(path, s):
        try:
            return idx[str(s)]
        except KeyError:
            raise NbaFormatError(f'{path}: dangling state reference {s!r}')

    initial = [lookup(f'initial[{i}]', s) for i, s in enumerate(doc['initial'])]
    accepting = [lookup(f'accepting[{i}]', s) for i, s in enumerate(doc['accepting'])]
    trans = {}
    for i, t in enumerate(doc['transitions']):
        if not isinstance(t, dict):
            raise NbaFormatError(f'transitions[{i}] must be a mapping')
        for field in ['from', 'to', 'labels']:
            if field not in t:
                raise NbaFormatError(f'transitions[{i}]: missing field {field}')
        s = lookup(f'transitions[{i}].from', t['from'])
        u = lookup(f'transitions[{i}].to', t['to'])
        masks = set()
        for j, l in enumerate(t['labels']):
            try:
                masks.add(universe.mask(l))
            except (KeyError, TypeError) as e:
                raise NbaFormatError(f'transitions[{i}].labels[{j}]: {e}')
        trans[(s, u)] = trans.get((s, u), frozenset()) | masks
    ans = Nba(universe, len(names), initial, accepting, trans, names)
    if atoms is not None:
        ans = ans.with_atoms(atoms)
    return ans


def export_nba(b, path=None):
    """
    Interchange document for ``b``; written as JSON when ``path`` is given.
    """
    doc = b.to_dict()
    if path is not None:
        Path(path).write_text(json.dumps(doc, indent=2), encoding='utf-8')
    return doc


def from_hoa(text, atoms=None):
    """
    Build an Nba from an automaton in the HOA state-based-acceptance subset.

    :param text: HOA text or Path
    :param atoms: optional larger atom universe
    """
    parsed = parse_hoa(text)
    headers = parsed['headers']
    ap = headers.get('AP', [[0]])[0][1:]
    universe = AtomSet(ap)
    acc = headers.get('Acceptance', [[1, 'Inf(0)']])[0]
    if acc == [0, 't']:
        all_accept = True
    elif acc == [1, 'Inf(0)']:
        all_accept = False
    else:
        raise NbaFormatError(f'Unsupported acceptance condition {acc}, only Buchi (1 Inf(0)) or 0 t')
    starts = []
    for v in headers.get('Start', []):
        if len(v) != 1 or not isinstance(v[0], int):
            raise NbaFormatError(f'Unsupported Start line {v}')
        starts.append(v[0])
    ids = sorted({s for s, _, _ in parsed['states']} | {t for _, _, edges in parsed['states'] for _, t in edges}
                 | set(starts))
    declared = headers.get('States', [[len(ids)]])[0][0]
    if ids and (ids[-1] >= declared or ids[0] < 0):
        raise NbaFormatError(f'State ids {ids} outside 0..{declared - 1}')
    n = declared
    accepting = set(range(n)) if all_accept else {s for s, a, _ in parsed['states'] if 0 in a}
    trans = {}
    for s, _, edges in parsed['states']:
        for label, t in edges:
            trans[(s, t)] = trans.get((s, t), frozenset()) | frozenset(_masks_of(label, universe))
    ans = Nba(universe, n, starts, accepting, trans)
    if atoms is not None:
        ans = ans.with_atoms(atoms)
    return ans


def read_nba(path, atoms=None):
    """ Read an automaton file: ``.hoa`` files as HOA, anything else as JSON interchange. """
    path = Path(path)
    if path.suffix.lower() == '.hoa':
        return from_hoa(path, atoms)
    return import_nba(path, atoms)


def nba_accepts_lasso(b, w):
    """
    True iff some run of ``b`` over ``prefix . cycle^omega`` visits an accepting state
    infinitely often: in the product of the lasso positions with the automaton states,
    an accepting node reachable from an initial node lies on a cycle.

    :param b: Nba
    :param w: LassoWord over atoms of ``b``
    """
    letters = [b.atoms.mask(l) for l in w.letters]
    succ = w.successor
    npos, n = len(letters), b.n_states
    src, dst = [], []
    for i, m in enumerate(letters):
        on = b.enabled(m)
        src.append(i * n + b.edge_src[on])
        dst.append(succ[i] * n + b.edge_dst[on])
    src = np.concatenate(src) if src else np.zeros(0, np.int64)
    dst = np.concatenate(dst) if dst else np.zeros(0, np.int64)
    adj = topology(npos * n, src, dst)
    reach = reachable_from(adj, sorted(b.initial))
    acc = np.zeros(npos * n, dtype=bool)
    for s in b.accepting:
        acc[s::n] = True
    return bool(np.any(reach & acc & on_cycle(adj)))
