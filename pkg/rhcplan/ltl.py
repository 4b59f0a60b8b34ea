"""
Atomic propositions, LTL formula trees and their semantics on ultimately periodic words.

Formulas are immutable :class:`LtlAst` nodes. ``evaluate_word`` decides
``prefix . cycle^omega |= f`` by computing, bottom up, the set of word positions
satisfying each subformula; temporal operators are fixpoints over the lasso's
successor map, where the last position steps back to the start of the cycle.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from .constants import MAX_ATOMS

logger = logging.getLogger(__name__)

# kind -> arity; release only appears after conversion to negation normal form
ARITY = {'atom': 0, 'true': 0, 'false': 0,
         'not': 1, 'next': 1, 'eventually': 1, 'always': 1,
         'and': 2, 'or': 2, 'until': 2, 'release': 2}


class AtomSet(object):
    """
    Ordered set of atomic proposition names. The order fixes the bit position of each
    atom in a label mask: atom ``i`` is bit ``1 << i``.

    :param atoms: iterable of unique names
    """

    def __init__(self, atoms):
        atoms = tuple(atoms)
        if len(set(atoms)) != len(atoms):
            raise ValueError(f'Duplicate atom names in {atoms}')
        if len(atoms) > MAX_ATOMS:
            raise ValueError(f'At most {MAX_ATOMS} atoms supported, {len(atoms)} given')
        for a in atoms:
            if not isinstance(a, str) or not a.isidentifier():
                raise ValueError(f'Atom names must be identifiers, not {a!r}')
        self.atoms = atoms
        self.index = {a: i for i, a in enumerate(atoms)}

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __contains__(self, item):
        return item in self.index

    def __eq__(self, other):
        return isinstance(other, AtomSet) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        return f'AtomSet({list(self.atoms)})'

    @property
    def n_labels(self):
        """ Size of the alphabet 2^atoms. """
        return 1 << len(self.atoms)

    def mask(self, labels):
        """
        Bitmask of a label set.

        :param labels: iterable of atom names
        """
        m = 0
        for a in labels:
            try:
                m |= 1 << self.index[a]
            except KeyError:
                raise KeyError(f'Unknown atom {a!r}, expected one of {list(self.atoms)}')
        return m

    def labels(self, mask):
        """ Label set (frozenset of names) of a bitmask. """
        return frozenset(a for i, a in enumerate(self.atoms) if mask >> i & 1)

    def format(self, mask):
        """ Compact text for a mask, ``{}`` or ``{a,b}``. """
        return '{' + ','.join(a for i, a in enumerate(self.atoms) if mask >> i & 1) + '}'


@dataclass(frozen=True)
class LtlAst:
    """
    LTL formula node. ``name`` is set for atoms only; ``children`` has one entry per
    operand.
    """
    kind: str
    children: tuple = ()
    name: str = None

    def __post_init__(self):
        if self.kind not in ARITY:
            raise ValueError(f'Unknown formula kind {self.kind}')
        if len(self.children) != ARITY[self.kind]:
            raise ValueError(f'{self.kind} takes {ARITY[self.kind]} operands, {len(self.children)} given')
        if (self.kind == 'atom') != (self.name is not None):
            raise ValueError('Only atoms carry a name')

    def __str__(self):
        k = self.kind
        if k == 'atom':
            return self.name
        if k in ('true', 'false'):
            return k
        if k in ('not', 'next', 'eventually', 'always'):
            op = {'not': '!', 'next': 'X ', 'eventually': '<>', 'always': '[]'}[k]
            return f'{op}{self.children[0].bracketed()}'
        op = {'and': '&&', 'or': '||', 'until': 'U', 'release': 'R'}[k]
        return f'{self.children[0].bracketed()} {op} {self.children[1].bracketed()}'

    def bracketed(self):
        s = str(self)
        return s if ARITY[self.kind] < 2 else f'({s})'

    @property
    def left(self):
        return self.children[0]

    @property
    def right(self):
        return self.children[1]

    def conjuncts(self):
        """ Flatten top-level conjunctions, left to right. """
        if self.kind == 'and':
            return self.left.conjuncts() + self.right.conjuncts()
        return [self]

    def atoms_used(self):
        """ Sorted names of the atoms occurring in the formula. """
        if self.kind == 'atom':
            return [self.name]
        out = set()
        for c in self.children:
            out.update(c.atoms_used())
        return sorted(out)

    def depth(self):
        """ Operator nesting depth; atoms and constants have depth 0. """
        return 0 if not self.children else 1 + max(c.depth() for c in self.children)

    def subformulas(self):
        """ All distinct subformulas, children before parents. """
        seen = {}
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if node in seen:
                continue
            if expanded or not node.children:
                seen[node] = None
            else:
                stack.append((node, True))
                stack.extend((c, False) for c in node.children)
        return list(seen)


# constructors
TRUE = LtlAst('true')
FALSE = LtlAst('false')


def Atom(name):
    return LtlAst('atom', name=name)


def Not(f):
    return LtlAst('not', (f,))


def And(f, g):
    return LtlAst('and', (f, g))


def Or(f, g):
    return LtlAst('or', (f, g))


def Next(f):
    return LtlAst('next', (f,))


def Eventually(f):
    return LtlAst('eventually', (f,))


def Always(f):
    return LtlAst('always', (f,))


def Until(f, g):
    return LtlAst('until', (f, g))


def Release(f, g):
    return LtlAst('release', (f, g))


def Implies(f, g):
    return Or(Not(f), g)


def nnf(f, negate=False):
    """
    Negation normal form over and, or, next, until and release, with negation only
    on atoms. Eventually and always become ``true U f`` and ``false R f``.

    :param f: formula
    :param negate: return the normal form of ``!f``
    """
    k = f.kind
    if k == 'atom':
        return Not(f) if negate else f
    if k == 'true':
        return FALSE if negate else TRUE
    if k == 'false':
        return TRUE if negate else FALSE
    if k == 'not':
        return nnf(f.left, not negate)
    if k in ('and', 'or'):
        kk = {'and': 'or', 'or': 'and'}[k] if negate else k
        return LtlAst(kk, (nnf(f.left, negate), nnf(f.right, negate)))
    if k == 'next':
        return Next(nnf(f.left, negate))
    if k == 'eventually':
        return nnf(Until(TRUE, f.left), negate)
    if k == 'always':
        return nnf(Release(FALSE, f.left), negate)
    if k == 'until':
        a, b = nnf(f.left, negate), nnf(f.right, negate)
        return Release(a, b) if negate else Until(a, b)
    if k == 'release':
        a, b = nnf(f.left, negate), nnf(f.right, negate)
        return Until(a, b) if negate else Release(a, b)
    raise ValueError(f'Unknown formula kind {k}')


@dataclass(frozen=True)
class LassoWord:
    """
    Ultimately periodic word ``prefix . cycle^omega``; each letter is a frozenset of
    atom names.
    """
    prefix: tuple = ()
    cycle: tuple = field(default_factory=lambda: (frozenset(),))

    def __post_init__(self):
        if len(self.cycle) < 1:
            raise ValueError('Lasso cycle must contain at least one letter')
        object.__setattr__(self, 'prefix', tuple(frozenset(l) for l in self.prefix))
        object.__setattr__(self, 'cycle', tuple(frozenset(l) for l in self.cycle))

    def __len__(self):
        return len(self.prefix) + len(self.cycle)

    @property
    def letters(self):
        return self.prefix + self.cycle

    @property
    def successor(self):
        """ Position following each position; the last one loops to the cycle start. """
        n = len(self)
        succ = np.arange(1, n + 1)
        succ[-1] = len(self.prefix)
        return succ

    def __str__(self):
        fmt = lambda l: '{' + ','.join(sorted(l)) + '}'
        return ' '.join(map(fmt, self.prefix)) + ' (' + ' '.join(map(fmt, self.cycle)) + ')^w'


def _least(base, extend, succ):
    # least fixpoint of S = base | (extend & S[succ])
    s = base.copy()
    while True:
        t = base | (extend & s[succ])
        if np.array_equal(s, t):
            return s
        s = t


def _greatest(base, extend, succ):
    # greatest fixpoint of S = base & (extend | S[succ])
    s = base.copy()
    while True:
        t = base & (extend | s[succ])
        if np.array_equal(s, t):
            return s
        s = t


def satisfying_positions(f, w):
    """
    Boolean array over the positions of ``w``: entry ``i`` is True iff the suffix of the
    infinite word starting at position ``i`` satisfies ``f``.
    """
    succ = w.successor
    letters = w.letters
    n = len(letters)
    memo = {}

    def sat(g):
        if g in memo:
            return memo[g]
        k = g.kind
        if k == 'atom':
            out = np.array([g.name in l for l in letters], dtype=bool)
        elif k == 'true':
            out = np.ones(n, dtype=bool)
        elif k == 'false':
            out = np.zeros(n, dtype=bool)
        elif k == 'not':
            out = ~sat(g.left)
        elif k == 'and':
            out = sat(g.left) & sat(g.right)
        elif k == 'or':
            out = sat(g.left) | sat(g.right)
        elif k == 'next':
            out = sat(g.left)[succ]
        elif k == 'eventually':
            out = _least(sat(g.left), np.ones(n, dtype=bool), succ)
        elif k == 'always':
            out = _greatest(sat(g.left), np.zeros(n, dtype=bool), succ)
        elif k == 'until':
            out = _least(sat(g.right), sat(g.left), succ)
        elif k == 'release':
            out = _greatest(sat(g.right), sat(g.left), succ)
        else:
            raise ValueError(f'Unknown formula kind {k}')
        memo[g] = out
        return out

    return sat(f)


def evaluate_word(f, w):
    """
    True iff ``prefix . cycle^omega`` satisfies ``f``.

    :param f: LtlAst
    :param w: LassoWord
    """
    return bool(satisfying_positions(f, w)[0])
