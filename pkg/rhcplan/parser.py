# Two small languages are handled here with sly:
#
# 1. LTL formulas in the usual tool syntax: [] <> X U && || ! -> <-> ( ) true false
#    and atom identifiers. Unary operators bind tightest, then U (right associative),
#    &&, ||, -> (right associative) and <->. So ``!a U b`` is ``(!a) U b`` and
#    ``[]<> a && b`` is ``([]<> a) && b``.
# 2. The state-based-acceptance subset of the HOA omega-automaton format: explicit
#    labels, one initial state per Start line, Acceptance ``1 Inf(0)`` or ``0 t``.

import logging
from pathlib import Path

from sly import Lexer, Parser
import sly

from .ltl import AtomSet, LtlAst, Atom, Not, And, Or, Next, Eventually, Always, Until, \
    Implies, TRUE, FALSE

logger = logging.getLogger(__name__)


class LtlSyntaxError(ValueError):
    """
    Syntax error in a formula or automaton file; ``position`` is the 0-based character
    offset of the offending token.
    """

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None and text is not None and '\n' not in text:
            message = f'{message} at position {position}\n  {text}\n  {" " * position}^'
        elif position is not None:
            message = f'{message} at position {position}'
        super().__init__(message)


class LtlLexer(Lexer):
    """
    Lexer for LTL formulas. When ``atoms`` is given, identifiers that are not declared
    atoms are rejected.
    """

    tokens = {ID, TRUE, FALSE, NEXT, UNTIL,
              ALWAYS, EVENTUALLY, NOT, AND, OR, IMPLIES, IFF}

    ignore = ' \t\r'
    literals = {'(', ')'}

    # longer tokens first
    IFF = r'<->'
    EVENTUALLY = r'<>'
    IMPLIES = r'->'
    ALWAYS = r'\[\]'
    AND = r'&&?'
    OR = r'\|\|?'
    NOT = r'!'

    keywords = {'X': 'NEXT', 'U': 'UNTIL', 'true': 'TRUE', 'false': 'FALSE'}

    def __init__(self, atoms=None):
        self.atoms = atoms
        self.text = ''

    @_(r'[a-zA-Z_][a-zA-Z0-9_]*')
    def ID(self, t):
        if t.value in self.keywords:
            t.type = self.keywords[t.value]
        elif self.atoms is not None and t.value not in self.atoms:
            raise LtlSyntaxError(f'Undeclared atom {t.value!r}', t.index, self.text)
        return t

    @_(r'\n+')
    def newline(self, t):
        self.lineno += t.value.count('\n')

    def error(self, t):
        raise LtlSyntaxError(f"Illegal character {t.value[0]!r}", t.index, self.text)


class LtlParser(Parser):
    """
    Parser for LTL formulas, producing :class:`LtlAst` trees. Implication and
    equivalence are desugared.
    """

    # uncomment to write detailed grammar rules
    # debugfile = Path.home() / 'rhcplan/parser.out'
    debugfile = None
    tokens = LtlLexer.tokens
    precedence = (
        ('right', IFF),
        ('right', IMPLIES),
        ('left', OR),
        ('left', AND),
        ('right', UNTIL),
        ('right', NOT, NEXT, ALWAYS, EVENTUALLY),
    )

    def __init__(self, debug=False):
        self.debug = debug
        self.text = ''

    def logger(self, msg, p):
        if self.debug is False:
            return
        ans = []
        for k, v in p._namemap.items():
            rhs = p._slice[v]
            if type(rhs) == sly.yacc.YaccSymbol:
                ans.append(f'{k}={rhs.value}')
        logger.info(f'{msg:20s}\t{"; ".join(ans)}')

    @_('expr IFF expr')
    def expr(self, p):
        self.logger('expr <-- expr IFF expr', p)
        return And(Implies(p.expr0, p.expr1), Implies(p.expr1, p.expr0))

    @_('expr IMPLIES expr')
    def expr(self, p):
        self.logger('expr <-- expr IMPLIES expr', p)
        return Implies(p.expr0, p.expr1)

    @_('expr OR expr')
    def expr(self, p):
        self.logger('expr <-- expr OR expr', p)
        return Or(p.expr0, p.expr1)

    @_('expr AND expr')
    def expr(self, p):
        self.logger('expr <-- expr AND expr', p)
        return And(p.expr0, p.expr1)

    @_('expr UNTIL expr')
    def expr(self, p):
        self.logger('expr <-- expr UNTIL expr', p)
        return Until(p.expr0, p.expr1)

    @_('NOT expr')
    def expr(self, p):
        return Not(p.expr)

    @_('NEXT expr')
    def expr(self, p):
        return Next(p.expr)

    @_('ALWAYS expr')
    def expr(self, p):
        return Always(p.expr)

    @_('EVENTUALLY expr')
    def expr(self, p):
        return Eventually(p.expr)

    @_('"(" expr ")"')
    def expr(self, p):
        return p.expr

    @_('ID')
    def expr(self, p):
        return Atom(p.ID)

    @_('TRUE')
    def expr(self, p):
        return TRUE

    @_('FALSE')
    def expr(self, p):
        return FALSE

    def error(self, p):
        if p:
            raise LtlSyntaxError(f'Unexpected {p.value!r}', p.index, self.text)
        else:
            raise LtlSyntaxError('Unexpected end of formula', len(self.text), self.text)


def parse_ltl(text, atoms=None):
    """
    Parse an LTL formula.

    :param text: formula, e.g. ``'[]<> Base && [](Base -> X(!Base U Survey))'``
    :param atoms: AtomSet or iterable of names; identifiers outside it are errors. None
        accepts any identifier.
    :return: LtlAst
    """
    if atoms is not None and not isinstance(atoms, AtomSet):
        atoms = AtomSet(atoms)
    if text is None or text.strip() == '':
        raise LtlSyntaxError('Empty formula', 0, text or '')
    lexer = LtlLexer(atoms)
    parser = LtlParser()
    lexer.text = parser.text = text
    ans = parser.parse(lexer.tokenize(text))
    logger.debug(f'parse_ltl | {text} --> {ans}')
    return ans


class HoaLexer(Lexer):
    """
    Lexer for the HOA subset.
    """

    tokens = {HEADER, STATE, BODY, END, INT, STRING, IDENT}

    ignore = ' \t\r'
    literals = {'[', ']', '{', '}', '(', ')', '!', '&', '|'}
    ignore_comment = r'/\*[^*]*\*+(?:[^/*][^*]*\*+)*/'

    BODY = r'--BODY--'
    END = r'--END--'
    STRING = r'"[^"]*"'
    HEADER = r'[A-Za-z_][A-Za-z0-9_-]*:'
    IDENT = r'[A-Za-z_][A-Za-z0-9_.-]*'
    INT = r'\d+'

    HEADER['State:'] = STATE

    def __init__(self):
        self.text = ''

    @_(r'\n+')
    def newline(self, t):
        self.lineno += t.value.count('\n')

    def error(self, t):
        raise LtlSyntaxError(f"Illegal character {t.value[0]!r} in automaton, line {self.lineno}", t.index)


class HoaParser(Parser):
    """
    Parser for the HOA subset. Returns a dict with ``headers`` (name -> list of values)
    and ``states`` (list of ``(id, accepting_sets, [(label, target), ...])``). Labels
    are propositional :class:`LtlAst` formulas over the AP names.
    """

    debugfile = None
    tokens = HoaLexer.tokens
    precedence = (
        ('left', '|'),
        ('left', '&'),
        ('right', '!'),
    )

    def __init__(self):
        self.ap = []
        self.text = ''

    @_('headers BODY body END')
    def automaton(self, p):
        return {'headers': p.headers, 'states': p.body}

    @_('headers header')
    def headers(self, p):
        name, values = p.header
        p.headers.setdefault(name, []).append(values)
        return p.headers

    @_('header')
    def headers(self, p):
        name, values = p.header
        return {name: [values]}

    @_('HEADER values')
    def header(self, p):
        name = p.HEADER[:-1]
        if name == 'AP':
            if not p.values or not isinstance(p.values[0], int):
                raise LtlSyntaxError('AP header must start with a count', p.index)
            self.ap = [v for v in p.values[1:]]
            if len(self.ap) != p.values[0]:
                raise LtlSyntaxError(f'AP header declares {p.values[0]} names but lists {len(self.ap)}', p.index)
        return name, p.values

    @_('values value')
    def values(self, p):
        return p.values + [p.value]

    @_('')
    def values(self, p):
        return []

    @_('INT')
    def value(self, p):
        return int(p.INT)

    @_('STRING')
    def value(self, p):
        return p.STRING[1:-1]

    @_('IDENT')
    def value(self, p):
        return p.IDENT

    @_('IDENT "(" INT ")"')
    def value(self, p):
        return f'{p.IDENT}({p.INT})'

    @_('body state')
    def body(self, p):
        return p.body + [p.state]

    @_('state')
    def body(self, p):
        return [p.state]

    @_('STATE INT opt_name opt_acc edges')
    def state(self, p):
        return int(p.INT), p.opt_acc, p.edges

    @_('STRING')
    def opt_name(self, p):
        return p.STRING[1:-1]

    @_('')
    def opt_name(self, p):
        return None

    @_('"{" ints "}"')
    def opt_acc(self, p):
        return p.ints

    @_('')
    def opt_acc(self, p):
        return []

    @_('ints INT')
    def ints(self, p):
        return p.ints + [int(p.INT)]

    @_('INT')
    def ints(self, p):
        return [int(p.INT)]

    @_('edges edge')
    def edges(self, p):
        return p.edges + [p.edge]

    @_('')
    def edges(self, p):
        return []

    @_('"[" label "]" INT')
    def edge(self, p):
        return p.label, int(p.INT)

    @_('"[" label "]" INT "{" ints "}"')
    def edge(self, p):
        raise LtlSyntaxError('Transition-based acceptance is not supported', p.index)

    @_('label "|" label')
    def label(self, p):
        return Or(p.label0, p.label1)

    @_('label "&" label')
    def label(self, p):
        return And(p.label0, p.label1)

    @_('"!" label')
    def label(self, p):
        return Not(p.label)

    @_('"(" label ")"')
    def label(self, p):
        return p.label

    @_('INT')
    def label(self, p):
        i = int(p.INT)
        if i >= len(self.ap):
            raise LtlSyntaxError(f'Label refers to AP {i} but only {len(self.ap)} declared', p.index)
        return Atom(self.ap[i])

    @_('IDENT')
    def label(self, p):
        if p.IDENT == 't':
            return TRUE
        if p.IDENT == 'f':
            return FALSE
        raise LtlSyntaxError(f'Unexpected {p.IDENT!r} in label', p.index)

    def error(self, p):
        if p:
            raise LtlSyntaxError(f'Unexpected {p.value!r} in automaton, line {p.lineno}', p.index)
        else:
            raise LtlSyntaxError('Unexpected end of automaton')


def parse_hoa(text):
    """
    Parse an automaton in the HOA subset, see :class:`HoaParser`.

    :param text: file contents or a Path
    """
    if isinstance(text, Path):
        text = text.read_text(encoding='utf-8')
    lexer = HoaLexer()
    parser = HoaParser()
    lexer.text = parser.text = text
    return parser.parse(lexer.tokenize(text))


def grammar():
    """
    Text listing of the LTL grammar rules, read from the decorators in this file.
    """
    txt = Path(__file__).read_text(encoding='utf-8')
    body = txt.split('class LtlParser')[1].split('class HoaLexer')[0]
    rules = [ln.strip()[4:-2] for ln in body.split('\n') if ln.strip().startswith("@_('")]
    return '\n'.join(f'expr := {r}' for r in rules)


if __name__ == '__main__':
    print(grammar())
