"""
Formula and HOA parsing.
"""
from unittest import TestCase

from fixtures import random_formula
import numpy as np

from rhcplan import parse_ltl, parse_hoa, grammar, LtlSyntaxError, Atom, Not, And, Or, Next, \
    Eventually, Always, Until, Implies, TRUE, FALSE

a, b, c = Atom('a'), Atom('b'), Atom('c')


class TestParseLtl(TestCase):

    def test_atoms_and_constants(self):
        self.assertEqual(parse_ltl('a'), a)
        self.assertEqual(parse_ltl('true'), TRUE)
        self.assertEqual(parse_ltl('false'), FALSE)

    def test_unary_binds_tighter_than_until(self):
        self.assertEqual(parse_ltl('!a U b'), Until(Not(a), b))
        self.assertEqual(parse_ltl('[]<> a && b'), And(Always(Eventually(a)), b))
        self.assertEqual(parse_ltl('X a U b'), Until(Next(a), b))

    def test_and_binds_tighter_than_or(self):
        self.assertEqual(parse_ltl('a || b && c'), Or(a, And(b, c)))
        self.assertEqual(parse_ltl('a & b | c'), Or(And(a, b), c))

    def test_right_associative(self):
        self.assertEqual(parse_ltl('a U b U c'), Until(a, Until(b, c)))
        self.assertEqual(parse_ltl('a -> b -> c'), Implies(a, Implies(b, c)))

    def test_desugar(self):
        self.assertEqual(parse_ltl('a -> b'), Or(Not(a), b))
        self.assertEqual(parse_ltl('a <-> b'), And(Or(Not(a), b), Or(Not(b), a)))

    def test_surveillance_formula(self):
        f = parse_ltl('[]<> Base && [](Base -> X(!Base U Survey))')
        self.assertEqual(f.atoms_used(), ['Base', 'Survey'])
        self.assertEqual(len(f.conjuncts()), 2)

    def test_printed_formula_parses_back(self):
        rng = np.random.default_rng(3)
        for i in range(40):
            with self.subTest(i=i):
                f = random_formula(rng, 4)
                self.assertEqual(parse_ltl(str(f)), f)

    def test_unexpected_end(self):
        with self.assertRaises(LtlSyntaxError) as cm:
            parse_ltl('a &&')
        self.assertEqual(cm.exception.position, 4)

    def test_illegal_character(self):
        with self.assertRaises(LtlSyntaxError) as cm:
            parse_ltl('a $ b')
        self.assertEqual(cm.exception.position, 2)
        self.assertIn('^', str(cm.exception))

    def test_undeclared_atom(self):
        with self.assertRaises(LtlSyntaxError) as cm:
            parse_ltl('[]<> Foo', ['a'])
        self.assertEqual(cm.exception.position, 5)

    def test_empty(self):
        for text in ['', '   ']:
            with self.assertRaises(LtlSyntaxError):
                parse_ltl(text)

    def test_unbalanced(self):
        with self.assertRaises(LtlSyntaxError):
            parse_ltl('(a U b')
        with self.assertRaises(LtlSyntaxError):
            parse_ltl('a U b)')

    def test_grammar_listing(self):
        g = grammar()
        self.assertIn('expr := expr UNTIL expr', g)
        self.assertIn('expr := ALWAYS expr', g)


HOA = """HOA: v1
States: 2
Start: 0
AP: 1 "a"
acc-name: Buchi
Acceptance: 1 Inf(0)
--BODY--
State: 0
[0] 1
[!0] 0
State: 1 {0}
[0] 1
[!0] 0
--END--
"""


class TestParseHoa(TestCase):

    def test_headers_and_states(self):
        h = parse_hoa(HOA)
        self.assertEqual(h['headers']['States'], [[2]])
        self.assertEqual(h['headers']['AP'], [[1, 'a']])
        self.assertEqual(h['headers']['Acceptance'], [[1, 'Inf(0)']])
        self.assertEqual([s for s, _, _ in h['states']], [0, 1])
        self.assertEqual([len(e) for _, _, e in h['states']], [2, 2])

    def test_truncated(self):
        with self.assertRaises(LtlSyntaxError):
            parse_hoa(HOA.replace('--END--\n', ''))
