import os
import unittest

import glc
from glc.exceptions import GlcSyntaxError
from glc.printer import pretty_program, pretty_type
from glc.syntax import (
    WILDCARD,
    Case,
    Do,
    ExcContext,
    ExcEntry,
    Fun,
    GCase,
    HandleIt,
    Init,
    Inl,
    Nat,
    One,
    Pair,
    Prod,
    Ret,
    Star,
    Sum,
    Tag,
    Var,
    alpha_equal,
    free_vars,
    numeral,
    numeral_value,
    replace_subterm,
    strip_annotations,
    substitute,
    subterm_at,
    subterms,
)

ASSETS = os.path.join(os.path.dirname(__file__), "assets")


def read_asset(name: str) -> str:
    with open(os.path.join(ASSETS, name), "r", encoding="utf-8") as fin:
        return fin.read()


class TestParser(unittest.TestCase):
    def test_parse_numeral(self):
        self.assertEqual(numeral_value(glc.parse_value("3")), 3)
        self.assertEqual(glc.parse_value("succ(zero)"), numeral(1))

    def test_parse_ascribed_injection(self):
        value = glc.parse_value("(inl * : 1 + N)")
        self.assertEqual(value, Inl(Star(), Sum(One(), Nat())))

    def test_parse_types(self):
        self.assertEqual(glc.parse_type("N * N + 1"), Sum(Prod(Nat(), Nat()), One()))
        self.assertEqual(
            glc.parse_type("N -[e:1^g]> N"),
            Fun(Nat(), ExcContext((ExcEntry("e", One(), Tag.G),)), Nat()),
        )

    def test_parse_countdown(self):
        program = glc.parse_program(read_asset("countdown.gml"))
        self.assertIsInstance(program.main, HandleIt)
        self.assertEqual(program.main.exc, "e")
        self.assertEqual(program.main.var, "x")
        self.assertEqual(numeral_value(program.main.init), 3)
        self.assertEqual(len(program.exc_context), 0)

    def test_parse_declarations(self):
        program = glc.parse_program(read_asset("guess.gml"))
        self.assertEqual(
            sorted(program.effect_signature()), ["print", "rand", "read"]
        )
        self.assertEqual(
            sorted(program.value_signature()), ["answer", "eq42", "eqN", "think"]
        )

    def test_syntax_error_position(self):
        with self.assertRaises(GlcSyntaxError) as context:
            glc.parse_program("do x <- ret 1;\nret")
        self.assertEqual(context.exception.line, 2)
        self.assertIn("*", context.exception.expected)

    def test_redeclared_builtin(self):
        with self.assertRaises(GlcSyntaxError):
            glc.parse_program("effect put : N -> 0[1]\nret *")

    def test_exception_context_header(self):
        program = glc.parse_program("exceptions e:N^u, f:1^g\nraise_e 0")
        self.assertEqual(program.exc_context.names(), ("e", "f"))
        self.assertEqual(program.exc_context.lookup("f").tag, Tag.G)


class TestDesugar(unittest.TestCase):
    def test_guard(self):
        comp = glc.parse_computation("put(0) & ret *")
        self.assertIsInstance(comp, GCase)
        self.assertIsInstance(comp.left, Init)
        self.assertEqual(comp.right_var, WILDCARD)
        self.assertEqual(comp.right, Ret(Star()))

    def test_effect_without_guarded_result(self):
        comp = glc.parse_computation("pred(2)")
        self.assertIsInstance(comp, GCase)
        self.assertIsInstance(comp.left, Ret)
        self.assertIsInstance(comp.right, Init)

    def test_effect_without_result(self):
        comp = glc.parse_computation("put(2)")
        self.assertIsInstance(comp.left, Init)
        self.assertIsInstance(comp.right, Ret)

    def test_if(self):
        comp = glc.parse_computation("if (inl * : 1 + 1) then ret 0 else ret 1")
        self.assertIsInstance(comp, Case)
        self.assertEqual(comp.left, Ret(numeral(0)))
        self.assertEqual(comp.right, Ret(numeral(1)))

    def test_sequence(self):
        comp = glc.parse_computation("do put(1); ret *")
        self.assertIsInstance(comp, Do)
        self.assertEqual(comp.var, WILDCARD)

    def test_core_terms_unchanged(self):
        comp = glc.parse_computation("do x <- ret 1; ret x", desugared=False)
        self.assertEqual(glc.desugar(comp), comp)


class TestPrinter(unittest.TestCase):
    def test_pretty_types(self):
        self.assertEqual(pretty_type(Sum(One(), Prod(Nat(), Nat()))), "1 + N * N")
        self.assertEqual(pretty_type(Prod(Sum(One(), Nat()), Nat())), "(1 + N) * N")

    def test_pretty_values(self):
        self.assertEqual(glc.pretty(numeral(2)), "2")
        self.assertEqual(glc.pretty(Pair(Star(), Inl(numeral(0)))), "(*, inl 0)")

    def test_round_trip_assets(self):
        for name in ("countdown.gml", "loop.gml", "guess.gml"):
            with self.subTest(asset=name):
                for desugared in (False, True):
                    program = glc.parse_program(read_asset(name), desugared=desugared)
                    reparsed = glc.parse_program(pretty_program(program), desugared=False)
                    self.assertTrue(alpha_equal(program.main, reparsed.main))
                    self.assertEqual(program.declarations, reparsed.declarations)


class TestTerms(unittest.TestCase):
    def test_free_vars(self):
        comp = glc.parse_computation("do x <- ret y; ret (x, z)", desugared=False)
        self.assertEqual(free_vars(comp), {"y", "z"})

    def test_substitute_avoids_capture(self):
        comp = Do("y", Ret(Var("x")), Ret(Pair(Var("x"), Var("y"))))
        result = substitute(comp, {"x": Var("y")})
        self.assertEqual(free_vars(result), {"y"})
        self.assertNotEqual(result.var, "y")
        self.assertTrue(
            alpha_equal(result, Do("z", Ret(Var("y")), Ret(Pair(Var("y"), Var("z")))))
        )

    def test_substitute_respects_shadowing(self):
        comp = Do("x", Ret(Var("x")), Ret(Var("x")))
        result = substitute(comp, {"x": numeral(1)})
        self.assertEqual(result, Do("x", Ret(numeral(1)), Ret(Var("x"))))

    def test_alpha_equal(self):
        first = glc.parse_computation("do a <- ret 1; ret a", desugared=False)
        second = glc.parse_computation("do b <- ret 1; ret b", desugared=False)
        third = glc.parse_computation("do b <- ret 1; ret 1", desugared=False)
        self.assertTrue(alpha_equal(first, second))
        self.assertFalse(alpha_equal(first, third))

    def test_strip_annotations(self):
        self.assertEqual(
            strip_annotations(Inl(Star(), Sum(One(), One()))), Inl(Star())
        )

    def test_subterm_paths(self):
        comp = Do("x", Ret(numeral(1)), Ret(Var("x")))
        paths = dict(subterms(comp))
        self.assertIs(paths[("bound",)], comp.bound)
        self.assertEqual(subterm_at(comp, ("body", "value")), Var("x"))
        replaced = replace_subterm(comp, ("bound",), Ret(numeral(2)))
        self.assertEqual(replaced.bound, Ret(numeral(2)))
        self.assertEqual(comp.bound, Ret(numeral(1)))

    def test_exception_context_shadowing(self):
        delta = ExcContext().extend("e", Nat(), Tag.G).extend("f", One(), Tag.U)
        shadowed = delta.extend("e", One(), Tag.U)
        self.assertEqual(shadowed.names(), ("f", "e"))
        self.assertEqual(shadowed.lookup("e").payload, One())
        self.assertEqual(delta.retagged(Tag.U).lookup("e").tag, Tag.U)


if __name__ == "__main__":
    unittest.main()
