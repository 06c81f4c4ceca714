import os
import unittest

import glc
from glc.exceptions import GuardednessFault, SilentDivergence, StuckTerm, UninterpretedSymbol
from glc.mutants import DropPut, HandleItOffByOne, SwapDo, evaluator_class
from glc.operational import PENDING, Limits, RaiseV, RetV, eval_steps_report, evaluate
from glc.syntax import HandleIt, One, Raise, Ret, Star, Var, numeral
from glc.trace import Done, take

ASSETS = os.path.join(os.path.dirname(__file__), "assets")


def read_asset(name: str) -> str:
    with open(os.path.join(ASSETS, name), "r", encoding="utf-8") as fin:
        return fin.read()


def checked(text: str) -> glc.TypedProgram:
    return glc.check_program(glc.parse_program(text))


def report(text: str, limits: Limits = Limits(), evaluator=None):
    typed = checked(text)
    kwargs = {} if evaluator is None else {"evaluator_class": evaluator}
    return eval_steps_report(typed.main, limits, typed.program.declarations, **kwargs)


class TestEvaluator(unittest.TestCase):
    def test_countdown(self):
        result = report(read_asset("countdown.gml"))
        self.assertEqual(result.events, [2, 1, 0])
        self.assertEqual(result.terminal, RetV(Star()))
        self.assertEqual(result.loop_rounds, 4)

    def test_single_step(self):
        result = report("ret *")
        self.assertEqual(result.steps, 1)
        self.assertEqual(result.terminal, RetV(Star()))

    def test_uncaught_raise(self):
        result = report("exceptions e:N^u\nput(4) & raise_e 5")
        self.assertEqual(result.events, [4])
        self.assertEqual(result.terminal, RaiseV("e", numeral(5)))

    def test_handle(self):
        result = report("handle e:N in raise_e 2 with x => ret succ(x)")
        self.assertEqual(result.terminal, RetV(numeral(3)))

    def test_application(self):
        result = report("do f <- ret (fun (x:N)[] => put(x) & ret x); f 6")
        self.assertEqual(result.events, [6])
        self.assertEqual(result.terminal, RetV(numeral(6)))

    def test_pcase(self):
        result = report("pcase (1, 2) of (a, b) => ret (b, a)")
        self.assertEqual(glc.pretty(result.terminal.value), "(2, 1)")

    def test_pending(self):
        result = report(read_asset("loop.gml"), Limits(max_events=5))
        self.assertEqual(result.events, [0] * 5)
        self.assertIs(result.terminal, PENDING)

    def test_stream_reports_terminal_after_last_event(self):
        typed = checked(read_asset("countdown.gml"))
        self.assertEqual(
            take(evaluate(typed.main, Limits(max_events=3)), 3),
            ((2, 1, 0), Done(RetV(Star()))),
        )

    def test_silent_steps_bounded(self):
        typed = checked(read_asset("countdown.gml"))
        with self.assertRaises(SilentDivergence):
            take(evaluate(typed.main, Limits(max_steps=3)), 10)


class TestRuntimeFaults(unittest.TestCase):
    def test_unguarded_loop(self):
        comp = HandleIt(Star(), "e", One(), "x", Raise("e", Star()))
        with self.assertRaises(GuardednessFault) as context:
            take(evaluate(comp), 5)
        self.assertEqual(context.exception.round_number, 1)

    def test_free_variable(self):
        with self.assertRaises(StuckTerm):
            take(evaluate(Ret(Var("x"))), 5)

    def test_declared_effect(self):
        typed = checked(read_asset("guess.gml"))
        with self.assertRaises(UninterpretedSymbol):
            take(evaluate(typed.main, declarations=typed.program.declarations), 5)


class TestMutants(unittest.TestCase):
    def test_lookup(self):
        self.assertIs(evaluator_class("drop-put"), DropPut)
        with self.assertRaises(KeyError):
            evaluator_class("nothing")

    def test_drop_put(self):
        result = report("put(4) & ret *", evaluator=DropPut)
        self.assertEqual(result.events, [])
        self.assertEqual(result.terminal, RetV(Star()))
        with self.assertRaises(GuardednessFault):
            report(read_asset("countdown.gml"), evaluator=DropPut)

    def test_swap_do(self):
        text = "handle e:N in { do y <- raise_e 3; ret 7 } with x => ret x"
        self.assertEqual(report(text).terminal, RetV(numeral(3)))
        self.assertEqual(report(text, evaluator=SwapDo).terminal, RetV(numeral(7)))

    def test_handleit_off_by_one(self):
        result = report(read_asset("countdown.gml"), evaluator=HandleItOffByOne)
        self.assertEqual(result.events, [2, 2, 1, 0])


if __name__ == "__main__":
    unittest.main()
