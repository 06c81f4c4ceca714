import os
import unittest
from dataclasses import replace

import glc
from glc.denotational import denote_comp
from glc.generator import GenConfig, gen_program
from glc.harness import (
    Agree,
    Disagree,
    Observation,
    adequacy_check,
    canonical_value,
    observe,
    run_adequacy_suite,
    shrink,
    substitution_agrees,
)
from glc.mutants import MUTANTS, DropPut, HandleItOffByOne, SwapDo
from glc.operational import Limits, evaluate
from glc.printer import pretty_program
from glc.syntax import (
    Case,
    Do,
    Inr,
    Nat,
    One,
    Pair,
    Prod,
    Ret,
    Star,
    Sum,
    Var,
    Zero,
    numeral,
    subterms,
)

ASSETS = os.path.join(os.path.dirname(__file__), "assets")
QUICK = os.environ.get("GLC_QUICK_TESTS") == "1"
CORPUS = GenConfig(seed=42, max_depth=8)
SWAP_WITNESS = "handle e:N in { do y <- raise_e 3; ret 7 } with x => ret x"


def read_asset(name: str) -> str:
    with open(os.path.join(ASSETS, name), "r", encoding="utf-8") as fin:
        return fin.read()


def checked(text: str) -> glc.TypedProgram:
    return glc.check_program(glc.parse_program(text))


class TestObserve(unittest.TestCase):
    def test_both_sides(self):
        typed = checked(read_asset("countdown.gml"))
        expected = Observation((2, 1, 0), "ret", None, "*")
        self.assertEqual(observe(evaluate(typed.main), 10), expected)
        self.assertEqual(observe(denote_comp(typed.main), 10, typed.result_type), expected)
        self.assertEqual(str(expected), "[2, 1, 0] ret *")

    def test_raise(self):
        typed = checked("exceptions e:N^u\nput(4) & raise_e 5")
        observation = observe(denote_comp(typed.main), 10, typed.result_type, typed.delta)
        self.assertEqual(observation.terminal_text(), "raise e 5")
        self.assertEqual(
            observation.to_dict(),
            {"events": [{"out": 4}, {"raise": "e", "value": "5"}]},
        )

    def test_pending(self):
        typed = checked(read_asset("loop.gml"))
        observation = observe(evaluate(typed.main, Limits(max_events=3)), 3)
        self.assertEqual(observation, Observation((0, 0, 0), "pending"))
        self.assertEqual(observation.to_dict()["events"][-1], {"pending": True})

    def test_error(self):
        observation = observe(evaluate(Ret(Var("x"))), 3)
        self.assertEqual(observation.kind, "error")
        self.assertEqual(observation.exc, "StuckTerm")
        self.assertEqual(observation.terminal_item()["error"], "StuckTerm")


class TestAdequacy(unittest.TestCase):
    def test_assets_agree(self):
        for name in ("countdown.gml", "loop.gml"):
            with self.subTest(asset=name):
                verdict = adequacy_check(checked(read_asset(name)), fuel=8)
                self.assertIsInstance(verdict, Agree)
                self.assertTrue(verdict.agreed)

    def test_function_result_rejected(self):
        with self.assertRaises(ValueError):
            adequacy_check(checked("ret (fun (x:N)[] => ret x)"))

    def test_mutants_disagree(self):
        witnesses = {
            "drop-put": read_asset("countdown.gml"),
            "swap-do": SWAP_WITNESS,
            "handleit-off-by-one": read_asset("countdown.gml"),
        }
        for name, evaluator in MUTANTS.items():
            with self.subTest(mutant=name):
                verdict = adequacy_check(checked(witnesses[name]), evaluator_class=evaluator)
                self.assertIsInstance(verdict, Disagree)
                self.assertTrue(verdict.detail)

    def test_off_by_one_events(self):
        verdict = adequacy_check(
            checked(read_asset("countdown.gml")), evaluator_class=HandleItOffByOne
        )
        self.assertEqual(verdict.operational.events, (2, 2, 1, 0))
        self.assertEqual(verdict.denotational.events, (2, 1, 0))

    def test_shrink_keeps_disagreement(self):
        typed = checked(SWAP_WITNESS)

        def disagrees(candidate):
            return not adequacy_check(candidate, evaluator_class=SwapDo).agreed

        shrunk = shrink(typed, disagrees)
        self.assertTrue(disagrees(shrunk))
        self.assertEqual(glc.verify_derivation(shrunk), [])
        self.assertLessEqual(
            len(glc.pretty(shrunk.main)), len(glc.pretty(typed.main))
        )

    def test_shrink_inlines_returned_values(self):
        typed = checked(
            "handle e:N in { do a <- ret 2; do b <- ret (a, 1); do y <- raise_e a; ret 7 }"
            " with x => ret x"
        )

        def disagrees(candidate):
            return not adequacy_check(candidate, evaluator_class=SwapDo).agreed

        shrunk = shrink(typed, disagrees)
        self.assertTrue(disagrees(shrunk))
        returned = [
            node
            for _, node in subterms(shrunk.main)
            if isinstance(node, Do) and isinstance(node.bound, Ret)
        ]
        self.assertEqual(returned, [])

    def test_shrink_takes_known_branch(self):
        typed = checked(
            "handle e:N in { case (inl 1 : N + N) of"
            " inl a => { do y <- raise_e a; ret 7 } | inr b => ret b } with x => ret x"
        )

        def disagrees(candidate):
            return not adequacy_check(candidate, evaluator_class=SwapDo).agreed

        shrunk = shrink(typed, disagrees)
        self.assertTrue(disagrees(shrunk))
        self.assertFalse(any(isinstance(node, Case) for _, node in subterms(shrunk.main)))

    def test_canonical_value(self):
        self.assertEqual(canonical_value(Nat()), numeral(0))
        self.assertEqual(canonical_value(Sum(Zero(), One())), Inr(Star(), Sum(Zero(), One())))
        self.assertEqual(canonical_value(Prod(Nat(), One())), Pair(numeral(0), Star()))
        self.assertIsNone(canonical_value(Zero()))

    def test_substitution(self):
        comp = glc.parse_computation("put(x) & ret succ(x)")
        self.assertTrue(substitution_agrees(comp, "x", numeral(2), Nat()))


class TestSuite(unittest.TestCase):
    def test_empty(self):
        report = run_adequacy_suite(GenConfig(seed=0), 0)
        self.assertTrue(report.passed)
        self.assertEqual(report.to_dict(), {"total": 0, "agreed": 0, "disagreed": []})

    def test_reference_evaluator_agrees(self):
        report = run_adequacy_suite(GenConfig(seed=100, max_depth=5), 30, fuel=16)
        self.assertEqual(report.agreed, 30)
        self.assertTrue(report.passed)
        self.assertGreater(sum(report.coverage.values()), 0)

    def test_drop_put_is_caught(self):
        report = run_adequacy_suite(
            GenConfig(seed=0, max_depth=6), 40, fuel=16, evaluator_class=DropPut, threads=1
        )
        self.assertFalse(report.passed)
        seeds = [disagreement.seed for disagreement in report.disagreements]
        self.assertEqual(seeds, sorted(seeds))
        witness = report.disagreements[0]
        typed = checked(witness.program)
        self.assertFalse(adequacy_check(typed, 16, evaluator_class=DropPut).agreed)
        self.assertEqual(witness.to_dict()["seed"], witness.seed)

    def test_unshrunk_witnesses(self):
        config = GenConfig(seed=0, max_depth=6)
        report = run_adequacy_suite(
            config, 40, fuel=16, evaluator_class=DropPut, threads=1, shrink_witnesses=False
        )
        self.assertFalse(report.passed)
        witness = report.disagreements[0]
        generated = gen_program(replace(config, seed=witness.seed))
        self.assertEqual(witness.program, pretty_program(generated.program))


@unittest.skipIf(QUICK, "acceptance-scale run, unset GLC_QUICK_TESTS to enable")
class TestAcceptance(unittest.TestCase):
    def test_corpus_agrees(self):
        report = run_adequacy_suite(CORPUS, 500, fuel=64)
        self.assertEqual(report.agreed, 500)
        self.assertEqual(report.disagreements, [])

    def test_mutants_are_caught_on_corpus(self):
        for name, evaluator in MUTANTS.items():
            with self.subTest(mutant=name):
                report = run_adequacy_suite(
                    CORPUS, 500, fuel=64, evaluator_class=evaluator, shrink_witnesses=False
                )
                self.assertGreaterEqual(len(report.disagreements), 1)

    def test_corpus_is_productive(self):
        limits = Limits(64, 100000)
        for seed in range(CORPUS.seed, CORPUS.seed + 500):
            typed = gen_program(replace(CORPUS, seed=seed))
            stream = evaluate(typed.main, limits, typed.program.declarations)
            observation = observe(stream, 64)
            self.assertNotEqual(observation.kind, "error", f"seed {seed}: {observation}")


if __name__ == "__main__":
    unittest.main()
