import collections
import unittest

import glc
from glc.generator import (
    CONSTRUCTS,
    DEFAULT_WEIGHTS,
    GenConfig,
    gen_program,
    gen_program_with_coverage,
)
from glc.printer import pretty_program
from glc.syntax import ExcContext, Fun, Nat, One, Zero, alpha_equal, free_vars


class TestGenConfig(unittest.TestCase):
    def test_function_result_rejected(self):
        with self.assertRaises(ValueError):
            GenConfig(result_type=Fun(Nat(), ExcContext(), Nat()))

    def test_weights_validated(self):
        with self.assertRaises(ValueError):
            GenConfig(weights={"ret": 0})
        with self.assertRaises(ValueError):
            GenConfig(weights={"ret": 1, "while": 2})


class TestGenerator(unittest.TestCase):
    def test_deterministic(self):
        first = gen_program(GenConfig(seed=5))
        second = gen_program(GenConfig(seed=5))
        self.assertEqual(pretty_program(first.program), pretty_program(second.program))

    def test_programs_check(self):
        for seed in range(30):
            with self.subTest(seed=seed):
                typed = gen_program(GenConfig(seed=seed, max_depth=5))
                self.assertEqual(free_vars(typed.main), set())
                self.assertEqual(glc.verify_derivation(typed), [])

    def test_requested_result_type(self):
        for seed in range(10):
            with self.subTest(seed=seed):
                typed = gen_program(GenConfig(seed=seed, result_type=One()))
                self.assertIn(typed.result_type, (One(), Zero()))

    def test_printed_programs_parse_back(self):
        for seed in range(20):
            with self.subTest(seed=seed):
                typed = gen_program(GenConfig(seed=seed))
                reparsed = glc.parse_program(pretty_program(typed.program))
                self.assertTrue(alpha_equal(typed.main, reparsed.main))
                self.assertEqual(glc.check_program(reparsed).result_type, typed.result_type)

    def test_coverage(self):
        weights = dict(DEFAULT_WEIGHTS, **{"lambda": 1})
        coverage = collections.Counter()
        for seed in range(200):
            _, used = gen_program_with_coverage(GenConfig(seed=seed, weights=weights))
            coverage.update(used)
        self.assertEqual([name for name in CONSTRUCTS if not coverage[name]], [])


if __name__ == "__main__":
    unittest.main()
