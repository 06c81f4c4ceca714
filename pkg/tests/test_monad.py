import random
import unittest

from glc.monad import (
    ONE,
    ExhaustiveChooser,
    FinCarrier,
    RandomChooser,
    Summand,
    Table,
    dist,
    enumerate_choices,
    inl,
    inr,
    iterate_strong,
    show,
)
from glc.powerset import PowersetMonad

TWO = FinCarrier.range(2)


class TestSummand(unittest.TestCase):
    def test_contains(self):
        summand = Summand.parse("12,2")
        self.assertEqual(summand.paths, frozenset({"12", "2"}))
        self.assertTrue(summand.contains(inl(inr(0))))
        self.assertTrue(summand.contains(inr(0)))
        self.assertFalse(summand.contains(inl(inl(0))))
        self.assertFalse(summand.contains(0))

    def test_comparable_paths(self):
        with self.assertRaises(ValueError):
            Summand.parse("1,12")

    def test_bad_path(self):
        with self.assertRaises(ValueError):
            Summand.parse("13")

    def test_complement(self):
        carrier = FinCarrier.sum(FinCarrier.sum(ONE, ONE), ONE)
        complement = Summand.parse("12,2").complement(carrier)
        self.assertEqual(complement.paths, frozenset({"11"}))
        self.assertEqual(Summand.parse("2").complement(carrier).paths, frozenset({"1"}))

    def test_complement_outside_shape(self):
        with self.assertRaises(ValueError):
            Summand.parse("12").complement(FinCarrier.sum(ONE, ONE))


class TestCarrier(unittest.TestCase):
    def test_elements(self):
        carrier = FinCarrier.sum(TWO, ONE)
        self.assertEqual(carrier.elements(), (inl(0), inl(1), inr(0)))
        self.assertEqual(len(FinCarrier.product(TWO, carrier)), 6)
        self.assertIn((1, inr(0)), FinCarrier.product(TWO, carrier))

    def test_negative_size(self):
        with self.assertRaises(ValueError):
            FinCarrier.range(-1)

    def test_partial_table(self):
        with self.assertRaises(ValueError):
            Table(TWO, ONE, ((0, 0),))

    def test_show(self):
        self.assertEqual(show(inl((0, 1))), "inl (0, 1)")
        self.assertEqual(show(inr(inl(()))), "inr (inl *)")
        self.assertEqual(show(frozenset({inr(1), inl(0)})), "{inl 0, inr 1}")

    def test_dist(self):
        self.assertEqual(dist((1, inr(0))), inr((1, 0)))


class TestChoosers(unittest.TestCase):
    @staticmethod
    def dependent(chooser):
        first = chooser.choose((0, 1, 2))
        return first, chooser.choose(range(first + 1))

    def test_exhaustive(self):
        results, exhausted = enumerate_choices(self.dependent, 100)
        self.assertTrue(exhausted)
        self.assertEqual(len(results), 6)
        self.assertEqual(len(set(results)), 6)

    def test_limit(self):
        results, exhausted = enumerate_choices(self.dependent, 4)
        self.assertFalse(exhausted)
        self.assertEqual(results, [(0, 0), (1, 0), (1, 1), (2, 0)])

    def test_empty_options(self):
        with self.assertRaises(ValueError):
            ExhaustiveChooser().choose(())
        with self.assertRaises(ValueError):
            RandomChooser(random.Random(0)).choose(())

    def test_random_integer(self):
        chooser = RandomChooser(random.Random(3))
        for _ in range(20):
            self.assertIn(chooser.integer(2, 4), (2, 3, 4))


class TestStrongIteration(unittest.TestCase):
    def test_threads_context(self):
        instance = PowersetMonad()
        domain = FinCarrier.product(TWO, TWO)
        codomain = FinCarrier.sum(TWO, TWO)
        table = Table.build(
            domain,
            codomain,
            lambda state: frozenset({inr(1)}) if state[1] == 0 else frozenset({inl(state[0])}),
        )
        result = iterate_strong(instance, table)
        for context in range(2):
            self.assertEqual(result((context, 0)), frozenset({context}))
            self.assertEqual(result((context, 1)), frozenset({context}))

    def test_shape(self):
        table = Table.build(TWO, FinCarrier.sum(ONE, TWO), lambda _: frozenset())
        with self.assertRaises(ValueError):
            iterate_strong(PowersetMonad(), table)


if __name__ == "__main__":
    unittest.main()
