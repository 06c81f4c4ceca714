import itertools
import os
import random
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from glc.exceptions import NotGuarded
from glc.monad import INR, ONE, FinCarrier, RandomChooser, Table, copair, inl, inr
from glc.powerset import (
    NonEmptyPowersetMonad,
    PowersetMonad,
    p_iterate,
    pplus_guarded,
    pplus_iterate,
    reachable_iterate,
    subsets,
)

QUICK = os.environ.get("GLC_QUICK_TESTS") == "1"
SINGLE_SUM = FinCarrier.sum(ONE, ONE)


@st.composite
def loop_tables(draw):
    outputs = FinCarrier.range(draw(st.integers(min_value=1, max_value=3)))
    states = FinCarrier.range(draw(st.integers(min_value=1, max_value=4)))
    codomain = FinCarrier.sum(outputs, states)
    rows = tuple(
        (x, frozenset(draw(st.lists(st.sampled_from(codomain.elements()), max_size=3))))
        for x in states
    )
    return Table(states, codomain, rows)


class TestPowersetIteration(unittest.TestCase):
    def test_least_fixpoint(self):
        states = FinCarrier.range(3)
        codomain = FinCarrier.sum(FinCarrier.range(2), states)
        table = Table(
            states,
            codomain,
            (
                (0, frozenset({inr(1), inl(0)})),
                (1, frozenset({inr(2)})),
                (2, frozenset({inr(1), inl(1)})),
            ),
        )
        result = p_iterate(table)
        self.assertEqual(result(0), frozenset({0, 1}))
        self.assertEqual(result(1), frozenset({1}))
        self.assertEqual(result(2), frozenset({1}))

    def test_silent_loop_is_empty(self):
        table = Table(ONE, SINGLE_SUM, ((0, frozenset({inr(0)})),))
        self.assertEqual(p_iterate(table)(0), frozenset())

    @settings(max_examples=60, deadline=None)
    @given(loop_tables())
    def test_agrees_with_reachability(self, table):
        self.assertEqual(
            dict(p_iterate(table).items()), dict(reachable_iterate(table).items())
        )

    @settings(max_examples=60, deadline=None)
    @given(loop_tables())
    def test_fixpoint_equation(self, table):
        instance = PowersetMonad()
        result = p_iterate(table)
        for x in table.domain:
            unfolded = instance.star(copair(instance.unit, result), table(x))
            self.assertEqual(result(x), unfolded)


class TestNonEmptyPowerset(unittest.TestCase):
    def test_rejects_unguarded(self):
        table = Table(ONE, SINGLE_SUM, ((0, frozenset({inr(0)})),))
        self.assertFalse(pplus_guarded(table))
        with self.assertRaises(NotGuarded) as context:
            pplus_iterate(table)
        self.assertEqual(context.exception.witness, 0)

    def test_guarded(self):
        table = Table(ONE, SINGLE_SUM, ((0, frozenset({inl(0), inr(0)})),))
        self.assertTrue(pplus_guarded(table))
        self.assertEqual(pplus_iterate(table)(0), frozenset({0}))

    def test_draw_guarded_elements(self):
        instance = NonEmptyPowersetMonad()
        chooser = RandomChooser(random.Random(7))
        codomain = FinCarrier.sum(FinCarrier.range(2), FinCarrier.range(3))
        for _ in range(30):
            table = instance.draw_table(chooser, FinCarrier.range(3), codomain, INR)
            self.assertTrue(instance.is_guarded(table, INR))
            for x, subset in instance.iterate(table).items():
                self.assertTrue(subset)

    def test_every_morphism_guarded_in_powerset(self):
        table = Table(ONE, SINGLE_SUM, ((0, frozenset()),))
        self.assertTrue(PowersetMonad().is_guarded(table, INR))


@unittest.skipIf(QUICK, "acceptance-scale run, unset GLC_QUICK_TESTS to enable")
class TestAcceptance(unittest.TestCase):
    def test_guarded_tables_never_iterate_to_empty(self):
        guarded = 0
        for size, outputs in itertools.product(range(1, 4), repeat=2):
            states = FinCarrier.range(size)
            codomain = FinCarrier.sum(FinCarrier.range(outputs), states)
            for rows in itertools.product(subsets(codomain), repeat=size):
                table = Table(states, codomain, tuple(zip(states.elements(), rows)))
                if not pplus_guarded(table):
                    continue
                guarded += 1
                for x, subset in pplus_iterate(table).items():
                    self.assertTrue(subset, f"empty at {x} for {rows}")
        self.assertGreater(guarded, 0)


if __name__ == "__main__":
    unittest.main()
