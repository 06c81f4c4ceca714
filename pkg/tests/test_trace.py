import itertools
import random
import unittest

from glc.exceptions import GuardednessFault, NotGuarded, SilentDivergence, StreamExhausted
from glc.monad import INR, FinCarrier, RandomChooser, Table, inl, inr
from glc.trace import (
    TICK,
    Done,
    EventStream,
    Guardedness,
    Out,
    RationalTrace,
    TraceMonad,
    rational_iterate,
    rational_star,
    t_guarded,
    t_iterate,
    t_iterate_strong,
    t_star,
    t_unit,
    take,
)


def stream(*items) -> EventStream:
    return EventStream(iter(items))


def countdown(n):
    if n == 0:
        return stream(Done(inl("done")))
    return stream(Out(n), TICK, Done(inr(n - 1)))


class TestEventStream(unittest.TestCase):
    def test_take_reports_done_after_last_event(self):
        self.assertEqual(take(stream(Out(1), Out(2), Done("v")), 2), ((1, 2), Done("v")))

    def test_take_runs_out_of_fuel(self):
        self.assertEqual(take(stream(Out(1), Out(2), Done("v")), 1), ((1,), None))

    def test_take_skips_ticks(self):
        self.assertEqual(take(stream(TICK, Out(4), TICK, Done(0)), 5), ((4,), Done(0)))

    def test_silent_divergence(self):
        with self.assertRaises(SilentDivergence) as context:
            take(EventStream(itertools.repeat(TICK)), 3, max_silent=10)
        self.assertEqual(context.exception.steps, 10)

    def test_pull_after_done(self):
        unit = t_unit(5)
        self.assertEqual(unit.pull(), Done(5))
        self.assertTrue(unit.finished)
        with self.assertRaises(StreamExhausted):
            unit.pull()

    def test_producer_without_done(self):
        events = stream(Out(1))
        self.assertEqual(events.pull_raw(), Out(1))
        with self.assertRaises(StreamExhausted):
            events.pull_raw()

    def test_star(self):
        result = t_star(lambda v: stream(Out(v), Done(v + 1)), stream(Out(0), Done(1)))
        self.assertEqual(take(result, 10), ((0, 1), Done(2)))


class TestStreamIteration(unittest.TestCase):
    def test_countdown(self):
        self.assertEqual(take(t_iterate(countdown)(3), 10), ((3, 2, 1), Done("done")))

    def test_unguarded_round(self):
        loop = t_iterate(lambda n: stream(Done(inr(n))))
        with self.assertRaises(GuardednessFault) as context:
            take(loop(0), 5)
        self.assertEqual(context.exception.round_number, 1)

    def test_productive_loop(self):
        loop = t_iterate(lambda n: stream(Out(n), Done(inr(n))))
        self.assertEqual(take(loop(7), 4), ((7, 7, 7, 7), None))

    def test_strong_iteration_keeps_context(self):
        def step(state):
            context, n = state
            if n == 0:
                return stream(Done(inl(context)))
            return stream(Out(n), Done(inr(n - 1)))

        self.assertEqual(take(t_iterate_strong(step)(("w", 2)), 5), ((2, 1), Done("w")))

    def test_guardedness_on_inputs(self):
        self.assertEqual(
            t_guarded(countdown, INR, range(1, 4)).kind, Guardedness.GUARDED
        )
        verdict = t_guarded(lambda n: stream(Done(inr(n))), INR, range(3))
        self.assertEqual(verdict.kind, Guardedness.NOT_GUARDED)
        self.assertEqual(verdict.witness, 0)
        verdict = t_guarded(lambda n: EventStream(itertools.repeat(TICK)), INR, [0], fuel=5)
        self.assertEqual(verdict.kind, Guardedness.UNKNOWN)


class TestRationalTrace(unittest.TestCase):
    def test_normalized(self):
        trace = RationalTrace((1, 2, 1, 2), None, (1, 2, 1, 2))
        self.assertEqual(trace.normalized(), RationalTrace((), None, (1, 2)))
        trace = RationalTrace((0, 2), None, (1, 2))
        self.assertEqual(trace.normalized(), RationalTrace((0,), None, (2, 1)))

    def test_expand(self):
        self.assertEqual(RationalTrace((1,), None, (2,)).expand(3), ((1, 2, 2), None))
        self.assertEqual(RationalTrace((1, 2), "v").expand(2), ((1, 2), Done("v")))

    def test_star(self):
        trace = rational_star(lambda v: RationalTrace((v,), v + 1), RationalTrace((0,), 5))
        self.assertEqual(trace, RationalTrace((0, 5), 6))
        infinite = RationalTrace((), None, (1,))
        self.assertEqual(rational_star(lambda v: RationalTrace((), v), infinite), infinite)

    def test_iterate_closes_cycle(self):
        trace = rational_iterate(lambda n: RationalTrace((n,), inr((n + 1) % 3)), 0)
        self.assertEqual(trace, RationalTrace((), None, (0, 1, 2)))

    def test_iterate_finishes(self):
        def step(n):
            return RationalTrace((n,), inl(n) if n == 2 else inr(n + 1))

        self.assertEqual(rational_iterate(step, 0), RationalTrace((0, 1, 2), 2))

    def test_iterate_unguarded(self):
        with self.assertRaises(GuardednessFault):
            rational_iterate(lambda n: RationalTrace((), inr(n)), 0)

    def test_str(self):
        self.assertEqual(str(RationalTrace((1,), None, (2, 3))), "<1; (2, 3)^w>")
        self.assertEqual(str(RationalTrace((1, 2), 0)), "(0, <1, 2>)")


class TestTraceMonad(unittest.TestCase):
    def test_equal_up_to_unrolling(self):
        instance = TraceMonad()
        self.assertTrue(
            instance.equal(
                RationalTrace((), None, (1, 2)), RationalTrace((1,), None, (2, 1)), 0
            )
        )
        self.assertFalse(
            instance.equal(RationalTrace((1,), None, (2,)), RationalTrace((), None, (2,)), 0)
        )

    def test_iterate_rejects_unguarded(self):
        table = Table(
            FinCarrier.range(1),
            FinCarrier.sum(FinCarrier.range(1), FinCarrier.range(1)),
            ((0, RationalTrace((), inr(0))),),
        )
        with self.assertRaises(NotGuarded):
            TraceMonad().iterate(table)

    def test_iterate_matches_stream_unfolding(self):
        instance = TraceMonad()
        chooser = RandomChooser(random.Random(11))
        domain = FinCarrier.range(3)
        codomain = FinCarrier.sum(FinCarrier.range(2), domain)
        for _ in range(40):
            table = instance.draw_table(chooser, domain, codomain, INR)
            result = instance.iterate(table)
            oracle = instance.oracle_iterate(table, 12)
            for x in domain:
                self.assertEqual(instance.observe(result(x), 12), oracle[x])


if __name__ == "__main__":
    unittest.main()
