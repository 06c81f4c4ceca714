"""
The trace monad TX = (X × N*) ∪ N^ω over output events.

Two representations are provided: EventStream, a pull based lazy stream used by the
evaluators, and RationalTrace, an eventually periodic trace on which unit, Kleisli
lifting and iteration are computed exactly and equality is decidable.
"""
import enum
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, Iterator, Optional, Tuple, Union

from glc.exceptions import GuardednessFault, NotGuarded, SilentDivergence, StreamExhausted
from glc.logger_utils import TqdmLoggingHandler
from glc.monad import (
    INR,
    Chooser,
    FinCarrier,
    GuardedMonad,
    Inj,
    Summand,
    Table,
    dist,
    show,
)

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

DEFAULT_FUEL = 64
DEFAULT_MAX_SILENT = 100000


@dataclass(frozen=True)
class Out:
    """One output event"""

    value: int


@dataclass(frozen=True)
class Done:
    """End of a finite stream, carrying the returned value"""

    value: Any


class Tick:
    """A silent step: the producer made progress without output"""

    def __repr__(self):
        return "Tick"


TICK = Tick()

Item = Union[Out, Done, Tick]


class EventStream:
    """
    A single owner, pull based stream of Out events ending in Done, or never ending.
    Pulling again after Done raises StreamExhausted
    """

    def __init__(self, producer: Iterable[Item]):
        self._producer: Iterator[Item] = iter(producer)
        self._finished = False
        self.pulls = 0

    @classmethod
    def from_rational(cls, trace: "RationalTrace") -> "EventStream":
        def produce():
            for event in trace.prefix:
                yield Out(event)
            if trace.finite:
                yield Done(trace.value)
                return
            while True:
                for event in trace.cycle:
                    yield Out(event)

        return cls(produce())

    @property
    def finished(self) -> bool:
        return self._finished

    def pull_raw(self) -> Item:
        """
        Pulls the next item, silent ticks included

        Raises:
            StreamExhausted: if the stream already delivered Done
        """
        if self._finished:
            raise StreamExhausted("pull from a stream that already finished")
        try:
            item = next(self._producer)
        except StopIteration as err:
            self._finished = True
            raise StreamExhausted("producer stopped without a Done item") from err
        self.pulls += 1
        if isinstance(item, Done):
            self._finished = True
        return item

    def pull(self, fuel: Optional[int] = None) -> Optional[Union[Out, Done]]:
        """
        Pulls the next Out or Done, skipping ticks

        Arguments:
            fuel (int): the most raw pulls to spend, None for no bound

        Returns:
            (Optional[Union[Out, Done]]): the item, or None when fuel ran out first
        """
        spent = 0
        while fuel is None or spent < fuel:
            item = self.pull_raw()
            spent += 1
            if not isinstance(item, Tick):
                return item
        return None

    def items(self) -> Iterator[Item]:
        """Relays every raw item up to and including Done"""
        while True:
            item = self.pull_raw()
            yield item
            if isinstance(item, Done):
                return


def take(
    stream: EventStream, fuel: int, max_silent: int = DEFAULT_MAX_SILENT
) -> Tuple[Tuple[int, ...], Optional[Done]]:
    """
    Observes a stream up to fuel events. A Done directly after the last admitted
    event is still reported

    Arguments:
        stream (EventStream): the stream, consumed
        fuel (int): how many Out events to read at most
        max_silent (int): how many consecutive ticks are tolerated

    Returns:
        (Tuple[Tuple[int, ...], Optional[Done]]): the events read and the Done item,
            None if fuel ran out first

    Raises:
        SilentDivergence: if max_silent ticks pass without an event
    """
    events = []
    while True:
        item = stream.pull(max_silent)
        if item is None:
            raise SilentDivergence(max_silent)
        if isinstance(item, Done):
            return tuple(events), item
        if len(events) == fuel:
            return tuple(events), None
        events.append(item.value)


def t_unit(value) -> EventStream:
    return EventStream(iter((Done(value),)))


def t_star(fn: Callable[[Any], EventStream], stream: EventStream) -> EventStream:
    """fn* : relays stream, then continues with fn of its value if it finishes"""

    def produce():
        for item in stream.items():
            if isinstance(item, Done):
                yield from fn(item.value).items()
                return
            yield item

    return EventStream(produce())


def t_map(fn: Callable, stream: EventStream) -> EventStream:
    def produce():
        for item in stream.items():
            yield Done(fn(item.value)) if isinstance(item, Done) else item

    return EventStream(produce())


def t_strength(context, stream: EventStream) -> EventStream:
    return t_map(lambda value: (context, value), stream)


def t_delta(context, stream: EventStream) -> EventStream:
    return t_map(lambda value: dist((context, value)), stream)


def t_iterate(fn: Callable[[Any], EventStream]) -> Callable[[Any], EventStream]:
    """
    f^† by repeated unfolding: each round relays the events of f(x), Done(inl y)
    finishes with y and Done(inr x') starts the next round at x'

    Arguments:
        fn (Callable): f : X -> stream over Y + X

    Returns:
        (Callable): X -> stream over Y. Pulling it raises GuardednessFault when a
            round re-enters the loop without having emitted an event
    """

    def run(start):
        def produce():
            current = start
            round_number = 0
            while True:
                round_number += 1
                emitted = False
                for item in fn(current).items():
                    if isinstance(item, Done):
                        result = item.value
                        if result.side == 1:
                            yield Done(result.value)
                            return
                        if not emitted:
                            raise GuardednessFault(result.value, round_number)
                        current = result.value
                        yield TICK
                        break
                    if isinstance(item, Out):
                        emitted = True
                    yield item

        return EventStream(produce())

    return run


def t_iterate_strong(fn: Callable[[Any], EventStream]) -> Callable[[Any], EventStream]:
    """f^‡ for f : W × X -> stream over Y + X, keeping W fixed across rounds"""

    def step(state):
        context, _ = state
        return t_map(
            lambda result: result if result.side == 1 else Inj(2, (context, result.value)),
            fn(state),
        )

    return t_iterate(step)


class Guardedness(enum.Enum):
    GUARDED = "guarded"
    NOT_GUARDED = "not-guarded"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class GuardednessVerdict:
    kind: Guardedness
    witness: Any = None


def t_guarded(
    fn: Callable[[Any], EventStream],
    summand: Summand,
    inputs: Iterable[Any],
    fuel: int = DEFAULT_FUEL,
) -> GuardednessVerdict:
    """
    Checks f for summand-guardedness: every tried f(x) must emit an event before
    returning into the summand

    Arguments:
        fn (Callable): f : X -> stream over a coproduct
        summand (Summand): the guarded part of the coproduct
        inputs (Iterable): the inputs to try
        fuel (int): raw pulls allowed per input before giving up

    Returns:
        (GuardednessVerdict): GUARDED, or the first failing input as NOT_GUARDED or
            UNKNOWN
    """
    for x in inputs:
        item = fn(x).pull(fuel)
        if item is None:
            return GuardednessVerdict(Guardedness.UNKNOWN, x)
        if isinstance(item, Done) and summand.contains(item.value):
            return GuardednessVerdict(Guardedness.NOT_GUARDED, x)
    return GuardednessVerdict(Guardedness.GUARDED)


@dataclass(frozen=True)
class RationalTrace:
    """
    An eventually periodic trace: prefix followed by Done(value) when cycle is empty,
    otherwise prefix followed by cycle repeated forever
    """

    prefix: Tuple[int, ...] = ()
    value: Any = None
    cycle: Tuple[int, ...] = ()

    @property
    def finite(self) -> bool:
        return not self.cycle

    def normalized(self) -> "RationalTrace":
        """The canonical form: primitive cycle, shortest prefix"""
        if self.finite:
            return self
        cycle = self.cycle
        for length in range(1, len(cycle) + 1):
            if len(cycle) % length == 0 and cycle[:length] * (len(cycle) // length) == cycle:
                cycle = cycle[:length]
                break
        prefix = self.prefix
        while prefix and prefix[-1] == cycle[-1]:
            prefix = prefix[:-1]
            cycle = cycle[-1:] + cycle[:-1]
        return RationalTrace(prefix, None, cycle)

    def expand(self, fuel: int) -> Tuple[Tuple[int, ...], Optional[Done]]:
        return take(EventStream.from_rational(self), fuel)

    def __str__(self):
        events = ", ".join(str(event) for event in self.prefix)
        if self.finite:
            return f"({show(self.value)}, <{events}>)"
        cycle = ", ".join(str(event) for event in self.cycle)
        return f"<{events}{'; ' if events else ''}({cycle})^w>"


def rational_star(fn: Callable[[Any], RationalTrace], trace: RationalTrace) -> RationalTrace:
    if not trace.finite:
        return trace
    result = fn(trace.value)
    return RationalTrace(trace.prefix + result.prefix, result.value, result.cycle)


def rational_iterate(fn: Callable[[Any], RationalTrace], start) -> RationalTrace:
    """
    f^†(start) on rational traces. A revisited loop state closes the cycle

    Raises:
        GuardednessFault: if a round re-enters the loop with an empty round trace
    """
    visited: Dict[Any, int] = {}
    events: Tuple[int, ...] = ()
    current = start
    round_number = 0
    while True:
        visited[current] = len(events)
        round_number += 1
        trace = fn(current)
        events += trace.prefix
        if not trace.finite:
            return RationalTrace(events, None, trace.cycle)
        result = trace.value
        if result.side == 1:
            return RationalTrace(events, result.value)
        if not trace.prefix:
            raise GuardednessFault(result.value, round_number)
        current = result.value
        if current in visited:
            return RationalTrace(events[: visited[current]], None, events[visited[current] :])


def _element_guarded(trace: RationalTrace, summand: Summand) -> bool:
    return not trace.finite or bool(trace.prefix) or not summand.contains(trace.value)


class TraceMonad(GuardedMonad):
    """The trace monad on rational traces"""

    name = "trace"
    exhaustive = False
    has_oracle = True

    def unit(self, value) -> RationalTrace:
        return RationalTrace((), value)

    def star(self, fn, element: RationalTrace) -> RationalTrace:
        return rational_star(fn, element)

    def is_guarded(self, table: Table, summand: Summand) -> bool:
        return all(_element_guarded(trace, summand) for _, trace in table.items())

    def iterate(self, table: Table) -> Table:
        for x, trace in table.items():
            if not _element_guarded(trace, INR):
                raise NotGuarded(f"f({show(x)}) = {trace} loops back without output", x)
        return Table.build(
            table.domain, table.codomain.left, lambda x: rational_iterate(table, x)
        )

    def equal(self, first: RationalTrace, second: RationalTrace, fuel: int) -> bool:
        return first.normalized() == second.normalized()

    def draw_element(
        self, chooser: Chooser, carrier: FinCarrier, guard: Optional[Summand] = None
    ) -> RationalTrace:
        prefix = tuple(chooser.integer(0, 2) for _ in range(chooser.integer(0, 2)))
        if not len(carrier) or chooser.choose((False, False, False, True)):
            cycle = tuple(chooser.integer(0, 2) for _ in range(chooser.integer(1, 2)))
            return RationalTrace(prefix, None, cycle)
        value = chooser.choose(carrier.elements())
        if guard is not None and guard.contains(value) and not prefix:
            prefix = (chooser.integer(0, 2),)
        return RationalTrace(prefix, value)

    def show(self, element: RationalTrace) -> str:
        return str(element)

    def observe(self, element: RationalTrace, fuel: int):
        return element.expand(fuel)

    def oracle_iterate(self, table: Table, fuel: int) -> Dict[Any, Any]:
        lazy = t_iterate(lambda x: EventStream.from_rational(table(x)))
        return {x: take(lazy(x), fuel) for x in table.domain}
