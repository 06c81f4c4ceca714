"""
Big-step operational evaluator for closed core computations.

Evaluation is substitution based and runs as a generator: output events are yielded
as they happen, the terminal is the generator's return value. This keeps diverging
but productive programs observable event by event.
"""
import logging
from dataclasses import dataclass, field
from typing import Generator, List, Optional, Tuple, Union

from glc.exceptions import GuardednessFault, SilentDivergence, StuckTerm, UninterpretedSymbol
from glc.logger_utils import TqdmLoggingHandler
from glc.primitives import (
    PRIMITIVE_EFFECTS,
    UNIT,
    EffectOutcome,
    PlainInl,
    PlainInr,
    signature_of,
)
from glc.printer import pretty
from glc.syntax import (
    App,
    Case,
    CompTerm,
    Do,
    GCase,
    Handle,
    HandleIt,
    Init,
    Inl,
    Inr,
    Lam,
    Pair,
    PCase,
    Prim,
    Raise,
    Ret,
    Star,
    ValueTerm,
    Var,
    numeral,
    numeral_value,
    substitute,
)
from glc.trace import DEFAULT_FUEL, Done, EventStream, Out

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

DEFAULT_MAX_STEPS = 100000


@dataclass(frozen=True)
class Limits:
    """max_events bounds observation, max_steps the rule applications between events"""

    max_events: Optional[int] = DEFAULT_FUEL
    max_steps: int = DEFAULT_MAX_STEPS


@dataclass(frozen=True)
class RetV:
    value: ValueTerm


@dataclass(frozen=True)
class RaiseV:
    exc: str
    value: ValueTerm


@dataclass(frozen=True)
class Pending:
    """Observation stopped before a terminal was reached"""


PENDING = Pending()

Terminal = Union[RetV, RaiseV, Pending]
Run = Generator[Out, None, Terminal]


@dataclass
class RunReport:
    events: List[int] = field(default_factory=list)
    terminal: Terminal = PENDING
    steps: int = 0
    loop_rounds: int = 0


def payload_value(payload) -> ValueTerm:
    """The value term for an effect payload"""
    if payload == UNIT:
        return Star()
    if isinstance(payload, int):
        return numeral(payload)
    if isinstance(payload, PlainInl):
        return Inl(payload_value(payload.value))
    if isinstance(payload, PlainInr):
        return Inr(payload_value(payload.value))
    raise TypeError(f"not an effect payload: {payload!r}")


class Evaluator:
    """
    Evaluates closed core computations. One instance per evaluation: it carries the
    step and loop counters
    """

    def __init__(self, limits: Limits = Limits(), declarations=()):
        self.limits = limits
        self.values, self.effects = signature_of(declarations)
        self.steps = 0
        self.loop_rounds = 0
        self.events = 0
        self._silent = 0

    def step(self):
        self.steps += 1
        self._silent += 1
        if self._silent > self.limits.max_steps:
            raise SilentDivergence(self._silent - 1)

    def emit(self, event: int) -> Out:
        self.events += 1
        self._silent = 0
        return Out(event)

    def value(self, value: ValueTerm) -> ValueTerm:
        """
        Checks that a value can be inspected at run time

        Raises:
            StuckTerm: on a free variable
            UninterpretedSymbol: on a declared value symbol
        """
        if isinstance(value, Var):
            raise StuckTerm(f"free variable {value.name}")
        if isinstance(value, Prim):
            if value.op not in ("zero", "succ"):
                raise UninterpretedSymbol(f"{value.op} has no run-time meaning")
            self.value(value.arg)
        elif isinstance(value, (Inl, Inr)):
            self.value(value.value)
        elif isinstance(value, Pair):
            self.value(value.first)
            self.value(value.second)
        return value

    def natural(self, value: ValueTerm) -> int:
        number = numeral_value(self.value(value))
        if number is None:
            raise StuckTerm(f"{pretty(value)} is not a numeral")
        return number

    # hooks overridden by the mutants

    def effect_events(self, op: str, outcome: EffectOutcome) -> Tuple[int, ...]:
        return outcome.events

    def continue_do(self, comp: Do, result: Terminal) -> Run:
        if isinstance(result, RetV):
            return (yield from self.run(substitute(comp.body, {comp.var: result.value})))
        return result

    def reenter(self, previous: ValueTerm, payload: ValueTerm, round_number: int) -> ValueTerm:
        return payload

    # rules

    def run(self, comp: CompTerm) -> Run:
        self.step()
        if isinstance(comp, Ret):
            return RetV(self.value(comp.value))
        if isinstance(comp, Raise):
            return RaiseV(comp.exc, self.value(comp.value))
        if isinstance(comp, Init):
            raise StuckTerm("init of a value of type 0")
        if isinstance(comp, Do):
            result = yield from self.run(comp.bound)
            return (yield from self.continue_do(comp, result))
        if isinstance(comp, GCase):
            return (yield from self.run_gcase(comp))
        if isinstance(comp, Case):
            scrutinee = self.value(comp.scrutinee)
            if isinstance(scrutinee, Inl):
                branch = substitute(comp.left, {comp.left_var: scrutinee.value})
                return (yield from self.run(branch))
            if isinstance(scrutinee, Inr):
                branch = substitute(comp.right, {comp.right_var: scrutinee.value})
                return (yield from self.run(branch))
            raise StuckTerm(f"case on {pretty(scrutinee)}")
        if isinstance(comp, PCase):
            scrutinee = self.value(comp.scrutinee)
            if not isinstance(scrutinee, Pair):
                raise StuckTerm(f"pcase on {pretty(scrutinee)}")
            bindings = {comp.first_var: scrutinee.first, comp.second_var: scrutinee.second}
            return (yield from self.run(substitute(comp.body, bindings)))
        if isinstance(comp, Handle):
            result = yield from self.run(comp.body)
            if isinstance(result, RaiseV) and result.exc == comp.exc:
                handler = substitute(comp.handler, {comp.payload_var: result.value})
                return (yield from self.run(handler))
            return result
        if isinstance(comp, HandleIt):
            return (yield from self.run_handleit(comp))
        if isinstance(comp, App):
            fn = self.value(comp.fn)
            if not isinstance(fn, Lam):
                raise StuckTerm(f"application of {pretty(fn)}")
            return (yield from self.run(substitute(fn.body, {fn.param: self.value(comp.arg)})))
        raise StuckTerm(f"no rule for {type(comp).__name__}")

    def run_gcase(self, comp: GCase) -> Run:
        perform = PRIMITIVE_EFFECTS.get(comp.op)
        if perform is None:
            if comp.op in self.effects:
                raise UninterpretedSymbol(f"{comp.op} has no run-time meaning")
            raise StuckTerm(f"unknown effect {comp.op}")
        outcome = perform(self.natural(comp.arg))
        for event in self.effect_events(comp.op, outcome):
            yield self.emit(event)
        payload = payload_value(outcome.payload)
        if outcome.side == 1:
            return (yield from self.run(substitute(comp.left, {comp.left_var: payload})))
        return (yield from self.run(substitute(comp.right, {comp.right_var: payload})))

    def run_handleit(self, comp: HandleIt) -> Run:
        current = self.value(comp.init)
        round_number = 0
        while True:
            round_number += 1
            self.loop_rounds += 1
            before = self.events
            result = yield from self.run(substitute(comp.body, {comp.var: current}))
            if not isinstance(result, RaiseV) or result.exc != comp.exc:
                return result
            if self.events == before:
                raise GuardednessFault(pretty(result.value), round_number)
            current = self.reenter(current, result.value, round_number)
            self.step()

    def stream(self, comp: CompTerm) -> EventStream:
        """
        The events of comp followed by Done(terminal); Done(PENDING) once an event
        beyond limits.max_events would be produced
        """
        max_events = self.limits.max_events

        def produce():
            runner = self.run(comp)
            emitted = 0
            while True:
                try:
                    item = next(runner)
                except StopIteration as stop:
                    yield Done(stop.value)
                    return
                if max_events is not None and emitted >= max_events:
                    runner.close()
                    yield Done(PENDING)
                    return
                emitted += 1
                yield item

        return EventStream(produce())


def evaluate(comp: CompTerm, limits: Limits = Limits(), declarations=()) -> EventStream:
    """
    Evaluates a closed core computation

    Arguments:
        comp (CompTerm): the computation, typically the main term of a checked program
        limits (Limits): observation and silent step bounds
        declarations: the program's declarations, to tell declared symbols from unknown ones

    Returns:
        (EventStream): Out events, then Done with a RetV, RaiseV or PENDING terminal.
            Pulling raises StuckTerm, UninterpretedSymbol, SilentDivergence or
            GuardednessFault, none of which occur for checked closed programs
    """
    return Evaluator(limits, declarations).stream(comp)


def eval_steps_report(
    comp: CompTerm, limits: Limits = Limits(), declarations=(), evaluator_class=Evaluator
) -> RunReport:
    """evaluate(), run to completion, with the evaluator's step and loop round counters"""
    evaluator = evaluator_class(limits, declarations)
    stream = evaluator.stream(comp)
    report = RunReport()
    for item in stream.items():
        if isinstance(item, Done):
            report.terminal = item.value
        elif isinstance(item, Out):
            report.events.append(item.value)
    report.steps = evaluator.steps
    report.loop_rounds = evaluator.loop_rounds
    logger.debug(
        "Evaluation took %i steps and %i loop rounds", report.steps, report.loop_rounds
    )
    return report
