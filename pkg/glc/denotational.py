"""
Denotational evaluator over the trace monad.

A computation under Δ denotes a stream whose Done value is inl a for a normal result
or inr Raised(e, a) for a raise of e. Function values are closures; applying one yields
such a stream, whose guarded raises are always preceded by an event.
"""
import logging
from dataclasses import dataclass
from typing import Any, Optional, Union

from glc.exceptions import StuckTerm, UninterpretedSymbol
from glc.logger_utils import TqdmLoggingHandler
from glc.monad import Inj, inl, inr
from glc.primitives import PRIMITIVE_EFFECTS, UNIT, PlainInl, PlainInr, signature_of
from glc.syntax import (
    App,
    Case,
    CompTerm,
    Do,
    Fun,
    GCase,
    Handle,
    HandleIt,
    Init,
    Inl,
    Inr,
    Lam,
    Nat,
    One,
    Pair,
    PCase,
    Prim,
    Prod,
    Raise,
    Ret,
    Star,
    Sum,
    TypeExpr,
    ValueTerm,
    Var,
    numeral,
)
from glc.trace import EventStream, Out, t_iterate, t_map, t_star, t_unit

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False


@dataclass(frozen=True)
class SemNat:
    value: int


@dataclass(frozen=True)
class SemUnit:
    pass


@dataclass(frozen=True)
class SemInl:
    value: "SemValue"


@dataclass(frozen=True)
class SemInr:
    value: "SemValue"


@dataclass(frozen=True)
class SemPair:
    first: "SemValue"
    second: "SemValue"


@dataclass(frozen=True)
class Closure:
    param: str
    body: CompTerm
    env: "Env"


SemValue = Union[SemNat, SemUnit, SemInl, SemInr, SemPair, Closure]


@dataclass(frozen=True)
class Raised:
    """The payload of a raise of exc"""

    exc: str
    value: Any


class Env:
    """A persistent valuation: extend() returns a new environment, the parent is untouched"""

    __slots__ = ("_name", "_value", "_parent")

    def __init__(self, name: Optional[str] = None, value=None, parent: Optional["Env"] = None):
        self._name = name
        self._value = value
        self._parent = parent

    def extend(self, name: str, value: SemValue) -> "Env":
        return Env(name, value, self)

    def lookup(self, name: str) -> SemValue:
        env = self
        while env is not None and env._name is not None:
            if env._name == name:
                return env._value
            env = env._parent
        raise StuckTerm(f"variable {name} has no value")

    def names(self):
        seen = []
        env = self
        while env is not None and env._name is not None:
            if env._name not in seen:
                seen.append(env._name)
            env = env._parent
        return seen


EMPTY_ENV = Env()


class Incomparable:
    """Readback result for values of function type"""

    def __repr__(self):
        return "Incomparable"


INCOMPARABLE = Incomparable()


def _semantic_payload(payload) -> SemValue:
    if payload == UNIT:
        return SemUnit()
    if isinstance(payload, int):
        return SemNat(payload)
    if isinstance(payload, PlainInl):
        return SemInl(_semantic_payload(payload.value))
    if isinstance(payload, PlainInr):
        return SemInr(_semantic_payload(payload.value))
    raise TypeError(f"not an effect payload: {payload!r}")


class Denotation:
    """Interprets core terms of one program, whose declarations it knows about"""

    def __init__(self, declarations=()):
        self.values, self.effects = signature_of(declarations)

    def value(self, value: ValueTerm, env: Env) -> SemValue:
        if isinstance(value, Var):
            return env.lookup(value.name)
        if isinstance(value, Star):
            return SemUnit()
        if isinstance(value, Prim):
            if value.op == "zero":
                self.value(value.arg, env)
                return SemNat(0)
            if value.op == "succ":
                argument = self.value(value.arg, env)
                return SemNat(argument.value + 1)
            raise UninterpretedSymbol(f"{value.op} has no run-time meaning")
        if isinstance(value, Inl):
            return SemInl(self.value(value.value, env))
        if isinstance(value, Inr):
            return SemInr(self.value(value.value, env))
        if isinstance(value, Pair):
            return SemPair(self.value(value.first, env), self.value(value.second, env))
        if isinstance(value, Lam):
            return Closure(value.param, value.body, env)
        raise StuckTerm(f"not a value: {value!r}")

    def comp(self, comp: CompTerm, env: Env) -> EventStream:
        if isinstance(comp, Ret):
            return t_unit(inl(self.value(comp.value, env)))
        if isinstance(comp, Raise):
            return t_unit(inr(Raised(comp.exc, self.value(comp.value, env))))
        if isinstance(comp, Init):
            raise StuckTerm("init of a value of type 0")
        if isinstance(comp, Do):

            def bind(result: Inj) -> EventStream:
                if result.side == 1:
                    return self.comp(comp.body, env.extend(comp.var, result.value))
                return t_unit(result)

            return t_star(bind, self.comp(comp.bound, env))
        if isinstance(comp, GCase):
            return self.gcase(comp, env)
        if isinstance(comp, Case):
            scrutinee = self.value(comp.scrutinee, env)
            if isinstance(scrutinee, SemInl):
                return self.comp(comp.left, env.extend(comp.left_var, scrutinee.value))
            if isinstance(scrutinee, SemInr):
                return self.comp(comp.right, env.extend(comp.right_var, scrutinee.value))
            raise StuckTerm("case on a value that is not an injection")
        if isinstance(comp, PCase):
            scrutinee = self.value(comp.scrutinee, env)
            if not isinstance(scrutinee, SemPair):
                raise StuckTerm("pcase on a value that is not a pair")
            inner = env.extend(comp.first_var, scrutinee.first)
            return self.comp(comp.body, inner.extend(comp.second_var, scrutinee.second))
        if isinstance(comp, Handle):

            def handle(result: Inj) -> EventStream:
                if result.side == 2 and result.value.exc == comp.exc:
                    payload = result.value.value
                    return self.comp(comp.handler, env.extend(comp.payload_var, payload))
                return t_unit(result)

            return t_star(handle, self.comp(comp.body, env))
        if isinstance(comp, HandleIt):
            return self.handleit(comp, env)
        if isinstance(comp, App):
            closure = self.value(comp.fn, env)
            if not isinstance(closure, Closure):
                raise StuckTerm("application of a value that is not a function")
            argument = self.value(comp.arg, env)
            return self.comp(closure.body, closure.env.extend(closure.param, argument))
        raise StuckTerm(f"no denotation for {type(comp).__name__}")

    def gcase(self, comp: GCase, env: Env) -> EventStream:
        perform = PRIMITIVE_EFFECTS.get(comp.op)
        if perform is None:
            if comp.op in self.effects:
                raise UninterpretedSymbol(f"{comp.op} has no run-time meaning")
            raise StuckTerm(f"unknown effect {comp.op}")
        argument = self.value(comp.arg, env)
        outcome = perform(argument.value)
        payload = _semantic_payload(outcome.payload)
        if outcome.side == 1:
            branch, var = comp.left, comp.left_var
        else:
            branch, var = comp.right, comp.right_var

        def produce():
            for event in outcome.events:
                yield Out(event)
            yield from self.comp(branch, env.extend(var, payload)).items()

        return EventStream(produce())

    def handleit(self, comp: HandleIt, env: Env) -> EventStream:
        """
        The loop as f^† for the round f(a) = ⟦body⟧ env[var ↦ a], continuing exactly
        on raises of the handled exception
        """

        def classify(result: Inj) -> Inj:
            if result.side == 2 and result.value.exc == comp.exc:
                return inr(result.value.value)
            return inl(result)

        def round_stream(current: SemValue) -> EventStream:
            return t_map(classify, self.comp(comp.body, env.extend(comp.var, current)))

        return t_iterate(round_stream)(self.value(comp.init, env))


def denote_value(value: ValueTerm, env: Env = EMPTY_ENV, declarations=()) -> SemValue:
    return Denotation(declarations).value(value, env)


def denote_comp(comp: CompTerm, env: Env = EMPTY_ENV, declarations=()) -> EventStream:
    """
    The denotation of a core computation

    Arguments:
        comp (CompTerm): the computation, its free variables bound in env
        env (Env): the valuation
        declarations: the program's declarations, to tell declared symbols from unknown ones

    Returns:
        (EventStream): Out events, then Done(inl a) or Done(inr Raised(e, a)) if the
            computation terminates. Pulling raises GuardednessFault only for
            computations that bypassed the checker
    """
    return Denotation(declarations).comp(comp, env)


def readback(value: SemValue, typ: Optional[TypeExpr] = None) -> Union[ValueTerm, Incomparable]:
    """
    The value term denoting value, inverse to denote_value on first-order types

    Arguments:
        value (SemValue): the semantic value
        typ (TypeExpr): its type, when known; function types read back as INCOMPARABLE

    Returns:
        (Union[ValueTerm, Incomparable]): the canonical value term, or INCOMPARABLE
    """
    if isinstance(typ, Fun) or isinstance(value, Closure):
        return INCOMPARABLE
    if isinstance(value, SemNat) and typ in (None, Nat()):
        return numeral(value.value)
    if isinstance(value, SemUnit) and typ in (None, One()):
        return Star()
    if isinstance(value, (SemInl, SemInr)) and (typ is None or isinstance(typ, Sum)):
        is_left = isinstance(value, SemInl)
        summand = None if typ is None else (typ.left if is_left else typ.right)
        inner = readback(value.value, summand)
        if inner is INCOMPARABLE:
            return INCOMPARABLE
        return Inl(inner) if is_left else Inr(inner)
    if isinstance(value, SemPair) and (typ is None or isinstance(typ, Prod)):
        first = readback(value.first, None if typ is None else typ.left)
        second = readback(value.second, None if typ is None else typ.right)
        if first is INCOMPARABLE or second is INCOMPARABLE:
            return INCOMPARABLE
        return Pair(first, second)
    raise TypeError(f"{value!r} does not inhabit {typ!r}")
