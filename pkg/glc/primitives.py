"""
The built-in signature and the run-time meaning of the primitive effects, shared by
the operational and denotational evaluators
"""
from dataclasses import dataclass
from typing import Any, Callable, Dict, Tuple

from glc.syntax import EffectDecl, Nat, One, Sum, ValueDecl, Zero

BUILTIN_VALUES: Dict[str, ValueDecl] = {
    "zero": ValueDecl("zero", One(), Nat()),
    "succ": ValueDecl("succ", Nat(), Nat()),
}

BUILTIN_EFFECTS: Dict[str, EffectDecl] = {
    "pred": EffectDecl("pred", Nat(), Sum(One(), Nat()), Zero()),
    "put": EffectDecl("put", Nat(), Zero(), One()),
}

BUILTIN_NAMES = frozenset(BUILTIN_VALUES) | frozenset(BUILTIN_EFFECTS)


@dataclass(frozen=True)
class PlainInl:
    """Interpreter-neutral left injection used in effect outcomes"""

    value: Any


@dataclass(frozen=True)
class PlainInr:
    value: Any


UNIT = ()


@dataclass(frozen=True)
class EffectOutcome:
    """
    Result of performing a primitive effect on a natural number argument

    side 1 selects the returning (B) branch of gcase, side 2 the guarded (C) branch.
    Payloads are ints, UNIT, PlainInl or PlainInr.
    """

    side: int
    payload: Any
    events: Tuple[int, ...] = ()


def perform_put(argument: int) -> EffectOutcome:
    return EffectOutcome(2, UNIT, (argument,))


def perform_pred(argument: int) -> EffectOutcome:
    if argument == 0:
        return EffectOutcome(1, PlainInl(UNIT))
    return EffectOutcome(1, PlainInr(argument - 1))


PRIMITIVE_EFFECTS: Dict[str, Callable[[int], EffectOutcome]] = {
    "put": perform_put,
    "pred": perform_pred,
}


def signature_of(declarations) -> Tuple[Dict[str, ValueDecl], Dict[str, EffectDecl]]:
    """
    The full value and effect signatures: built-ins plus declarations

    Arguments:
        declarations: iterable of ValueDecl and EffectDecl

    Returns:
        (Tuple[Dict[str, ValueDecl], Dict[str, EffectDecl]]): value signature, effect signature
    """
    values = dict(BUILTIN_VALUES)
    effects = dict(BUILTIN_EFFECTS)
    for decl in declarations:
        if isinstance(decl, EffectDecl):
            effects[decl.name] = decl
        else:
            values[decl.name] = decl
    return values, effects
