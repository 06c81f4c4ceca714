"""
Deliberately wrong variants of the operational evaluator. The adequacy harness must
tell each of them apart from the denotational semantics
"""
from typing import Dict, Tuple, Type

from glc.operational import Evaluator, RaiseV, Run, Terminal
from glc.primitives import EffectOutcome
from glc.syntax import Do, ValueTerm, substitute


class DropPut(Evaluator):
    """put performs its continuation without emitting the event"""

    def effect_events(self, op: str, outcome: EffectOutcome) -> Tuple[int, ...]:
        if op == "put":
            return ()
        return outcome.events


class SwapDo(Evaluator):
    """do continues with the raised payload instead of propagating the exception"""

    def continue_do(self, comp: Do, result: Terminal) -> Run:
        if isinstance(result, RaiseV):
            return (yield from self.run(substitute(comp.body, {comp.var: result.value})))
        return (yield from super().continue_do(comp, result))


class HandleItOffByOne(Evaluator):
    """handleit repeats its first round before moving on to the raised payload"""

    def reenter(self, previous: ValueTerm, payload: ValueTerm, round_number: int) -> ValueTerm:
        if round_number == 1:
            return previous
        return payload


MUTANTS: Dict[str, Type[Evaluator]] = {
    "drop-put": DropPut,
    "swap-do": SwapDo,
    "handleit-off-by-one": HandleItOffByOne,
}


def evaluator_class(name: str) -> Type[Evaluator]:
    """
    Raises:
        KeyError: if name is not a known mutant
    """
    try:
        return MUTANTS[name]
    except KeyError as err:
        raise KeyError(f"Unknown mutant {name!r}, expected one of {', '.join(MUTANTS)}") from err
