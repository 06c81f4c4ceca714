"""
Independent replay of a checked program's annotations against the typing rules.

The replayer does not reuse the checker: it walks the term, computes the contexts each
rule instance dictates for the subterms, and verifies that every recorded annotation
is an instance of exactly the rule for its node.
"""
import logging
from typing import List, Optional

from glc.logger_utils import TqdmLoggingHandler
from glc.primitives import signature_of
from glc.printer import pretty, pretty_type
from glc.syntax import (
    App,
    Case,
    CompTerm,
    Do,
    ExcContext,
    Fun,
    GCase,
    Handle,
    HandleIt,
    Init,
    Inl,
    Inr,
    Lam,
    Node,
    One,
    Pair,
    PCase,
    Prim,
    Prod,
    Raise,
    Ret,
    Star,
    Sum,
    Tag,
    TypeExpr,
    ValueTerm,
    Var,
    Zero,
    has_hole,
)
from glc.typecheck import EMPTY_GAMMA, TypedProgram, VarContext

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

RULES = {
    Var: "var",
    Star: "unit",
    Prim: "u-sig",
    Inl: "inl",
    Inr: "inr",
    Pair: "prod",
    Lam: "lambda",
    Ret: "ret",
    Init: "init",
    Raise: "raise",
    Do: "do",
    GCase: "gcase",
    Case: "case",
    PCase: "pcase",
    Handle: "handle",
    HandleIt: "handleit",
    App: "app",
}


class _Replayer:
    def __init__(self, typed: TypedProgram):
        self.typed = typed
        self.values, self.effects = signature_of(typed.program.declarations)
        self.violations: List[str] = []

    def violation(self, node: Node, message: str):
        where = f"{node.span.line}:{node.span.col}: " if node.span is not None else ""
        self.violations.append(f"{where}{RULES.get(type(node), '?')}: {message}")

    def annotation(self, node: Node, gamma: VarContext, delta: Optional[ExcContext]):
        ann = self.typed.annotation(node)
        if ann is None:
            self.violation(node, f"no annotation on {pretty(node)}")
            return None
        if ann.rule != RULES.get(type(node)):
            self.violation(node, f"annotated with rule {ann.rule}")
        if ann.context != gamma:
            self.violation(node, "variable context differs from the one the rule dictates")
        if ann.delta != delta:
            self.violation(node, "exception context differs from the one the rule dictates")
        if ann.type is not None and has_hole(ann.type):
            self.violation(node, f"partially known type {pretty_type(ann.type)}")
        return ann

    def value(self, gamma: VarContext, value: ValueTerm, expected: TypeExpr):
        ann = self.annotation(value, gamma, None)
        if ann is None:
            return
        if ann.type != expected:
            self.violation(
                value,
                f"has type {pretty_type(ann.type)} where {pretty_type(expected)} is required",
            )
            return

        if isinstance(value, Var):
            if gamma.lookup(value.name) != expected:
                self.violation(value, f"{value.name} is not bound at {pretty_type(expected)}")
        elif isinstance(value, Star):
            if expected != One():
                self.violation(value, "unit must have type 1")
        elif isinstance(value, Prim):
            decl = self.values.get(value.op)
            if decl is None or decl.result != expected:
                self.violation(value, f"{value.op} does not produce {pretty_type(expected)}")
            else:
                self.value(gamma, value.arg, decl.arg)
        elif isinstance(value, (Inl, Inr)):
            if not isinstance(expected, Sum) or value.ann not in (None, expected):
                self.violation(value, "injection into a non-sum or mismatched ascription")
            else:
                summand = expected.left if isinstance(value, Inl) else expected.right
                self.value(gamma, value.value, summand)
        elif isinstance(value, Pair):
            if not isinstance(expected, Prod):
                self.violation(value, "pair at a non-product type")
            else:
                self.value(gamma, value.first, expected.left)
                self.value(gamma, value.second, expected.right)
        elif isinstance(value, Lam):
            if (
                not isinstance(expected, Fun)
                or expected.arg != value.param_type
                or expected.delta != value.delta
                or value.ann not in (None, expected)
            ):
                self.violation(value, "function type does not match the lambda")
            else:
                inner = gamma.extend(value.param, value.param_type)
                self.comp(value.delta, inner, value.body, expected.result)

    def comp(
        self,
        delta: ExcContext,
        gamma: VarContext,
        comp: CompTerm,
        expected: Optional[TypeExpr],
    ):
        """expected None is only passed for computations annotated as never returning"""
        ann = self.annotation(comp, gamma, delta)
        if ann is None:
            return
        if ann.type is not None and ann.type != expected:
            self.violation(
                comp,
                f"has type {pretty_type(ann.type)} where "
                f"{'nothing' if expected is None else pretty_type(expected)} is required",
            )
            return

        if isinstance(comp, Ret):
            if expected is None:
                self.violation(comp, "ret must return a value")
            else:
                self.value(gamma, comp.value, expected)
        elif isinstance(comp, Init):
            self.value(gamma, comp.value, Zero())
        elif isinstance(comp, Raise):
            entry = delta.lookup(comp.exc)
            if entry is None or entry.tag != Tag.U:
                self.violation(comp, f"{comp.exc} is not raisable (needs tag u)")
            else:
                self.value(gamma, comp.value, entry.payload)
        elif isinstance(comp, Do):
            bound_ann = self.typed.annotation(comp.bound)
            bound_type = bound_ann.type if bound_ann is not None else None
            self.comp(delta, gamma, comp.bound, bound_type)
            binder = Zero() if bound_type is None else bound_type
            self.comp(delta, gamma.extend(comp.var, binder), comp.body, expected)
        elif isinstance(comp, GCase):
            decl = self.effects.get(comp.op)
            if decl is None:
                self.violation(comp, f"{comp.op} is not an effect symbol")
                return
            self.value(gamma, comp.arg, decl.arg)
            self.comp(delta, gamma.extend(comp.left_var, decl.result), comp.left, expected)
            self.comp(
                delta.retagged(Tag.U),
                gamma.extend(comp.right_var, decl.guarded),
                comp.right,
                expected,
            )
        elif isinstance(comp, (Case, PCase)):
            scrutinee_ann = self.typed.annotation(comp.scrutinee)
            scrutinee = scrutinee_ann.type if scrutinee_ann is not None else None
            shape = Sum if isinstance(comp, Case) else Prod
            if not isinstance(scrutinee, shape):
                self.violation(comp, "scrutinee has the wrong shape")
                return
            self.value(gamma, comp.scrutinee, scrutinee)
            if isinstance(comp, Case):
                left = gamma.extend(comp.left_var, scrutinee.left)
                right = gamma.extend(comp.right_var, scrutinee.right)
                self.comp(delta, left, comp.left, expected)
                self.comp(delta, right, comp.right, expected)
            else:
                inner = gamma.extend(comp.first_var, scrutinee.left)
                inner = inner.extend(comp.second_var, scrutinee.right)
                self.comp(delta, inner, comp.body, expected)
        elif isinstance(comp, Handle):
            self.comp(delta.extend(comp.exc, comp.payload_type, Tag.U), gamma, comp.body, expected)
            self.comp(
                delta,
                gamma.extend(comp.payload_var, comp.payload_type),
                comp.handler,
                expected,
            )
        elif isinstance(comp, HandleIt):
            self.value(gamma, comp.init, comp.payload_type)
            self.comp(
                delta.extend(comp.exc, comp.payload_type, Tag.G),
                gamma.extend(comp.var, comp.payload_type),
                comp.body,
                expected,
            )
        elif isinstance(comp, App):
            fn_ann = self.typed.annotation(comp.fn)
            fn_type = fn_ann.type if fn_ann is not None else None
            if (
                not isinstance(fn_type, Fun)
                or fn_type.delta != delta
                or (expected is not None and fn_type.result != expected)
            ):
                self.violation(comp, "applied function has the wrong type or context")
                return
            self.value(gamma, comp.fn, fn_type)
            self.value(gamma, comp.arg, fn_type.arg)
        else:
            self.violation(comp, f"no typing rule for {type(comp).__name__}")


def verify_derivation(typed: TypedProgram) -> List[str]:
    """
    Replays every annotation of a checked program against one rule instance

    Arguments:
        typed (TypedProgram): the output of check_program

    Returns:
        (List[str]): human readable violations, empty if the derivation is valid
    """
    replayer = _Replayer(typed)
    replayer.comp(typed.delta, EMPTY_GAMMA, typed.main, typed.result_type)
    if replayer.violations:
        logger.debug("Derivation replay found %i violations", len(replayer.violations))
    return replayer.violations
