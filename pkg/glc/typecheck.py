"""
Syntax-directed type checker for values and computations, with guardedness tags on
exception contexts
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Tuple

from glc.exceptions import GlcTypeError, TypeErrorCode
from glc.logger_utils import TqdmLoggingHandler
from glc.parser import desugar
from glc.primitives import signature_of
from glc.printer import pretty_type
from glc.syntax import (
    EMPTY_DELTA,
    WILDCARD,
    App,
    Case,
    CompTerm,
    Do,
    EffectDecl,
    ExcContext,
    Fun,
    GCase,
    Handle,
    HandleIt,
    Hole,
    Init,
    Inl,
    Inr,
    Lam,
    Node,
    One,
    Pair,
    PCase,
    Prim,
    Program,
    Prod,
    Raise,
    Ret,
    Star,
    Sum,
    Tag,
    TypeExpr,
    ValueDecl,
    ValueTerm,
    Var,
    Zero,
    has_hole,
    is_core,
)

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False


@dataclass(frozen=True)
class VarContext:
    """Γ: typed variables, names occur at most once"""

    entries: Tuple[Tuple[str, TypeExpr], ...] = ()

    def lookup(self, name: str) -> Optional[TypeExpr]:
        for entry_name, typ in self.entries:
            if entry_name == name:
                return typ
        return None

    def extend(self, name: str, typ: TypeExpr) -> "VarContext":
        """Binds name, shadowing an earlier binding; the wildcard binds nothing"""
        if name == WILDCARD:
            return self
        kept = tuple(entry for entry in self.entries if entry[0] != name)
        return VarContext(kept + ((name, typ),))

    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.entries)


EMPTY_GAMMA = VarContext()


@dataclass(frozen=True)
class Annotation:
    """
    What the checker concluded about one node. type None means the computation never
    returns normally (raise, init) and fits any expected type; delta is None on values
    """

    type: Optional[TypeExpr]
    context: VarContext
    delta: Optional[ExcContext]
    rule: str


@dataclass
class TypedProgram:
    """A checked program with an annotation for every node of its main term"""

    program: Program
    result_type: TypeExpr
    annotations: Dict[int, Annotation] = field(default_factory=dict)

    @property
    def main(self) -> CompTerm:
        return self.program.main

    @property
    def delta(self) -> ExcContext:
        return self.program.exc_context

    def annotation(self, node: Node) -> Optional[Annotation]:
        return self.annotations.get(id(node))


class _Mismatch:
    pass


MISMATCH = _Mismatch()


def join(left: Optional[TypeExpr], right: Optional[TypeExpr]):
    """
    Least informative common refinement of two partially known types.
    None (never returns) and Hole (unknown summand) are unknowns.

    Returns:
        the joined type, or MISMATCH if the two disagree somewhere
    """
    if left is None:
        return right
    if right is None:
        return left
    if isinstance(left, Hole):
        return right
    if isinstance(right, Hole):
        return left
    if isinstance(left, (Sum, Prod)) and type(left) is type(right):
        first = join(left.left, right.left)
        second = join(left.right, right.right)
        if first is MISMATCH or second is MISMATCH:
            return MISMATCH
        return type(left)(first, second)
    return left if left == right else MISMATCH


def describe(typ: Optional[TypeExpr]) -> str:
    return "a computation that never returns" if typ is None else pretty_type(typ)


class TypeChecker:
    """
    Checks terms against a signature, recording an Annotation per node

    Arguments:
        values (Mapping[str, ValueDecl]): the value signature
        effects (Mapping[str, EffectDecl]): the effect signature
    """

    def __init__(
        self,
        values: Optional[Mapping[str, ValueDecl]] = None,
        effects: Optional[Mapping[str, EffectDecl]] = None,
    ):
        builtin_values, builtin_effects = signature_of(())
        self.values = dict(builtin_values if values is None else values)
        self.effects = dict(builtin_effects if effects is None else effects)
        self.annotations: Dict[int, Annotation] = {}

    def fail(self, code: TypeErrorCode, message: str, node: Node):
        raise GlcTypeError(code, message, node.span)

    def record(self, node: Node, typ, context: VarContext, delta, rule: str):
        self.annotations[id(node)] = Annotation(typ, context, delta, rule)
        return typ

    # values

    def infer_value(self, gamma: VarContext, value: ValueTerm) -> TypeExpr:
        if isinstance(value, Var):
            typ = gamma.lookup(value.name)
            if typ is None:
                self.fail(TypeErrorCode.UNBOUND_VAR, f"unbound variable {value.name}", value)
            return self.record(value, typ, gamma, None, "var")
        if isinstance(value, Star):
            return self.record(value, One(), gamma, None, "unit")
        if isinstance(value, Prim):
            decl = self.values.get(value.op)
            if decl is None:
                self.fail(
                    TypeErrorCode.SIGNATURE_MISMATCH,
                    f"{value.op} is not a declared value symbol",
                    value,
                )
            self.check_argument(gamma, value.arg, decl.arg, value.op)
            return self.record(value, decl.result, gamma, None, "u-sig")
        if isinstance(value, (Inl, Inr)):
            rule = "inl" if isinstance(value, Inl) else "inr"
            if value.ann is not None:
                self.check_value(gamma, value, value.ann)
                return value.ann
            inner = self.infer_value(gamma, value.value)
            typ = Sum(inner, Hole()) if isinstance(value, Inl) else Sum(Hole(), inner)
            return self.record(value, typ, gamma, None, rule)
        if isinstance(value, Pair):
            first = self.infer_value(gamma, value.first)
            second = self.infer_value(gamma, value.second)
            return self.record(value, Prod(first, second), gamma, None, "prod")
        if isinstance(value, Lam):
            if value.ann is not None:
                self.check_value(gamma, value, value.ann)
                return value.ann
            inner = gamma.extend(value.param, value.param_type)
            result = self.comp(value.delta, inner, value.body, None)
            if result is None or has_hole(result):
                self.fail(
                    TypeErrorCode.TYPE_MISMATCH,
                    "cannot determine the result type of this function, "
                    "ascribe it as (fun ... : A -[...]> B)",
                    value,
                )
            return self.record(
                value, Fun(value.param_type, value.delta, result), gamma, None, "lambda"
            )
        raise TypeError(f"not a core value: {value!r}")

    def check_value(self, gamma: VarContext, value: ValueTerm, expected: TypeExpr):
        if isinstance(value, (Inl, Inr)):
            if value.ann is not None and value.ann != expected:
                self.fail(
                    TypeErrorCode.TYPE_MISMATCH,
                    f"ascription {pretty_type(value.ann)} conflicts with "
                    f"expected type {pretty_type(expected)}",
                    value,
                )
            if not isinstance(expected, Sum):
                self.fail(
                    TypeErrorCode.TYPE_MISMATCH,
                    f"injection checked against non-sum type {pretty_type(expected)}",
                    value,
                )
            is_left = isinstance(value, Inl)
            summand = expected.left if is_left else expected.right
            self.check_value(gamma, value.value, summand)
            return self.record(value, expected, gamma, None, "inl" if is_left else "inr")
        if isinstance(value, Pair) and isinstance(expected, Prod):
            self.check_value(gamma, value.first, expected.left)
            self.check_value(gamma, value.second, expected.right)
            return self.record(value, expected, gamma, None, "prod")
        if isinstance(value, Lam):
            if value.ann is not None and value.ann != expected:
                self.fail(
                    TypeErrorCode.TYPE_MISMATCH,
                    f"ascription {pretty_type(value.ann)} conflicts with "
                    f"expected type {pretty_type(expected)}",
                    value,
                )
            if (
                not isinstance(expected, Fun)
                or expected.arg != value.param_type
                or expected.delta != value.delta
            ):
                self.fail(
                    TypeErrorCode.TYPE_MISMATCH,
                    f"function does not have type {pretty_type(expected)}",
                    value,
                )
            inner = gamma.extend(value.param, value.param_type)
            self.comp(value.delta, inner, value.body, expected.result)
            return self.record(value, expected, gamma, None, "lambda")

        actual = self.infer_value(gamma, value)
        if actual != expected:
            self.fail(
                TypeErrorCode.TYPE_MISMATCH,
                f"expected {pretty_type(expected)}, got {pretty_type(actual)}",
                value,
            )
        return expected

    def check_argument(self, gamma: VarContext, arg: ValueTerm, expected: TypeExpr, op: str):
        """Checks the argument of a signature symbol; a wrong type is a SignatureMismatch"""
        actual = self.infer_value(gamma, arg)
        if join(actual, expected) != expected:
            self.fail(
                TypeErrorCode.SIGNATURE_MISMATCH,
                f"{op} expects {pretty_type(expected)}, got {pretty_type(actual)}",
                arg,
            )
        self.check_value(gamma, arg, expected)

    # computations

    def comp(
        self,
        delta: ExcContext,
        gamma: VarContext,
        comp: CompTerm,
        expected: Optional[TypeExpr],
    ) -> Optional[TypeExpr]:
        """
        Checks comp against expected, or synthesizes its type when expected is None

        Returns:
            the type of comp; None if it never returns normally; may contain Hole
                when synthesized from unascribed injections
        """
        if isinstance(comp, Ret):
            if expected is not None:
                self.check_value(gamma, comp.value, expected)
                typ = expected
            else:
                typ = self.infer_value(gamma, comp.value)
            return self.record(comp, typ, gamma, delta, "ret")

        if isinstance(comp, Init):
            self.check_value(gamma, comp.value, Zero())
            return self.record(comp, expected, gamma, delta, "init")

        if isinstance(comp, Raise):
            entry = delta.lookup(comp.exc)
            if entry is None:
                self.fail(TypeErrorCode.UNBOUND_EXC, f"unbound exception {comp.exc}", comp)
            if entry.tag == Tag.G:
                self.fail(
                    TypeErrorCode.GUARDED_RAISE,
                    f"{comp.exc} is guarded here and may only be raised behind an effect",
                    comp,
                )
            self.check_value(gamma, comp.value, entry.payload)
            return self.record(comp, expected, gamma, delta, "raise")

        if isinstance(comp, Do):
            bound = self.comp(delta, gamma, comp.bound, None)
            if has_hole(bound):
                self.fail(
                    TypeErrorCode.TYPE_MISMATCH,
                    f"cannot bind {comp.var} at partially known type "
                    f"{pretty_type(bound)}, ascribe the injection",
                    comp.bound,
                )
            inner = gamma.extend(comp.var, Zero() if bound is None else bound)
            typ = self.comp(delta, inner, comp.body, expected)
            return self.record(comp, typ, gamma, delta, "do")

        if isinstance(comp, GCase):
            decl = self.effects.get(comp.op)
            if decl is None:
                self.fail(
                    TypeErrorCode.SIGNATURE_MISMATCH,
                    f"{comp.op} is not a declared effect symbol",
                    comp,
                )
            self.check_argument(gamma, comp.arg, decl.arg, comp.op)
            typ = self.branches(
                comp,
                (delta, gamma.extend(comp.left_var, decl.result), comp.left),
                (delta.retagged(Tag.U), gamma.extend(comp.right_var, decl.guarded), comp.right),
                expected,
            )
            return self.record(comp, typ, gamma, delta, "gcase")

        if isinstance(comp, Case):
            scrutinee = self.infer_value(gamma, comp.scrutinee)
            if not isinstance(scrutinee, Sum) or has_hole(scrutinee):
                self.fail(
                    TypeErrorCode.TYPE_MISMATCH,
                    f"case expects a value of a known sum type, got {pretty_type(scrutinee)}",
                    comp.scrutinee,
                )
            typ = self.branches(
                comp,
                (delta, gamma.extend(comp.left_var, scrutinee.left), comp.left),
                (delta, gamma.extend(comp.right_var, scrutinee.right), comp.right),
                expected,
            )
            return self.record(comp, typ, gamma, delta, "case")

        if isinstance(comp, PCase):
            scrutinee = self.infer_value(gamma, comp.scrutinee)
            if not isinstance(scrutinee, Prod) or has_hole(scrutinee):
                self.fail(
                    TypeErrorCode.TYPE_MISMATCH,
                    f"pcase expects a value of product type, got {pretty_type(scrutinee)}",
                    comp.scrutinee,
                )
            inner = gamma.extend(comp.first_var, scrutinee.left)
            inner = inner.extend(comp.second_var, scrutinee.right)
            typ = self.comp(delta, inner, comp.body, expected)
            return self.record(comp, typ, gamma, delta, "pcase")

        if isinstance(comp, Handle):
            typ = self.branches(
                comp,
                (delta.extend(comp.exc, comp.payload_type, Tag.U), gamma, comp.body),
                (delta, gamma.extend(comp.payload_var, comp.payload_type), comp.handler),
                expected,
            )
            return self.record(comp, typ, gamma, delta, "handle")

        if isinstance(comp, HandleIt):
            self.check_value(gamma, comp.init, comp.payload_type)
            inner_delta = delta.extend(comp.exc, comp.payload_type, Tag.G)
            inner = gamma.extend(comp.var, comp.payload_type)
            typ = self.comp(inner_delta, inner, comp.body, expected)
            return self.record(comp, typ, gamma, delta, "handleit")

        if isinstance(comp, App):
            fn_type = self.infer_value(gamma, comp.fn)
            if not isinstance(fn_type, Fun):
                self.fail(
                    TypeErrorCode.TYPE_MISMATCH,
                    f"applying a value of non-function type {pretty_type(fn_type)}",
                    comp.fn,
                )
            if fn_type.delta != delta:
                code = (
                    TypeErrorCode.TAG_MISMATCH
                    if fn_type.delta.erased() == delta.erased()
                    else TypeErrorCode.EXC_CONTEXT_MISMATCH
                )
                self.fail(
                    code,
                    f"function raises [{_delta_text(fn_type.delta)}] "
                    f"but the context is [{_delta_text(delta)}]",
                    comp,
                )
            self.check_value(gamma, comp.arg, fn_type.arg)
            if expected is not None and fn_type.result != expected:
                self.fail(
                    TypeErrorCode.TYPE_MISMATCH,
                    f"expected {pretty_type(expected)}, got {pretty_type(fn_type.result)}",
                    comp,
                )
            return self.record(comp, fn_type.result, gamma, delta, "app")

        self.fail(
            TypeErrorCode.TYPE_MISMATCH,
            f"{type(comp).__name__} is surface syntax, desugar before checking",
            comp,
        )
        return None

    def branches(self, node: CompTerm, left, right, expected: Optional[TypeExpr]):
        """
        Checks two branches that must agree on their type. In synthesis mode the
        joined type is pushed back into branches that were only partially known
        """
        if expected is not None:
            self.comp(*left, expected)
            self.comp(*right, expected)
            return expected

        left_type = self.comp(*left, None)
        right_type = self.comp(*right, None)
        joined = join(left_type, right_type)
        if joined is MISMATCH:
            self.fail(
                TypeErrorCode.TYPE_MISMATCH,
                f"branches disagree: {describe(left_type)} and {describe(right_type)}",
                node,
            )
        if joined is not None and not has_hole(joined):
            for branch, branch_type in ((left, left_type), (right, right_type)):
                if branch_type is not None and has_hole(branch_type):
                    self.comp(*branch, joined)
        return joined


def _delta_text(delta: ExcContext) -> str:
    return ", ".join(
        f"{entry.name}:{pretty_type(entry.payload)}^{entry.tag.value}" for entry in delta
    )


def _checker_for(declarations) -> TypeChecker:
    values, effects = signature_of(declarations)
    return TypeChecker(values, effects)


def infer_value(gamma: VarContext, value: ValueTerm, declarations=()) -> TypeExpr:
    """
    Infers the type of a value

    Arguments:
        gamma (VarContext): the typed variables in scope
        value (ValueTerm): a core value
        declarations: extra signature declarations besides the built-ins

    Returns:
        (TypeExpr): the type of value

    Raises:
        GlcTypeError: UnboundVar, SignatureMismatch, or TypeMismatch when an injection
            is not ascribed and its sum cannot be determined
    """
    typ = _checker_for(declarations).infer_value(gamma, value)
    if has_hole(typ):
        raise GlcTypeError(
            TypeErrorCode.TYPE_MISMATCH,
            f"partially known type {pretty_type(typ)}, ascribe the injection",
            value.span,
        )
    return typ


def check_comp(
    delta: ExcContext,
    gamma: VarContext,
    comp: CompTerm,
    expected: TypeExpr,
    declarations=(),
):
    """
    Checks Δ|Γ ⊢ comp : expected

    Raises:
        GlcTypeError: the first error in traversal order
    """
    _checker_for(declarations).comp(delta, gamma, comp, expected)


def check_program(program: Program) -> TypedProgram:
    """
    Checks the main term of a program under its declared exception context and the
    empty variable context

    Arguments:
        program (Program): a parsed program, desugared here if it is not yet

    Returns:
        (TypedProgram): the (desugared) program, its result type and node annotations

    Raises:
        GlcTypeError: the first error in traversal order
    """
    if not is_core(program.main):
        _, effects = signature_of(program.declarations)
        program = replace(program, main=desugar(program.main, effects))

    checker = _checker_for(program.declarations)
    result = checker.comp(program.exc_context, EMPTY_GAMMA, program.main, None)
    if has_hole(result):
        raise GlcTypeError(
            TypeErrorCode.TYPE_MISMATCH,
            f"program result has partially known type {pretty_type(result)}, "
            "ascribe the injection",
            program.main.span,
        )
    if result is None:
        result = Zero()
        checker.comp(program.exc_context, EMPTY_GAMMA, program.main, result)

    logger.debug("Program checked at type %s", pretty_type(result))
    return TypedProgram(program, result, checker.annotations)


__all__ = [
    "Annotation",
    "EMPTY_DELTA",
    "EMPTY_GAMMA",
    "TypeChecker",
    "TypedProgram",
    "VarContext",
    "check_comp",
    "check_program",
    "infer_value",
    "join",
]
