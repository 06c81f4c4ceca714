"""
Pretty printer producing .gml source text that parses back to an alpha-equal term
"""
from typing import Union

from glc.syntax import (
    App,
    Base,
    Case,
    CompTerm,
    Do,
    EffApp,
    EffectDecl,
    ExcContext,
    Fun,
    GCase,
    Guard,
    Handle,
    HandleIt,
    Hole,
    If,
    Inl,
    Init,
    Inr,
    Lam,
    Nat,
    One,
    Pair,
    PCase,
    Prim,
    Program,
    Prod,
    Raise,
    Ret,
    Seq,
    Star,
    Sum,
    Term,
    Try,
    TypeExpr,
    ValueDecl,
    ValueTerm,
    Var,
    Zero,
    numeral_value,
)

# type precedence levels
ARROW, SUM, PROD, ATOM = range(4)

SIMPLE_COMPS = (Ret, Init, Raise, App, EffApp)


def pretty_type(typ: TypeExpr, level: int = ARROW) -> str:
    if isinstance(typ, Zero):
        return "0"
    if isinstance(typ, One):
        return "1"
    if isinstance(typ, Nat):
        return "N"
    if isinstance(typ, Base):
        return typ.name
    if isinstance(typ, Hole):
        return "?"
    if isinstance(typ, Sum):
        text = f"{pretty_type(typ.left, SUM)} + {pretty_type(typ.right, PROD)}"
        return _wrap(text, level > SUM)
    if isinstance(typ, Prod):
        text = f"{pretty_type(typ.left, PROD)} * {pretty_type(typ.right, ATOM)}"
        return _wrap(text, level > PROD)
    if isinstance(typ, Fun):
        text = (
            f"{pretty_type(typ.arg, SUM)} -[{pretty_delta(typ.delta)}]> "
            f"{pretty_type(typ.result, ARROW)}"
        )
        return _wrap(text, level > ARROW)
    raise TypeError(f"not a type: {typ!r}")


def pretty_delta(delta: ExcContext) -> str:
    return ", ".join(
        f"{entry.name}:{pretty_type(entry.payload, SUM)}^{entry.tag.value}" for entry in delta
    )


def pretty_value(value: ValueTerm, atomic: bool = False) -> str:
    """
    Arguments:
        value (ValueTerm): the value to print
        atomic (bool): parenthesise values whose text could swallow what follows
    """
    if isinstance(value, Var):
        return value.name
    if isinstance(value, Star):
        return "*"
    if isinstance(value, Prim):
        number = numeral_value(value)
        if number is not None:
            return str(number)
        return f"{value.op}({pretty_value(value.arg)})"
    if isinstance(value, (Inl, Inr)):
        keyword = "inl" if isinstance(value, Inl) else "inr"
        text = f"{keyword} {pretty_value(value.value, atomic=True)}"
        if value.ann is not None:
            return f"({text} : {pretty_type(value.ann)})"
        return text
    if isinstance(value, Pair):
        return f"({pretty_value(value.first)}, {pretty_value(value.second)})"
    if isinstance(value, Lam):
        text = (
            f"fun ({value.param}:{pretty_type(value.param_type)})"
            f"[{pretty_delta(value.delta)}] => {_braced(value.body)}"
        )
        if value.ann is not None:
            return f"({text} : {pretty_type(value.ann)})"
        return _wrap(text, atomic)
    raise TypeError(f"not a value: {value!r}")


def pretty_comp(comp: CompTerm) -> str:
    if isinstance(comp, Ret):
        return f"ret {pretty_value(comp.value, atomic=True)}"
    if isinstance(comp, Init):
        return f"init {pretty_value(comp.value, atomic=True)}"
    if isinstance(comp, Raise):
        return f"raise_{comp.exc} {pretty_value(comp.value, atomic=True)}"
    if isinstance(comp, App):
        fn_text = pretty_value(comp.fn, atomic=True)
        if isinstance(comp.fn, (Inl, Inr)):
            fn_text = f"({fn_text})"
        return f"{fn_text} {pretty_value(comp.arg, atomic=True)}"
    if isinstance(comp, Do):
        return f"do {comp.var} <- {_braced(comp.bound)}; {pretty_comp(comp.body)}"
    if isinstance(comp, Seq):
        return f"do {_braced(comp.first)}; {pretty_comp(comp.rest)}"
    if isinstance(comp, GCase):
        return (
            f"gcase {comp.op}({pretty_value(comp.arg)}) of "
            f"{comp.left_var} => {_braced(comp.left)} | "
            f"{comp.right_var} => {pretty_comp(comp.right)}"
        )
    if isinstance(comp, Case):
        return (
            f"case {pretty_value(comp.scrutinee, atomic=True)} of "
            f"inl {comp.left_var} => {_braced(comp.left)} | "
            f"inr {comp.right_var} => {pretty_comp(comp.right)}"
        )
    if isinstance(comp, PCase):
        return (
            f"pcase {pretty_value(comp.scrutinee, atomic=True)} of "
            f"({comp.first_var}, {comp.second_var}) => {pretty_comp(comp.body)}"
        )
    if isinstance(comp, Handle):
        binder = "" if comp.payload_var == comp.exc else f"{comp.payload_var} => "
        return (
            f"handle {comp.exc}:{pretty_type(comp.payload_type)} in "
            f"{_braced(comp.body)} with {binder}{pretty_comp(comp.handler)}"
        )
    if isinstance(comp, HandleIt):
        alias = "" if comp.var == comp.exc else f" as {comp.var}"
        return (
            f"handleit {comp.exc}:{pretty_type(comp.payload_type)}{alias} = "
            f"{pretty_value(comp.init, atomic=True)} in {pretty_comp(comp.body)}"
        )
    if isinstance(comp, If):
        return (
            f"if {pretty_value(comp.cond, atomic=True)} then {_braced(comp.then)} "
            f"else {pretty_comp(comp.orelse)}"
        )
    if isinstance(comp, Guard):
        return f"{comp.op}({pretty_value(comp.arg)}) & {pretty_comp(comp.body)}"
    if isinstance(comp, EffApp):
        return f"{comp.op}({pretty_value(comp.arg)})"
    if isinstance(comp, Try):
        alias = "" if comp.payload_var == comp.exc else f" as {comp.payload_var}"
        return (
            f"try {comp.var} <= {_braced(comp.body)} in {_braced(comp.cont)} "
            f"unless {comp.exc}:{pretty_type(comp.payload_type)}{alias} => "
            f"{pretty_comp(comp.handler)}"
        )
    raise TypeError(f"not a computation: {comp!r}")


def pretty_program(program: Program) -> str:
    lines = []
    for decl in program.declarations:
        if isinstance(decl, EffectDecl):
            lines.append(
                f"effect {decl.name} : {pretty_type(decl.arg)} -> "
                f"{pretty_type(decl.result)} [{pretty_type(decl.guarded)}]"
            )
        else:
            lines.append(
                f"value {decl.name} : {pretty_type(decl.arg)} -> {pretty_type(decl.result)}"
            )
    if len(program.exc_context):
        lines.append(f"exceptions {pretty_delta(program.exc_context)}")
    lines.append(pretty_comp(program.main))
    return "\n".join(lines) + "\n"


def pretty(node: Union[Term, TypeExpr, ExcContext, Program, ValueDecl, EffectDecl]) -> str:
    """
    Prints any syntax node as source text. Sugar is printed as written and desugared
    terms print in their core form
    """
    if isinstance(node, Program):
        return pretty_program(node)
    if isinstance(node, ExcContext):
        return pretty_delta(node)
    if isinstance(node, TypeExpr):
        return pretty_type(node)
    if isinstance(node, ValueTerm):
        return pretty_value(node)
    if isinstance(node, CompTerm):
        return pretty_comp(node)
    if isinstance(node, (ValueDecl, EffectDecl)):
        return pretty_program(Program((node,), Ret(Star()))).splitlines()[0]
    raise TypeError(f"cannot print {node!r}")


def _wrap(text: str, parens: bool) -> str:
    return f"({text})" if parens else text


def _braced(comp: CompTerm) -> str:
    """A computation in a position followed by more syntax"""
    text = pretty_comp(comp)
    return text if isinstance(comp, SIMPLE_COMPS) else f"{{ {text} }}"
