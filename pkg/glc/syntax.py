"""
Abstract syntax of the guarded metalanguage: types, exception contexts, values,
computations and programs, plus the binder-aware operations on them (free
variables, capture-avoiding substitution, alpha-equivalence, subterm access)
"""
import enum
import itertools
import re
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Iterator, List, Mapping, Optional, Set, Tuple, Union

WILDCARD = "_"


@dataclass(frozen=True)
class Span:
    """Source position of a node, 1-based"""

    line: int
    col: int


# ---------------------------------------------------------------------------
# types


class TypeExpr:
    """Base class of types"""


@dataclass(frozen=True)
class Base(TypeExpr):
    name: str


@dataclass(frozen=True)
class Zero(TypeExpr):
    pass


@dataclass(frozen=True)
class One(TypeExpr):
    pass


@dataclass(frozen=True)
class Nat(TypeExpr):
    pass


@dataclass(frozen=True)
class Sum(TypeExpr):
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Prod(TypeExpr):
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Fun(TypeExpr):
    arg: TypeExpr
    delta: "ExcContext"
    result: TypeExpr


@dataclass(frozen=True)
class Hole(TypeExpr):
    """Unknown summand of a partially synthesized sum; never written in source"""


def is_first_order(typ: TypeExpr) -> bool:
    """True if no function type occurs anywhere in typ"""
    if isinstance(typ, Fun):
        return False
    if isinstance(typ, (Sum, Prod)):
        return is_first_order(typ.left) and is_first_order(typ.right)
    return True


def has_hole(typ: Optional[TypeExpr]) -> bool:
    if typ is None:
        return False
    if isinstance(typ, Hole):
        return True
    if isinstance(typ, (Sum, Prod)):
        return has_hole(typ.left) or has_hole(typ.right)
    if isinstance(typ, Fun):
        return has_hole(typ.arg) or has_hole(typ.result)
    return False


# ---------------------------------------------------------------------------
# exception contexts


class Tag(enum.Enum):
    """Guardedness tag of an exception"""

    U = "u"
    G = "g"


@dataclass(frozen=True)
class ExcEntry:
    name: str
    payload: TypeExpr
    tag: Tag


@dataclass(frozen=True)
class ExcContext:
    """Ordered exception context; names are pairwise distinct"""

    entries: Tuple[ExcEntry, ...] = ()

    def __post_init__(self):
        names = [entry.name for entry in self.entries]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate exception names in context: {names}")

    def __iter__(self) -> Iterator[ExcEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def names(self) -> Tuple[str, ...]:
        return tuple(entry.name for entry in self.entries)

    def lookup(self, name: str) -> Optional[ExcEntry]:
        for entry in self.entries:
            if entry.name == name:
                return entry
        return None

    def extend(self, name: str, payload: TypeExpr, tag: Tag) -> "ExcContext":
        """Appends an entry; an existing entry of the same name is shadowed"""
        kept = tuple(entry for entry in self.entries if entry.name != name)
        return ExcContext(kept + (ExcEntry(name, payload, tag),))

    def erased(self) -> Tuple[Tuple[str, TypeExpr], ...]:
        """|Δ|: the context without tags"""
        return tuple((entry.name, entry.payload) for entry in self.entries)

    def retagged(self, tag: Tag) -> "ExcContext":
        return ExcContext(tuple(replace(entry, tag=tag) for entry in self.entries))

    def relaxed(self, name: str) -> "ExcContext":
        """Sets the tag of one entry to u"""
        return ExcContext(
            tuple(
                replace(entry, tag=Tag.U) if entry.name == name else entry
                for entry in self.entries
            )
        )


EMPTY_DELTA = ExcContext()


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Node:
    span: Optional[Span] = field(default=None, compare=False, repr=False, kw_only=True)


class ValueTerm(Node):
    """Base class of value terms"""


class CompTerm(Node):
    """Base class of computation terms"""


@dataclass(frozen=True)
class Var(ValueTerm):
    name: str


@dataclass(frozen=True)
class Star(ValueTerm):
    pass


@dataclass(frozen=True)
class Prim(ValueTerm):
    """Application of a value-signature symbol; zero is Prim("zero", Star())"""

    op: str
    arg: ValueTerm


@dataclass(frozen=True)
class Inl(ValueTerm):
    value: ValueTerm
    ann: Optional[TypeExpr] = None


@dataclass(frozen=True)
class Inr(ValueTerm):
    value: ValueTerm
    ann: Optional[TypeExpr] = None


@dataclass(frozen=True)
class Pair(ValueTerm):
    first: ValueTerm
    second: ValueTerm


@dataclass(frozen=True)
class Lam(ValueTerm):
    param: str
    param_type: TypeExpr
    delta: ExcContext
    body: CompTerm
    ann: Optional[TypeExpr] = None


@dataclass(frozen=True)
class Ret(CompTerm):
    value: ValueTerm


@dataclass(frozen=True)
class Do(CompTerm):
    var: str
    bound: CompTerm
    body: CompTerm


@dataclass(frozen=True)
class GCase(CompTerm):
    op: str
    arg: ValueTerm
    left_var: str
    left: CompTerm
    right_var: str
    right: CompTerm


@dataclass(frozen=True)
class Case(CompTerm):
    scrutinee: ValueTerm
    left_var: str
    left: CompTerm
    right_var: str
    right: CompTerm


@dataclass(frozen=True)
class PCase(CompTerm):
    scrutinee: ValueTerm
    first_var: str
    second_var: str
    body: CompTerm


@dataclass(frozen=True)
class Init(CompTerm):
    value: ValueTerm


@dataclass(frozen=True)
class Raise(CompTerm):
    exc: str
    value: ValueTerm


@dataclass(frozen=True)
class Handle(CompTerm):
    exc: str
    payload_type: TypeExpr
    body: CompTerm
    payload_var: str
    handler: CompTerm


@dataclass(frozen=True)
class HandleIt(CompTerm):
    init: ValueTerm
    exc: str
    payload_type: TypeExpr
    var: str
    body: CompTerm


@dataclass(frozen=True)
class App(CompTerm):
    fn: ValueTerm
    arg: ValueTerm


# surface-only computations, removed by parser.desugar


@dataclass(frozen=True)
class If(CompTerm):
    cond: ValueTerm
    then: CompTerm
    orelse: CompTerm


@dataclass(frozen=True)
class Guard(CompTerm):
    """f(v) & p"""

    op: str
    arg: ValueTerm
    body: CompTerm


@dataclass(frozen=True)
class EffApp(CompTerm):
    """bare f(v) in computation position"""

    op: str
    arg: ValueTerm


@dataclass(frozen=True)
class Seq(CompTerm):
    """do p; q"""

    first: CompTerm
    rest: CompTerm


@dataclass(frozen=True)
class Try(CompTerm):
    """try x <= p in q unless e:E => r"""

    var: str
    body: CompTerm
    cont: CompTerm
    exc: str
    payload_type: TypeExpr
    payload_var: str
    handler: CompTerm


SURFACE_NODES = (If, Guard, EffApp, Seq, Try)
Term = Union[ValueTerm, CompTerm]

# binder field -> the term field it scopes over
BINDERS: Dict[type, Tuple[Tuple[str, str], ...]] = {
    Lam: (("param", "body"),),
    Do: (("var", "body"),),
    GCase: (("left_var", "left"), ("right_var", "right")),
    Case: (("left_var", "left"), ("right_var", "right")),
    PCase: (("first_var", "body"), ("second_var", "body")),
    Handle: (("payload_var", "handler"),),
    HandleIt: (("var", "body"),),
    Try: (("var", "cont"), ("payload_var", "handler")),
}


# ---------------------------------------------------------------------------
# declarations and programs


@dataclass(frozen=True)
class ValueDecl:
    name: str
    arg: TypeExpr
    result: TypeExpr


@dataclass(frozen=True)
class EffectDecl:
    name: str
    arg: TypeExpr
    result: TypeExpr
    guarded: TypeExpr


@dataclass(frozen=True)
class Program:
    declarations: Tuple[Union[ValueDecl, EffectDecl], ...]
    main: CompTerm
    exc_context: ExcContext = EMPTY_DELTA

    def __post_init__(self):
        names = [decl.name for decl in self.declarations]
        if len(names) != len(set(names)):
            raise ValueError(f"declared names are not distinct: {names}")

    def value_signature(self) -> Dict[str, ValueDecl]:
        return {d.name: d for d in self.declarations if isinstance(d, ValueDecl)}

    def effect_signature(self) -> Dict[str, EffectDecl]:
        return {d.name: d for d in self.declarations if isinstance(d, EffectDecl)}


# ---------------------------------------------------------------------------
# numerals


def numeral(number: int, span: Optional[Span] = None) -> ValueTerm:
    """The value succ(...succ(zero)) with number applications of succ"""
    value: ValueTerm = Prim("zero", Star(span=span), span=span)
    for _ in range(number):
        value = Prim("succ", value, span=span)
    return value


def numeral_value(value: ValueTerm) -> Optional[int]:
    """Inverse of numeral(); None if value is not a closed numeral"""
    count = 0
    while isinstance(value, Prim) and value.op == "succ":
        count += 1
        value = value.arg
    if isinstance(value, Prim) and value.op == "zero" and isinstance(value.arg, Star):
        return count
    return None


# ---------------------------------------------------------------------------
# traversal


def is_term(obj) -> bool:
    return isinstance(obj, (ValueTerm, CompTerm))


def term_fields(term: Term) -> List[Tuple[str, Term]]:
    """The direct subterms of term, in field order"""
    return [
        (f.name, getattr(term, f.name))
        for f in fields(term)
        if is_term(getattr(term, f.name))
    ]


def binders_over(term: Term, child_field: str) -> List[Tuple[str, str]]:
    """(binder field, bound name) pairs whose scope is child_field"""
    return [
        (binder_field, getattr(term, binder_field))
        for binder_field, scope in BINDERS.get(type(term), ())
        if scope == child_field
    ]


def free_vars(term: Term) -> Set[str]:
    """The free variables of term; exception names are not variables"""
    if isinstance(term, Var):
        return {term.name}
    result: Set[str] = set()
    for name, child in term_fields(term):
        bound = {bound_name for _, bound_name in binders_over(term, name)}
        result |= free_vars(child) - bound
    return result


def fresh_name(base: str, avoid: Set[str]) -> str:
    """A variable name derived from base that is not in avoid"""
    stem = re.sub(r"\d+$", "", base.lstrip(WILDCARD)) or "v"
    for index in itertools.count(1):
        candidate = f"{stem}{index}"
        if candidate not in avoid:
            return candidate
    raise AssertionError("unreachable")


def substitute(term: Term, bindings: Mapping[str, ValueTerm]) -> Term:
    """
    Capture-avoiding simultaneous substitution of values for variables

    Arguments:
        term (Term): the value or computation to substitute into
        bindings (Mapping[str, ValueTerm]): variable name -> value

    Returns:
        (Term): term with every free occurrence of a bound name replaced; binders
            that would capture a free variable of a substituted value are renamed.
            Exception names are never touched.
    """
    if not bindings:
        return term
    if isinstance(term, Var):
        return bindings.get(term.name, term)

    updates = {}
    renamed_binders = {}
    for child_field, child in term_fields(term):
        scoped = binders_over(term, child_field)
        bound_names = {bound_name for _, bound_name in scoped}
        child_free = free_vars(child)
        relevant = {
            name: value
            for name, value in bindings.items()
            if name not in bound_names and name in child_free
        }
        if not relevant:
            continue

        danger: Set[str] = set()
        for value in relevant.values():
            danger |= free_vars(value)

        for binder_field, bound_name in scoped:
            if bound_name in danger and bound_name != WILDCARD:
                avoid = danger | child_free | set(relevant) | bound_names
                new_name = fresh_name(bound_name, avoid)
                child = substitute(child, {bound_name: Var(new_name)})
                renamed_binders[binder_field] = new_name
                bound_names.add(new_name)
        updates[child_field] = substitute(child, relevant)

    if not updates:
        return term
    return replace(term, **updates, **renamed_binders)


def alpha_equal(left: Term, right: Term) -> bool:
    """True if the two terms are equal up to renaming of bound variables"""
    return _alpha(left, right, {}, {}, itertools.count())


def _alpha(left, right, left_env: Dict[str, int], right_env: Dict[str, int], counter) -> bool:
    if type(left) is not type(right):
        return False
    if isinstance(left, Var):
        left_id = left_env.get(left.name)
        right_id = right_env.get(right.name)
        if left_id is None and right_id is None:
            return left.name == right.name
        return left_id == right_id

    binder_fields = {binder for binder, _ in BINDERS.get(type(left), ())}
    for f in fields(left):
        if f.name == "span" or f.name in binder_fields:
            continue
        left_child = getattr(left, f.name)
        right_child = getattr(right, f.name)
        if is_term(left_child):
            inner_left, inner_right = left_env, right_env
            for binder_field, _ in binders_over(left, f.name):
                marker = next(counter)
                inner_left = {**inner_left, getattr(left, binder_field): marker}
                inner_right = {**inner_right, getattr(right, binder_field): marker}
            if not _alpha(left_child, right_child, inner_left, inner_right, counter):
                return False
        elif left_child != right_child:
            return False
    return True


def strip_annotations(term: Term) -> Term:
    """Removes the inl/inr/fun ascriptions, which carry no run-time meaning"""
    updates = {name: strip_annotations(child) for name, child in term_fields(term)}
    if isinstance(term, (Inl, Inr, Lam)) and term.ann is not None:
        updates["ann"] = None
    return replace(term, **updates) if updates else term


Path = Tuple[str, ...]


def subterms(term: Term, path: Path = ()) -> Iterator[Tuple[Path, Term]]:
    """Pre-order walk yielding (path, subterm) for term and all its subterms"""
    yield path, term
    for name, child in term_fields(term):
        yield from subterms(child, path + (name,))


def subterm_at(term: Term, path: Path) -> Term:
    for name in path:
        term = getattr(term, name)
    return term


def replace_subterm(term: Term, path: Path, new: Term) -> Term:
    """A copy of term with the subterm at path replaced by new"""
    if not path:
        return new
    head, rest = path[0], path[1:]
    return replace(term, **{head: replace_subterm(getattr(term, head), rest, new)})


def is_core(term: Term) -> bool:
    """True if no surface-only node occurs in term"""
    return not any(isinstance(node, SURFACE_NODES) for _, node in subterms(term))
