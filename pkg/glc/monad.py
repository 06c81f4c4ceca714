"""
Instance independent interface of strong guarded pre-iterative monads over finite
carriers: coproduct and product elements, summands, Kleisli tables, and the derived
operations (fmap, dist, delta, strong iteration)
"""
import abc
import functools
import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

Element = Any


@dataclass(frozen=True)
class Inj:
    """Coproduct element: side 1 is the left injection, side 2 the right"""

    side: int
    value: Any

    def __post_init__(self):
        if self.side not in (1, 2):
            raise ValueError(f"injection side must be 1 or 2, got {self.side}")


def inl(value) -> Inj:
    return Inj(1, value)


def inr(value) -> Inj:
    return Inj(2, value)


def show(value) -> str:
    """Prints carrier elements and monad elements, e.g. inl (0, 1) or {inl 0, inr 1}"""
    if isinstance(value, Inj):
        inner = show(value.value)
        if isinstance(value.value, Inj):
            inner = f"({inner})"
        return f"{'inl' if value.side == 1 else 'inr'} {inner}"
    if isinstance(value, tuple):
        if not value:
            return "*"
        return "(" + ", ".join(show(item) for item in value) + ")"
    if isinstance(value, (frozenset, set)):
        return "{" + ", ".join(sorted(show(item) for item in value)) + "}"
    return str(value)


@dataclass(frozen=True)
class Summand:
    """
    A sub-coproduct selected by {1,2}-paths, e.g. ("12", "2") for [inl∘inr, inr].
    Paths are pairwise incomparable: none is a prefix of another
    """

    paths: FrozenSet[str]

    def __post_init__(self):
        for path in self.paths:
            if set(path) - {"1", "2"}:
                raise ValueError(f"summand paths are over 1 and 2, got {path!r}")
        for first, second in itertools.permutations(self.paths, 2):
            if second.startswith(first):
                raise ValueError(f"summand paths {first} and {second} are comparable")

    @classmethod
    def parse(cls, text: str) -> "Summand":
        """Summand.parse("12,2")"""
        return cls(frozenset(part.strip() for part in text.split(",") if part.strip()))

    def contains(self, value) -> bool:
        for path in self.paths:
            current = value
            for step in path:
                if not isinstance(current, Inj) or current.side != int(step):
                    break
                current = current.value
            else:
                return True
        return False

    def complement(self, carrier: "FinCarrier") -> "Summand":
        """The canonical complement inside the coproduct shape of carrier"""
        return Summand(frozenset(_complement(self.paths, carrier, "")))

    def __str__(self):
        return "{" + ", ".join(sorted(self.paths)) + "}"


def _complement(paths: FrozenSet[str], carrier: "FinCarrier", prefix: str) -> List[str]:
    if "" in paths:
        return []
    if not paths:
        return [prefix]
    if carrier.kind != "sum":
        raise ValueError(f"summand does not fit the carrier shape at {prefix or 'root'}")
    left = frozenset(path[1:] for path in paths if path[0] == "1")
    right = frozenset(path[1:] for path in paths if path[0] == "2")
    return _complement(left, carrier.left, prefix + "1") + _complement(
        right, carrier.right, prefix + "2"
    )


INR = Summand(frozenset({"2"}))


@dataclass(frozen=True)
class FinCarrier:
    """
    A finite set: range(n) = {0..n-1}, or the sum/product of two carriers, whose
    elements are Inj values and pairs
    """

    kind: str
    size: int = 0
    left: Optional["FinCarrier"] = None
    right: Optional["FinCarrier"] = None

    @classmethod
    def range(cls, size: int) -> "FinCarrier":
        if size < 0:
            raise ValueError("carrier size must be non-negative")
        return cls("range", size)

    @classmethod
    def sum(cls, left: "FinCarrier", right: "FinCarrier") -> "FinCarrier":
        return cls("sum", len(left) + len(right), left, right)

    @classmethod
    def product(cls, left: "FinCarrier", right: "FinCarrier") -> "FinCarrier":
        return cls("product", len(left) * len(right), left, right)

    def elements(self) -> Tuple[Any, ...]:
        return _elements(self)

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return iter(self.elements())

    def __contains__(self, value) -> bool:
        return value in self.elements()

    def __str__(self):
        if self.kind == "range":
            return str(self.size)
        operator = "+" if self.kind == "sum" else "*"
        return f"({self.left} {operator} {self.right})"


@functools.lru_cache(maxsize=None)
def _elements(carrier: FinCarrier) -> Tuple[Any, ...]:
    if carrier.kind == "range":
        return tuple(range(carrier.size))
    if carrier.kind == "sum":
        return tuple(inl(a) for a in carrier.left) + tuple(inr(b) for b in carrier.right)
    return tuple(itertools.product(carrier.left.elements(), carrier.right.elements()))


ONE = FinCarrier.range(1)


@dataclass(frozen=True)
class Table:
    """A finite Kleisli morphism X -> T Y as an explicit mapping"""

    domain: FinCarrier
    codomain: FinCarrier
    rows: Tuple[Tuple[Any, Any], ...]
    _lookup: Dict[Any, Any] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_lookup", dict(self.rows))
        missing = [x for x in self.domain if x not in self._lookup]
        if missing:
            raise ValueError(f"table is not total, missing {missing}")

    @classmethod
    def build(cls, domain: FinCarrier, codomain: FinCarrier, fn: Callable) -> "Table":
        return cls(domain, codomain, tuple((x, fn(x)) for x in domain))

    def __call__(self, x):
        return self._lookup[x]

    def items(self):
        return iter(self.rows)


class Chooser(abc.ABC):
    """Source of the choices made while generating morphisms"""

    @abc.abstractmethod
    def choose(self, options: Sequence):
        """Pick one of the options"""

    def integer(self, low: int, high: int) -> int:
        return self.choose(range(low, high + 1))


class RandomChooser(Chooser):
    def __init__(self, rng: random.Random):
        self.rng = rng

    def choose(self, options: Sequence):
        if not options:
            raise ValueError("nothing to choose from")
        return options[self.rng.randrange(len(options))]


class ExhaustiveChooser(Chooser):
    """
    Walks the tree of choice sequences depth first: each run replays a prefix of
    indices, extending it with first options, and advance() moves to the next leaf
    """

    def __init__(self):
        self.prefix: List[int] = []
        self.widths: List[int] = []
        self.position = 0

    def choose(self, options: Sequence):
        if not options:
            raise ValueError("nothing to choose from")
        if self.position < len(self.prefix):
            index = self.prefix[self.position]
            self.widths[self.position] = len(options)
        else:
            index = 0
            self.prefix.append(0)
            self.widths.append(len(options))
        self.position += 1
        return options[index]

    def advance(self) -> bool:
        """Moves to the next choice sequence; False once every sequence was visited"""
        del self.prefix[self.position :]
        del self.widths[self.position :]
        self.position = 0
        while self.prefix:
            self.prefix[-1] += 1
            if self.prefix[-1] < self.widths[-1]:
                return True
            self.prefix.pop()
            self.widths.pop()
        return False


def enumerate_choices(
    draw: Callable[[Chooser], Any], limit: Optional[int]
) -> Tuple[List[Any], bool]:
    """
    Runs draw once per leaf of its choice tree, at most limit times unless limit is None

    Returns:
        (Tuple[List[Any], bool]): the drawn values and whether the tree was exhausted
            within limit runs
    """
    chooser = ExhaustiveChooser()
    results = []
    while True:
        results.append(draw(chooser))
        if not chooser.advance():
            return results, True
        if limit is not None and len(results) >= limit:
            return results, False


class GuardedMonad(abc.ABC):
    """
    A strong guarded pre-iterative monad whose Kleisli morphisms on finite carriers
    are Tables. Guardedness is relative to a Summand of the codomain
    """

    name = "abstract"
    exhaustive = True
    has_oracle = False

    @abc.abstractmethod
    def unit(self, value) -> Element:
        """η"""

    @abc.abstractmethod
    def star(self, fn: Callable[[Any], Element], element: Element) -> Element:
        """Kleisli lifting fn* applied to element"""

    @abc.abstractmethod
    def is_guarded(self, table: Table, summand: Summand) -> bool:
        """True if table is summand-guarded"""

    @abc.abstractmethod
    def iterate(self, table: Table) -> Table:
        """
        f^† for a right-guarded f : X -> T(Y + X)

        Raises:
            NotGuarded: if the instance rejects f
        """

    @abc.abstractmethod
    def equal(self, first: Element, second: Element, fuel: int) -> bool:
        """Equality of monad elements, exact or up to fuel"""

    @abc.abstractmethod
    def draw_element(
        self, chooser: Chooser, carrier: FinCarrier, guard: Optional[Summand] = None
    ) -> Element:
        """An element of T carrier; when guard is given, one that is guard-guarded"""

    def show(self, element: Element) -> str:
        return show(element)

    def strength(self, context, element: Element) -> Element:
        """τ : W × TY -> T(W × Y)"""
        return self.fmap(lambda value: (context, value), element)

    def observe(self, element: Element, fuel: int):
        """A comparable rendering of element, used against independent oracles"""
        return element

    def oracle_iterate(self, table: Table, fuel: int) -> Optional[Dict[Any, Any]]:
        """Observations of f^† computed without iterate(), or None if there is no oracle"""
        return None

    # derived operations

    def fmap(self, fn: Callable, element: Element) -> Element:
        return self.star(lambda value: self.unit(fn(value)), element)

    def kleisli(self, second: Callable, first: Callable) -> Callable:
        """second* ∘ first"""
        return lambda value: self.star(second, first(value))

    def delta(self, context, element: Element) -> Element:
        """δ = T(dist) ∘ τ : W × T(Y + Z) -> T(W × Y + W × Z)"""
        return self.fmap(dist, self.strength(context, element))

    def draw_table(
        self,
        chooser: Chooser,
        domain: FinCarrier,
        codomain: FinCarrier,
        guard: Optional[Summand] = None,
    ) -> Table:
        return Table.build(
            domain, codomain, lambda _: self.draw_element(chooser, codomain, guard)
        )

    def table_equal(self, first: Table, second: Table, fuel: int) -> bool:
        return all(self.equal(first(x), second(x), fuel) for x in first.domain)

    def show_table(self, table: Table) -> str:
        return "\n".join(f"{show(x)} -> {self.show(value)}" for x, value in table.items())


def dist(pair):
    """W × (Y + Z) -> W × Y + W × Z"""
    context, value = pair
    return Inj(value.side, (context, value.value))


def copair(first: Callable, second: Callable) -> Callable:
    """[f, g]"""
    return lambda value: first(value.value) if value.side == 1 else second(value.value)


def coproduct_map(first: Callable, second: Callable) -> Callable:
    """f + g"""
    return lambda value: Inj(value.side, (first if value.side == 1 else second)(value.value))


def identity(value):
    return value


def iterate(instance: GuardedMonad, table: Table) -> Table:
    return instance.iterate(table)


def delta(instance: GuardedMonad, context, element: Element) -> Element:
    return instance.delta(context, element)


def iterate_strong(instance: GuardedMonad, table: Table) -> Table:
    """
    f^‡ = (T(snd + id) ∘ δ ∘ ⟨fst, f⟩)^† for f : W × X -> T(Y + X)

    Arguments:
        instance (GuardedMonad): the monad
        table (Table): f, its domain a product carrier W × X and its codomain Y + X

    Returns:
        (Table): W × X -> T Y, threading W through the loop unchanged

    Raises:
        NotGuarded: as iterate
    """
    domain, codomain = table.domain, table.codomain
    if domain.kind != "product" or codomain.kind != "sum":
        raise ValueError("strong iteration needs f : W * X -> T(Y + X)")
    loop_codomain = FinCarrier.sum(codomain.left, domain)

    def step(state):
        context, _ = state
        paired = instance.delta(context, table(state))
        return instance.fmap(coproduct_map(lambda pair: pair[1], identity), paired)

    return instance.iterate(Table.build(domain, loop_codomain, step))
