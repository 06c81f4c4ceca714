"""
The finite powerset monad P with total guardedness and least fixpoint iteration, and
its non-empty restriction P+ whose guardedness asks every f(x) to meet the unguarded
summand
"""
import functools
import itertools
import logging
from typing import Dict, FrozenSet, Optional, Tuple

from glc.exceptions import EmptyResult, NotGuarded
from glc.logger_utils import TqdmLoggingHandler
from glc.monad import INR, Chooser, FinCarrier, GuardedMonad, Summand, Table, show

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

Subset = FrozenSet


def p_iterate(table: Table) -> Table:
    """
    Least fixpoint of s -> [η, s]* ∘ f by Kleene iteration from the empty table

    Arguments:
        table (Table): f : X -> P(Y + X)

    Returns:
        (Table): f^† : X -> P(Y)
    """
    current: Dict = {x: frozenset() for x in table.domain}
    rounds = 0
    while True:
        rounds += 1
        following = {
            x: frozenset().union(
                *(
                    {result.value} if result.side == 1 else current[result.value]
                    for result in subset
                )
            )
            for x, subset in table.items()
        }
        if following == current:
            break
        current = following
    logger.debug("Kleene iteration stabilised after %i rounds", rounds)
    return Table(table.domain, table.codomain.left, tuple(current.items()))


def reachable_iterate(table: Table) -> Table:
    """
    f^† by graph search: y is in f^†(x) iff some finite path of inr steps leads from x
    to an element containing inl y
    """

    def search(start):
        seen = {start}
        frontier = [start]
        found = set()
        while frontier:
            x = frontier.pop()
            for result in table(x):
                if result.side == 1:
                    found.add(result.value)
                elif result.value not in seen:
                    seen.add(result.value)
                    frontier.append(result.value)
        return frozenset(found)

    return Table.build(table.domain, table.codomain.left, search)


def pplus_guarded(table: Table, summand: Summand = INR) -> bool:
    return _guard_witness(table, summand) is None


def _guard_witness(table: Table, summand: Summand):
    for x, subset in table.items():
        if not any(not summand.contains(result) for result in subset):
            return x
    return None


def pplus_iterate(table: Table) -> Table:
    """
    Iteration in P+, the restriction of p_iterate to guarded morphisms

    Raises:
        NotGuarded: if some f(x) contains no inl element
        EmptyResult: if iteration produced an empty set regardless
    """
    witness = _guard_witness(table, INR)
    if witness is not None:
        raise NotGuarded(
            f"f({show(witness)}) = {show(table(witness))} has no element on the left",
            witness,
        )
    result = p_iterate(table)
    for x, subset in result.items():
        if not subset:
            raise EmptyResult(f"f^†({show(x)}) is empty")
    return result


@functools.lru_cache(maxsize=None)
def subsets(carrier: FinCarrier) -> Tuple[Subset, ...]:
    elements = carrier.elements()
    return tuple(
        frozenset(combination)
        for size in range(len(elements) + 1)
        for combination in itertools.combinations(elements, size)
    )


class PowersetMonad(GuardedMonad):
    """The powerset monad on finite carriers, every morphism guarded"""

    name = "powerset"
    has_oracle = True

    def unit(self, value) -> Subset:
        return frozenset((value,))

    def star(self, fn, element: Subset) -> Subset:
        return frozenset().union(*(fn(value) for value in element))

    def is_guarded(self, table: Table, summand: Summand) -> bool:
        return True

    def iterate(self, table: Table) -> Table:
        return p_iterate(table)

    def equal(self, first: Subset, second: Subset, fuel: int) -> bool:
        return first == second

    def draw_element(
        self, chooser: Chooser, carrier: FinCarrier, guard: Optional[Summand] = None
    ) -> Subset:
        return chooser.choose(subsets(carrier))

    def oracle_iterate(self, table: Table, fuel: int) -> Dict:
        return dict(reachable_iterate(table).items())


class NonEmptyPowersetMonad(PowersetMonad):
    """
    The non-empty powerset monad. f is σ-guarded iff every f(x) contains an element
    outside σ
    """

    name = "nonempty-powerset"

    def is_guarded(self, table: Table, summand: Summand) -> bool:
        return pplus_guarded(table, summand)

    def iterate(self, table: Table) -> Table:
        return pplus_iterate(table)

    def draw_element(
        self, chooser: Chooser, carrier: FinCarrier, guard: Optional[Summand] = None
    ) -> Subset:
        options = _nonempty_subsets(carrier, guard)
        if not options:
            raise ValueError(f"no guarded non-empty subset of {carrier} outside {guard}")
        return chooser.choose(options)


@functools.lru_cache(maxsize=None)
def _nonempty_subsets(carrier: FinCarrier, guard: Optional[Summand]) -> Tuple[Subset, ...]:
    return tuple(
        subset
        for subset in subsets(carrier)
        if subset and (guard is None or any(not guard.contains(value) for value in subset))
    )

