"""
Law checking for guarded monad instances: monad laws, closure of guardedness under its
axioms, and the guarded Elgot laws of iteration and strong iteration.

Morphisms are drawn through a Chooser, so the same law code either enumerates every
instantiation of a small enough space or samples from it
"""
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from glc.exceptions import GlcError
from glc.logger_utils import TqdmLoggingHandler
from glc.monad import (
    INR,
    ONE,
    Chooser,
    FinCarrier,
    GuardedMonad,
    RandomChooser,
    Summand,
    Table,
    copair,
    coproduct_map,
    enumerate_choices,
    identity,
    inl,
    inr,
    iterate_strong,
    show,
)
from glc.threaded_runner import ThreadedRunner
from glc.trace import DEFAULT_FUEL
from glc.typehints import LawReportInfo, LawResultInfo

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

MAX_REPORTED_FAILURES = 5
INNER_GUARD = Summand(frozenset({"12", "2"}))

# enumerated without exhaustive_limit over carriers up to exhaustive_carrier
ITERATION_LAWS = frozenset(
    {
        "fixpoint",
        "naturality",
        "codiagonal",
        "uniformity",
        "strength",
        "strong-iteration",
        "strong-unit",
    }
)


@dataclass(frozen=True)
class LawConfig:
    samples: int = 1000
    seed: int = 0
    fuel: int = DEFAULT_FUEL
    max_carrier: int = 3
    max_strength_carrier: int = 2
    exhaustive_carrier: int = 2
    exhaustive_limit: int = 100000


@dataclass(frozen=True)
class LawFailure:
    morphism: str
    lhs: str
    rhs: str


@dataclass
class LawResult:
    law: str
    samples: int = 0
    exhaustive: bool = False
    failed: int = 0
    failures: List[LawFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def record(self, failure: Optional[LawFailure]):
        self.samples += 1
        if failure is not None:
            self.failed += 1
            if len(self.failures) < MAX_REPORTED_FAILURES:
                self.failures.append(failure)

    def to_dict(self) -> LawResultInfo:
        return {
            "law": self.law,
            "samples": self.samples,
            "exhaustive": self.exhaustive,
            "failed": self.failed,
            "failures": [
                {"f": failure.morphism, "lhs": failure.lhs, "rhs": failure.rhs}
                for failure in self.failures
            ],
        }


@dataclass
class LawReport:
    instance: str
    results: List[LawResult]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def result(self, law: str) -> Optional[LawResult]:
        for result in self.results:
            if result.law == law:
                return result
        return None

    def to_dict(self) -> LawReportInfo:
        return {"instance": self.instance, "laws": [result.to_dict() for result in self.results]}


class Draw:
    """Draws carriers and morphisms for one law instantiation, remembering what it drew"""

    def __init__(self, instance: GuardedMonad, chooser: Chooser, bound: int, context_bound: int):
        self.instance = instance
        self.chooser = chooser
        self.bound = bound
        self.context_bound = context_bound
        self.drawn: List[Tuple[str, Any]] = []

    def carrier(self) -> FinCarrier:
        return FinCarrier.range(self.chooser.integer(1, self.bound))

    def context(self) -> FinCarrier:
        return FinCarrier.range(self.chooser.integer(1, self.context_bound))

    def table(
        self,
        name: str,
        domain: FinCarrier,
        codomain: FinCarrier,
        guard: Optional[Summand] = None,
    ) -> Table:
        table = self.instance.draw_table(self.chooser, domain, codomain, guard)
        self.drawn.append((name, table))
        return table

    def function(self, name: str, domain: FinCarrier, codomain: FinCarrier) -> Dict:
        mapping = {x: self.chooser.choose(codomain.elements()) for x in domain}
        self.drawn.append((name, mapping))
        return mapping

    def describe(self) -> str:
        blocks = []
        for name, drawn in self.drawn:
            if isinstance(drawn, Table):
                text = self.instance.show_table(drawn)
            else:
                text = "\n".join(f"{show(x)} -> {show(y)}" for x, y in drawn.items())
            blocks.append(text if len(self.drawn) == 1 else f"{name}:\n{text}")
        return "\n".join(blocks)


LawFn = Callable[[GuardedMonad, Draw, int], Optional[LawFailure]]


def _compare(draw: Draw, lhs: Table, rhs: Table, fuel: int) -> Optional[LawFailure]:
    if draw.instance.table_equal(lhs, rhs, fuel):
        return None
    return LawFailure(
        draw.describe(), draw.instance.show_table(lhs), draw.instance.show_table(rhs)
    )


def _require_guarded(
    draw: Draw, composite: Table, summand: Summand
) -> Optional[LawFailure]:
    if draw.instance.is_guarded(composite, summand):
        return None
    return LawFailure(
        draw.describe(),
        draw.instance.show_table(composite),
        f"not {summand}-guarded",
    )


def law_left_unit(instance: GuardedMonad, draw: Draw, fuel: int):
    """η* ∘ f = f"""
    domain, codomain = draw.carrier(), draw.carrier()
    f = draw.table("f", domain, codomain)
    lhs = Table.build(domain, codomain, lambda x: instance.star(instance.unit, f(x)))
    return _compare(draw, lhs, f, fuel)


def law_right_unit(instance: GuardedMonad, draw: Draw, fuel: int):
    """f* ∘ η = f"""
    domain, codomain = draw.carrier(), draw.carrier()
    f = draw.table("f", domain, codomain)
    lhs = Table.build(domain, codomain, lambda x: instance.star(f, instance.unit(x)))
    return _compare(draw, lhs, f, fuel)


def law_associativity(instance: GuardedMonad, draw: Draw, fuel: int):
    """(f* ∘ g)* ∘ h = f* ∘ g* ∘ h"""
    source, middle, target, final = (draw.carrier() for _ in range(4))
    h = draw.table("h", source, middle)
    g = draw.table("g", middle, target)
    f = draw.table("f", target, final)
    lhs = Table.build(
        source, final, lambda w: instance.star(instance.kleisli(f, g), h(w))
    )
    rhs = Table.build(
        source, final, lambda w: instance.star(f, instance.star(g, h(w)))
    )
    return _compare(draw, lhs, rhs, fuel)


def law_trv(instance: GuardedMonad, draw: Draw, fuel: int):
    """T(inl) ∘ f is inr-guarded for any f"""
    domain, left, right = draw.carrier(), draw.carrier(), draw.carrier()
    f = draw.table("f", domain, left)
    composite = Table.build(
        domain, FinCarrier.sum(left, right), lambda x: instance.fmap(inl, f(x))
    )
    return _require_guarded(draw, composite, INR)


def law_sum(instance: GuardedMonad, draw: Draw, fuel: int):
    """[f, g] : X + Y -> TZ is guarded when f and g are"""
    first, second = draw.carrier(), draw.carrier()
    codomain = FinCarrier.sum(draw.carrier(), draw.carrier())
    f = draw.table("f", first, codomain, INR)
    g = draw.table("g", second, codomain, INR)
    composite = Table.build(FinCarrier.sum(first, second), codomain, copair(f, g))
    return _require_guarded(draw, composite, INR)


def law_cmp(instance: GuardedMonad, draw: Draw, fuel: int):
    """[g, h]* ∘ f is guarded for inr-guarded f and guarded g"""
    domain, left, right = draw.carrier(), draw.carrier(), draw.carrier()
    target = FinCarrier.sum(draw.carrier(), draw.carrier())
    f = draw.table("f", domain, FinCarrier.sum(left, right), INR)
    g = draw.table("g", left, target, INR)
    h = draw.table("h", right, target)
    composite = Table.build(domain, target, lambda x: instance.star(copair(g, h), f(x)))
    return _require_guarded(draw, composite, INR)


def law_str(instance: GuardedMonad, draw: Draw, fuel: int):
    """δ ∘ (id × f) is guarded for guarded f"""
    context, domain = draw.context(), draw.carrier()
    left, right = draw.carrier(), draw.carrier()
    f = draw.table("f", domain, FinCarrier.sum(left, right), INR)
    composite = Table.build(
        FinCarrier.product(context, domain),
        FinCarrier.sum(FinCarrier.product(context, left), FinCarrier.product(context, right)),
        lambda pair: instance.delta(pair[0], f(pair[1])),
    )
    return _require_guarded(draw, composite, INR)


def law_cdm(instance: GuardedMonad, draw: Draw, fuel: int):
    """f* ∘ g is guarded for any g and guarded f"""
    domain, middle = draw.carrier(), draw.carrier()
    target = FinCarrier.sum(draw.carrier(), draw.carrier())
    g = draw.table("g", domain, middle)
    f = draw.table("f", middle, target, INR)
    composite = Table.build(domain, target, instance.kleisli(f, g))
    return _require_guarded(draw, composite, INR)


def _loop(draw: Draw, name: str = "f"):
    domain, result = draw.carrier(), draw.carrier()
    return draw.table(name, domain, FinCarrier.sum(result, domain), INR)


def law_fixpoint(instance: GuardedMonad, draw: Draw, fuel: int):
    """f^† = [η, f^†]* ∘ f"""
    f = _loop(draw)
    dagger = instance.iterate(f)
    rhs = Table.build(
        f.domain, dagger.codomain, lambda x: instance.star(copair(instance.unit, dagger), f(x))
    )
    return _compare(draw, dagger, rhs, fuel)


def law_naturality(instance: GuardedMonad, draw: Draw, fuel: int):
    """g* ∘ f^† = ([T(inl) ∘ g, η ∘ inr]* ∘ f)^†"""
    f = _loop(draw)
    result, target = f.codomain.left, draw.carrier()
    g = draw.table("g", result, target)
    dagger = instance.iterate(f)
    lhs = Table.build(f.domain, target, lambda x: instance.star(g, dagger(x)))
    step = copair(
        lambda y: instance.fmap(inl, g(y)),
        lambda x: instance.unit(inr(x)),
    )
    combined = Table.build(
        f.domain, FinCarrier.sum(target, f.domain), lambda x: instance.star(step, f(x))
    )
    return _compare(draw, lhs, instance.iterate(combined), fuel)


def law_codiagonal(instance: GuardedMonad, draw: Draw, fuel: int):
    """(T[id, inr] ∘ f)^† = f^†† for f guarded in {12, 2}"""
    domain, result = draw.carrier(), draw.carrier()
    inner = FinCarrier.sum(result, domain)
    f = draw.table("f", domain, FinCarrier.sum(inner, domain), INNER_GUARD)
    merged = Table.build(
        domain, inner, lambda x: instance.fmap(copair(identity, inr), f(x))
    )
    lhs = instance.iterate(merged)
    rhs = instance.iterate(instance.iterate(f))
    return _compare(draw, lhs, rhs, fuel)


def law_uniformity(instance: GuardedMonad, draw: Draw, fuel: int):
    """
    f ∘ h = T(id + h) ∘ g implies f^† ∘ h = g^†. The premise holds by construction:
    g is drawn on one representative per fibre of h and relabelled along a fibre
    preserving map elsewhere, and f is forced on the image of h
    """
    states, hidden, result = draw.carrier(), draw.carrier(), draw.carrier()
    h = draw.function("h", hidden, states)
    fibres: Dict[Any, List[Any]] = {}
    for z in hidden:
        fibres.setdefault(h[z], []).append(z)
    relabel = {z: draw.chooser.choose(fibres[h[z]]) for z in hidden}

    g_codomain = FinCarrier.sum(result, hidden)
    representatives = {
        x: instance.draw_element(draw.chooser, g_codomain, INR) for x in fibres
    }

    def g_row(z):
        base = representatives[h[z]]
        if z == fibres[h[z]][0]:
            return base
        return instance.fmap(coproduct_map(identity, relabel.get), base)

    g = Table.build(hidden, g_codomain, g_row)
    f_codomain = FinCarrier.sum(result, states)

    def f_row(x):
        if x in representatives:
            return instance.fmap(coproduct_map(identity, h.get), representatives[x])
        return instance.draw_element(draw.chooser, f_codomain, INR)

    f = Table.build(states, f_codomain, f_row)
    draw.drawn.extend((("g", g), ("f", f)))

    premise_lhs = Table.build(hidden, f_codomain, lambda z: f(h[z]))
    premise_rhs = Table.build(
        hidden, f_codomain, lambda z: instance.fmap(coproduct_map(identity, h.get), g(z))
    )
    failure = _compare(draw, premise_lhs, premise_rhs, fuel)
    if failure is not None:
        return LawFailure(failure.morphism, "premise: " + failure.lhs, failure.rhs)

    f_dagger = instance.iterate(f)
    lhs = Table.build(hidden, f_dagger.codomain, lambda z: f_dagger(h[z]))
    return _compare(draw, lhs, instance.iterate(g), fuel)


def law_strength(instance: GuardedMonad, draw: Draw, fuel: int):
    """τ ∘ (id × f^†) = (δ ∘ (id × f))^†"""
    context = draw.context()
    f = _loop(draw)
    domain, result = f.domain, f.codomain.left
    pairs = FinCarrier.product(context, domain)
    dagger = instance.iterate(f)
    lhs = Table.build(
        pairs,
        FinCarrier.product(context, result),
        lambda pair: instance.strength(pair[0], dagger(pair[1])),
    )
    paired = Table.build(
        pairs,
        FinCarrier.sum(FinCarrier.product(context, result), pairs),
        lambda pair: instance.delta(pair[0], f(pair[1])),
    )
    return _compare(draw, lhs, instance.iterate(paired), fuel)


def _strong_loop(draw: Draw) -> Table:
    context, domain, result = draw.context(), draw.carrier(), draw.carrier()
    return draw.table(
        "f", FinCarrier.product(context, domain), FinCarrier.sum(result, domain), INR
    )


def law_strong_iteration(instance: GuardedMonad, draw: Draw, fuel: int):
    """τ ∘ ⟨fst, f^‡⟩ = (δ ∘ ⟨fst, f⟩)^†"""
    f = _strong_loop(draw)
    pairs, result = f.domain, f.codomain.left
    context = pairs.left
    strong = iterate_strong(instance, f)
    lhs = Table.build(
        pairs,
        FinCarrier.product(context, result),
        lambda pair: instance.strength(pair[0], strong(pair)),
    )
    paired = Table.build(
        pairs,
        FinCarrier.sum(FinCarrier.product(context, result), pairs),
        lambda pair: instance.delta(pair[0], f(pair)),
    )
    return _compare(draw, lhs, instance.iterate(paired), fuel)


def law_strong_unit(instance: GuardedMonad, draw: Draw, fuel: int):
    """f^‡ on a singleton context agrees with f^†"""
    f = _loop(draw)
    lifted = Table.build(
        FinCarrier.product(ONE, f.domain), f.codomain, lambda pair: f(pair[1])
    )
    strong = iterate_strong(instance, lifted)
    lhs = Table.build(f.domain, f.codomain.left, lambda x: strong((0, x)))
    return _compare(draw, lhs, instance.iterate(f), fuel)


def law_oracle(instance: GuardedMonad, draw: Draw, fuel: int):
    """f^† agrees with an iteration computed independently of iterate()"""
    f = _loop(draw)
    expected = instance.oracle_iterate(f, fuel)
    if expected is None:
        raise ValueError(f"{instance.name} has no independent iteration oracle")
    dagger = instance.iterate(f)
    for x in f.domain:
        observed = instance.observe(dagger(x), fuel)
        if observed != expected[x]:
            return LawFailure(
                draw.describe(), f"{show(x)} -> {observed}", f"{show(x)} -> {expected[x]}"
            )
    return None


LAWS: Dict[str, LawFn] = {
    "left-unit": law_left_unit,
    "right-unit": law_right_unit,
    "associativity": law_associativity,
    "trv": law_trv,
    "sum": law_sum,
    "cmp": law_cmp,
    "str": law_str,
    "cdm": law_cdm,
    "fixpoint": law_fixpoint,
    "naturality": law_naturality,
    "codiagonal": law_codiagonal,
    "uniformity": law_uniformity,
    "strength": law_strength,
    "strong-iteration": law_strong_iteration,
    "strong-unit": law_strong_unit,
    "oracle": law_oracle,
}


def _instantiate(
    instance: GuardedMonad, law: LawFn, draw: Draw, fuel: int
) -> Optional[LawFailure]:
    try:
        return law(instance, draw, fuel)
    except GlcError as err:
        return LawFailure(draw.describe(), f"{type(err).__name__}: {err}", "")


def check_law(instance: GuardedMonad, name: str, config: LawConfig = LawConfig()) -> LawResult:
    """
    Checks one law: exhaustively over carriers up to config.exhaustive_carrier when
    the instance is finite, then on config.samples random instantiations. Iteration
    laws are enumerated completely; the other laws stop after config.exhaustive_limit
    instantiations and are marked as not exhaustive

    Arguments:
        instance (GuardedMonad): the monad under test
        name (str): a key of LAWS
        config (LawConfig): sampling parameters

    Returns:
        (LawResult): the instantiation count and the first counterexamples
    """
    law = LAWS[name]
    result = LawResult(name)

    def run(chooser: Chooser, bound: int, context_bound: int):
        draw = Draw(instance, chooser, bound, context_bound)
        return _instantiate(instance, law, draw, config.fuel)

    if instance.exhaustive:
        bound = config.exhaustive_carrier
        outcomes, complete = enumerate_choices(
            lambda chooser: run(chooser, bound, min(bound, config.max_strength_carrier)),
            None if name in ITERATION_LAWS else config.exhaustive_limit,
        )
        result.exhaustive = complete
        for outcome in outcomes:
            result.record(outcome)

    rng = random.Random(config.seed * len(LAWS) + list(LAWS).index(name))
    chooser = RandomChooser(rng)
    for _ in range(config.samples):
        result.record(run(chooser, config.max_carrier, config.max_strength_carrier))

    logger.debug(
        "%s/%s: %i instantiations, %i failed", instance.name, name, result.samples, result.failed
    )
    return result


def check_laws(
    instance: GuardedMonad,
    config: LawConfig = LawConfig(),
    laws: Optional[Sequence[str]] = None,
    progress: bool = False,
) -> LawReport:
    """
    Checks every law (or the named ones) against an instance

    Arguments:
        instance (GuardedMonad): the monad under test
        config (LawConfig): sampling parameters
        laws (Sequence[str]): subset of LAWS to check, all by default
        progress (bool): show a progress bar

    Returns:
        (LawReport): one result per law
    """
    names = list(laws) if laws is not None else [
        name for name in LAWS if name != "oracle" or instance.has_oracle
    ]
    unknown = [name for name in names if name not in LAWS]
    if unknown:
        raise ValueError(f"Unknown laws: {', '.join(unknown)}")

    runner = ThreadedRunner(progress_bars=progress, progress_desc=f"Laws ({instance.name})")
    results = runner.map(lambda name: check_law(instance, name, config), names)
    report = LawReport(instance.name, results)
    logger.info(
        "%s: %i laws checked, %i failed",
        instance.name,
        len(report.results),
        sum(1 for result in report.results if not result.passed),
    )
    return report
