"""
Differential adequacy testing: both evaluators observe the same checked program up to
a fuel bound and must agree on the events and on the terminal
"""
import collections
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, List, Optional, Tuple, Type

from glc.denotational import (
    EMPTY_ENV,
    INCOMPARABLE,
    Raised,
    denote_comp,
    denote_value,
    readback,
)
from glc.exceptions import GlcError, GlcTypeError
from glc.generator import GenConfig, gen_program_with_coverage
from glc.logger_utils import TqdmLoggingHandler
from glc.monad import Inj
from glc.operational import PENDING, Evaluator, Limits, RaiseV, RetV
from glc.printer import pretty, pretty_program
from glc.syntax import (
    EMPTY_DELTA,
    WILDCARD,
    Case,
    CompTerm,
    Do,
    ExcContext,
    GCase,
    Inl,
    Inr,
    Nat,
    One,
    PCase,
    Pair,
    Prod,
    Ret,
    Star,
    Sum,
    Tag,
    TypeExpr,
    ValueTerm,
    free_vars,
    has_hole,
    is_first_order,
    numeral,
    replace_subterm,
    strip_annotations,
    substitute,
    subterms,
)
from glc.threaded_runner import THREAD_COUNT, ThreadedRunner
from glc.trace import DEFAULT_FUEL, Done, EventStream, take
from glc.typecheck import TypedProgram, check_program
from glc.typehints import (
    AdequacyReportInfo,
    Coverage,
    DisagreementInfo,
    EventInfo,
    ObservationInfo,
)
from glc.utils import format_events

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

MAX_SHRINK_ATTEMPTS = 500


@dataclass(frozen=True)
class Observation:
    """
    A fuel bounded reading of an event stream. kind is "ret", "raise", "pending", or
    "error" when the evaluator itself failed; values are canonically printed
    """

    events: Tuple[int, ...]
    kind: str
    exc: Optional[str] = None
    value: Optional[str] = None

    def terminal_text(self) -> str:
        if self.kind == "ret":
            return f"ret {self.value}"
        if self.kind == "raise":
            return f"raise {self.exc} {self.value}"
        if self.kind == "error":
            return f"error: {self.value}"
        return "pending"

    def __str__(self):
        return f"{format_events(self.events)} {self.terminal_text()}"

    def terminal_item(self) -> EventInfo:
        if self.kind == "ret":
            return {"done": self.value}
        if self.kind == "raise":
            return {"raise": self.exc, "value": self.value}
        if self.kind == "error":
            return {"error": self.exc, "message": self.value}
        return {"pending": True}

    def to_dict(self) -> ObservationInfo:
        items: List[EventInfo] = [{"out": event} for event in self.events]
        items.append(self.terminal_item())
        return {"events": items}


def _canonical(value) -> str:
    if value is INCOMPARABLE:
        return "<function>"
    return pretty(strip_annotations(value))


def _terminal(done: Optional[Done], result_type: Optional[TypeExpr], delta: ExcContext):
    """(kind, exc, value) for the Done item of either evaluator"""
    if done is None or done.value is PENDING:
        return "pending", None, None
    terminal = done.value
    if isinstance(terminal, RetV):
        return "ret", None, _canonical(terminal.value)
    if isinstance(terminal, RaiseV):
        return "raise", terminal.exc, _canonical(terminal.value)
    if isinstance(terminal, Inj) and terminal.side == 1:
        return "ret", None, _canonical(readback(terminal.value, result_type))
    if isinstance(terminal, Inj) and isinstance(terminal.value, Raised):
        raised = terminal.value
        entry = delta.lookup(raised.exc)
        payload_type = entry.payload if entry is not None else None
        return "raise", raised.exc, _canonical(readback(raised.value, payload_type))
    raise TypeError(f"not a terminal: {terminal!r}")


def observe(
    stream: EventStream,
    fuel: int = DEFAULT_FUEL,
    result_type: Optional[TypeExpr] = None,
    delta: ExcContext = EMPTY_DELTA,
) -> Observation:
    """
    Reads at most fuel events and the terminal, if it follows directly

    Arguments:
        stream (EventStream): an operational or denotational stream, consumed
        fuel (int): the most events to read
        result_type (TypeExpr): reads back denotational results at this type
        delta (ExcContext): reads back raised payloads at their declared types

    Returns:
        (Observation): the events and the terminal, "error" if pulling failed
    """
    try:
        events, done = take(stream, fuel)
        return observation_of(events, done, result_type, delta)
    except GlcError as err:
        return Observation((), "error", type(err).__name__, str(err))


def observation_of(
    events, done: Optional[Done], result_type: Optional[TypeExpr] = None, delta=EMPTY_DELTA
) -> Observation:
    """The observation of events read so far and the Done item, None while pending"""
    kind, exc, value = _terminal(done, result_type, delta)
    return Observation(tuple(events), kind, exc, value)


@dataclass(frozen=True)
class Verdict:
    operational: Observation
    denotational: Observation

    @property
    def agreed(self) -> bool:
        return isinstance(self, Agree)


@dataclass(frozen=True)
class Agree(Verdict):
    pass


@dataclass(frozen=True)
class Disagree(Verdict):
    detail: str = ""


def _comparable(typed: TypedProgram) -> bool:
    return is_first_order(typed.result_type) and all(
        is_first_order(entry.payload) for entry in typed.delta
    )


def _compare(typed: TypedProgram, operational: Observation, denotational: Observation) -> str:
    """A description of the first difference, empty if the observations agree"""
    for side, obs in (("operational", operational), ("denotational", denotational)):
        if obs.kind == "error":
            return f"{side} evaluation failed with {obs.exc}: {obs.value}"
    if operational.events != denotational.events:
        return (
            f"events differ: {list(operational.events)} operationally, "
            f"{list(denotational.events)} denotationally"
        )
    if operational.terminal_text() != denotational.terminal_text():
        return (
            f"terminals differ: {operational.terminal_text()} operationally, "
            f"{denotational.terminal_text()} denotationally"
        )
    if operational.kind == "raise":
        entry = typed.delta.lookup(operational.exc)
        if entry is not None and entry.tag == Tag.G and not operational.events:
            return f"guarded exception {operational.exc} raised without a preceding event"
    return ""


def adequacy_check(
    typed: TypedProgram,
    fuel: int = DEFAULT_FUEL,
    limits: Optional[Limits] = None,
    evaluator_class: Type[Evaluator] = Evaluator,
) -> Verdict:
    """
    Runs a checked closed program through both evaluators and compares what they show
    within fuel events

    Arguments:
        typed (TypedProgram): the program, with first-order result and payload types
        fuel (int): the observation bound, for both sides
        limits (Limits): operational limits; max_events is always set to fuel
        evaluator_class (Type[Evaluator]): the operational evaluator, or a mutant

    Returns:
        (Verdict): Agree, or Disagree with a description of the first difference

    Raises:
        ValueError: if a result or payload type mentions a function type
    """
    if not _comparable(typed):
        raise ValueError("only programs with first-order result and payload types compare")
    limits = replace(limits or Limits(), max_events=fuel)
    declarations = typed.program.declarations

    operational = observe(
        evaluator_class(limits, declarations).stream(typed.main),
        fuel,
        typed.result_type,
        typed.delta,
    )
    try:
        stream = denote_comp(typed.main, EMPTY_ENV, declarations)
    except GlcError as err:
        denotational = Observation((), "error", type(err).__name__, str(err))
    else:
        denotational = observe(stream, fuel, typed.result_type, typed.delta)

    detail = _compare(typed, operational, denotational)
    if detail:
        logger.debug("Disagreement: %s", detail)
        return Disagree(operational, denotational, detail)
    return Agree(operational, denotational)


def canonical_value(typ: TypeExpr) -> Optional[ValueTerm]:
    """The smallest closed value of a first-order type, None for 0 and function types"""
    if isinstance(typ, Nat):
        return numeral(0)
    if isinstance(typ, One):
        return Star()
    if isinstance(typ, Sum):
        left = canonical_value(typ.left)
        if left is not None:
            return Inl(left, typ)
        right = canonical_value(typ.right)
        return None if right is None else Inr(right, typ)
    if isinstance(typ, Prod):
        first, second = canonical_value(typ.left), canonical_value(typ.right)
        if first is None or second is None:
            return None
        return Pair(first, second)
    return None


def _stub(typed: TypedProgram, node: CompTerm) -> Optional[CompTerm]:
    annotation = typed.annotation(node)
    if annotation is None or annotation.type is None or has_hole(annotation.type):
        return None
    value = canonical_value(annotation.type)
    if value is None:
        return None
    stub = Ret(value)
    return None if stub == node else stub


def _bind(typed: TypedProgram, var: str, branch: CompTerm) -> Optional[CompTerm]:
    """branch with var replaced by the smallest value of its type"""
    if var == WILDCARD or var not in free_vars(branch):
        return branch
    annotation = typed.annotation(branch)
    typ = annotation.context.lookup(var) if annotation is not None else None
    value = canonical_value(typ) if typ is not None and not has_hole(typ) else None
    return None if value is None else substitute(branch, {var: value})


def _reductions(typed: TypedProgram, node: CompTerm) -> Iterator[CompTerm]:
    """Smaller computations that may replace node, most promising first"""
    if isinstance(node, Do):
        if isinstance(node.bound, Ret):
            yield substitute(node.body, {node.var: node.bound.value})
        elif node.var == WILDCARD or node.var not in free_vars(node.body):
            yield node.body
    elif isinstance(node, Case):
        if isinstance(node.scrutinee, Inl):
            yield substitute(node.left, {node.left_var: node.scrutinee.value})
        elif isinstance(node.scrutinee, Inr):
            yield substitute(node.right, {node.right_var: node.scrutinee.value})
    elif isinstance(node, PCase) and isinstance(node.scrutinee, Pair):
        bindings = {node.first_var: node.scrutinee.first, node.second_var: node.scrutinee.second}
        yield substitute(node.body, bindings)
    if isinstance(node, (Case, GCase)):
        for var, branch in ((node.left_var, node.left), (node.right_var, node.right)):
            candidate = _bind(typed, var, branch)
            if candidate is not None:
                yield candidate
    stub = _stub(typed, node)
    if stub is not None:
        yield stub


def shrink(typed: TypedProgram, predicate: Callable[[TypedProgram], bool]) -> TypedProgram:
    """
    Reduces a program for as long as predicate keeps holding, larger subterms first.
    A computation is replaced by a simpler one: do over ret by its substituted body,
    case on an injection by the taken branch, case and gcase by either branch, and
    finally any computation by ret of the smallest value of its type

    Arguments:
        typed (TypedProgram): a program for which predicate holds
        predicate (Callable[[TypedProgram], bool]): the property to preserve

    Returns:
        (TypedProgram): a checked program, no larger than typed, satisfying predicate
    """
    attempts = 0
    shrunk = True
    while shrunk and attempts < MAX_SHRINK_ATTEMPTS:
        shrunk = False
        for path, node in subterms(typed.main):
            if not isinstance(node, CompTerm):
                continue
            for reduced in _reductions(typed, node):
                if reduced == node or len(pretty(reduced)) > len(pretty(node)):
                    continue
                attempts += 1
                program = replace(typed.program, main=replace_subterm(typed.main, path, reduced))
                try:
                    candidate = check_program(program)
                except GlcTypeError:
                    candidate = None
                if candidate is not None and predicate(candidate):
                    typed = candidate
                    shrunk = True
                    break
                if attempts >= MAX_SHRINK_ATTEMPTS:
                    break
            if shrunk or attempts >= MAX_SHRINK_ATTEMPTS:
                break
    logger.debug("Shrinking stopped after %i attempts", attempts)
    return typed


@dataclass
class Disagreement:
    seed: int
    program: str
    verdict: Disagree

    def to_dict(self) -> DisagreementInfo:
        return {
            "seed": self.seed,
            "program": self.program,
            "operational": self.verdict.operational.to_dict(),
            "denotational": self.verdict.denotational.to_dict(),
            "detail": self.verdict.detail,
        }


@dataclass
class AdequacyReport:
    total: int = 0
    agreed: int = 0
    disagreements: List[Disagreement] = field(default_factory=list)
    coverage: Coverage = field(default_factory=collections.Counter)

    @property
    def passed(self) -> bool:
        return not self.disagreements

    def to_dict(self) -> AdequacyReportInfo:
        return {
            "total": self.total,
            "agreed": self.agreed,
            "disagreed": [disagreement.to_dict() for disagreement in self.disagreements],
        }


def run_adequacy_suite(
    config: GenConfig,
    count: int,
    fuel: int = DEFAULT_FUEL,
    limits: Optional[Limits] = None,
    evaluator_class: Type[Evaluator] = Evaluator,
    progress: bool = False,
    threads: int = THREAD_COUNT,
    shrink_witnesses: bool = True,
) -> AdequacyReport:
    """
    Generates count programs with seeds config.seed, config.seed + 1, ... and checks
    each of them; disagreeing programs are shrunk before they are reported unless
    shrink_witnesses is False

    Arguments:
        config (GenConfig): generator settings, the seed of the first program
        count (int): how many programs to check
        fuel (int): observation bound
        limits (Limits): operational limits
        evaluator_class (Type[Evaluator]): the operational evaluator, or a mutant
        progress (bool): show a progress bar
        threads (int): worker threads
        shrink_witnesses (bool): shrink disagreeing programs before reporting them

    Returns:
        (AdequacyReport): counts, (shrunk) witnesses ordered by seed, and construct coverage
    """

    def check_one(seed: int):
        typed, coverage = gen_program_with_coverage(replace(config, seed=seed))
        verdict = adequacy_check(typed, fuel, limits, evaluator_class)
        if verdict.agreed:
            return seed, coverage, None
        if not shrink_witnesses:
            return seed, coverage, Disagreement(seed, pretty_program(typed.program), verdict)

        def still_disagrees(candidate: TypedProgram) -> bool:
            return not adequacy_check(candidate, fuel, limits, evaluator_class).agreed

        shrunk = shrink(typed, still_disagrees)
        verdict = adequacy_check(shrunk, fuel, limits, evaluator_class)
        return seed, coverage, Disagreement(seed, pretty_program(shrunk.program), verdict)

    runner = ThreadedRunner(progress, "Adequacy", threads)
    results = runner.map(check_one, [config.seed + index for index in range(count)])

    report = AdequacyReport(total=count)
    for _, coverage, disagreement in sorted(results, key=lambda result: result[0]):
        report.coverage.update(coverage)
        if disagreement is None:
            report.agreed += 1
        else:
            report.disagreements.append(disagreement)

    logger.info(
        "%i of %i programs agree (%s)",
        report.agreed,
        report.total,
        evaluator_class.__name__,
    )
    return report


def substitution_agrees(
    comp: CompTerm,
    var: str,
    value: ValueTerm,
    result_type: TypeExpr,
    fuel: int = DEFAULT_FUEL,
) -> bool:
    """
    Compares the denotation of comp[value/var] with that of comp in an environment
    binding var to the denotation of value

    Arguments:
        comp (CompTerm): a computation whose only free variable is var
        var (str): the variable
        value (ValueTerm): a closed value of var's type
        result_type (TypeExpr): the type of comp
        fuel (int): the observation bound

    Returns:
        (bool): True if both observations are equal
    """
    substituted = observe(denote_comp(substitute(comp, {var: value})), fuel, result_type)
    env = EMPTY_ENV.extend(var, denote_value(value))
    bound = observe(denote_comp(comp, env), fuel, result_type)
    return substituted == bound
