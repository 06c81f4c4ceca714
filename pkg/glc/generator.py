"""
Type directed generation of random closed, well-typed core programs over the built-in
signature (zero, succ, pred, put). Generation is deterministic per seed
"""
import collections
import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from glc.exceptions import GlcTypeError
from glc.logger_utils import TqdmLoggingHandler
from glc.syntax import (
    EMPTY_DELTA,
    WILDCARD,
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
    Nat,
    One,
    Pair,
    PCase,
    Prim,
    Prod,
    Program,
    Raise,
    Ret,
    Star,
    Sum,
    Tag,
    TypeExpr,
    ValueTerm,
    Var,
    Zero,
    is_first_order,
    numeral,
)
from glc.typecheck import EMPTY_GAMMA, TypeChecker, TypedProgram, VarContext, check_program
from glc.typehints import Coverage

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

MAX_RETRIES = 20
MAX_NUMERAL = 3

CONSTRUCTS = (
    "ret",
    "do",
    "case",
    "pcase",
    "gcase-put",
    "gcase-pred",
    "raise",
    "handle",
    "handleit",
    "loop",
    "lambda",
    "app",
    "init",
)

DEFAULT_WEIGHTS: Dict[str, int] = {
    "ret": 3,
    "do": 4,
    "case": 2,
    "pcase": 1,
    "gcase-put": 3,
    "gcase-pred": 2,
    "raise": 2,
    "handle": 2,
    "handleit": 2,
    "loop": 1,
    "app": 2,
}

SMALL_TYPES: Tuple[TypeExpr, ...] = (
    Nat(),
    One(),
    Sum(One(), Nat()),
    Prod(Nat(), Nat()),
    Sum(Nat(), One()),
)


@dataclass(frozen=True)
class GenConfig:
    """
    Arguments:
        seed (int): the only source of randomness
        max_depth (int): constructs nest at most this deep, ret/raise/init at the frontier
        result_type (TypeExpr): first-order result type, random from SMALL_TYPES if None
        exception_budget (int): the most handle/handleit binders per program
        weights (Dict[str, int]): relative frequency of each construct
    """

    seed: int = 0
    max_depth: int = 6
    result_type: Optional[TypeExpr] = None
    exception_budget: int = 3
    weights: Dict[str, int] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def __post_init__(self):
        if self.result_type is not None and not is_first_order(self.result_type):
            raise ValueError("generated programs have first-order result types")
        if any(weight <= 0 for weight in self.weights.values()):
            raise ValueError("construct weights must be positive")
        unknown = set(self.weights) - set(CONSTRUCTS)
        if unknown:
            raise ValueError(f"Unknown constructs: {', '.join(sorted(unknown))}")


class _DeadEnd(Exception):
    """No construct can produce the requested type here"""


class ProgramGenerator:
    """Generates one program; holds the random source, fresh name counters and coverage"""

    def __init__(self, config: GenConfig, rng: random.Random):
        self.config = config
        self.rng = rng
        self.coverage: Coverage = collections.Counter()
        self.checker = TypeChecker()
        self._variables = 0
        self._exceptions = 0

    def fresh_var(self) -> str:
        name = f"v{self._variables}"
        self._variables += 1
        return name

    def fresh_exc(self) -> str:
        name = f"e{self._exceptions}"
        self._exceptions += 1
        return name

    def small_type(self) -> TypeExpr:
        return self.rng.choice(SMALL_TYPES)

    # values

    def value(self, gamma: VarContext, typ: TypeExpr, depth: int) -> ValueTerm:
        candidates = [name for name, var_type in gamma.entries if var_type == typ]
        if candidates and self.rng.random() < 0.5:
            return Var(self.rng.choice(candidates))
        if isinstance(typ, Nat):
            if candidates and depth > 0 and self.rng.random() < 0.3:
                return Prim("succ", Var(self.rng.choice(candidates)))
            return numeral(self.rng.randint(0, MAX_NUMERAL))
        if isinstance(typ, One):
            return Star()
        if isinstance(typ, Sum):
            if self.rng.random() < 0.5:
                return Inl(self.value(gamma, typ.left, depth - 1), typ)
            return Inr(self.value(gamma, typ.right, depth - 1), typ)
        if isinstance(typ, Prod):
            first = self.value(gamma, typ.left, depth - 1)
            return Pair(first, self.value(gamma, typ.right, depth - 1))
        if isinstance(typ, Fun):
            self.coverage["lambda"] += 1
            param = self.fresh_var()
            body = self.comp(typ.delta, gamma.extend(param, typ.arg), typ.result, depth - 1)
            return Lam(param, typ.arg, typ.delta, body, typ)
        if candidates:
            return Var(candidates[0])
        raise _DeadEnd(f"no value of type {typ}")

    # computations

    def comp(self, delta: ExcContext, gamma: VarContext, typ: TypeExpr, depth: int) -> CompTerm:
        if depth <= 0:
            return self.frontier(delta, gamma, typ)
        options = self.options(delta, gamma, typ)
        weights = [self.config.weights.get(option, 1) for option in options]
        construct = self.rng.choices(options, weights)[0]
        self.coverage[construct] += 1
        return getattr(self, "gen_" + construct.replace("-", "_"))(delta, gamma, typ, depth - 1)

    def options(self, delta: ExcContext, gamma: VarContext, typ: TypeExpr) -> List[str]:
        options = [name for name in CONSTRUCTS if name in self.config.weights]
        if not self._raisable(delta):
            options = [name for name in options if name != "raise"]
        if self._exceptions >= self.config.exception_budget:
            options = [name for name in options if name not in ("handle", "handleit", "loop")]
        if not any(isinstance(var_type, Zero) for _, var_type in gamma.entries):
            options = [name for name in options if name != "init"]
        return options or ["ret"]

    def frontier(self, delta: ExcContext, gamma: VarContext, typ: TypeExpr) -> CompTerm:
        zeros = [name for name, var_type in gamma.entries if isinstance(var_type, Zero)]
        if zeros and self.rng.random() < 0.3:
            self.coverage["init"] += 1
            return Init(Var(self.rng.choice(zeros)))
        raisable = self._raisable(delta)
        if raisable and self.rng.random() < 0.2:
            self.coverage["raise"] += 1
            return self.gen_raise(delta, gamma, typ, 0)
        self.coverage["ret"] += 1
        return Ret(self.value(gamma, typ, 1))

    def _raisable(self, delta: ExcContext):
        return [entry for entry in delta if entry.tag == Tag.U]

    def gen_ret(self, delta, gamma, typ, depth):
        return Ret(self.value(gamma, typ, depth))

    def gen_raise(self, delta, gamma, typ, depth):
        entry = self.rng.choice(self._raisable(delta))
        return Raise(entry.name, self.value(gamma, entry.payload, depth))

    def gen_init(self, delta, gamma, typ, depth):
        zeros = [name for name, var_type in gamma.entries if isinstance(var_type, Zero)]
        return Init(Var(self.rng.choice(zeros)))

    def gen_do(self, delta, gamma, typ, depth):
        var = self.fresh_var()
        bound = self.comp(delta, gamma, self.small_type(), depth)
        bound_type = self.checker.comp(delta, gamma, bound, None)
        binder = Zero() if bound_type is None else bound_type
        return Do(var, bound, self.comp(delta, gamma.extend(var, binder), typ, depth))

    def gen_case(self, delta, gamma, typ, depth):
        sums = [(name, t) for name, t in gamma.entries if isinstance(t, Sum) and is_first_order(t)]
        if sums and self.rng.random() < 0.6:
            name, scrutinee_type = self.rng.choice(sums)
            scrutinee: ValueTerm = Var(name)
        else:
            scrutinee_type = self.rng.choice([t for t in SMALL_TYPES if isinstance(t, Sum)])
            scrutinee = self.value(gamma, scrutinee_type, depth)
        left, right = self.fresh_var(), self.fresh_var()
        return Case(
            scrutinee,
            left,
            self.comp(delta, gamma.extend(left, scrutinee_type.left), typ, depth),
            right,
            self.comp(delta, gamma.extend(right, scrutinee_type.right), typ, depth),
        )

    def gen_pcase(self, delta, gamma, typ, depth):
        scrutinee_type = Prod(self.small_type(), self.small_type())
        first, second = self.fresh_var(), self.fresh_var()
        inner = gamma.extend(first, scrutinee_type.left).extend(second, scrutinee_type.right)
        return PCase(
            self.value(gamma, scrutinee_type, depth),
            first,
            second,
            self.comp(delta, inner, typ, depth),
        )

    def gen_gcase_put(self, delta, gamma, typ, depth):
        held = self.fresh_var()
        return GCase(
            "put",
            self.value(gamma, Nat(), depth),
            held,
            Init(Var(held)),
            WILDCARD,
            self.comp(delta.retagged(Tag.U), gamma, typ, depth),
        )

    def gen_gcase_pred(self, delta, gamma, typ, depth):
        result, held = self.fresh_var(), self.fresh_var()
        return GCase(
            "pred",
            self.value(gamma, Nat(), depth),
            result,
            self.comp(delta, gamma.extend(result, Sum(One(), Nat())), typ, depth),
            held,
            Init(Var(held)),
        )

    def gen_handle(self, delta, gamma, typ, depth):
        exc, payload_type = self.fresh_exc(), self.small_type()
        payload = self.fresh_var()
        return Handle(
            exc,
            payload_type,
            self.comp(delta.extend(exc, payload_type, Tag.U), gamma, typ, depth),
            payload,
            self.comp(delta, gamma.extend(payload, payload_type), typ, depth),
        )

    def gen_handleit(self, delta, gamma, typ, depth):
        exc, payload_type = self.fresh_exc(), self.small_type()
        var = self.fresh_var()
        return HandleIt(
            self.value(gamma, payload_type, depth),
            exc,
            payload_type,
            var,
            self.comp(
                delta.extend(exc, payload_type, Tag.G),
                gamma.extend(var, payload_type),
                typ,
                depth,
            ),
        )

    def gen_loop(self, delta, gamma, typ, depth):
        """A counting loop: the payload decreases each round until pred reports zero"""
        exc, var = self.fresh_exc(), self.fresh_var()
        predecessor, held, done, smaller = (self.fresh_var() for _ in range(4))
        loop_delta = delta.extend(exc, Nat(), Tag.G)
        loop_gamma = gamma.extend(var, Nat())
        self.coverage["handleit"] += 1
        self.coverage["gcase-pred"] += 1
        self.coverage["gcase-put"] += 1
        never, impossible = self.fresh_var(), self.fresh_var()
        pred = GCase("pred", Var(var), held, Ret(Var(held)), never, Init(Var(never)))
        step = GCase(
            "put",
            Var(smaller),
            impossible,
            Init(Var(impossible)),
            WILDCARD,
            Raise(exc, Var(smaller)),
        )
        return HandleIt(
            numeral(self.rng.randint(1, MAX_NUMERAL)),
            exc,
            Nat(),
            var,
            Do(
                predecessor,
                pred,
                Case(
                    Var(predecessor),
                    done,
                    self.comp(loop_delta, loop_gamma.extend(done, One()), typ, depth),
                    smaller,
                    step,
                ),
            ),
        )

    def gen_lambda(self, delta, gamma, typ, depth):
        return self.gen_app(delta, gamma, typ, depth)

    def gen_app(self, delta, gamma, typ, depth):
        arg_type = self.small_type()
        fn_type = Fun(arg_type, delta, typ)
        fn = self.value(EMPTY_GAMMA if self.rng.random() < 0.3 else gamma, fn_type, depth)
        argument = self.value(gamma, arg_type, depth)
        if self.rng.random() < 0.5:
            return App(fn, argument)
        name = self.fresh_var()
        return Do(name, Ret(fn), App(Var(name), argument))


def _attempt(config: GenConfig, rng: random.Random) -> Tuple[Program, Coverage]:
    generator = ProgramGenerator(config, rng)
    result_type = config.result_type or generator.small_type()
    if rng.random() < 0.5:
        delta = EMPTY_DELTA.extend(generator.fresh_exc(), Nat(), Tag.U)
    else:
        delta = EMPTY_DELTA
    main = generator.comp(delta, EMPTY_GAMMA, result_type, config.max_depth)
    return Program((), main, delta), generator.coverage


def gen_program_with_coverage(config: GenConfig) -> Tuple[TypedProgram, Coverage]:
    """
    Generates a program and reports which constructs it used

    Returns:
        (Tuple[TypedProgram, Coverage]): the checked program and construct counts
    """
    rng = random.Random(config.seed)
    for attempt in range(MAX_RETRIES):
        try:
            program, coverage = _attempt(config, rng)
            return check_program(program), coverage
        except (GlcTypeError, _DeadEnd) as err:
            logger.debug("Seed %i attempt %i discarded: %s", config.seed, attempt, err)
    fallback = Program((), Ret(numeral(0)), EMPTY_DELTA)
    return check_program(fallback), collections.Counter({"ret": 1})


def gen_program(config: GenConfig) -> TypedProgram:
    """
    A random closed program that passes check_program, identical for equal configs

    Arguments:
        config (GenConfig): seed, depth bound, result type and construct weights

    Returns:
        (TypedProgram): the checked program
    """
    return gen_program_with_coverage(config)[0]


def gen_open_term(config: GenConfig) -> Tuple[CompTerm, str, TypeExpr, ValueTerm, TypeExpr]:
    """
    A computation with exactly one free variable, and a closed value to substitute

    Returns:
        (Tuple[CompTerm, str, TypeExpr, ValueTerm, TypeExpr]): the computation, the free
            variable, its type, a closed value of that type, and the computation's type
    """
    rng = random.Random(config.seed)
    for attempt in range(MAX_RETRIES):
        generator = ProgramGenerator(config, rng)
        var, var_type = "x", generator.small_type()
        gamma = EMPTY_GAMMA.extend(var, var_type)
        result_type = config.result_type or generator.small_type()
        try:
            comp = generator.comp(EMPTY_DELTA, gamma, result_type, config.max_depth)
            value = generator.value(EMPTY_GAMMA, var_type, 2)
            TypeChecker().comp(EMPTY_DELTA, gamma, comp, result_type)
            return comp, var, var_type, value, result_type
        except (GlcTypeError, _DeadEnd) as err:
            logger.debug("Open term attempt %i discarded: %s", attempt, err)
    return Ret(Var("x")), "x", Nat(), numeral(0), Nat()
