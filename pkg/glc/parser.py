"""
Lexer, recursive descent parser and desugarer for .gml source text
"""
import contextlib
import logging
import re
from dataclasses import dataclass, replace
from typing import List, Mapping, Optional, Set

from glc.exceptions import GlcSyntaxError
from glc.logger_utils import TqdmLoggingHandler
from glc.primitives import BUILTIN_EFFECTS, BUILTIN_NAMES
from glc.syntax import (
    EMPTY_DELTA,
    WILDCARD,
    App,
    Base,
    Case,
    CompTerm,
    Do,
    EffApp,
    EffectDecl,
    ExcContext,
    ExcEntry,
    Fun,
    GCase,
    Guard,
    Handle,
    HandleIt,
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
    Span,
    Star,
    Sum,
    Tag,
    Term,
    Try,
    TypeExpr,
    ValueDecl,
    ValueTerm,
    Var,
    Zero,
    fresh_name,
    free_vars,
    numeral,
    term_fields,
)

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

KEYWORDS = frozenset(
    (
        "ret do gcase case pcase of init raise handle handleit with in fun try unless "
        "if then else inl inr zero succ value effect exceptions as"
    ).split()
)

TOKEN_PATTERN = re.compile(
    r"""
    (?P<COMMENT>\#[^\n]*)
    |(?P<NEWLINE>\n)
    |(?P<SKIP>[ \t\r]+)
    |(?P<NUMBER>\d+)
    |(?P<IDENT>[A-Za-z_][A-Za-z0-9_']*)
    |(?P<SYMBOL>-\[|->|=>|<-|<=|[(){}\[\],;:*+^=&|>])
    |(?P<MISMATCH>.)
    """,
    re.VERBOSE,
)

RAISE_PREFIX = "raise_"
VALUE_START = ("IDENT", "NUMBER", "*", "(", "inl", "inr", "zero", "succ", "fun")
COMP_START = (
    "ret",
    "do",
    "gcase",
    "case",
    "pcase",
    "init",
    "raise",
    "RAISE",
    "handle",
    "handleit",
    "try",
    "if",
    "{",
) + VALUE_START


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    """
    Splits source text into tokens. Keywords and symbols use their own text as kind,
    `raise_e` becomes a single RAISE token, and the list always ends in an EOF token
    positioned on the last real token

    Raises:
        GlcSyntaxError: on a character outside the grammar
    """
    tokens: List[Token] = []
    line, line_start = 1, 0
    for match in TOKEN_PATTERN.finditer(text):
        kind = match.lastgroup
        lexeme = match.group()
        col = match.start() - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
            continue
        if kind in ("SKIP", "COMMENT"):
            continue
        if kind == "MISMATCH":
            raise GlcSyntaxError(f"unexpected character {lexeme!r}", line, col)

        if kind == "IDENT":
            if lexeme in KEYWORDS:
                kind = lexeme
            elif lexeme.startswith(RAISE_PREFIX) and len(lexeme) > len(RAISE_PREFIX):
                kind = "RAISE"
        elif kind == "SYMBOL":
            kind = lexeme
        tokens.append(Token(kind, lexeme, line, col))

    last = tokens[-1] if tokens else Token("EOF", "", 1, 1)
    tokens.append(Token("EOF", "", last.line, last.col))
    return tokens


class Parser:
    """
    Recursive descent parser over the token list of one source text.
    Tracks the variables in scope so `f(v)` can be told apart from applying a
    bound function variable `f (v)`.
    """

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.expected: Set[str] = set()
        self.bound: List[str] = []

    # token plumbing

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def check(self, *kinds: str) -> bool:
        self.expected.update(kinds)
        return self.current.kind in kinds

    def advance(self) -> Token:
        token = self.current
        if token.kind != "EOF":
            self.pos += 1
        self.expected = set()
        return token

    def accept(self, kind: str) -> Optional[Token]:
        if self.check(kind):
            return self.advance()
        return None

    def expect(self, kind: str) -> Token:
        if self.check(kind):
            return self.advance()
        raise self.error()

    def error(self, message: Optional[str] = None) -> GlcSyntaxError:
        token = self.current
        if message is None:
            what = "end of input" if token.kind == "EOF" else repr(token.text)
            message = f"unexpected {what}"
        return GlcSyntaxError(message, token.line, token.col, self.expected)

    def span(self) -> Span:
        return Span(self.current.line, self.current.col)

    def ident(self) -> str:
        return self.expect("IDENT").text

    @contextlib.contextmanager
    def binding(self, *names: str):
        self.bound.extend(names)
        try:
            yield
        finally:
            del self.bound[len(self.bound) - len(names) :]

    # programs

    def parse_program(self) -> Program:
        declarations = []
        delta = EMPTY_DELTA
        while True:
            if self.check("value", "effect"):
                token = self.current
                decl = self.parse_declaration()
                if decl.name in BUILTIN_NAMES or decl.name in (d.name for d in declarations):
                    raise GlcSyntaxError(
                        f"{decl.name} is already declared", token.line, token.col
                    )
                declarations.append(decl)
            elif self.accept("exceptions"):
                delta = self.parse_delta_entries(allow_empty=False)
            else:
                break

        main = self.parse_comp()
        self.expect("EOF")
        return Program(tuple(declarations), main, delta)

    def parse_declaration(self):
        is_effect = self.advance().kind == "effect"
        name = self.ident()
        self.expect(":")
        arg = self.parse_type()
        self.expect("->")
        result = self.parse_type()
        if not is_effect:
            return ValueDecl(name, arg, result)
        self.expect("[")
        guarded = self.parse_type()
        self.expect("]")
        return EffectDecl(name, arg, result, guarded)

    # types

    def parse_type(self) -> TypeExpr:
        arg = self.parse_sum_type()
        if self.accept("-["):
            delta = self.parse_delta_entries(allow_empty=True)
            self.expect("]")
            self.expect(">")
            return Fun(arg, delta, self.parse_type())
        return arg

    def parse_sum_type(self) -> TypeExpr:
        typ = self.parse_prod_type()
        while self.accept("+"):
            typ = Sum(typ, self.parse_prod_type())
        return typ

    def parse_prod_type(self) -> TypeExpr:
        typ = self.parse_atom_type()
        while self.accept("*"):
            typ = Prod(typ, self.parse_atom_type())
        return typ

    def parse_atom_type(self) -> TypeExpr:
        if self.check("NUMBER"):
            if self.current.text == "0":
                self.advance()
                return Zero()
            if self.current.text == "1":
                self.advance()
                return One()
            raise self.error(f"{self.current.text} is not a type")
        if self.check("IDENT"):
            name = self.current.text
            if name == "N":
                self.advance()
                return Nat()
            if name[0].isupper():
                self.advance()
                return Base(name)
            raise self.error(f"base type names are capitalised, got {name!r}")
        if self.accept("("):
            typ = self.parse_type()
            self.expect(")")
            return typ
        raise self.error()

    def parse_delta_entries(self, allow_empty: bool) -> ExcContext:
        start = self.span()
        if allow_empty and self.check("]"):
            return EMPTY_DELTA
        entries = [self.parse_exc_entry()]
        while self.accept(","):
            entries.append(self.parse_exc_entry())
        try:
            return ExcContext(tuple(entries))
        except ValueError as err:
            raise GlcSyntaxError(str(err), start.line, start.col) from err

    def parse_exc_entry(self) -> ExcEntry:
        name = self.ident()
        self.expect(":")
        payload = self.parse_type()
        self.expect("^")
        if not self.check("IDENT") or self.current.text not in ("u", "g"):
            self.expected.update(("u", "g"))
            raise self.error()
        tag = Tag(self.advance().text)
        return ExcEntry(name, payload, tag)

    # values

    def parse_value(self) -> ValueTerm:
        span = self.span()
        if self.accept("*"):
            return Star(span=span)
        if self.check("NUMBER"):
            return numeral(int(self.advance().text), span)
        if self.accept("zero"):
            if self.check("("):
                return Prim("zero", self.parse_value(), span=span)
            return Prim("zero", Star(span=span), span=span)
        if self.accept("succ"):
            return Prim("succ", self.parse_value(), span=span)
        if self.accept("inl"):
            return Inl(self.parse_value(), span=span)
        if self.accept("inr"):
            return Inr(self.parse_value(), span=span)
        if self.check("fun"):
            return self.parse_lambda()
        if self.check("IDENT"):
            name = self.advance().text
            if name not in self.bound and self.check("("):
                return Prim(name, self.parse_value(), span=span)
            return Var(name, span=span)
        if self.accept("("):
            return self.parse_group(span)
        raise self.error()

    def parse_group(self, span: Span) -> ValueTerm:
        """The rest of a parenthesised value: grouping, pair or ascription"""
        first = self.parse_value()
        if self.accept(","):
            second = self.parse_value()
            self.expect(")")
            return Pair(first, second, span=span)
        if self.accept(":"):
            typ = self.parse_type()
            self.expect(")")
            if not isinstance(first, (Inl, Inr, Lam)):
                raise GlcSyntaxError(
                    "type ascriptions are only allowed on inl, inr and fun",
                    span.line,
                    span.col,
                )
            return replace(first, ann=typ)
        self.expect(")")
        return first

    def parse_argument(self) -> ValueTerm:
        span = self.span()
        self.expect("(")
        return self.parse_group(span)

    def parse_lambda(self) -> Lam:
        span = self.span()
        self.expect("fun")
        self.expect("(")
        param = self.ident()
        self.expect(":")
        param_type = self.parse_type()
        self.expect(")")
        self.expect("[")
        delta = self.parse_delta_entries(allow_empty=True)
        self.expect("]")
        self.expect("=>")
        with self.binding(param):
            body = self.parse_comp()
        return Lam(param, param_type, delta, body, span=span)

    # computations

    def parse_comp(self) -> CompTerm:
        span = self.span()
        if self.accept("ret"):
            return Ret(self.parse_value(), span=span)
        if self.accept("init"):
            return Init(self.parse_value(), span=span)
        if self.check("RAISE"):
            exc = self.advance().text[len(RAISE_PREFIX) :]
            return Raise(exc, self.parse_value(), span=span)
        if self.accept("raise"):
            exc = self.ident()
            return Raise(exc, self.parse_value(), span=span)
        if self.accept("do"):
            return self.parse_do(span)
        if self.accept("gcase"):
            return self.parse_gcase(span)
        if self.accept("case"):
            return self.parse_case(span)
        if self.accept("pcase"):
            return self.parse_pcase(span)
        if self.accept("handle"):
            return self.parse_handle(span)
        if self.accept("handleit"):
            return self.parse_handleit(span)
        if self.accept("try"):
            return self.parse_try(span)
        if self.accept("if"):
            cond = self.parse_value()
            self.expect("then")
            then = self.parse_comp()
            self.expect("else")
            return If(cond, then, self.parse_comp(), span=span)
        if self.accept("{"):
            comp = self.parse_comp()
            self.expect("}")
            return comp
        if (
            self.check("IDENT")
            and self.current.text not in self.bound
            and self.peek().kind == "("
        ):
            op = self.advance().text
            arg = self.parse_argument()
            if self.accept("&"):
                return Guard(op, arg, self.parse_comp(), span=span)
            return EffApp(op, arg, span=span)
        if self.check(*COMP_START):
            fn = self.parse_value()
            if not self.check(*VALUE_START):
                raise self.error("a value is not a computation, expected an argument")
            return App(fn, self.parse_value(), span=span)
        raise self.error()

    def parse_do(self, span: Span) -> CompTerm:
        if self.check("IDENT") and self.peek().kind == "<-":
            var = self.advance().text
            self.advance()
            bound = self.parse_comp()
            self.expect(";")
            with self.binding(var):
                body = self.parse_comp()
            return Do(var, bound, body, span=span)
        first = self.parse_comp()
        self.expect(";")
        return Seq(first, self.parse_comp(), span=span)

    def parse_branch(self, prefix: Optional[str] = None):
        if prefix is not None:
            self.expect(prefix)
        var = self.ident()
        self.expect("=>")
        with self.binding(var):
            return var, self.parse_comp()

    def parse_gcase(self, span: Span) -> CompTerm:
        op = self.ident()
        arg = self.parse_argument()
        self.expect("of")
        left_var, left = self.parse_branch()
        self.expect("|")
        right_var, right = self.parse_branch()
        return GCase(op, arg, left_var, left, right_var, right, span=span)

    def parse_case(self, span: Span) -> CompTerm:
        scrutinee = self.parse_value()
        self.expect("of")
        left_var, left = self.parse_branch("inl")
        self.expect("|")
        right_var, right = self.parse_branch("inr")
        return Case(scrutinee, left_var, left, right_var, right, span=span)

    def parse_pcase(self, span: Span) -> CompTerm:
        scrutinee = self.parse_value()
        self.expect("of")
        self.expect("(")
        first = self.ident()
        self.expect(",")
        second = self.ident()
        self.expect(")")
        self.expect("=>")
        with self.binding(first, second):
            body = self.parse_comp()
        return PCase(scrutinee, first, second, body, span=span)

    def parse_handle(self, span: Span) -> CompTerm:
        exc = self.ident()
        self.expect(":")
        payload_type = self.parse_type()
        self.expect("in")
        body = self.parse_comp()
        self.expect("with")
        payload_var = exc
        if self.check("IDENT") and self.peek().kind == "=>":
            payload_var = self.advance().text
            self.advance()
        with self.binding(payload_var):
            handler = self.parse_comp()
        return Handle(exc, payload_type, body, payload_var, handler, span=span)

    def parse_handleit(self, span: Span) -> CompTerm:
        exc = self.ident()
        self.expect(":")
        payload_type = self.parse_type()
        var = self.ident() if self.accept("as") else exc
        self.expect("=")
        init = self.parse_value()
        self.expect("in")
        with self.binding(var):
            body = self.parse_comp()
        return HandleIt(init, exc, payload_type, var, body, span=span)

    def parse_try(self, span: Span) -> CompTerm:
        var = self.ident()
        self.expect("<=")
        body = self.parse_comp()
        self.expect("in")
        with self.binding(var):
            cont = self.parse_comp()
        self.expect("unless")
        exc = self.ident()
        self.expect(":")
        payload_type = self.parse_type()
        payload_var = self.ident() if self.accept("as") else exc
        self.expect("=>")
        with self.binding(payload_var):
            handler = self.parse_comp()
        return Try(var, body, cont, exc, payload_type, payload_var, handler, span=span)


# ---------------------------------------------------------------------------
# desugaring


def desugar(term: Term, effects: Optional[Mapping[str, EffectDecl]] = None) -> Term:
    """
    Rewrites surface sugar into core terms

    Arguments:
        term (Term): a parsed value or computation
        effects (Mapping[str, EffectDecl]): the effect signature used to pick the
            encoding of bare `f(v)`, defaults to the built-in one

    Returns:
        (Term): a term without If, Guard, EffApp, Seq or Try nodes. Core terms are
            returned unchanged
    """
    return _desugar(term, BUILTIN_EFFECTS if effects is None else effects)


def _desugar(term: Term, effects: Mapping[str, EffectDecl]) -> Term:
    updates = {name: _desugar(child, effects) for name, child in term_fields(term)}
    if updates:
        term = replace(term, **updates)
    span = term.span

    if isinstance(term, If):
        return Case(term.cond, WILDCARD, term.then, WILDCARD, term.orelse, span=span)
    if isinstance(term, Guard):
        return GCase(
            term.op,
            term.arg,
            "x",
            Init(Var("x", span=span), span=span),
            WILDCARD,
            term.body,
            span=span,
        )
    if isinstance(term, EffApp):
        return _desugar_effect(term, effects.get(term.op))
    if isinstance(term, Seq):
        return Do(WILDCARD, term.first, term.rest, span=span)
    if isinstance(term, Try):
        return _desugar_try(term)
    return term


def _desugar_effect(term: EffApp, decl: Optional[EffectDecl]) -> CompTerm:
    span = term.span
    left = Var("x", span=span)
    right = Var("y", span=span)
    if decl is not None and decl.guarded == Zero():
        left_branch, right_branch = Ret(left, span=span), Init(right, span=span)
    elif decl is not None and decl.result == Zero():
        left_branch, right_branch = Init(left, span=span), Ret(right, span=span)
    else:
        ann = Sum(decl.result, decl.guarded) if decl is not None else None
        left_branch = Ret(Inl(left, ann, span=span), span=span)
        right_branch = Ret(Inr(right, ann, span=span), span=span)
    return GCase(term.op, term.arg, "x", left_branch, "y", right_branch, span=span)


def _desugar_try(term: Try) -> CompTerm:
    span = term.span
    avoid = free_vars(term.cont) - {term.var}
    result = "z" if "z" not in avoid else fresh_name("z", avoid)
    inner = term.var if term.var != WILDCARD else "x"
    handled = Handle(
        term.exc,
        term.payload_type,
        Do(inner, term.body, Ret(Inl(Var(inner, span=span), span=span), span=span), span=span),
        term.payload_var,
        Do("y", term.handler, Ret(Inr(Var("y", span=span), span=span), span=span), span=span),
        span=span,
    )
    dispatch = Case(
        Var(result, span=span),
        term.var,
        term.cont,
        "y",
        Ret(Var("y", span=span), span=span),
        span=span,
    )
    return Do(result, handled, dispatch, span=span)


# ---------------------------------------------------------------------------
# entry points


def parse_program(text: str, desugared: bool = True) -> Program:
    """
    Parses a whole .gml source text

    Arguments:
        text (str): the source text
        desugared (bool): whether to desugar the main term

    Returns:
        (Program): declarations, main term and the main term's exception context

    Raises:
        GlcSyntaxError: with the position and the expected token set
    """
    program = Parser(text).parse_program()
    logger.debug("Parsed %i declarations", len(program.declarations))
    if not desugared:
        return program
    effects = dict(BUILTIN_EFFECTS)
    effects.update(program.effect_signature())
    return replace(program, main=desugar(program.main, effects))


def parse_computation(
    text: str,
    effects: Optional[Mapping[str, EffectDecl]] = None,
    desugared: bool = True,
) -> CompTerm:
    """Parses a single computation, without declarations"""
    all_effects = dict(BUILTIN_EFFECTS)
    all_effects.update(effects or {})
    parser = Parser(text)
    comp = parser.parse_comp()
    parser.expect("EOF")
    return desugar(comp, all_effects) if desugared else comp


def parse_value(text: str) -> ValueTerm:
    parser = Parser(text)
    value = parser.parse_value()
    parser.expect("EOF")
    return value


def parse_type(text: str) -> TypeExpr:
    parser = Parser(text)
    typ = parser.parse_type()
    parser.expect("EOF")
    return typ
