"""Module containing the custom exceptions used by glc"""
import enum
from typing import Any, Iterable, Optional, Tuple


class GlcError(Exception):
    """Base class of every error raised by glc"""


class GlcSyntaxError(GlcError):
    """Raised when source text does not match the grammar"""

    def __init__(self, message: str, line: int, col: int, expected: Iterable[str] = ()):
        self.line = line
        self.col = col
        self.expected: Tuple[str, ...] = tuple(sorted(set(expected)))
        self.message = message
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{line}:{col}: {message}{detail}")


class TypeErrorCode(enum.Enum):
    """Diagnostic codes of the type checker"""

    UNBOUND_VAR = "UnboundVar"
    UNBOUND_EXC = "UnboundExc"
    GUARDED_RAISE = "GuardedRaise"
    TAG_MISMATCH = "TagMismatch"
    TYPE_MISMATCH = "TypeMismatch"
    SIGNATURE_MISMATCH = "SignatureMismatch"
    EXC_CONTEXT_MISMATCH = "ExcContextMismatch"


class GlcTypeError(GlcError):
    """Raised when a term has no typing derivation"""

    def __init__(self, code: TypeErrorCode, message: str, span: Optional[Any] = None):
        self.code = code
        self.message = message
        self.span = span
        where = f"{span.line}:{span.col}: " if span is not None else ""
        super().__init__(f"{where}{code.value}: {message}")

    @property
    def line(self) -> int:
        return self.span.line if self.span is not None else 0

    @property
    def col(self) -> int:
        return self.span.col if self.span is not None else 0


class NotGuarded(GlcError):
    """Raised when iteration is requested for a morphism that is not guarded"""

    def __init__(self, message: str, witness: Any = None):
        self.witness = witness
        super().__init__(message)


class GuardednessFault(GlcError):
    """Raised when a loop re-enters without emitting any output in the round"""

    def __init__(self, value: Any, round_number: int = 0):
        self.value = value
        self.round_number = round_number
        super().__init__(
            f"unguarded loop re-entry with {value!r} in round {round_number}"
        )


class StuckTerm(GlcError):
    """Raised when no evaluation rule applies to a term"""


class UninterpretedSymbol(StuckTerm):
    """Raised when evaluation reaches a declared symbol without run-time meaning"""


class SilentDivergence(GlcError):
    """Raised when evaluation runs out of steps without producing an event"""

    def __init__(self, steps: int):
        self.steps = steps
        super().__init__(f"no event or terminal after {steps} steps")


class StreamExhausted(GlcError):
    """Raised when pulling from an event stream that already finished"""


class EmptyResult(GlcError):
    """Raised when non-empty powerset iteration produces an empty set"""
