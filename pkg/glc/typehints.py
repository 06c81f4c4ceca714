"""Typehints defined for glc"""
from typing import Any, Dict, List, TypedDict


class DiagnosticInfo(TypedDict):
    """Typehint for a type checker or parser diagnostic, as printed with --json"""

    code: str
    line: int
    col: int
    message: str


# One item of an observed event stream. Exactly one of the shapes
# {"out": 2}, {"done": "*"}, {"raise": "e", "value": "5"}, {"pending": true} or
# {"error": "StuckTerm", "message": "..."}
EventInfo = TypedDict(
    "EventInfo",
    {
        "out": int,
        "done": str,
        "raise": str,
        "value": str,
        "pending": bool,
        "error": str,
        "message": str,
    },
    total=False,
)


class ObservationInfo(TypedDict):
    """Typehint for a fuel-bounded observation: out items, then one terminal item"""

    events: List[EventInfo]


class RunReportInfo(TypedDict):
    """Typehint for the instrumented result of the operational evaluator"""

    events: List[EventInfo]
    steps: int
    loopRounds: int


class DisagreementInfo(TypedDict):
    """Typehint for one adequacy disagreement"""

    seed: int
    program: str
    operational: ObservationInfo
    denotational: ObservationInfo
    detail: str


class AdequacyReportInfo(TypedDict):
    """Typehint for the adequacy suite report"""

    total: int
    agreed: int
    disagreed: List[DisagreementInfo]


class LawFailureInfo(TypedDict):
    """Typehint for a law counterexample, morphisms printed as tables"""

    f: str
    lhs: str
    rhs: str


class LawResultInfo(TypedDict):
    """Typehint for the result of checking one law"""

    law: str
    samples: int
    exhaustive: bool
    failed: int
    failures: List[LawFailureInfo]


class LawReportInfo(TypedDict):
    """Typehint for the law suite report of one monad instance"""

    instance: str
    laws: List[LawResultInfo]


Coverage = Dict[str, int]
JsonValue = Any
