"""The main module"""
import argparse
import logging
import sys
from typing import List, Optional

from glc import __version__, __copyright__
from glc.denotational import denote_comp
from glc.exceptions import GlcError, GlcSyntaxError, GlcTypeError
from glc.generator import GenConfig
from glc.harness import adequacy_check, observation_of, observe, run_adequacy_suite
from glc.laws import LAWS, LawConfig, check_laws
from glc.logger_utils import TqdmLoggingHandler, paint
from glc.mutants import MUTANTS, evaluator_class
from glc.operational import DEFAULT_MAX_STEPS, Evaluator, Limits
from glc.parser import parse_program
from glc.powerset import NonEmptyPowersetMonad, PowersetMonad
from glc.printer import pretty_type
from glc.report import ADEQUACY_ROOT, LAW_ROOT, to_json, write_report_xml
from glc.trace import DEFAULT_FUEL, Done, Out, TraceMonad
from glc.typecheck import TypedProgram, check_program
from glc.typehints import DiagnosticInfo, RunReportInfo
from glc.utils import read_source

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

INSTANCES = {
    "powerset": PowersetMonad,
    "powerset-nonempty": NonEmptyPowersetMonad,
    "trace": TraceMonad,
}


class UsageError(Exception):
    """Raised for arguments that parse but cannot be acted on"""


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{text} is negative")
    return value


def get_args() -> argparse.ArgumentParser:
    """
    Gets the arguments through argparse

    Returns:
        (argparse.ArgumentParser): the arguments
    """
    arg = argparse.ArgumentParser(
        prog="glc", description="Check and run programs with guarded loops"
    )
    arg.add_argument("--version", action="store_true", help="Print version information")
    arg.add_argument("--debug", action="store_true", help="Debug Logging")
    arg.add_argument("-v", "--verbose", action="store_true", help="verbose logging")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print one JSON document")

    fuelled = argparse.ArgumentParser(add_help=False)
    fuelled.add_argument(
        "--fuel",
        type=_non_negative,
        default=DEFAULT_FUEL,
        help=f"Observe at most this many events, defaults to {DEFAULT_FUEL}",
    )

    commands = arg.add_subparsers(dest="command")

    check = commands.add_parser("check", parents=[common], help="Type check a program")
    check.add_argument("file")
    check.add_argument(
        "--lax-app-delta",
        action="store_true",
        help="Reserved: admit reordered exception contexts at application",
    )

    run = commands.add_parser(
        "run", parents=[common, fuelled], help="Run a program with the operational semantics"
    )
    run.add_argument("file")
    run.add_argument(
        "--max-steps",
        type=_non_negative,
        default=DEFAULT_MAX_STEPS,
        help="Steps allowed between two events",
    )

    denote = commands.add_parser(
        "denote", parents=[common, fuelled], help="Observe the denotation of a program"
    )
    denote.add_argument("file")

    adequacy = commands.add_parser(
        "adequacy",
        parents=[common, fuelled],
        help="Compare both semantics on a program or on generated programs",
    )
    adequacy.add_argument("file", nargs="?")
    adequacy.add_argument("--gen", action="store_true", help="Check generated programs")
    adequacy.add_argument("--count", type=_non_negative, default=100)
    adequacy.add_argument("--depth", type=_non_negative, default=6)
    adequacy.add_argument("--seed", type=int, default=0)
    adequacy.add_argument("--max-steps", type=_non_negative, default=DEFAULT_MAX_STEPS)
    adequacy.add_argument(
        "--mutant", choices=sorted(MUTANTS), help="Replace the evaluator with a mutant"
    )
    adequacy.add_argument(
        "--no-shrink", action="store_true", help="Report disagreeing programs unshrunk"
    )
    adequacy.add_argument("--progress", action="store_true", help="Display progress bars")
    adequacy.add_argument("--report-xml", help="Also write the report as XML")

    laws = commands.add_parser(
        "laws", parents=[common, fuelled], help="Check the iteration laws of a monad"
    )
    laws.add_argument("--instance", choices=sorted(INSTANCES), required=True)
    laws.add_argument("--count", type=_non_negative, default=1000, help="Random samples")
    laws.add_argument("--seed", type=int, default=0)
    laws.add_argument(
        "--law", action="append", choices=list(LAWS), help="Check only this law"
    )
    laws.add_argument("--progress", action="store_true", help="Display progress bars")
    laws.add_argument("--report-xml", help="Also write the report as XML")

    return arg


def _diagnostic(err: GlcError) -> DiagnosticInfo:
    if isinstance(err, GlcTypeError):
        return {"code": err.code.value, "line": err.line, "col": err.col, "message": err.message}
    if isinstance(err, GlcSyntaxError):
        return {"code": "SyntaxError", "line": err.line, "col": err.col, "message": str(err)}
    return {"code": type(err).__name__, "line": 0, "col": 0, "message": str(err)}


def _load(path: str, json_mode: bool) -> Optional[TypedProgram]:
    """
    Reads, parses and checks a program, printing diagnostics on failure

    Raises:
        UsageError: if the file could not be read
    """
    try:
        text = read_source(path)
    except OSError as err:
        raise UsageError(str(err)) from err

    try:
        return check_program(parse_program(text))
    except (GlcSyntaxError, GlcTypeError) as err:
        diagnostic = _diagnostic(err)
        if json_mode:
            print(to_json({"ok": False, "diagnostics": [diagnostic]}))
        else:
            print(
                f"{path}:{diagnostic['line']}:{diagnostic['col']}: "
                f"{paint(diagnostic['code'], 'red')}: {diagnostic['message']}"
            )
        return None


def command_check(args) -> int:
    if args.lax_app_delta:
        raise UsageError("--lax-app-delta is reserved and not implemented")
    typed = _load(args.file, args.json)
    if typed is None:
        return EXIT_FAILURE
    result = pretty_type(typed.result_type)
    if args.json:
        print(to_json({"ok": True, "type": result, "diagnostics": []}))
    else:
        print(f"{args.file}: {paint('ok', 'green')} : {result}")
    return EXIT_OK


def command_run(args) -> int:
    typed = _load(args.file, args.json)
    if typed is None:
        return EXIT_FAILURE

    evaluator = Evaluator(Limits(args.fuel, args.max_steps), typed.program.declarations)
    events: List[int] = []
    done = None
    try:
        for item in evaluator.stream(typed.main).items():
            if isinstance(item, Out):
                events.append(item.value)
                if not args.json:
                    print(f"put {item.value}", flush=True)
            elif isinstance(item, Done):
                done = item
    except GlcError as err:
        logger.error("Evaluation failed: %s", err)
        return EXIT_FAILURE

    observation = observation_of(events, done, typed.result_type, typed.delta)
    if args.json:
        document: RunReportInfo = {
            "events": observation.to_dict()["events"],
            "steps": evaluator.steps,
            "loopRounds": evaluator.loop_rounds,
        }
        print(to_json(document))
    else:
        print(observation.terminal_text())
    return EXIT_OK


def command_denote(args) -> int:
    typed = _load(args.file, args.json)
    if typed is None:
        return EXIT_FAILURE

    stream = denote_comp(typed.main, declarations=typed.program.declarations)
    observation = observe(stream, args.fuel, typed.result_type, typed.delta)
    if observation.kind == "error":
        logger.error("Evaluation failed: %s", observation.value)
        return EXIT_FAILURE
    if args.json:
        print(to_json(observation.to_dict()))
    else:
        for event in observation.events:
            print(f"put {event}")
        print(observation.terminal_text())
    return EXIT_OK


def _adequacy_file(args, evaluator) -> int:
    typed = _load(args.file, args.json)
    if typed is None:
        return EXIT_FAILURE
    try:
        verdict = adequacy_check(typed, args.fuel, Limits(args.fuel, args.max_steps), evaluator)
    except ValueError as err:
        raise UsageError(str(err)) from err

    if args.json:
        document = {
            "agreed": verdict.agreed,
            "operational": verdict.operational.to_dict(),
            "denotational": verdict.denotational.to_dict(),
            "detail": getattr(verdict, "detail", ""),
        }
        print(to_json(document))
    elif verdict.agreed:
        print(f"{paint('agree', 'green')}: {verdict.operational}")
    else:
        print(f"{paint('disagree', 'red')}: {verdict.detail}")
        print(f"  operational:  {verdict.operational}")
        print(f"  denotational: {verdict.denotational}")
    return EXIT_OK if verdict.agreed else EXIT_FAILURE


def command_adequacy(args) -> int:
    evaluator = evaluator_class(args.mutant) if args.mutant else Evaluator
    if args.file and args.gen:
        raise UsageError("give either a file or --gen, not both")
    if args.file:
        return _adequacy_file(args, evaluator)
    if not args.gen:
        raise UsageError("adequacy needs a file or --gen")

    report = run_adequacy_suite(
        GenConfig(seed=args.seed, max_depth=args.depth),
        args.count,
        args.fuel,
        Limits(args.fuel, args.max_steps),
        evaluator,
        progress=args.progress,
        shrink_witnesses=not args.no_shrink,
    )
    document = report.to_dict()
    if args.report_xml:
        write_report_xml(args.report_xml, document, ADEQUACY_ROOT)

    if args.json:
        print(to_json(document))
    else:
        for disagreement in report.disagreements:
            print(f"{paint('disagree', 'red')} (seed {disagreement.seed}): ", end="")
            print(disagreement.verdict.detail)
            print(f"  {disagreement.program}")
            print(f"  operational:  {disagreement.verdict.operational}")
            print(f"  denotational: {disagreement.verdict.denotational}")
        print(f"{report.agreed}/{report.total} agree")
    return EXIT_OK if report.passed else EXIT_FAILURE


def command_laws(args) -> int:
    instance = INSTANCES[args.instance]()
    config = LawConfig(samples=args.count, seed=args.seed, fuel=args.fuel)
    try:
        report = check_laws(instance, config, args.law, progress=args.progress)
    except ValueError as err:
        raise UsageError(str(err)) from err

    document = report.to_dict()
    if args.report_xml:
        write_report_xml(args.report_xml, document, LAW_ROOT)

    if args.json:
        print(to_json(document))
        return EXIT_OK if report.passed else EXIT_FAILURE

    for result in report.results:
        status = paint("PASS", "green") if result.passed else paint("FAIL", "red")
        mode = "exhaustive + sampled" if result.exhaustive else "sampled"
        print(
            f"{status} {result.law}: {result.samples} instances ({mode}), "
            f"{result.failed} failed"
        )
        for failure in result.failures:
            print("  " + failure.morphism.replace("\n", "\n  "))
            print(f"  lhs: {failure.lhs}")
            print(f"  rhs: {failure.rhs}")
    return EXIT_OK if report.passed else EXIT_FAILURE


COMMANDS = {
    "check": command_check,
    "run": command_run,
    "denote": command_denote,
    "adequacy": command_adequacy,
    "laws": command_laws,
}


def parse_args(parser: argparse.ArgumentParser, argv: Optional[List[str]] = None) -> int:
    """
    parse the arguments through the given parser and run the command

    Arguments:
        parser (argparse.ArgumentParser): the argument parser
        argv (List[str]): the arguments, sys.argv[1:] if None

    Returns:
        (int): the exit code
    """
    args = parser.parse_args(argv)

    if args.version:
        print(f"glc {__version__}\n{__copyright__}")
        return EXIT_OK

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    if args.debug:
        logging.basicConfig(level=logging.DEBUG)
        logging.getLogger("glc").setLevel(logging.DEBUG)
    elif args.verbose:
        logging.basicConfig(level=logging.INFO)
        logging.getLogger("glc").setLevel(logging.INFO)

    try:
        return COMMANDS[args.command](args)
    except (UsageError, OSError) as err:
        logger.error("%s", err)
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    parser = get_args()
    return parse_args(parser, argv)


if __name__ == "__main__":
    sys.exit(main())
