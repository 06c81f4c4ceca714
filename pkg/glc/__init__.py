"""Guarded loops: a checker and two evaluators for a fine-grain call-by-value language"""
from glc.parser import parse_program, parse_computation, parse_value, parse_type, desugar
from glc.printer import pretty
from glc.typecheck import check_program, check_comp, infer_value, TypedProgram
from glc.derivation import verify_derivation
from glc.operational import evaluate, eval_steps_report, Limits, RetV, RaiseV, PENDING
from glc.denotational import denote_comp, denote_value, readback
from glc.trace import EventStream, RationalTrace, TraceMonad, t_iterate, take
from glc.powerset import PowersetMonad, NonEmptyPowersetMonad, pplus_guarded, pplus_iterate
from glc.laws import LawConfig, check_law, check_laws
from glc.generator import GenConfig, gen_program
from glc.harness import adequacy_check, observe, run_adequacy_suite, shrink

from glc.exceptions import (
    GlcError,
    GlcSyntaxError,
    GlcTypeError,
    NotGuarded,
    GuardednessFault,
    StuckTerm,
    UninterpretedSymbol,
    SilentDivergence,
    StreamExhausted,
    EmptyResult,
)
from glc.logger_utils import TqdmLoggingHandler

__version__ = "1.0.0a0"
__author__ = "slapelachie"
__license__ = "GPLv2"
__email__ = "lslape@slapelachie.xyz"
__copyright__ = """Copyright (C) 2022 slapelachie
This program is free software; you can redistribute it and/or
modify it under the terms of the GNU General Public License
as published by the Free Software Foundation; either version 2
of the License, or any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details."""
