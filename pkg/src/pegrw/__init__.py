"""Parsing expression grammars with cut, throw, catch and try.

Two evaluators (a big-step reference interpreter and a small-step frame
machine), a symbolic generator over constrained strings, and corpus tooling.
"""
from .charset import CharSet
from .errors import (
    BudgetExceeded, EngineError, GrammarCheckError, GrammarSyntaxError, PegError,
    UnsupportedConstruct, UnsupportedCut,
)
from .grammar import (
    Catch, Choice, Cut, Empty, Grammar, Kind, NonTerm, Not, Outcome, Seq, Star, Term,
    Terminal, Throw, Try, desugar, match_terminal,
)
from .machine import MachineConfig, StepMetrics
from .reader import load_grammar, parse_expr, parse_grammar

__version__ = "0.1.0"

__all__ = [
    "CharSet", "BudgetExceeded", "EngineError", "GrammarCheckError", "GrammarSyntaxError",
    "PegError", "UnsupportedConstruct", "UnsupportedCut", "Catch", "Choice", "Cut", "Empty",
    "Grammar", "Kind", "NonTerm", "Not", "Outcome", "Seq", "Star", "Term", "Terminal", "Throw",
    "Try", "desugar", "match_terminal", "MachineConfig", "StepMetrics", "load_grammar",
    "parse_expr", "parse_grammar",
]
