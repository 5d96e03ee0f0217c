"""UI description language: lexer, parser, checker, printer, evaluator."""

from .checker import CheckResult, analyze, check
from .diagnostics import Diagnostic, DiagnosticSink, Severity
from .interp import EntityValue, Env, Interpreter, evaluate_condition
from .lexer import Lexer, tokenize
from .parser import Parser, parse
from .printer import print_module
from .tokens import Token, TokenType

__all__ = [
    "CheckResult",
    "Diagnostic",
    "DiagnosticSink",
    "EntityValue",
    "Env",
    "Interpreter",
    "Lexer",
    "Parser",
    "Severity",
    "Token",
    "TokenType",
    "analyze",
    "check",
    "evaluate_condition",
    "parse",
    "print_module",
    "tokenize",
]
