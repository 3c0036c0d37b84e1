"""Formula core: lexer, parser, canonical printer and tree operations."""

from stlkit.stl.analysis import count_operators, desugar, extract_template, subformulas
from stlkit.stl.ast import (
    Abs,
    And,
    Atom,
    Atomic,
    BinOp,
    BoolConst,
    Const,
    Eventually,
    Expr,
    FALSE,
    Formula,
    Implies,
    INTERVAL_PLACEHOLDER,
    Interval,
    Neg,
    Not,
    Or,
    PHI,
    Placeholder,
    Always,
    Template,
    TRUE,
    Until,
    Var,
    variables,
)
from stlkit.stl.parser import CheckResult, Diagnostic, check_syntax, iter_formula_lines, parse
from stlkit.stl.printer import format_atom, format_expr, format_formula, format_number
from stlkit.stl.tokens import (
    CMP_KINDS,
    OPERATOR_KINDS,
    TEMPORAL_KINDS,
    Token,
    TokenKind,
    line_col,
    tokenize,
)

__all__ = [
    "Abs",
    "And",
    "Atom",
    "Atomic",
    "BinOp",
    "BoolConst",
    "CheckResult",
    "CMP_KINDS",
    "Const",
    "count_operators",
    "desugar",
    "Diagnostic",
    "Eventually",
    "Expr",
    "extract_template",
    "FALSE",
    "Formula",
    "format_atom",
    "format_expr",
    "format_formula",
    "format_number",
    "Implies",
    "INTERVAL_PLACEHOLDER",
    "Interval",
    "iter_formula_lines",
    "line_col",
    "Neg",
    "Not",
    "OPERATOR_KINDS",
    "Or",
    "parse",
    "PHI",
    "Placeholder",
    "check_syntax",
    "Always",
    "subformulas",
    "Template",
    "TEMPORAL_KINDS",
    "Token",
    "TokenKind",
    "tokenize",
    "TRUE",
    "Until",
    "Var",
    "variables",
]
