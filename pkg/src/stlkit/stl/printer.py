"""Canonical ASCII rendering of formulas.

The canonical form is deterministic and re-parses to a structurally equal
tree: tokens are single-spaced, temporal operands are always parenthesized,
``->`` operands are parenthesized unless self-delimiting (a single-token
leaf or a temporal node), and everything else gets minimal parentheses.
Intervals attach to their operator without inner spaces, e.g. ``G[0,27]``.
"""

from __future__ import annotations

from decimal import Decimal

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
    Formula,
    Implies,
    Interval,
    IntervalSpec,
    Neg,
    Not,
    Or,
    Placeholder,
    Always,
    Until,
    Var,
)

# Binding strength of formula connectives; leaves sit above all of these.
_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_UNTIL = 4
_PREC_UNARY = 5
_PREC_LEAF = 6


def format_number(value: float) -> str:
    """Shortest decimal rendering that parses back to the same float."""
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    s = repr(float(value))
    if "e" in s or "E" in s:
        s = format(Decimal(s), "f")
    return s


def format_interval(interval: IntervalSpec) -> str:
    if interval is None:
        return ""
    if isinstance(interval, Interval):
        return f"[{format_number(interval.lo)},{format_number(interval.hi)}]"
    return "[I]"


def format_expr(e: Expr) -> str:
    return _expr(e, 0)


def _expr(e: Expr, ctx: int) -> str:
    # Arithmetic precedence: +,- at 1; *,/ at 2; unary/leaves at 3.
    match e:
        case Var(name):
            return name
        case Const(value):
            return format_number(value)
        case Neg(operand):
            inner = _expr(operand, 3)
            if isinstance(operand, BinOp):
                inner = f"( {inner} )"
            return f"-{inner}"
        case Abs(operand):
            return f"| {_expr(operand, 0)} |"
        case BinOp(op, left, right):
            prec = 1 if op in "+-" else 2
            text = f"{_expr(left, prec)} {op} {_expr(right, prec + 1)}"
            return f"( {text} )" if prec < ctx else text
    raise TypeError(f"not an expression node: {e!r}")


def format_atom(atom: Atom) -> str:
    return f"{format_expr(atom.lhs)} {atom.op} {format_expr(atom.rhs)}"


def format_formula(f: Formula) -> str:
    """Render a formula (or template) in canonical form."""
    return _formula(f, 0)


def _temporal_head(op: str, interval: IntervalSpec) -> str:
    return f"{op}{format_interval(interval)}"


def _formula(f: Formula, ctx: int) -> str:
    match f:
        case BoolConst(value):
            return "true" if value else "false"
        case Placeholder():
            return "φ"
        case Atomic(atom):
            return format_atom(atom)
        case Not(operand):
            return f"! {_formula(operand, _PREC_UNARY)}"
        case And(left, right):
            text = f"{_formula(left, _PREC_AND)} & {_formula(right, _PREC_AND + 1)}"
            return f"( {text} )" if _PREC_AND < ctx else text
        case Or(left, right):
            text = f"{_formula(left, _PREC_OR)} | {_formula(right, _PREC_OR + 1)}"
            return f"( {text} )" if _PREC_OR < ctx else text
        case Implies(left, right):
            text = f"{_implies_operand(left)} -> {_implies_operand(right)}"
            return f"( {text} )" if _PREC_IMPLIES < ctx else text
        case Always(interval, operand):
            return f"{_temporal_head('G', interval)} ( {_formula(operand, 0)} )"
        case Eventually(interval, operand):
            return f"{_temporal_head('F', interval)} ( {_formula(operand, 0)} )"
        case Until(interval, left, right):
            head = _temporal_head("U", interval)
            text = f"( {_formula(left, 0)} ) {head} ( {_formula(right, 0)} )"
            return f"( {text} )" if _PREC_UNTIL < ctx else text
    raise TypeError(f"not a formula node: {f!r}")


def _implies_operand(f: Formula) -> str:
    if isinstance(f, (BoolConst, Placeholder, Always, Eventually, Until)):
        return _formula(f, 0)
    return f"( {_formula(f, 0)} )"
