"""Formula syntax trees.

All nodes are frozen dataclasses: structural equality and hashing come for
free and any formula can be shared between threads.

Temporal nodes carry ``interval``:

* an :class:`Interval` for the usual bounded operators,
* ``None`` when the source omitted the bounds (accepted syntax, refused by
  the monitoring semantics),
* :data:`INTERVAL_PLACEHOLDER` inside templates, rendered as ``[I]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from stlkit.errors import IntervalError

CMP_OPS = ("<", "<=", ">", ">=", "==", "!=")
ARITH_OPS = ("+", "-", "*", "/")


# --- arithmetic expressions -------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Abs:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Var, Const, Neg, Abs, BinOp]


@dataclass(frozen=True)
class Atom:
    lhs: Expr
    op: str
    rhs: Expr

    def __post_init__(self):
        if self.op not in CMP_OPS:
            raise ValueError(f"unknown comparison operator {self.op!r}")


# --- intervals ----------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise IntervalError(self.lo, self.hi)
        if self.lo < 0 or self.lo >= self.hi:
            raise IntervalError(self.lo, self.hi)


class _IntervalPlaceholder:
    """Singleton marker for abstracted interval bounds in templates."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INTERVAL_PLACEHOLDER"


INTERVAL_PLACEHOLDER = _IntervalPlaceholder()

IntervalSpec = Union[Interval, _IntervalPlaceholder, None]


# --- formulas -----------------------------------------------------------------


@dataclass(frozen=True)
class BoolConst:
    value: bool


TRUE = BoolConst(True)
FALSE = BoolConst(False)


@dataclass(frozen=True)
class Atomic:
    atom: Atom


@dataclass(frozen=True)
class Placeholder:
    """Abstracted atom in a template, rendered as the φ token."""


PHI = Placeholder()


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Always:
    interval: IntervalSpec
    operand: "Formula"


@dataclass(frozen=True)
class Eventually:
    interval: IntervalSpec
    operand: "Formula"


@dataclass(frozen=True)
class Until:
    interval: IntervalSpec
    left: "Formula"
    right: "Formula"


Formula = Union[
    BoolConst, Atomic, Placeholder, Not, And, Or, Implies, Always, Eventually, Until
]

#: A template is a formula whose atoms are all Placeholder and whose interval
#: bounds are all abstracted; see analysis.extract_template.
Template = Formula


def expr_variables(e: Expr) -> frozenset[str]:
    """Names of all signal variables referenced by an arithmetic expression."""
    match e:
        case Var(name):
            return frozenset({name})
        case Const():
            return frozenset()
        case Neg(operand) | Abs(operand):
            return expr_variables(operand)
        case BinOp(_, left, right):
            return expr_variables(left) | expr_variables(right)
    raise TypeError(f"not an expression node: {e!r}")


def variables(f: Formula) -> frozenset[str]:
    """Names of all signal variables referenced by a formula."""
    match f:
        case BoolConst() | Placeholder():
            return frozenset()
        case Atomic(atom):
            return expr_variables(atom.lhs) | expr_variables(atom.rhs)
        case Not(operand) | Always(_, operand) | Eventually(_, operand):
            return variables(operand)
        case And(left, right) | Or(left, right) | Implies(left, right) | Until(_, left, right):
            return variables(left) | variables(right)
    raise TypeError(f"not a formula node: {f!r}")
