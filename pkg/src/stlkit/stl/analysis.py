"""Structural operations over formula trees.

Desugaring rewrites a formula into the minimal connective set
{true, false, atom, !, &, U} using the standard equivalences
``F φ = true U φ``, ``G φ = ! F ! φ``, ``a | b = !(!a & !b)`` and
``a -> b = !a | b``, applied literally and bottom-up.
"""

from __future__ import annotations

from stlkit.stl.ast import (
    And,
    Atomic,
    BoolConst,
    Eventually,
    Formula,
    Implies,
    INTERVAL_PLACEHOLDER,
    Interval,
    Not,
    Or,
    PHI,
    Placeholder,
    Always,
    Template,
    Until,
)


def desugar(f: Formula) -> Formula:
    """Rewrite into {BoolConst, Atomic, Not, And, Until}, preserving meaning."""
    match f:
        case BoolConst() | Atomic() | Placeholder():
            return f
        case Not(operand):
            return Not(desugar(operand))
        case And(left, right):
            return And(desugar(left), desugar(right))
        case Or(left, right):
            return Not(And(Not(desugar(left)), Not(desugar(right))))
        case Implies(left, right):
            return desugar(Or(Not(left), right))
        case Eventually(interval, operand):
            return Until(interval, BoolConst(True), desugar(operand))
        case Always(interval, operand):
            return Not(Until(interval, BoolConst(True), Not(desugar(operand))))
        case Until(interval, left, right):
            return Until(interval, desugar(left), desugar(right))
    raise TypeError(f"not a formula node: {f!r}")


def subformulas(f: Formula) -> list[Formula]:
    """All formula nodes in pre-order, the formula itself included.

    Atoms count as one node each; arithmetic structure below an atom does
    not contribute.
    """
    out: list[Formula] = []
    stack = [f]
    while stack:
        node = stack.pop()
        out.append(node)
        match node:
            case Not(operand) | Always(_, operand) | Eventually(_, operand):
                stack.append(operand)
            case And(left, right) | Or(left, right) | Implies(left, right) | Until(_, left, right):
                stack.append(right)
                stack.append(left)
            case _:
                pass
    return out


_OPERATOR_NODES = (Not, And, Or, Implies, Always, Eventually, Until)


def count_operators(f: Formula) -> int:
    """Number of connective/temporal nodes; leaves contribute zero."""
    return sum(1 for node in subformulas(f) if isinstance(node, _OPERATOR_NODES))


def extract_template(f: Formula) -> Template:
    """Abstract a formula to its logical skeleton.

    Every atom becomes the φ placeholder and every concrete interval is
    replaced by the ``[I]`` marker; operator structure and nesting are kept
    as-is, and adjacent identical placeholders are never merged.
    """
    match f:
        case BoolConst():
            return f
        case Atomic() | Placeholder():
            return PHI
        case Not(operand):
            return Not(extract_template(operand))
        case And(left, right):
            return And(extract_template(left), extract_template(right))
        case Or(left, right):
            return Or(extract_template(left), extract_template(right))
        case Implies(left, right):
            return Implies(extract_template(left), extract_template(right))
        case Always(interval, operand):
            return Always(_abstract(interval), extract_template(operand))
        case Eventually(interval, operand):
            return Eventually(_abstract(interval), extract_template(operand))
        case Until(interval, left, right):
            return Until(_abstract(interval), extract_template(left), extract_template(right))
    raise TypeError(f"not a formula node: {f!r}")


def _abstract(interval):
    return INTERVAL_PLACEHOLDER if isinstance(interval, Interval) else interval
