"""Seeded random generators shared across the test suite.

Formulas produced for semantics tests avoid division so that the direct
and windowed evaluators are total on every generated input; round-trip
generators use the full expression grammar.
"""

from __future__ import annotations

import random

from stlkit.semantics import Trace
from stlkit.stl.ast import (
    Abs,
    And,
    Atom,
    Atomic,
    BinOp,
    BoolConst,
    CMP_OPS,
    Const,
    Eventually,
    Formula,
    Implies,
    Interval,
    Neg,
    Not,
    Or,
    Always,
    Until,
    Var,
)

VAR_NAMES = ("x", "y", "z")


def random_expr(rng: random.Random, var_names, depth: int, allow_division: bool = False):
    if depth <= 0 or rng.random() < 0.45:
        if rng.random() < 0.6:
            return Var(rng.choice(var_names))
        return Const(round(rng.uniform(-5, 5), 2))
    choice = rng.randrange(4 if not allow_division else 5)
    if choice == 0:
        operand = random_expr(rng, var_names, depth - 1, allow_division)
        if isinstance(operand, Const):
            # Mirror the parser, which folds a negated literal into a
            # signed constant.
            return Const(-operand.value)
        return Neg(operand)
    if choice == 1:
        return Abs(random_expr(rng, var_names, depth - 1, allow_division))
    if choice == 2:
        op = rng.choice(("+", "-"))
        return BinOp(op, random_expr(rng, var_names, depth - 1, allow_division),
                     random_expr(rng, var_names, depth - 1, allow_division))
    if choice == 3:
        return BinOp("*", random_expr(rng, var_names, depth - 1, allow_division),
                     Const(round(rng.uniform(0.5, 3), 1)))
    return BinOp("/", random_expr(rng, var_names, depth - 1, allow_division),
                 Const(rng.choice((2.0, 4.0, 5.0))))


def random_interval(rng: random.Random, horizon: float) -> Interval:
    lo = round(rng.uniform(0, horizon * 0.5), 2)
    width = round(rng.uniform(0.05, horizon * 0.6), 2) or 0.05
    return Interval(lo, round(lo + width, 2))


def random_atom(rng: random.Random, var_names, allow_division: bool = False) -> Atomic:
    return Atomic(
        Atom(
            random_expr(rng, var_names, 1, allow_division),
            rng.choice(CMP_OPS),
            random_expr(rng, var_names, 1, allow_division),
        )
    )


def random_formula(
    rng: random.Random,
    var_names=VAR_NAMES,
    max_depth: int = 4,
    horizon: float = 10.0,
    allow_division: bool = False,
) -> Formula:
    if max_depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.08:
            return BoolConst(rng.random() < 0.5)
        return random_atom(rng, var_names, allow_division)
    kind = rng.randrange(7)
    sub = lambda: random_formula(rng, var_names, max_depth - 1, horizon, allow_division)
    if kind == 0:
        return Not(sub())
    if kind == 1:
        return And(sub(), sub())
    if kind == 2:
        return Or(sub(), sub())
    if kind == 3:
        return Implies(sub(), sub())
    if kind == 4:
        return Always(random_interval(rng, horizon), sub())
    if kind == 5:
        return Eventually(random_interval(rng, horizon), sub())
    return Until(random_interval(rng, horizon), sub(), sub())


def random_trace(
    rng: random.Random, var_names=VAR_NAMES, max_samples: int = 64, max_step: float = 1.0
) -> Trace:
    n = rng.randrange(1, max_samples + 1)
    times = []
    t = 0.0
    for _ in range(n):
        times.append(round(t, 3))
        t += round(rng.uniform(0.05, max_step), 3) + 0.001
    variables = {
        name: tuple(round(rng.uniform(-5, 5), 2) for _ in range(n)) for name in var_names
    }
    return Trace(tuple(times), variables)
