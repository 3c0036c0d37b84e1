"""Boolean satisfaction of formulas over finite sampled traces.

The satisfaction relation is discretized: temporal quantifiers range over
the sample timestamps that fall inside the closed window ``[t+l, t+u]``.
An empty window makes ``G`` vacuously true and ``F``/``U`` false.  Under
the default ``clip`` policy windows are truncated at the trace horizon;
under ``strict`` a window extending past the horizon raises
:class:`HorizonExceeded`.

Two evaluators are provided.  :func:`evaluate` / :func:`evaluate_all`
apply the defining clauses directly (with memoization so that batch
evaluation stays polynomial); :func:`evaluate_windowed` recomputes the same
vectors bottom-up with prefix sums over sample indices and must agree with
the direct evaluator on every input.

Direct evaluation is deliberately eager: both operands of a connective and
every sample of a window are visited regardless of intermediate truth
values, so strict-mode horizon errors do not depend on data values and the
two evaluators fail on exactly the same inputs.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from stlkit.errors import (
    EvaluationError,
    HorizonExceeded,
    MissingInterval,
    NonSampleTime,
    TraceFormatError,
    UnknownVariable,
)
from stlkit.stl.ast import (
    Abs,
    And,
    Atomic,
    BinOp,
    BoolConst,
    Const,
    Eventually,
    Expr,
    Formula,
    Implies,
    Interval,
    Neg,
    Not,
    Or,
    Always,
    Until,
    Var,
    variables,
)


@dataclass(frozen=True)
class Trace:
    """A finite sampling of a multi-dimensional real-valued signal.

    Timestamps are strictly increasing and nonnegative; every variable has
    one sample per timestamp.  The horizon is the last timestamp.
    """

    timestamps: tuple[float, ...]
    variables: Mapping[str, tuple[float, ...]]

    def __post_init__(self):
        if len(self.timestamps) == 0:
            raise TraceFormatError("trace needs at least one sample")
        if self.timestamps[0] < 0:
            raise TraceFormatError("timestamps must be nonnegative")
        for a, b in zip(self.timestamps, self.timestamps[1:]):
            if not a < b:
                raise TraceFormatError("timestamps must be strictly increasing")
        for name, samples in self.variables.items():
            if len(samples) != len(self.timestamps):
                raise TraceFormatError(
                    f"variable {name!r} has {len(samples)} samples, expected {len(self.timestamps)}"
                )
            if any(not math.isfinite(x) for x in samples):
                raise TraceFormatError(f"variable {name!r} contains a non-finite sample")

    @property
    def horizon(self) -> float:
        return self.timestamps[-1]

    def __len__(self) -> int:
        return len(self.timestamps)

    def index_of(self, t: float) -> int:
        """Index of an exact sample timestamp, else :class:`NonSampleTime`."""
        i = bisect_left(self.timestamps, t)
        if i == len(self.timestamps) or self.timestamps[i] != t:
            raise NonSampleTime(t)
        return i


@dataclass(frozen=True)
class EvalOptions:
    horizon_policy: str = "clip"  # "clip" | "strict"

    def __post_init__(self):
        if self.horizon_policy not in ("clip", "strict"):
            raise ValueError(f"unknown horizon policy {self.horizon_policy!r}")


DEFAULT_OPTIONS = EvalOptions()


def _check_variables(f: Formula, trace: Trace) -> None:
    missing = sorted(variables(f) - set(trace.variables))
    if missing:
        raise UnknownVariable(missing[0])


class _RaisedHorizon(Exception):
    """Internal marker; converted to HorizonExceeded at the boundary."""

    def __init__(self, t: float, upper: float):
        self.t = t
        self.upper = upper


class _DirectEvaluator:
    """Clause-by-clause evaluator with per-(node, sample) memoization."""

    def __init__(self, trace: Trace, strict: bool):
        self.trace = trace
        self.strict = strict
        self.ts = trace.timestamps
        self.memo: dict[tuple[int, int], object] = {}
        self._nodes: list[Formula] = []  # keeps id() keys alive

    def eval(self, f: Formula, i: int) -> bool:
        key = (id(f), i)
        hit = self.memo.get(key)
        if hit is not None:
            if isinstance(hit, _RaisedHorizon):
                raise hit
            return hit  # type: ignore[return-value]
        self._nodes.append(f)
        try:
            value = self._eval(f, i)
        except _RaisedHorizon as exc:
            self.memo[key] = exc
            raise
        self.memo[key] = value
        return value

    def _window(self, i: int, interval: Interval) -> range:
        if not isinstance(interval, Interval):
            raise MissingInterval("temporal operator carries no interval bounds")
        t = self.ts[i]
        if self.strict and t + interval.hi > self.trace.horizon:
            raise _RaisedHorizon(t, interval.hi)
        lo = bisect_left(self.ts, t + interval.lo)
        hi = bisect_right(self.ts, t + interval.hi)
        return range(lo, hi)

    def _eval(self, f: Formula, i: int) -> bool:
        match f:
            case BoolConst(value):
                return value
            case Atomic(atom):
                lhs = self._expr(atom.lhs, i)
                rhs = self._expr(atom.rhs, i)
                return _compare(atom.op, lhs, rhs)
            case Not(operand):
                return not self.eval(operand, i)
            case And(left, right):
                lv = self.eval(left, i)
                rv = self.eval(right, i)
                return lv and rv
            case Or(left, right):
                lv = self.eval(left, i)
                rv = self.eval(right, i)
                return lv or rv
            case Implies(left, right):
                lv = self.eval(left, i)
                rv = self.eval(right, i)
                return (not lv) or rv
            case Always(interval, operand):
                values = [self.eval(operand, j) for j in self._window(i, interval)]
                return all(values)
            case Eventually(interval, operand):
                values = [self.eval(operand, j) for j in self._window(i, interval)]
                return any(values)
            case Until(interval, left, right):
                hits = []
                for j in self._window(i, interval):
                    rv = self.eval(right, j)
                    held = all([self.eval(left, k) for k in range(i, j + 1)])
                    hits.append(rv and held)
                return any(hits)
        raise TypeError(f"not a formula node: {f!r}")

    def _expr(self, e: Expr, i: int) -> float:
        match e:
            case Var(name):
                samples = self.trace.variables.get(name)
                if samples is None:
                    raise UnknownVariable(name)
                return samples[i]
            case Const(value):
                return value
            case Neg(operand):
                return -self._expr(operand, i)
            case Abs(operand):
                return abs(self._expr(operand, i))
            case BinOp(op, left, right):
                lv = self._expr(left, i)
                rv = self._expr(right, i)
                return _arith(op, lv, rv, self.ts[i])
        raise TypeError(f"not an expression node: {e!r}")


def _compare(op: str, lhs: float, rhs: float) -> bool:
    if op == "<":
        return lhs < rhs
    if op == "<=":
        return lhs <= rhs
    if op == ">":
        return lhs > rhs
    if op == ">=":
        return lhs >= rhs
    if op == "==":
        return lhs == rhs
    return lhs != rhs


def _arith(op: str, lv: float, rv: float, t: float) -> float:
    try:
        if op == "+":
            value = lv + rv
        elif op == "-":
            value = lv - rv
        elif op == "*":
            value = lv * rv
        else:
            value = lv / rv
    except ZeroDivisionError:
        raise EvaluationError(f"division by zero at t={t:g}") from None
    if not math.isfinite(value):
        raise EvaluationError(f"non-finite value at t={t:g}")
    return value


def evaluate(f: Formula, trace: Trace, t: float, options: EvalOptions = DEFAULT_OPTIONS) -> bool:
    """Does the trace satisfy the formula at sample time ``t``?"""
    _check_variables(f, trace)
    i = trace.index_of(t)
    ev = _DirectEvaluator(trace, options.horizon_policy == "strict")
    try:
        return ev.eval(f, i)
    except _RaisedHorizon as exc:
        raise HorizonExceeded(exc.t, exc.upper, trace.horizon) from None


def evaluate_all(
    f: Formula, trace: Trace, options: EvalOptions = DEFAULT_OPTIONS
) -> list[bool | None]:
    """Satisfaction verdict at every sample timestamp.

    Element ``i`` equals ``evaluate(f, trace, timestamps[i], options)``;
    under the strict policy, positions whose evaluation would raise
    :class:`HorizonExceeded` hold ``None`` instead.  The memo is shared
    across timestamps, so the whole sweep costs one bottom-up pass.
    """
    _check_variables(f, trace)
    ev = _DirectEvaluator(trace, options.horizon_policy == "strict")
    out: list[bool | None] = []
    for i in range(len(trace)):
        try:
            out.append(ev.eval(f, i))
        except _RaisedHorizon:
            out.append(None)
    return out


class _WindowedEvaluator:
    """Bottom-up vector evaluator using prefix sums over sample indices."""

    def __init__(self, trace: Trace, strict: bool):
        self.trace = trace
        self.strict = strict
        self.ts = np.asarray(trace.timestamps, dtype=float)
        self.n = len(trace)

    def run(self, f: Formula) -> list[bool | None]:
        value, raised = self.vec(f)
        if not self.strict:
            return [bool(v) for v in value]
        return [None if r else bool(v) for v, r in zip(value, raised)]

    def _bounds(self, interval: Interval) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        lo = np.searchsorted(self.ts, self.ts + interval.lo, side="left")
        hi = np.searchsorted(self.ts, self.ts + interval.hi, side="right")
        own_raise = (
            self.ts + interval.hi > self.trace.horizon
            if self.strict
            else np.zeros(self.n, dtype=bool)
        )
        return lo, hi, own_raise

    @staticmethod
    def _window_any(v: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        prefix = np.concatenate(([0], np.cumsum(v.astype(np.int64))))
        return (prefix[hi] - prefix[lo]) > 0

    @staticmethod
    def _window_all(v: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        prefix = np.concatenate(([0], np.cumsum(v.astype(np.int64))))
        return (prefix[hi] - prefix[lo]) == (hi - lo)

    def vec(self, f: Formula) -> tuple[np.ndarray, np.ndarray]:
        zeros = np.zeros(self.n, dtype=bool)
        match f:
            case BoolConst(value):
                return np.full(self.n, value, dtype=bool), zeros
            case Atomic(atom):
                lhs = self._expr(atom.lhs)
                rhs = self._expr(atom.rhs)
                return _OPS[atom.op](lhs, rhs), zeros
            case Not(operand):
                v, r = self.vec(operand)
                return ~v, r
            case And(left, right):
                lv, lr = self.vec(left)
                rv, rr = self.vec(right)
                return lv & rv, lr | rr
            case Or(left, right):
                lv, lr = self.vec(left)
                rv, rr = self.vec(right)
                return lv | rv, lr | rr
            case Implies(left, right):
                lv, lr = self.vec(left)
                rv, rr = self.vec(right)
                return ~lv | rv, lr | rr
            case Always(interval, operand):
                self._require(interval)
                v, r = self.vec(operand)
                lo, hi, own = self._bounds(interval)
                out = self._window_all(v, lo, hi)
                raised = own | self._window_any(r, lo, hi) if self.strict else own
                return out, raised
            case Eventually(interval, operand):
                self._require(interval)
                v, r = self.vec(operand)
                lo, hi, own = self._bounds(interval)
                out = self._window_any(v, lo, hi)
                raised = own | self._window_any(r, lo, hi) if self.strict else own
                return out, raised
            case Until(interval, left, right):
                self._require(interval)
                lv, lr = self.vec(left)
                rv, rr = self.vec(right)
                lo, hi, own = self._bounds(interval)
                # reach[i]: largest j such that left holds at every sample in
                # [i, j]; i-1 when left already fails at i.
                reach = np.empty(self.n, dtype=np.int64)
                for i in range(self.n - 1, -1, -1):
                    if lv[i]:
                        reach[i] = self.n - 1 if i == self.n - 1 else max(i, reach[i + 1])
                    else:
                        reach[i] = i - 1
                # A hit needs right at j in the window with j <= reach[i].
                prefix = np.concatenate(([0], np.cumsum(rv.astype(np.int64))))
                limit = np.minimum(hi, reach + 1)
                out = (prefix[np.maximum(limit, lo)] - prefix[lo]) > 0
                if self.strict:
                    # Direct evaluation visits right over the window and left
                    # over [i, last window sample], but only when the window
                    # is non-empty.
                    rraise = self._window_any(rr, lo, hi)
                    lraise = self._window_any(lr, np.arange(self.n), hi)
                    raised = own | ((hi > lo) & (rraise | lraise))
                else:
                    raised = own
                return out, raised
        raise TypeError(f"not a formula node: {f!r}")

    def _require(self, interval):
        if not isinstance(interval, Interval):
            raise MissingInterval("temporal operator carries no interval bounds")

    def _expr(self, e: Expr) -> np.ndarray:
        match e:
            case Var(name):
                samples = self.trace.variables.get(name)
                if samples is None:
                    raise UnknownVariable(name)
                return np.asarray(samples, dtype=float)
            case Const(value):
                return np.full(self.n, value, dtype=float)
            case Neg(operand):
                return -self._expr(operand)
            case Abs(operand):
                return np.abs(self._expr(operand))
            case BinOp(op, left, right):
                lv = self._expr(left)
                rv = self._expr(right)
                with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                    value = _ARITH_OPS[op](lv, rv)
                if not np.isfinite(value).all():
                    bad = int(np.flatnonzero(~np.isfinite(value))[0])
                    raise EvaluationError(f"non-finite value at t={self.ts[bad]:g}")
                return value
        raise TypeError(f"not an expression node: {e!r}")


_OPS = {
    "<": np.less,
    "<=": np.less_equal,
    ">": np.greater,
    ">=": np.greater_equal,
    "==": np.equal,
    "!=": np.not_equal,
}

_ARITH_OPS = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide}


def evaluate_windowed(
    f: Formula, trace: Trace, options: EvalOptions = DEFAULT_OPTIONS
) -> list[bool | None]:
    """Sliding-window batch evaluation; agrees with :func:`evaluate_all`."""
    _check_variables(f, trace)
    return _WindowedEvaluator(trace, options.horizon_policy == "strict").run(f)


# --- trace files -----------------------------------------------------------------


def load_trace_csv(path: str | Path) -> Trace:
    """Load a trace from CSV with header ``time,var1,var2,...``.

    Times must be strictly increasing decimals; NaN and infinite values are
    rejected.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceFormatError(f"{path}: empty trace file") from None
        header = [h.strip() for h in header]
        if not header or header[0] != "time":
            raise TraceFormatError(f"{path}: first column must be 'time'")
        names = header[1:]
        if not names:
            raise TraceFormatError(f"{path}: no signal variables")
        times: list[float] = []
        columns: list[list[float]] = [[] for _ in names]
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise TraceFormatError(f"{path}:{lineno}: expected {len(header)} columns")
            try:
                values = [float(cell) for cell in row]
            except ValueError as e:
                raise TraceFormatError(f"{path}:{lineno}: {e}") from None
            if any(not math.isfinite(v) for v in values):
                raise TraceFormatError(f"{path}:{lineno}: non-finite value")
            times.append(values[0])
            for col, v in zip(columns, values[1:]):
                col.append(v)
    try:
        return Trace(tuple(times), {n: tuple(c) for n, c in zip(names, columns)})
    except TraceFormatError as e:
        raise TraceFormatError(f"{path}: {e}") from None


def save_trace_csv(trace: Trace, path: str | Path) -> None:
    """Write a trace in the CSV schema accepted by :func:`load_trace_csv`."""
    path = Path(path)
    names = sorted(trace.variables)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", *names])
        for i, t in enumerate(trace.timestamps):
            writer.writerow([repr(t), *(repr(trace.variables[n][i]) for n in names)])
