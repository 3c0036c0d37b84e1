import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stlkit.errors import (
    EvaluationError,
    HorizonExceeded,
    MissingInterval,
    NonSampleTime,
    TraceFormatError,
    UnknownVariable,
)
from stlkit.semantics import (
    EvalOptions,
    Trace,
    evaluate,
    evaluate_all,
    evaluate_windowed,
    load_trace_csv,
    save_trace_csv,
)
from stlkit.stl.analysis import desugar
from stlkit.stl.ast import Eventually, Interval, Not, Always
from stlkit.stl.parser import parse

import helpers

FIXTURES = Path(__file__).parent / "fixtures"
STRICT = EvalOptions(horizon_policy="strict")


def trace(times, **variables):
    return Trace(tuple(float(t) for t in times), {k: tuple(map(float, v)) for k, v in variables.items()})


class TestTrace:
    def test_requires_samples(self):
        with pytest.raises(TraceFormatError):
            Trace((), {})

    def test_requires_strictly_increasing(self):
        with pytest.raises(TraceFormatError):
            trace([0, 1, 1], x=[1, 2, 3])

    def test_requires_full_columns(self):
        with pytest.raises(TraceFormatError):
            trace([0, 1], x=[1])

    def test_rejects_non_finite(self):
        with pytest.raises(TraceFormatError):
            trace([0, 1], x=[1, float("nan")])

    def test_horizon(self):
        assert trace([0, 5, 9], x=[0, 0, 0]).horizon == 9.0


class TestEvaluate:
    def test_true_everywhere(self):
        tr = trace([0, 1, 2], x=[0, 0, 0])
        for t in tr.timestamps:
            assert evaluate(parse("true"), tr, t) is True

    def test_eventually_example(self):
        tr = trace([0, 1, 2], x=[1, 2, 3])
        assert evaluate(parse("F[0,2](x>2)"), tr, 0.0) is True

    def test_empty_inner_windows_make_nested_formula_false(self):
        tr = trace([0, 10, 20, 27, 30], speed=[60, 60, 40, 40, 40], rpm=[4000, 4000, 2500, 2500, 2500])
        f = parse("G[0,27]((speed > 50) -> F[1,3](rpm < 3000))")
        assert evaluate(f, tr, 0.0) is False

    def test_requires_sample_time(self):
        tr = trace([0, 1], x=[0, 0])
        with pytest.raises(NonSampleTime):
            evaluate(parse("x > 0"), tr, 0.5)

    def test_unknown_variable_checked_upfront(self):
        tr = trace([0, 1], x=[0, 0])
        with pytest.raises(UnknownVariable):
            evaluate(parse("G[5,6](missing > 0)"), tr, 0.0)

    def test_strict_horizon_raises(self):
        tr = trace([0, 1, 2], x=[1, 1, 1])
        with pytest.raises(HorizonExceeded):
            evaluate(parse("G[0,5](x>0)"), tr, 0.0, STRICT)

    def test_clip_truncates_at_horizon(self):
        tr = trace([0, 1, 2], x=[1, 1, 1])
        assert evaluate(parse("G[0,5](x>0)"), tr, 0.0) is True

    def test_missing_interval_rejected(self):
        tr = trace([0, 1], x=[1, 1])
        with pytest.raises(MissingInterval):
            evaluate(parse("eventually (x > 0)"), tr, 0.0)

    def test_division_by_zero_rejected(self):
        tr = trace([0], x=[0], y=[1])
        with pytest.raises(EvaluationError):
            evaluate(parse("y / x > 0"), tr, 0.0)

    def test_comparisons_evaluated_as_written(self):
        tr = trace([0], x=[0])
        assert evaluate(parse("x >= 0"), tr, 0.0) is True
        assert evaluate(parse("x > 0"), tr, 0.0) is False
        assert evaluate(parse("x == 0"), tr, 0.0) is True
        assert evaluate(parse("x != 0"), tr, 0.0) is False


class TestEvaluateAll:
    def test_constant(self):
        tr = trace([0, 1, 2], x=[0, 0, 0])
        assert evaluate_all(parse("true"), tr) == [True, True, True]

    def test_pointwise_atom(self):
        tr = trace([0, 1, 2], x=[0, 2, 0])
        assert evaluate_all(parse("x>1"), tr) == [False, True, False]

    def test_window_sweep(self):
        tr = trace([0, 1, 2], x=[1, 1, 0])
        assert evaluate_all(parse("G[0,1](x>0)"), tr) == [True, False, False]

    def test_strict_yields_trailing_markers(self):
        tr = trace([0, 1, 2], x=[1, 1, 0])
        assert evaluate_all(parse("G[0,1](x>0)"), tr, STRICT) == [True, False, None]

    def test_matches_pointwise_evaluate(self):
        rng = random.Random(5)
        for _ in range(20):
            tr = helpers.random_trace(rng, max_samples=12)
            f = helpers.random_formula(rng, max_depth=3, horizon=tr.horizon or 1.0)
            batch = evaluate_all(f, tr)
            for i, t in enumerate(tr.timestamps):
                assert batch[i] == evaluate(f, tr, t)

    def test_strict_matches_pointwise_with_markers(self):
        rng = random.Random(6)
        for _ in range(20):
            tr = helpers.random_trace(rng, max_samples=12)
            f = helpers.random_formula(rng, max_depth=3, horizon=tr.horizon or 1.0)
            batch = evaluate_all(f, tr, STRICT)
            for i, t in enumerate(tr.timestamps):
                try:
                    expected = evaluate(f, tr, t, STRICT)
                except HorizonExceeded:
                    expected = None
                assert batch[i] == expected


class TestWindowedEquivalence:
    def test_defining_contract_small(self):
        tr = trace([0, 1, 2, 3], x=[1, 0, 1, 1])
        for text in ("x>0", "G[0,2](x>0)", "F[1,2](x>0)", "(x>0) U[0,3] (x<1)"):
            f = parse(text)
            assert evaluate_windowed(f, tr) == evaluate_all(f, tr)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.booleans())
    def test_random_equivalence(self, seed, strict):
        rng = random.Random(seed)
        tr = helpers.random_trace(rng, max_samples=24)
        f = helpers.random_formula(rng, max_depth=4, horizon=max(tr.horizon, 1.0))
        options = STRICT if strict else EvalOptions()
        assert evaluate_windowed(f, tr, options) == evaluate_all(f, tr, options)

    def test_atom_only_formula_is_pointwise(self):
        tr = trace([0, 1, 2], x=[0, 2, 0])
        assert evaluate_windowed(parse("x>1"), tr) == [False, True, False]

    def test_unknown_variable(self):
        tr = trace([0, 1], x=[0, 0])
        with pytest.raises(UnknownVariable):
            evaluate_windowed(parse("y > 0"), tr)


class TestAlgebraicLaws:
    def _cases(self, n, seed):
        rng = random.Random(seed)
        for _ in range(n):
            tr = helpers.random_trace(rng, max_samples=16)
            f = helpers.random_formula(rng, max_depth=3, horizon=max(tr.horizon, 1.0))
            t = rng.choice(tr.timestamps)
            yield f, tr, t

    def test_negation_duality(self):
        for f, tr, t in self._cases(60, 21):
            assert evaluate(Not(f), tr, t) == (not evaluate(f, tr, t))

    def test_always_eventually_duality(self):
        rng = random.Random(22)
        for _ in range(60):
            tr = helpers.random_trace(rng, max_samples=16)
            inner = helpers.random_formula(rng, max_depth=2, horizon=max(tr.horizon, 1.0))
            iv = helpers.random_interval(rng, max(tr.horizon, 1.0))
            t = rng.choice(tr.timestamps)
            lhs = evaluate(Always(iv, inner), tr, t)
            rhs = evaluate(Not(Eventually(iv, Not(inner))), tr, t)
            assert lhs == rhs

    def test_desugar_preserves_semantics(self):
        for f, tr, t in self._cases(80, 23):
            assert evaluate(f, tr, t) == evaluate(desugar(f), tr, t)

    def test_vacuity_on_empty_window(self):
        tr = trace([0, 10], x=[1, 1])
        iv = Interval(1.0, 2.0)  # no samples inside [1,2]
        atom = parse("x > 0")
        assert evaluate(Always(iv, atom), tr, 0.0) is True
        assert evaluate(Eventually(iv, atom), tr, 0.0) is False
        assert evaluate(parse("(x>0) U[1,2] (x>0)"), tr, 0.0) is False

    def test_monotone_window(self):
        tr = trace([0, 1, 2, 3], x=[5, 5, 5, 5])
        assert evaluate(parse("F[0,2](x>0)"), tr, 0.0) is True


@pytest.fixture()
def checks():
    return json.loads((FIXTURES / "at_window_checks.json").read_text())


class TestAutomotiveBenchmark:

    def _verify_enumeration(self, tr, block):
        # The committed enumeration must itself be consistent with the trace.
        times = list(tr.timestamps)
        for check in block["checks"]:
            t = float(check["t"])
            i = times.index(t)
            assert tr.variables["speed"][i] == check["speed"]
            assert (check["speed"] > 50) == check["antecedent"]
            if check["antecedent"]:
                lo, hi = check["inner_window"]
                inner = [u for u in times if lo <= u <= hi]
                assert inner == [float(s) for s in check["inner_samples"]]
                rpms = [tr.variables["rpm"][times.index(u)] for u in inner]
                assert rpms == [float(r) for r in check["rpm_in_window"]]
                assert any(r < 3000 for r in rpms) == check["consequent"]
        verdict = all(
            (not c["antecedent"]) or c["consequent"] for c in block["checks"]
        )
        assert verdict == block["expected"]

    def test_satisfying_trace(self, checks):
        tr = load_trace_csv(FIXTURES / "at_satisfying.csv")
        self._verify_enumeration(tr, checks["satisfying"])
        f = parse(checks["formula"])
        assert evaluate(f, tr, 0.0) is True
        assert evaluate_windowed(f, tr)[0] is True

    def test_violating_trace(self, checks):
        tr = load_trace_csv(FIXTURES / "at_violating.csv")
        self._verify_enumeration(tr, checks["violating"])
        f = parse(checks["formula"])
        assert evaluate(f, tr, 0.0) is False
        assert evaluate_windowed(f, tr)[0] is False


class TestTraceCsv:
    def test_round_trip(self, tmp_path):
        tr = trace([0, 1.5, 3], x=[1, -2, 0.25], y=[0, 0, 1])
        path = tmp_path / "t.csv"
        save_trace_csv(tr, path)
        assert load_trace_csv(path) == tr

    def test_rejects_nan(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,x\n0,nan\n")
        with pytest.raises(TraceFormatError):
            load_trace_csv(path)

    def test_rejects_inf(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,x\n0,inf\n")
        with pytest.raises(TraceFormatError):
            load_trace_csv(path)

    def test_rejects_unsorted_times(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,x\n1,0\n0,0\n")
        with pytest.raises(TraceFormatError):
            load_trace_csv(path)

    def test_requires_time_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("clock,x\n0,0\n")
        with pytest.raises(TraceFormatError):
            load_trace_csv(path)
