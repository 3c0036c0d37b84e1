import pytest

from stlkit.errors import IntervalError, ParseError
from stlkit.stl.ast import (
    Abs,
    And,
    Atom,
    Atomic,
    BinOp,
    BoolConst,
    Const,
    Eventually,
    Implies,
    Interval,
    Neg,
    Not,
    Or,
    Always,
    Until,
    Var,
)
from stlkit.stl.parser import check_syntax, iter_formula_lines, parse

ATOM_X = Atomic(Atom(Var("x"), ">", Const(0.0)))


class TestParse:
    def test_nested_implication(self):
        f = parse("G[0,27]((speed > 50) -> F[1,3](rpm < 3000))")
        assert f == Always(
            Interval(0.0, 27.0),
            Implies(
                Atomic(Atom(Var("speed"), ">", Const(50.0))),
                Eventually(Interval(1.0, 3.0), Atomic(Atom(Var("rpm"), "<", Const(3000.0)))),
            ),
        )

    def test_single_atom(self):
        assert parse("x > 0") == ATOM_X

    def test_reversed_interval_rejected(self):
        with pytest.raises(IntervalError) as exc:
            parse("G[5,2](x>0)")
        assert exc.value.span == (1, 6)

    def test_singular_interval_rejected(self):
        with pytest.raises(IntervalError):
            parse("F[3,3](x>0)")

    def test_precedence_chain(self):
        # not > temporal > and > or > implies
        f = parse("! x > 0 & y > 0 | z > 0 -> true")
        assert isinstance(f, Implies)
        assert isinstance(f.left, Or)
        assert isinstance(f.left.left, And)
        assert isinstance(f.left.left.left, Not)

    def test_implies_right_associative(self):
        f = parse("x > 0 -> y > 0 -> z > 0")
        assert isinstance(f, Implies)
        assert isinstance(f.right, Implies)

    def test_and_left_associative(self):
        f = parse("x > 0 & y > 0 & z > 0")
        assert isinstance(f, And)
        assert isinstance(f.left, And)

    def test_until_infix(self):
        f = parse("(x > 0) U[0,5] (y > 0)")
        assert isinstance(f, Until)
        assert f.interval == Interval(0.0, 5.0)

    def test_until_left_associative(self):
        f = parse("(x>0) U[0,1] (y>0) U[0,2] (z>0)")
        assert isinstance(f, Until)
        assert isinstance(f.left, Until)

    def test_temporal_binds_tighter_than_and(self):
        f = parse("G[0,1] (x > 0) & y > 0")
        assert isinstance(f, And)
        assert isinstance(f.left, Always)

    def test_prefix_chain_without_parens(self):
        f = parse("F[0,50] G[0,30] (d_obs >= 1.5)")
        assert isinstance(f, Eventually)
        assert isinstance(f.operand, Always)

    def test_missing_interval_allowed(self):
        f = parse("eventually ( a < 5 )")
        assert f == Eventually(None, Atomic(Atom(Var("a"), "<", Const(5.0))))

    def test_time_suffix_normalized(self):
        assert parse("x_1[t] + x_2[t] <= 1.5") == parse("x_1 + x_2 <= 1.5")

    def test_abs_bars_and_abs_call(self):
        bybars = parse("|z_2| > 0.5")
        bycall = parse("abs(z_2) > 0.5")
        assert bybars == bycall == Atomic(Atom(Abs(Var("z_2")), ">", Const(0.5)))

    def test_unicode_input(self):
        assert parse("□[0,5](x > 0) ∧ ¬(y ≤ 2)") == And(
            Always(Interval(0.0, 5.0), ATOM_X),
            Not(Atomic(Atom(Var("y"), "<=", Const(2.0)))),
        )

    def test_negative_constant_folded(self):
        f = parse("gear == -1")
        assert f == Atomic(Atom(Var("gear"), "==", Const(-1.0)))

    def test_negated_variable(self):
        f = parse("-x < 3")
        assert f == Atomic(Atom(Neg(Var("x")), "<", Const(3.0)))

    def test_paren_arithmetic_vs_paren_formula(self):
        arith = parse("( x + 1 ) * 2 > y")
        assert arith == Atomic(
            Atom(BinOp("*", BinOp("+", Var("x"), Const(1.0)), Const(2.0)), ">", Var("y"))
        )
        boolean = parse("( x > 0 ) & ( y > 0 )")
        assert isinstance(boolean, And)

    def test_infix_bar_is_or(self):
        f = parse("x > 0 | y > 0")
        assert isinstance(f, Or)

    def test_bar_mixes_with_abs(self):
        f = parse("| x | > 0 | | y | > 1")
        assert isinstance(f, Or)
        assert isinstance(f.left.atom.lhs, Abs)
        assert isinstance(f.right.atom.lhs, Abs)

    def test_true_false_literals(self):
        assert parse("true") == BoolConst(True)
        assert parse("! false") == Not(BoolConst(False))

    @pytest.mark.parametrize(
        "bad",
        ["G[0,10] x >", "x >", "(x > 0", "x > 0)", "G[0,5]", "U[0,1] (x>0)", "x[5] > 0", ""],
    )
    def test_parse_errors(self, bad):
        with pytest.raises(ParseError):
            parse(bad)

    def test_division_parses(self):
        f = parse("p_tx < 90 / 3")
        assert f == Atomic(Atom(Var("p_tx"), "<", BinOp("/", Const(90.0), Const(3.0))))


class TestCheckSyntax:
    def test_ok(self):
        result = check_syntax("F[0,50] G[0,30] (d_obs >= 1.5)")
        assert result.ok
        assert result.diagnostics == []

    def test_truncated_input(self):
        result = check_syntax("G[0,10] x >")
        assert not result.ok
        assert any("expected expression" in d.message for d in result.diagnostics)

    def test_singular_interval_diagnostic(self):
        result = check_syntax("F[3,3](x>0)")
        assert not result.ok
        assert any("singular interval" in d.message for d in result.diagnostics)

    def test_diagnostics_carry_line_and_col(self):
        result = check_syntax("G[5,2](x>0)")
        diag = result.diagnostics[0]
        assert (diag.line, diag.col) == (1, 2)
        assert diag.render().startswith("1:2: error:")

    def test_degenerate_atom_warns_but_ok(self):
        result = check_syntax("1 > 2")
        assert result.ok
        assert any(d.severity == "warning" for d in result.diagnostics)

    def test_missing_interval_warns_but_ok(self):
        result = check_syntax("eventually ( a < 5 )")
        assert result.ok
        assert any("interval" in d.message for d in result.diagnostics)

    def test_lex_error_is_diagnostic(self):
        result = check_syntax("x > 5 @")
        assert not result.ok


def test_iter_formula_lines():
    text = "# comment\nx > 0\n\n  G[0,5](y>0)  \n# another\n"
    assert list(iter_formula_lines(text)) == [(2, "x > 0"), (4, "G[0,5](y>0)")]
