import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stlkit.errors import LengthMismatch
from stlkit.metrics import (
    bleu,
    formula_accuracy,
    rouge_l,
    score_corpus,
    score_pair,
    template_accuracy,
)
from stlkit.pairs import NLSTLPair
from stlkit.stl.printer import format_formula

import helpers


class TestFormulaAccuracy:
    def test_worked_single_substitution(self):
        assert formula_accuracy("eventually ( a < 5 )", "eventually ( b < 5 )") == pytest.approx(5 / 6)

    def test_identical_strings(self):
        assert formula_accuracy("G[0,5] ( x > 0 )", "G[0,5] ( x > 0 )") == 1.0

    def test_length_mismatch_penalized(self):
        # 3 aligned matches over max length 7.
        assert formula_accuracy("x > 0", "x > 0 & y > 0") == pytest.approx(3 / 7)

    def test_whitespace_invariant(self):
        assert formula_accuracy("G[0,5](x>0)", "G[ 0 , 5 ] ( x>0 )") == 1.0

    def test_lex_failure_scores_zero(self):
        assert formula_accuracy("x > 0", "x @ 0") == 0.0
        assert formula_accuracy("x @ 0", "x > 0") == 0.0

    def test_numeric_tokens_compare_by_lexeme(self):
        # 5 vs 5.0 denote the same value but are different tokens.
        assert formula_accuracy("x > 5", "x > 5.0") == pytest.approx(2 / 3)

    def test_empty_strings(self):
        assert formula_accuracy("", "") == 1.0
        assert formula_accuracy("x > 0", "") == 0.0

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_self_score_is_one(self, seed):
        rng = random.Random(seed)
        text = format_formula(helpers.random_formula(rng, max_depth=3, allow_division=True))
        assert formula_accuracy(text, text) == 1.0


class TestTemplateAccuracy:
    def test_worked_example_template_match(self):
        assert template_accuracy("eventually ( a < 5 )", "eventually ( b < 5 )") == 1.0

    def test_identical_formulas(self):
        assert template_accuracy("G[0,5](x>0)", "G[0,5](x>0)") == 1.0

    def test_operator_mismatch(self):
        # Templates "G[I] ( φ )" vs "F[I] ( φ )": 7 tokens, one mismatch.
        assert template_accuracy("G[0,5](x>0)", "F[0,9](y<1)") == pytest.approx(6 / 7)

    def test_invariant_under_renaming_and_rescaling(self):
        a = template_accuracy("G[0,5](x>0)", "G[0,5](x>0)")
        b = template_accuracy("G[7,99](speed>3000)", "G[1,2](q<0.5)")
        assert a == b == 1.0

    def test_parse_failure_scores_zero(self):
        assert template_accuracy("G[0,5](x>0)", "G[5,0](x>0)") == 0.0
        assert template_accuracy("x >", "x > 0") == 0.0


class TestScorePair:
    def test_diff_positions_and_spans(self):
        score = score_pair("eventually ( a < 5 )", "eventually ( b < 5 )")
        assert len(score.token_diff) == 1
        mismatch = score.token_diff[0]
        assert mismatch.position == 2
        assert mismatch.ref_lexeme == "a"
        assert mismatch.pred_lexeme == "b"
        assert mismatch.ref_span == (13, 14)

    def test_pred_error_flagged(self):
        score = score_pair("x > 0", "???")
        assert score.formula_accuracy == 0.0
        assert score.pred_error


class TestBleu:
    def test_identity(self):
        refs = ["G[0,5] ( x > 0 )", "F[1,3] ( y < 1 )"]
        assert bleu(refs, list(refs)) == pytest.approx(1.0)

    def test_disjoint_vocabulary_scores_zero(self):
        assert bleu(["x > 0"], ["foo bar baz"]) < 0.05

    def test_worked_single_pair_value(self):
        # Hand derivation over the 6-token strings:
        #   unigrams: 5/6 match; bigrams: 3/5; trigrams: 1/4;
        #   4-grams: 0/3 -> add-one -> 1/4; brevity penalty 1.
        expected = (5 / 6 * 3 / 5 * 1 / 4 * 1 / 4) ** 0.25
        got = bleu(["eventually ( a < 5 )"], ["eventually ( b < 5 )"])
        assert got == pytest.approx(expected, abs=1e-12)
        assert got == pytest.approx(0.42044820762685725, abs=1e-12)

    def test_brevity_penalty_applies(self):
        full = "G[0,5] ( x > 0 & y > 0 )"
        short = "G[0,5] ( x > 0 )"
        long_score = bleu([full], [full])
        short_score = bleu([full], [short])
        assert short_score < long_score
        # A truncated prediction is capped by the brevity penalty
        # exp(1 - ref_len/pred_len) over the metric token counts (15 vs 11).
        from stlkit.metrics import _metric_tokens

        ref_len, pred_len = len(_metric_tokens(full)), len(_metric_tokens(short))
        assert (ref_len, pred_len) == (15, 11)
        assert short_score < math.exp(1 - ref_len / pred_len) + 1e-9

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            bleu(["a > 0"], [])
        with pytest.raises(LengthMismatch):
            bleu([], [])

    def test_unlexable_falls_back_to_words(self):
        assert bleu(["not a formula at all ok"], ["not a formula at all ok"]) == pytest.approx(1.0)


class TestRougeL:
    def test_identical(self):
        assert rouge_l("the robot moves fast", "the robot moves fast") == 1.0

    def test_disjoint(self):
        assert rouge_l("alpha beta", "gamma delta") == 0.0

    def test_hand_computed_f1(self):
        # LCS("the robot moves fast", "the robot stops") = 2
        # P = 2/3, R = 2/4, F1 = 4/7.
        assert rouge_l("the robot moves fast", "the robot stops") == pytest.approx(4 / 7)

    def test_symmetry(self):
        a, b = "the arm lifts the crate slowly", "the crate is lifted by the arm"
        assert rouge_l(a, b) == pytest.approx(rouge_l(b, a))

    def test_subsequence_not_substring(self):
        # LCS respects order but allows gaps.
        assert rouge_l("a b c d", "a x b y d") == pytest.approx(2 * (3 / 5) * (3 / 4) / (3 / 5 + 3 / 4))

    def test_empty(self):
        assert rouge_l("", "") == 1.0
        assert rouge_l("a", "") == 0.0


class TestScoreCorpus:
    def _pairs(self, stls):
        return [NLSTLPair(f"p{i}", f"sentence {i}", stl) for i, stl in enumerate(stls)]

    def test_perfect_predictions(self):
        pairs = self._pairs(["G[0,5] ( x > 0 )", "F[1,3] ( y < 1 )"])
        report = score_corpus(pairs, [p.stl for p in pairs])
        assert report.formula_accuracy == 1.0
        assert report.template_accuracy == 1.0
        assert report.bleu == pytest.approx(1.0)

    def test_unparseable_predictions(self):
        pairs = self._pairs(["G[0,5] ( x > 0 )", "F[1,3] ( y < 1 )"])
        report = score_corpus(pairs, ["???", "@@@"])
        assert report.formula_accuracy == 0.0
        assert report.template_accuracy == 0.0

    def test_worked_single_pair_corpus(self):
        pairs = [NLSTLPair("p0", "s", "eventually ( a < 5 )")]
        report = score_corpus(pairs, ["eventually ( b < 5 )"])
        assert report.formula_accuracy == pytest.approx(5 / 6)
        assert report.template_accuracy == 1.0

    def test_means_match_per_pair_values(self):
        pairs = self._pairs(["G[0,5] ( x > 0 )", "F[1,3] ( y < 1 )", "x > 0"])
        preds = ["G[0,5] ( x > 0 )", "F[1,3] ( y < 2 )", "???"]
        report = score_corpus(pairs, preds)
        assert report.formula_accuracy == pytest.approx(
            sum(s.formula_accuracy for s in report.pair_scores) / 3, abs=1e-12
        )
        assert report.template_accuracy == pytest.approx(
            sum(s.template_accuracy for s in report.pair_scores) / 3, abs=1e-12
        )

    def test_alignment_enforced(self):
        with pytest.raises(LengthMismatch):
            score_corpus(self._pairs(["x > 0"]), [])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_scores_bounded(seed):
    rng = random.Random(seed)
    ref = format_formula(helpers.random_formula(rng, max_depth=3))
    pred = format_formula(helpers.random_formula(rng, max_depth=3))
    for value in (formula_accuracy(ref, pred), template_accuracy(ref, pred)):
        assert 0.0 <= value <= 1.0
