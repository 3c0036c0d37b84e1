"""Scoring of predicted formulas against references.

Formula accuracy is the positionally aligned token match rate between two
formula strings, with the longer length as the denominator so truncation
and over-generation are both penalized.  Template accuracy applies the same
alignment after abstracting each side to its logical skeleton.  BLEU is
corpus-level over the same token stream; ROUGE-L scores sentence novelty
for the dataset filters.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from stlkit.errors import DomainError, LengthMismatch
from stlkit.stl.analysis import extract_template
from stlkit.stl.parser import parse
from stlkit.stl.printer import format_formula
from stlkit.stl.tokens import Token, tokenize


@dataclass(frozen=True)
class TokenMismatch:
    position: int
    ref_lexeme: str
    ref_span: tuple[int, int]
    pred_lexeme: str
    pred_span: tuple[int, int]


@dataclass
class PairScore:
    formula_accuracy: float
    template_accuracy: float
    token_diff: list[TokenMismatch] = field(default_factory=list)
    ref_error: str | None = None
    pred_error: str | None = None

    def to_dict(self) -> dict:
        return {
            "formula_accuracy": self.formula_accuracy,
            "template_accuracy": self.template_accuracy,
            "mismatches": [
                {
                    "position": m.position,
                    "ref": m.ref_lexeme,
                    "ref_span": list(m.ref_span),
                    "pred": m.pred_lexeme,
                    "pred_span": list(m.pred_span),
                }
                for m in self.token_diff
            ],
            "ref_error": self.ref_error,
            "pred_error": self.pred_error,
        }


def _aligned_accuracy(ref_tokens: list[Token], pred_tokens: list[Token]) -> tuple[float, list[TokenMismatch]]:
    denom = max(len(ref_tokens), len(pred_tokens))
    if denom == 0:
        return 1.0, []
    matches = 0
    diffs: list[TokenMismatch] = []
    for i, (r, p) in enumerate(zip(ref_tokens, pred_tokens)):
        if r.kind == p.kind and r.lexeme == p.lexeme:
            matches += 1
        else:
            diffs.append(TokenMismatch(i, r.lexeme, r.span, p.lexeme, p.span))
    return matches / denom, diffs


def formula_accuracy(ref: str, pred: str) -> float:
    """Aligned token match rate in [0, 1]; 0 if either side fails to lex."""
    try:
        ref_tokens = tokenize(ref)
        pred_tokens = tokenize(pred)
    except DomainError:
        return 0.0
    return _aligned_accuracy(ref_tokens, pred_tokens)[0]


def template_accuracy(ref: str, pred: str) -> float:
    """Formula accuracy computed on canonical templates; 0 on parse failure."""
    try:
        ref_t = format_formula(extract_template(parse(ref)))
        pred_t = format_formula(extract_template(parse(pred)))
    except DomainError:
        return 0.0
    return formula_accuracy(ref_t, pred_t)


def score_pair(ref: str, pred: str) -> PairScore:
    """Full per-pair diagnostics for the two accuracy metrics."""
    score = PairScore(0.0, 0.0)
    try:
        ref_tokens = tokenize(ref)
    except DomainError as e:
        score.ref_error = str(e)
        ref_tokens = None
    try:
        pred_tokens = tokenize(pred)
    except DomainError as e:
        score.pred_error = str(e)
        pred_tokens = None
    if ref_tokens is not None and pred_tokens is not None:
        score.formula_accuracy, score.token_diff = _aligned_accuracy(ref_tokens, pred_tokens)
    try:
        ref_t = format_formula(extract_template(parse(ref)))
    except DomainError as e:
        score.ref_error = score.ref_error or str(e)
        ref_t = None
    try:
        pred_t = format_formula(extract_template(parse(pred)))
    except DomainError as e:
        score.pred_error = score.pred_error or str(e)
        pred_t = None
    if ref_t is not None and pred_t is not None:
        score.template_accuracy = formula_accuracy(ref_t, pred_t)
    return score


# --- BLEU --------------------------------------------------------------------


def _metric_tokens(text: str) -> list[str]:
    """Lexer tokens when the text lexes, whitespace words otherwise."""
    try:
        return [tok.lexeme for tok in tokenize(text)]
    except DomainError:
        return text.split()


def bleu(refs: list[str], preds: list[str], max_order: int = 4) -> float:
    """Corpus-level BLEU over metric tokens.

    Uniform weights over n-gram orders up to ``max_order`` and the usual
    brevity penalty.  Orders n >= 2 with a zero clipped-match count get
    add-one smoothing; zero unigram overlap is not smoothed and yields 0,
    so disjoint-vocabulary predictions cannot earn a smoothed score.
    """
    if len(refs) != len(preds):
        raise LengthMismatch(f"{len(refs)} references vs {len(preds)} predictions")
    if not refs:
        raise LengthMismatch("need at least one reference/prediction pair")
    ref_len = 0
    pred_len = 0
    matched = [0] * max_order
    total = [0] * max_order
    for ref, pred in zip(refs, preds):
        ref_tokens = _metric_tokens(ref)
        pred_tokens = _metric_tokens(pred)
        ref_len += len(ref_tokens)
        pred_len += len(pred_tokens)
        for n in range(1, max_order + 1):
            ref_counts = Counter(_ngrams(ref_tokens, n))
            pred_counts = Counter(_ngrams(pred_tokens, n))
            total[n - 1] += sum(pred_counts.values())
            matched[n - 1] += sum(
                min(count, ref_counts[gram]) for gram, count in pred_counts.items()
            )
    if pred_len == 0 or matched[0] == 0:
        return 0.0
    log_sum = 0.0
    for n in range(max_order):
        num, den = matched[n], total[n]
        if num == 0:
            num, den = num + 1, den + 1
        log_sum += math.log(num / den)
    geo_mean = math.exp(log_sum / max_order)
    brevity = 1.0 if pred_len > ref_len else math.exp(1.0 - ref_len / pred_len)
    return brevity * geo_mean


def _ngrams(tokens: list[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


# --- ROUGE-L -------------------------------------------------------------------


def rouge_l(a: str, b: str) -> float:
    """ROUGE-L F1 between two texts over whitespace-separated words."""
    wa = a.split()
    wb = b.split()
    if not wa or not wb:
        return 1.0 if wa == wb else 0.0
    lcs = _lcs_length(wa, wb)
    if lcs == 0:
        return 0.0
    precision = lcs / len(wb)
    recall = lcs / len(wa)
    return 2 * precision * recall / (precision + recall)


def _lcs_length(a: list[str], b: list[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            cur[j] = prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


# --- corpus reports ---------------------------------------------------------------


@dataclass
class EvalReport:
    pair_ids: list[str]
    pair_scores: list[PairScore]
    formula_accuracy: float
    template_accuracy: float
    bleu: float

    def to_dict(self) -> dict:
        return {
            "count": len(self.pair_scores),
            "formula_accuracy": self.formula_accuracy,
            "template_accuracy": self.template_accuracy,
            "bleu": self.bleu,
            "pairs": [
                {"id": pid, **score.to_dict()}
                for pid, score in zip(self.pair_ids, self.pair_scores)
            ],
        }


def score_corpus(ref_pairs, preds: list[str]) -> EvalReport:
    """Score predictions positionally against reference pairs.

    ``ref_pairs`` is a list of dataset pairs (anything with ``id`` and
    ``stl`` attributes); ``preds`` is the aligned list of predicted formula
    strings.
    """
    if len(ref_pairs) != len(preds):
        raise LengthMismatch(f"{len(ref_pairs)} references vs {len(preds)} predictions")
    if not ref_pairs:
        raise LengthMismatch("need at least one reference/prediction pair")
    scores = [score_pair(pair.stl, pred) for pair, pred in zip(ref_pairs, preds)]
    n = len(scores)
    return EvalReport(
        pair_ids=[pair.id for pair in ref_pairs],
        pair_scores=scores,
        formula_accuracy=sum(s.formula_accuracy for s in scores) / n,
        template_accuracy=sum(s.template_accuracy for s in scores) / n,
        bleu=bleu([pair.stl for pair in ref_pairs], preds),
    )
