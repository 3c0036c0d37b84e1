"""Batch transformation benchmarking against a ground-truth dataset.

Each dataset pair's sentence is transformed, predictions are scored against
the stored formulas, and per-pair mismatches are bucketed into four
categories: predictions that fail to parse, aligned token mismatches
touching an operator token, mismatches touching a numeric token, and
structural (template) mismatches.  A pair can land in several of the last
three buckets; parse failures are exclusive.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from stlkit.backends import Backend, ScriptedBackend
from stlkit.errors import DomainError, StlkitError
from stlkit.knowledge import KnowledgeStore
from stlkit.metrics import EvalReport, score_corpus, template_accuracy
from stlkit.pairs import NLSTLPair
from stlkit.stl.parser import check_syntax
from stlkit.stl.tokens import OPERATOR_KINDS, TokenKind, tokenize
from stlkit.translate import TransformRequest, transform

BUCKET_NAMES = ("parse_failure", "operator_token", "numeric_token", "template_mismatch")


def classify_mismatches(ref: str, pred: str) -> set[str]:
    """Mismatch buckets for one reference/prediction pair; empty when exact."""
    if not check_syntax(pred).ok:
        return {"parse_failure"}
    buckets: set[str] = set()
    ref_tokens = tokenize(ref)
    pred_tokens = tokenize(pred)
    for r, p in zip(ref_tokens, pred_tokens):
        if r.kind == p.kind and r.lexeme == p.lexeme:
            continue
        if r.kind in OPERATOR_KINDS or p.kind in OPERATOR_KINDS:
            buckets.add("operator_token")
        if r.kind == TokenKind.NUMBER or p.kind == TokenKind.NUMBER:
            buckets.add("numeric_token")
    if template_accuracy(ref, pred) < 1.0:
        buckets.add("template_mismatch")
    return buckets


@dataclass
class BenchResult:
    mode: str
    report: EvalReport
    buckets: dict[str, int]
    predictions: list[str]
    failures: list[dict] = field(default_factory=list)
    fallback_count: int = 0

    def to_dict(self, include_pairs: bool = True) -> dict:
        d = {
            "mode": self.mode,
            "count": len(self.predictions),
            "formula_accuracy": self.report.formula_accuracy,
            "template_accuracy": self.report.template_accuracy,
            "bleu": self.report.bleu,
            "error_buckets": dict(self.buckets),
            "fallback_count": self.fallback_count,
            "failures": list(self.failures),
            "conventions": {
                "error_buckets": "toolkit-defined mismatch categories; "
                "a pair may hit several buckets, parse failures are exclusive"
            },
        }
        if include_pairs:
            d["pairs"] = self.report.to_dict()["pairs"]
        return d


def run_bench(
    dataset: list[NLSTLPair],
    mode: str,
    generator: Backend | None,
    refiner: Backend | None,
    store: KnowledgeStore | None,
    k: int = 5,
    iterations: int = 1,
    jobs: int = 4,
    prompts_dir: str | None = None,
) -> BenchResult:
    """Transform every dataset sentence and score against its formula.

    Per-pair failures are recorded and scored as empty predictions; the run
    continues.  Scripted backends force ``jobs=1`` so fixture consumption
    order (and thus the whole run) stays deterministic.
    """
    if isinstance(generator, ScriptedBackend) or isinstance(refiner, ScriptedBackend):
        jobs = 1

    def one(pair: NLSTLPair) -> tuple[str, bool, str | None]:
        request = TransformRequest(nl=pair.nl, k=k, iterations=iterations, mode=mode)
        try:
            result = transform(request, generator, refiner, store, prompts_dir)
            return result.final_stl, result.fallback_used, None
        except StlkitError as e:
            return "", False, str(e)

    if jobs <= 1:
        outcomes = [one(p) for p in dataset]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(one, dataset))

    predictions = [text for text, _, _ in outcomes]
    failures = [
        {"id": pair.id, "error": err}
        for pair, (_, _, err) in zip(dataset, outcomes)
        if err is not None
    ]
    fallback_count = sum(1 for _, fell_back, _ in outcomes if fell_back)
    report = score_corpus(dataset, predictions)
    buckets = {name: 0 for name in BUCKET_NAMES}
    for pair, pred in zip(dataset, predictions):
        for bucket in classify_mismatches(pair.stl, pred):
            buckets[bucket] += 1
    return BenchResult(
        mode=mode,
        report=report,
        buckets=buckets,
        predictions=predictions,
        failures=failures,
        fallback_count=fallback_count,
    )


def ensure_aligned(dataset: list[NLSTLPair]) -> None:
    if not dataset:
        raise DomainError("benchmark dataset is empty")
