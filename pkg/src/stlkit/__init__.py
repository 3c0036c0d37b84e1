"""Signal temporal logic toolkit.

Parsing and canonical printing of STL formulas, Boolean monitoring over
sampled traces, NL-to-STL scoring metrics, an embedded knowledge store
with retrieval and clustering, a dataset construction pipeline, and
generate-then-refine transformation of natural language into formulas.
"""

from stlkit.backends import BackendConfig, ChatRequest, ChatResponse, HttpBackend, ScriptedBackend
from stlkit.knowledge import Clustering, KnowledgeStore, RetrievalHit
from stlkit.metrics import (
    EvalReport,
    PairScore,
    bleu,
    formula_accuracy,
    rouge_l,
    score_corpus,
    template_accuracy,
)
from stlkit.pairs import NLSTLPair, ReviewDecision, load_bundled_seeds, read_pairs, write_pairs
from stlkit.semantics import (
    EvalOptions,
    Trace,
    evaluate,
    evaluate_all,
    evaluate_windowed,
    load_trace_csv,
)
from stlkit.stl import check_syntax, format_formula, parse, tokenize
from stlkit.translate import TransformRequest, TransformResult, transform

__version__ = "0.1.0"

__all__ = [
    "BackendConfig",
    "ChatRequest",
    "ChatResponse",
    "Clustering",
    "EvalOptions",
    "EvalReport",
    "HttpBackend",
    "KnowledgeStore",
    "NLSTLPair",
    "PairScore",
    "RetrievalHit",
    "ReviewDecision",
    "ScriptedBackend",
    "Trace",
    "TransformRequest",
    "TransformResult",
    "bleu",
    "check_syntax",
    "evaluate",
    "evaluate_all",
    "evaluate_windowed",
    "format_formula",
    "formula_accuracy",
    "load_bundled_seeds",
    "load_trace_csv",
    "parse",
    "read_pairs",
    "rouge_l",
    "score_corpus",
    "template_accuracy",
    "tokenize",
    "transform",
    "write_pairs",
    "__version__",
]
