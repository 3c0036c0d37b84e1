"""Dataset profiling: formula structure, sentence text, token diversity.

The n-gram diversity value is toolkit-defined (the mean over n of the
Shannon entropy of the corpus n-gram distribution divided by n, in bits)
and the subformula convention counts every formula node including atoms;
reports carry both caveats in their metadata.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from statistics import mean, median

from stlkit.errors import DomainError, ParseFailure
from stlkit.stl.analysis import count_operators, subformulas
from stlkit.stl.tokens import TokenKind, tokenize

_PUNCT_RE = re.compile(r"^[^\w]+|[^\w]+$")

CONVENTIONS = {
    "subformula_count": "toolkit-defined: every formula node counts, atoms included",
    "ngram_diversity": "toolkit-defined: mean over n<=3 of corpus n-gram entropy (bits) / n",
    "identifier_stats": "toolkit-defined: identifier/constant token occurrences in the stored formula text",
}


@dataclass(frozen=True)
class FormulaStats:
    subformulas_avg: float
    subformulas_median: float
    operators_avg: float
    operators_median: float
    ngram_diversity: float


@dataclass(frozen=True)
class TextStats:
    unique_sentences: int
    unique_words: int
    words_per_sentence_avg: float
    words_per_sentence_median: float
    ngram_diversity: float


@dataclass(frozen=True)
class IdentifierStats:
    chars_per_identifier_avg: float
    chars_per_identifier_median: float
    digits_per_constant_avg: float
    digits_per_constant_median: float
    identifiers_per_formula_avg: float


@dataclass(frozen=True)
class CorpusStats:
    formula: FormulaStats
    text: TextStats
    identifiers: IdentifierStats
    count: int

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "formula": vars(self.formula),
            "text": vars(self.text),
            "identifiers": vars(self.identifiers),
            "conventions": dict(CONVENTIONS),
        }


def sentence_words(text: str) -> list[str]:
    """Whitespace tokens, lowercased, leading/trailing punctuation stripped."""
    words = []
    for chunk in text.split():
        word = _PUNCT_RE.sub("", chunk).lower()
        if word:
            words.append(word)
    return words


def ngram_diversity(token_seqs: list[list[str]], n_max: int = 3) -> float:
    """Mean over n of the corpus n-gram entropy in bits, scaled by 1/n."""
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    total = 0.0
    for n in range(1, n_max + 1):
        counts: Counter = Counter()
        for seq in token_seqs:
            for i in range(len(seq) - n + 1):
                counts[tuple(seq[i : i + n])] += 1
        total += _entropy_bits(counts) / n
    return total / n_max


def _entropy_bits(counts: Counter) -> float:
    n = sum(counts.values())
    if n == 0:
        return 0.0
    return -sum((c / n) * math.log2(c / n) for c in counts.values())


def per_formula_profile(pairs) -> dict:
    """Per-pair raw measurements backing both the stats and the figures."""
    sub_counts: list[int] = []
    op_counts: list[int] = []
    stl_token_seqs: list[list[str]] = []
    ident_lengths: list[int] = []
    const_digits: list[int] = []
    idents_per_formula: list[int] = []
    word_counts: list[int] = []
    nl_token_seqs: list[list[str]] = []
    for pair in pairs:
        try:
            formula = pair.formula()
            tokens = tokenize(pair.stl)
        except DomainError as e:
            raise ParseFailure(pair.id, str(e)) from None
        sub_counts.append(len(subformulas(formula)))
        op_counts.append(count_operators(formula))
        stl_token_seqs.append([t.lexeme for t in tokens])
        idents = [t for t in tokens if t.kind == TokenKind.IDENT]
        idents_per_formula.append(len(idents))
        ident_lengths.extend(len(t.lexeme) for t in idents)
        const_digits.extend(
            sum(ch.isdigit() for ch in t.lexeme)
            for t in tokens
            if t.kind == TokenKind.NUMBER
        )
        words = sentence_words(pair.nl)
        word_counts.append(len(words))
        nl_token_seqs.append(words)
    return {
        "sub_counts": sub_counts,
        "op_counts": op_counts,
        "stl_token_seqs": stl_token_seqs,
        "ident_lengths": ident_lengths,
        "const_digits": const_digits,
        "idents_per_formula": idents_per_formula,
        "word_counts": word_counts,
        "nl_token_seqs": nl_token_seqs,
    }


def _avg(xs) -> float:
    return float(mean(xs)) if xs else 0.0


def _med(xs) -> float:
    return float(median(xs)) if xs else 0.0


def compute_stats(pairs, n_max: int = 3) -> CorpusStats:
    """Corpus statistics over parseable NL-STL pairs."""
    pairs = list(pairs)
    if not pairs:
        raise DomainError("cannot profile an empty dataset")
    prof = per_formula_profile(pairs)
    unique_sentences = len({p.nl for p in pairs})
    unique_words = len({w for seq in prof["nl_token_seqs"] for w in seq})
    return CorpusStats(
        formula=FormulaStats(
            subformulas_avg=_avg(prof["sub_counts"]),
            subformulas_median=_med(prof["sub_counts"]),
            operators_avg=_avg(prof["op_counts"]),
            operators_median=_med(prof["op_counts"]),
            ngram_diversity=ngram_diversity(prof["stl_token_seqs"], n_max),
        ),
        text=TextStats(
            unique_sentences=unique_sentences,
            unique_words=unique_words,
            words_per_sentence_avg=_avg(prof["word_counts"]),
            words_per_sentence_median=_med(prof["word_counts"]),
            ngram_diversity=ngram_diversity(prof["nl_token_seqs"], n_max),
        ),
        identifiers=IdentifierStats(
            chars_per_identifier_avg=_avg(prof["ident_lengths"]),
            chars_per_identifier_median=_med(prof["ident_lengths"]),
            digits_per_constant_avg=_avg(prof["const_digits"]),
            digits_per_constant_median=_med(prof["const_digits"]),
            identifiers_per_formula_avg=_avg(prof["idents_per_formula"]),
        ),
        count=len(pairs),
    )


def render_stats_table(stats: CorpusStats) -> str:
    """Three aligned text panels mirroring the report layout."""
    f, t, i = stats.formula, stats.text, stats.identifiers
    lines = [
        f"formulas ({stats.count} pairs)",
        f"  subformulas per formula   avg {f.subformulas_avg:8.2f}   median {f.subformulas_median:g}",
        f"  operators per formula     avg {f.operators_avg:8.2f}   median {f.operators_median:g}",
        f"  token n-gram diversity        {f.ngram_diversity:8.3f}",
        "sentences",
        f"  unique sentences              {t.unique_sentences:8d}",
        f"  unique words                  {t.unique_words:8d}",
        f"  words per sentence        avg {t.words_per_sentence_avg:8.2f}   median {t.words_per_sentence_median:g}",
        f"  word n-gram diversity         {t.ngram_diversity:8.3f}",
        "identifiers and constants",
        f"  chars per identifier      avg {i.chars_per_identifier_avg:8.2f}   median {i.chars_per_identifier_median:g}",
        f"  digits per constant       avg {i.digits_per_constant_avg:8.2f}   median {i.digits_per_constant_median:g}",
        f"  identifiers per formula   avg {i.identifiers_per_formula_avg:8.2f}",
    ]
    return "\n".join(lines)
