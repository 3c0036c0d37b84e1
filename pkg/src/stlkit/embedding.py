"""Deterministic local text embeddings.

The default provider is a hashed TF-IDF encoder: lowercase word unigrams
and bigrams, feature-hashed into a fixed-width vector and L2-normalized.
It is fitted on the knowledge-store corpus, fully reproducible across
machines, and needs no model weights.  Remote encoders can be plugged in
by implementing the same two-method protocol.
"""

from __future__ import annotations

import hashlib
import math
import re
from typing import Iterable, Protocol

import numpy as np

from stlkit.errors import EmptyCorpus

_WORD_RE = re.compile(r"[a-z0-9_]+")


def text_terms(text: str) -> list[str]:
    """Unigram and bigram terms of a text, lowercased."""
    words = _WORD_RE.findall(text.lower())
    return words + [f"{a} {b}" for a, b in zip(words, words[1:])]


class EmbeddingProvider(Protocol):
    @property
    def provider_id(self) -> str: ...

    def embed(self, text: str) -> np.ndarray: ...


class HashedTfidfEmbedder:
    """TF-IDF with feature hashing; embeddings are unit vectors.

    ``idf(term) = ln((1 + N) / (1 + df)) + 1`` with document frequencies
    taken from the fitted corpus; unseen terms fall back to ``df = 0``.
    The hash is an 8-byte blake2b digest, so bucket assignment is stable
    everywhere.
    """

    def __init__(self, dim: int = 1024):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.dim = dim
        self._df: dict[str, int] | None = None
        self._n_docs = 0

    def fit(self, corpus: Iterable[str]) -> "HashedTfidfEmbedder":
        df: dict[str, int] = {}
        n = 0
        for doc in corpus:
            n += 1
            for term in set(text_terms(doc)):
                df[term] = df.get(term, 0) + 1
        if n == 0:
            raise EmptyCorpus("cannot fit an embedder on an empty corpus")
        self._df = df
        self._n_docs = n
        return self

    @property
    def fitted(self) -> bool:
        return self._df is not None

    @property
    def provider_id(self) -> str:
        if self._df is None:
            raise EmptyCorpus("embedder is not fitted")
        digest = hashlib.sha256()
        digest.update(f"n={self._n_docs};dim={self.dim};".encode())
        for term in sorted(self._df):
            digest.update(f"{term}\x1f{self._df[term]};".encode())
        return f"hashed-tfidf/1:dim={self.dim}:corpus={digest.hexdigest()[:16]}"

    def bucket(self, term: str) -> int:
        raw = hashlib.blake2b(term.encode(), digest_size=8).digest()
        return int.from_bytes(raw, "big") % self.dim

    def idf(self, term: str) -> float:
        if self._df is None:
            raise EmptyCorpus("embedder is not fitted")
        return math.log((1 + self._n_docs) / (1 + self._df.get(term, 0))) + 1.0

    def embed(self, text: str) -> np.ndarray:
        if self._df is None:
            raise EmptyCorpus("embedder is not fitted")
        vec = np.zeros(self.dim, dtype=float)
        terms = text_terms(text)
        if not terms:
            return vec
        counts: dict[str, int] = {}
        for term in terms:
            counts[term] = counts.get(term, 0) + 1
        for term, tf in counts.items():
            vec[self.bucket(term)] += tf * self.idf(term)
        norm = float(np.linalg.norm(vec))
        if norm > 0:
            vec /= norm
        return vec


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; zero vectors have similarity 0 with everything."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))
