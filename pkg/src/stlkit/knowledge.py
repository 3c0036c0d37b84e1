"""Embedded, searchable collection of NL-STL pairs.

The store keeps one embedding per pair.  Clustering runs over the
configured pair embedding (NL and formula text concatenated by default,
NL-only via ``embed_mode="nl"``); retrieval always ranks by similarity
between the query sentence and each pair's NL sentence, so a sentence
always retrieves its own pair first.

Persistence is a JSON Lines pair file plus an ``.npz`` sidecar holding the
vectors and the provider fingerprint; a fingerprint mismatch on load simply
triggers re-embedding.

Concurrency: reads are safe from any number of threads once constructed;
mutation takes an internal lock and recomputes embeddings (document
frequencies shift as the corpus grows).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from stlkit.embedding import HashedTfidfEmbedder
from stlkit.errors import EmptyStore, StoreFormatError, TooFewPoints
from stlkit.pairs import NLSTLPair, read_pairs, write_pairs

EMBED_MODES = ("pair", "nl")


@dataclass(frozen=True)
class RetrievalHit:
    pair: NLSTLPair
    score: float


@dataclass(frozen=True)
class Clustering:
    k: int
    assignments: tuple[int, ...]
    exemplar_ids: tuple[str, ...]
    inertia: float
    #: within-cluster SSE after each Lloyd pass; non-increasing.
    inertia_history: tuple[float, ...] = ()


class KnowledgeStore:
    def __init__(self, pairs=None, dim: int = 1024, embed_mode: str = "pair"):
        if embed_mode not in EMBED_MODES:
            raise StoreFormatError(f"unknown embed mode {embed_mode!r}")
        self.embed_mode = embed_mode
        self.dim = dim
        self._lock = threading.RLock()
        self._pairs: list[NLSTLPair] = []
        self._ids: set[str] = set()
        self._embedder: HashedTfidfEmbedder | None = None
        self._vectors: np.ndarray | None = None
        self._nl_vectors: np.ndarray | None = None
        if pairs:
            self.add_pairs(pairs)

    # -- basic accessors ------------------------------------------------------

    def __len__(self) -> int:
        return len(self._pairs)

    @property
    def pairs(self) -> tuple[NLSTLPair, ...]:
        return tuple(self._pairs)

    def get(self, pair_id: str) -> NLSTLPair | None:
        for p in self._pairs:
            if p.id == pair_id:
                return p
        return None

    def _pair_text(self, pair: NLSTLPair) -> str:
        if self.embed_mode == "nl":
            return pair.nl
        return f"{pair.nl}\n{pair.stl}"

    @property
    def embedder(self) -> HashedTfidfEmbedder:
        if self._embedder is None:
            raise EmptyStore("knowledge store is empty")
        return self._embedder

    @property
    def provider_id(self) -> str:
        return f"{self.embedder.provider_id}:mode={self.embed_mode}"

    @property
    def vectors(self) -> np.ndarray:
        if self._vectors is None:
            raise EmptyStore("knowledge store is empty")
        return self._vectors

    # -- mutation ---------------------------------------------------------------

    def add_pairs(self, pairs) -> None:
        """Append pairs and refresh all embeddings under the store lock."""
        with self._lock:
            for pair in pairs:
                if pair.id in self._ids:
                    raise StoreFormatError(f"duplicate pair id {pair.id!r}")
                self._ids.add(pair.id)
                self._pairs.append(pair)
            self._reembed()

    def add_pair(self, pair: NLSTLPair) -> None:
        self.add_pairs([pair])

    def _reembed(self) -> None:
        if not self._pairs:
            self._embedder = None
            self._vectors = None
            self._nl_vectors = None
            return
        embedder = HashedTfidfEmbedder(self.dim)
        embedder.fit(self._pair_text(p) for p in self._pairs)
        self._embedder = embedder
        self._vectors = np.stack([embedder.embed(self._pair_text(p)) for p in self._pairs])
        self._nl_vectors = np.stack([embedder.embed(p.nl) for p in self._pairs])

    def embed_pair(self, pair: NLSTLPair) -> np.ndarray:
        """Embedding of a pair under the store's configured mode."""
        return self.embedder.embed(self._pair_text(pair))

    # -- retrieval ------------------------------------------------------------

    def top_k(self, query: str, k: int) -> list[RetrievalHit]:
        """The ``min(k, len(store))`` most similar pairs, best first.

        Similarity is cosine between the embedded query sentence and each
        pair's embedded NL sentence; ties break toward the smaller pair id.
        """
        if not self._pairs:
            raise EmptyStore("cannot retrieve from an empty store")
        if k <= 0:
            return []
        qv = self.embedder.embed(query)
        scores = self._nl_vectors @ qv
        order = sorted(range(len(self._pairs)), key=lambda i: (-scores[i], self._pairs[i].id))
        return [RetrievalHit(self._pairs[i], float(scores[i])) for i in order[:k]]

    # -- clustering ------------------------------------------------------------

    def kmeans(self, k: int, seed: int) -> Clustering:
        """Seeded k-means over the pair embeddings.

        k-means++ initialization, Lloyd iterations until assignments are
        stable (at most 100 passes), emptied clusters reseeded with the
        farthest point.  The exemplar of each cluster is the member nearest
        its centroid, ties toward the smaller pair id.
        """
        n = len(self._pairs)
        if n < k or k <= 0:
            raise TooFewPoints(k, n)
        points = self.vectors
        rng = np.random.default_rng(seed)
        centroids = _kmeans_pp_init(points, k, rng)
        assignments = np.zeros(n, dtype=int)
        history: list[float] = []
        for _ in range(100):
            dists = _sq_distances(points, centroids)
            new_assignments = np.argmin(dists, axis=1)
            for cluster in range(k):
                members = np.flatnonzero(new_assignments == cluster)
                if members.size == 0:
                    # Reseed an empty cluster with the point farthest from
                    # its current centroid.
                    own = dists[np.arange(n), new_assignments]
                    far = int(np.argmax(own))
                    centroids[cluster] = points[far]
                    new_assignments[far] = cluster
                    members = np.array([far])
                centroids[cluster] = points[members].mean(axis=0)
            history.append(
                float(_sq_distances(points, centroids)[np.arange(n), new_assignments].sum())
            )
            if np.array_equal(new_assignments, assignments):
                break
            assignments = new_assignments
        dists = _sq_distances(points, centroids)
        inertia = float(dists[np.arange(n), assignments].sum())
        exemplars: list[str] = []
        for cluster in range(k):
            members = np.flatnonzero(assignments == cluster)
            if members.size == 0:
                continue
            best = min(members, key=lambda i: (dists[i, cluster], self._pairs[i].id))
            exemplars.append(self._pairs[int(best)].id)
        return Clustering(
            k=k,
            assignments=tuple(int(a) for a in assignments),
            exemplar_ids=tuple(exemplars),
            inertia=inertia,
            inertia_history=tuple(history),
        )

    def exemplars(self, k: int, seed: int) -> list[NLSTLPair]:
        clustering = self.kmeans(k, seed)
        return [self.get(pid) for pid in clustering.exemplar_ids]

    # -- persistence -------------------------------------------------------------

    def save(self, path: str | Path) -> None:
        path = Path(path)
        write_pairs(path, self._pairs)
        if self._vectors is not None:
            np.savez(
                _sidecar(path),
                vectors=self._vectors,
                nl_vectors=self._nl_vectors,
                provider_id=np.array(self.provider_id),
            )

    @classmethod
    def load(cls, path: str | Path, dim: int = 1024, embed_mode: str = "pair") -> "KnowledgeStore":
        """Load a store, reusing sidecar vectors when the fingerprint matches.

        A missing or stale sidecar is not an error: the pairs are re-embedded
        (same result, just slower).
        """
        path = Path(path)
        store = cls(dim=dim, embed_mode=embed_mode)
        store.add_pairs(read_pairs(path))
        sidecar = _sidecar(path)
        if sidecar.exists() and len(store):
            try:
                with np.load(sidecar) as data:
                    if str(data["provider_id"]) == store.provider_id:
                        store._vectors = data["vectors"]
                        store._nl_vectors = data["nl_vectors"]
            except (OSError, KeyError, ValueError):
                pass  # treat unreadable sidecars as stale
        return store


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".vectors.npz")


def _sq_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    first = int(rng.integers(n))
    centroids = [points[first]]
    for _ in range(1, k):
        dists = np.min(_sq_distances(points, np.stack(centroids)), axis=1)
        total = float(dists.sum())
        if total <= 0:
            # All remaining points coincide with a centroid; pick uniformly.
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=dists / total))
        centroids.append(points[idx])
    return np.stack(centroids).astype(float).copy()
