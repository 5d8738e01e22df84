"""Vocabulary construction and sparse TF-IDF vectors.

The vocabulary is always built from training-fold feature sets only; test
documents are vectorized against it and out-of-vocabulary terms vanish.
Column order is lexicographic so trained models are byte-reproducible.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .errors import EmptyVocabularyError
from .roles import FeatureSet


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    term_index: dict[str, int]
    document_frequency: dict[str, int]
    corpus_size: int

    @property
    def dimension(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class SparseVector:
    """L2-normalized sparse row: strictly increasing columns < dimension."""

    columns: tuple[int, ...]
    weights: tuple[float, ...]
    dimension: int

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights))

    def dot_dense(self, dense) -> float:
        return float(sum(w * dense[c] for c, w in zip(self.columns, self.weights)))


def build_vocabulary(
    featuresets: list[FeatureSet], min_df: int = 1
) -> Vocabulary:
    """Collect every term with document frequency >= min_df.

    Raises EmptyVocabularyError when nothing survives, which signals a
    degenerate training fold.
    """
    df: Counter = Counter()
    for fs in featuresets:
        for term in fs.features:
            df[term] += 1
    kept = sorted(term for term, count in df.items() if count >= min_df)
    if not kept:
        raise EmptyVocabularyError(
            f"no term reached min_df={min_df} over {len(featuresets)} documents"
        )
    return Vocabulary(
        terms=tuple(kept),
        term_index={term: i for i, term in enumerate(kept)},
        document_frequency={term: df[term] for term in kept},
        corpus_size=len(featuresets),
    )


def idf(vocab: Vocabulary, term: str) -> float:
    """Smoothed inverse document frequency: ln((1+N)/(1+df)) + 1."""
    return math.log((1 + vocab.corpus_size) / (1 + vocab.document_frequency[term])) + 1.0


def vectorize(
    featureset: FeatureSet, vocab: Vocabulary, scheme: str = "tfidf"
) -> SparseVector:
    """Weight a feature multiset against a vocabulary and L2-normalize.

    ``scheme`` is ``tfidf`` (default) or ``tf`` (raw counts, for
    sensitivity checks). A document with no in-vocabulary term maps to the
    zero vector, which stays unnormalized.
    """
    if scheme not in ("tfidf", "tf"):
        raise ValueError(f"unknown weighting scheme {scheme!r}")
    entries = []
    for term, count in featureset.features.items():
        col = vocab.term_index.get(term)
        if col is None:
            continue
        weight = float(count)
        if scheme == "tfidf":
            weight *= idf(vocab, term)
        entries.append((col, weight))
    entries.sort()
    norm = math.sqrt(sum(w * w for _, w in entries))
    if norm > 0:
        entries = [(c, w / norm) for c, w in entries]
    return SparseVector(
        columns=tuple(c for c, _ in entries),
        weights=tuple(w for _, w in entries),
        dimension=vocab.dimension,
    )
