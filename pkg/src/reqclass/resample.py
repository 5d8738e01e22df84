"""Flat-classifier and random-resampling baselines.

Resampling operates strictly on training-fold rows: oversampling
duplicates minority-class rows (with replacement) up to the largest class
count, undersampling deletes majority rows (without replacement) down to
the smallest. Every resampled row keeps a provenance pointer to its
original req_id so leakage audits can verify the test fold was never
touched.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import Requirement
from .errors import EmptyInputError
from .roles import FeatureSet
from .svm import MulticlassModel, TrainConfig, grid_search, train_multiclass
from .vectorize import Vocabulary, build_vocabulary, vectorize


@dataclass(frozen=True)
class ResampledTrainSet:
    requirements: tuple[Requirement, ...]
    provenance: tuple[str, ...]  # original req_id per row
    seed: int

    def class_counts(self) -> dict[str, int]:
        return dict(Counter(r.label for r in self.requirements))


def _grouped(requirements: list[Requirement]) -> dict[str, list[Requirement]]:
    groups: dict[str, list[Requirement]] = {}
    for r in requirements:
        groups.setdefault(r.label, []).append(r)
    return groups


def _shuffled(rows: list[Requirement], rng: np.random.Generator) -> list[Requirement]:
    order = rng.permutation(len(rows))
    return [rows[i] for i in order]


def oversample(
    train_requirements: list[Requirement], seed: int
) -> ResampledTrainSet:
    """Duplicate minority rows until every class matches the largest count."""
    if not train_requirements:
        raise EmptyInputError("nothing to oversample")
    rng = np.random.default_rng(seed)
    groups = _grouped(train_requirements)
    target = max(len(rows) for rows in groups.values())
    out: list[Requirement] = []
    for label in sorted(groups):
        rows = list(groups[label])
        extra = target - len(rows)
        if extra > 0:
            picks = rng.integers(0, len(rows), size=extra)
            rows.extend(rows[i] for i in picks)
        out.extend(rows)
    out = _shuffled(out, rng)
    return ResampledTrainSet(
        requirements=tuple(out),
        provenance=tuple(r.req_id for r in out),
        seed=seed,
    )


def undersample(
    train_requirements: list[Requirement], seed: int, target: str = "min"
) -> ResampledTrainSet:
    """Drop majority rows until every class matches the target count.

    ``target`` is ``min`` (every class cut to the smallest count) or
    ``median`` (classes above the median class count are cut to it,
    smaller classes keep all their rows). min is brutal on long-tailed
    data, which is exactly what it is meant to demonstrate.
    """
    if not train_requirements:
        raise EmptyInputError("nothing to undersample")
    if target not in ("min", "median"):
        raise ValueError(f"unknown undersample target {target!r}")
    rng = np.random.default_rng(seed)
    groups = _grouped(train_requirements)
    sizes = [len(rows) for rows in groups.values()]
    if target == "min":
        target_count = min(sizes)
    else:
        target_count = int(np.median(sizes))
    out: list[Requirement] = []
    for label in sorted(groups):
        rows = groups[label]
        if len(rows) > target_count:
            keep = rng.choice(len(rows), size=target_count, replace=False)
            rows = [rows[i] for i in sorted(keep)]
        out.extend(rows)
    out = _shuffled(out, rng)
    return ResampledTrainSet(
        requirements=tuple(out),
        provenance=tuple(r.req_id for r in out),
        seed=seed,
    )


@dataclass(frozen=True)
class TrainedFlat:
    """A flat one-vs-rest model with the vocabulary it was trained against."""

    model: MulticlassModel
    vocab: Vocabulary


def train_flat(
    train_requirements: list[Requirement],
    featuresets: dict[str, FeatureSet],
    config: TrainConfig,
    *,
    min_df: int = 1,
    scheme: str = "tfidf",
    threads: int = 1,
    param_grid: tuple[float, ...] | None = None,
    inner_folds: int = 3,
) -> TrainedFlat:
    """Single one-vs-rest model over all classes, same feature pipeline.

    Rows may repeat (oversampled input); the vocabulary counts duplicates,
    exactly as a vectorizer fitted on the resampled table would.
    """
    if not train_requirements:
        raise EmptyInputError("no training requirements")
    ordered_fs = [featuresets[r.req_id] for r in train_requirements]
    labels = [r.label for r in train_requirements]
    vocab = build_vocabulary(ordered_fs, min_df=min_df)
    X = [vectorize(fs, vocab, scheme) for fs in ordered_fs]
    if param_grid is not None:
        config = grid_search(X, labels, param_grid, config, inner_folds).best_config
    model = train_multiclass(X, labels, config, threads=threads)
    return TrainedFlat(model=model, vocab=vocab)
