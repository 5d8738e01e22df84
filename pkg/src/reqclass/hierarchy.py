"""Class-set decomposition and the three-classifier hierarchy.

The training fold's classes are split into a majority subset (largest
classes whose cumulative count first reaches half the fold) and a
minority subset (the rest). A binary router learns majority-vs-minority
membership; each branch gets its own one-vs-rest multiclass model, and
prediction routes through the binary decision. Folds whose minority side
vanishes degenerate, with a warning, to the flat majority model.
"""

from __future__ import annotations

import json
import warnings
import zipfile
from dataclasses import dataclass, replace

from .corpus import Requirement
from .errors import DegenerateMinWarning, EmptyInputError
from .roles import FeatureSet
from .svm import (
    LinearModel,
    MulticlassModel,
    TrainConfig,
    binary_from_bytes,
    binary_to_bytes,
    grid_search,
    multiclass_from_bytes,
    multiclass_to_bytes,
    predict,
    train_binary,
    train_multiclass,
)
from .vectorize import SparseVector, Vocabulary, build_vocabulary, vectorize


@dataclass(frozen=True)
class DecompositionPlan:
    maj_classes: tuple[str, ...]
    min_classes: tuple[str, ...]
    maj_count: int
    min_count: int
    total: int

    def branch_of(self, label: str) -> str:
        return "maj" if label in self.maj_classes else "min"


def decompose(class_counts: dict[str, int]) -> DecompositionPlan:
    """Split classes into majority/minority subsets.

    Classes are sorted by count descending (ties by label) and assigned to
    the majority subset until its cumulative size first reaches half of
    the total; everything after the cut is minority. The cut is minimal:
    dropping the last majority class would fall below half.
    """
    if not class_counts:
        raise EmptyInputError("no class counts to decompose")
    ranked = sorted(class_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    total = sum(count for _, count in ranked)
    half = total / 2.0
    maj: list[str] = []
    cumulative = 0
    for label, count in ranked:
        maj.append(label)
        cumulative += count
        if cumulative >= half:
            break
    min_classes = tuple(label for label, _ in ranked[len(maj):])
    return DecompositionPlan(
        maj_classes=tuple(maj),
        min_classes=min_classes,
        maj_count=cumulative,
        min_count=total - cumulative,
        total=total,
    )


@dataclass(frozen=True)
class HierarchicalModel:
    """A trained hierarchy: binary router plus one model per branch.

    ``router`` and ``minority_model`` are None for degenerate (single
    branch) folds, where prediction falls through to ``majority_model``.
    """

    plan: DecompositionPlan
    router: LinearModel | None
    majority_model: MulticlassModel
    minority_model: MulticlassModel | None
    vocab: Vocabulary

    @property
    def degenerate(self) -> bool:
        return self.router is None


def _maybe_tune(
    X: list[SparseVector],
    y: list[str],
    config: TrainConfig,
    param_grid: tuple[float, ...] | None,
    inner_folds: int,
) -> TrainConfig:
    if param_grid is None:
        return config
    return grid_search(X, y, param_grid, config, inner_folds).best_config


def train_hierarchical(
    train_requirements: list[Requirement],
    featuresets: dict[str, FeatureSet],
    config: TrainConfig,
    *,
    min_df: int = 1,
    scheme: str = "tfidf",
    threads: int = 1,
    param_grid: tuple[float, ...] | None = None,
    inner_folds: int = 3,
    plan_override: DecompositionPlan | None = None,
) -> HierarchicalModel:
    """Fit the decomposition plan, router and branch models on one fold.

    The vocabulary is built from the training fold only and shared by all
    three models. When ``param_grid`` is given, each model's C is tuned by
    inner cross-validation on its own training subset. ``plan_override``
    substitutes an externally computed decomposition (the global-plan
    variant); whoever supplies it owns the fold-hygiene consequences.
    """
    if not train_requirements:
        raise EmptyInputError("no training requirements")
    ordered_fs = [featuresets[r.req_id] for r in train_requirements]
    labels = [r.label for r in train_requirements]

    if plan_override is not None:
        plan = plan_override
    else:
        counts: dict[str, int] = {}
        for label in labels:
            counts[label] = counts.get(label, 0) + 1
        plan = decompose(counts)

    vocab = build_vocabulary(ordered_fs, min_df=min_df)
    X = [vectorize(fs, vocab, scheme) for fs in ordered_fs]

    maj_idx = [i for i, lab in enumerate(labels) if plan.branch_of(lab) == "maj"]
    min_idx = [i for i, lab in enumerate(labels) if plan.branch_of(lab) == "min"]

    if not min_idx or not maj_idx:
        warnings.warn(
            "one decomposition branch is empty in this training fold; "
            "hierarchy degenerates to a flat model",
            DegenerateMinWarning,
            stacklevel=2,
        )
        flat = train_multiclass(
            X,
            labels,
            _maybe_tune(X, labels, config, param_grid, inner_folds),
            threads=threads,
        )
        return HierarchicalModel(
            plan=plan,
            router=None,
            majority_model=flat,
            minority_model=None,
            vocab=vocab,
        )
    if len({labels[i] for i in min_idx}) == 1:
        warnings.warn(
            "minority subset has a single class in this training fold; "
            "its branch model is a constant predictor",
            DegenerateMinWarning,
            stacklevel=2,
        )

    routing_targets = [1 if plan.branch_of(lab) == "maj" else -1 for lab in labels]
    router_labels = ["maj" if t == 1 else "min" for t in routing_targets]
    router_config = _maybe_tune(
        X, router_labels, config, param_grid, inner_folds
    )
    router = train_binary(X, routing_targets, router_config)
    router = replace(router, positive_label="maj", negative_label="min")
    X_maj, y_maj = [X[i] for i in maj_idx], [labels[i] for i in maj_idx]
    X_min, y_min = [X[i] for i in min_idx], [labels[i] for i in min_idx]

    majority_model = train_multiclass(
        X_maj,
        y_maj,
        _maybe_tune(X_maj, y_maj, config, param_grid, inner_folds),
        threads=threads,
    )
    minority_model = train_multiclass(
        X_min,
        y_min,
        _maybe_tune(X_min, y_min, config, param_grid, inner_folds),
        threads=threads,
    )
    return HierarchicalModel(
        plan=plan,
        router=router,
        majority_model=majority_model,
        minority_model=minority_model,
        vocab=vocab,
    )


def predict_hierarchical(model: HierarchicalModel, x: SparseVector) -> str:
    """Route through the binary decision, then the branch's argmax."""
    if model.router is None or model.minority_model is None:
        return predict(model.majority_model, x)[0]
    if model.router.decision_value(x) >= 0.0:
        return predict(model.majority_model, x)[0]
    return predict(model.minority_model, x)[0]


# -- container serialization -----------------------------------------------------

_EPOCH = (1980, 1, 1, 0, 0, 0)  # fixed zip timestamps keep bytes reproducible


def save_hierarchical(model: HierarchicalModel, path) -> None:
    """One container file: manifest, vocabulary, and the member models."""
    manifest = {
        "format": "reqclass-hierarchy@1",
        "plan": {
            "maj_classes": list(model.plan.maj_classes),
            "min_classes": list(model.plan.min_classes),
            "maj_count": model.plan.maj_count,
            "min_count": model.plan.min_count,
            "total": model.plan.total,
        },
        "degenerate": model.degenerate,
        "members": ["majority.svm"]
        + ([] if model.degenerate else ["router.svm", "minority.svm"]),
    }
    vocab_payload = {
        "terms": list(model.vocab.terms),
        "document_frequency": model.vocab.document_frequency,
        "corpus_size": model.vocab.corpus_size,
    }

    entries: list[tuple[str, bytes]] = [
        ("manifest.json", json.dumps(manifest, sort_keys=True).encode("utf-8")),
        ("vocabulary.json", json.dumps(vocab_payload, sort_keys=True).encode("utf-8")),
        ("majority.svm", multiclass_to_bytes(model.majority_model)),
    ]
    if not model.degenerate:
        entries.append(("router.svm", binary_to_bytes(model.router)))
        entries.append(("minority.svm", multiclass_to_bytes(model.minority_model)))

    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        for name, payload in entries:
            info = zipfile.ZipInfo(name, date_time=_EPOCH)
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, payload)


def load_hierarchical(path) -> HierarchicalModel:
    with zipfile.ZipFile(path, "r") as zf:
        manifest = json.loads(zf.read("manifest.json").decode("utf-8"))
        if manifest.get("format") != "reqclass-hierarchy@1":
            raise ValueError(f"unsupported container {manifest.get('format')!r}")
        vocab_payload = json.loads(zf.read("vocabulary.json").decode("utf-8"))
        terms = tuple(vocab_payload["terms"])
        vocab = Vocabulary(
            terms=terms,
            term_index={t: i for i, t in enumerate(terms)},
            document_frequency=dict(vocab_payload["document_frequency"]),
            corpus_size=vocab_payload["corpus_size"],
        )
        majority = multiclass_from_bytes(zf.read("majority.svm"))
        router = None
        minority = None
        if not manifest["degenerate"]:
            router = binary_from_bytes(zf.read("router.svm"))
            minority = multiclass_from_bytes(zf.read("minority.svm"))

    plan = DecompositionPlan(
        maj_classes=tuple(manifest["plan"]["maj_classes"]),
        min_classes=tuple(manifest["plan"]["min_classes"]),
        maj_count=manifest["plan"]["maj_count"],
        min_count=manifest["plan"]["min_count"],
        total=manifest["plan"]["total"],
    )
    return HierarchicalModel(
        plan=plan,
        router=router,
        majority_model=majority,
        minority_model=minority,
        vocab=vocab,
    )
