"""Confusion matrices, macro/micro metrics, fold plans and the CV runner.

Per-class precision/recall/F1 use the 0-when-undefined convention, which
matters because tiny classes routinely vanish from individual folds.
Macro-F1 is the harmonic mean of macro-precision and macro-recall; the
arithmetic mean of per-class F1 is reported alongside it since the two
disagree in general. Micro precision, recall and F1 all equal accuracy
and are reported as one number.

``run_cv`` executes one strategy over a fold plan: features come from the
role extractor per requirement, while vocabulary, decomposition plan,
resampling and hyperparameter search see training-fold rows only. Every
fold records provenance so that leakage is checkable after the fact.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass

import numpy as np

from .corpus import AnnotatedSentence, Dataset, annotation_coverage
from .errors import (
    EmptyMatrixError,
    KTooLargeError,
    LengthMismatchError,
    MissingAnnotationError,
    TooFewProjectsError,
    UnknownLabelError,
)
from .hierarchy import decompose, predict_hierarchical, train_hierarchical
from .resample import oversample, train_flat, undersample
from .roles import FeatureSet, extract_requirement_roles, roles_to_features
from .stopwords import STOPWORDS
from .svm import DEFAULT_GRID, TrainConfig, predict
from .vectorize import vectorize

STRATEGIES = ("hc4rc", "flat", "flat+oversample", "flat+undersample")

REPORT_SCHEMA = "reqclass-report@1"


# -- confusion matrices and metrics ---------------------------------------------


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes."""

    labels: tuple[str, ...]
    counts: np.ndarray

    @property
    def grand_total(self) -> int:
        return int(self.counts.sum())

    def support(self, label: str) -> int:
        return int(self.counts[self.labels.index(label)].sum())


def confusion_matrix(
    y_true: list[str], y_pred: list[str], labels: tuple[str, ...] | list[str]
) -> ConfusionMatrix:
    if len(y_true) != len(y_pred):
        raise LengthMismatchError(
            f"{len(y_true)} true labels vs {len(y_pred)} predictions"
        )
    labels = tuple(labels)
    index = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        if t not in index:
            raise UnknownLabelError(f"unknown true label {t!r}")
        if p not in index:
            raise UnknownLabelError(f"unknown predicted label {p!r}")
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(labels=labels, counts=counts)


@dataclass(frozen=True)
class PerClassMetrics:
    labels: tuple[str, ...]
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]


def per_class_prf(cm: ConfusionMatrix) -> PerClassMetrics:
    precision: dict[str, float] = {}
    recall: dict[str, float] = {}
    f1: dict[str, float] = {}
    for i, label in enumerate(cm.labels):
        tp = float(cm.counts[i, i])
        fp = float(cm.counts[:, i].sum() - cm.counts[i, i])
        fn = float(cm.counts[i, :].sum() - cm.counts[i, i])
        p = tp / (tp + fp) if tp + fp > 0 else 0.0
        r = tp / (tp + fn) if tp + fn > 0 else 0.0
        precision[label] = p
        recall[label] = r
        f1[label] = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
    return PerClassMetrics(
        labels=cm.labels, precision=precision, recall=recall, f1=f1
    )


@dataclass(frozen=True)
class MacroMetrics:
    precision: float
    recall: float
    f1: float  # harmonic mean of macro-precision and macro-recall
    f1_mean_per_class: float  # arithmetic mean of per-class F1


def macro_metrics(pcm: PerClassMetrics) -> MacroMetrics:
    k = len(pcm.labels)
    macro_p = sum(pcm.precision.values()) / k
    macro_r = sum(pcm.recall.values()) / k
    if macro_p + macro_r > 0:
        macro_f1 = 2.0 * macro_p * macro_r / (macro_p + macro_r)
    else:
        macro_f1 = 0.0
    return MacroMetrics(
        precision=macro_p,
        recall=macro_r,
        f1=macro_f1,
        f1_mean_per_class=sum(pcm.f1.values()) / k,
    )


def micro_metrics(cm: ConfusionMatrix) -> float:
    """Accuracy; identical to micro precision, recall and F1."""
    total = cm.grand_total
    if total < 1:
        raise EmptyMatrixError("confusion matrix has no scored instances")
    return float(np.trace(cm.counts)) / total


def weighted_f1(cm: ConfusionMatrix) -> float:
    """Support-weighted mean of per-class F1.

    Biased toward large classes; kept behind a flag for comparison with
    evaluations that weight classes by frequency.
    """
    pcm = per_class_prf(cm)
    total = cm.grand_total
    if total < 1:
        raise EmptyMatrixError("confusion matrix has no scored instances")
    return sum(pcm.f1[lab] * cm.support(lab) for lab in cm.labels) / total


# -- fold planning ----------------------------------------------------------------


@dataclass(frozen=True)
class FoldPlan:
    kind: str  # "stratified-10" style or "project-p"
    k: int
    seed: int
    assignments: dict[str, int]

    def fold_ids(self, fold: int) -> list[str]:
        return [rid for rid, f in self.assignments.items() if f == fold]


def plan_stratified_kfold(
    items: list[tuple[str, str]], k: int = 10, seed: int = 0
) -> FoldPlan:
    """Deal each class's shuffled instances round-robin across k folds.

    ``items`` pairs req_ids with class labels. The deal position carries
    over between classes so overall fold sizes stay within one of each
    other, and each class lands within one of its even share per fold.
    """
    if k < 1 or k > len(items):
        raise KTooLargeError(f"k={k} invalid for {len(items)} instances")
    rng = np.random.default_rng(seed)
    by_label: dict[str, list[str]] = {}
    for req_id, label in items:
        by_label.setdefault(label, []).append(req_id)
    assignments: dict[str, int] = {}
    position = 0
    for label in sorted(by_label):
        members = by_label[label]
        shuffled = [members[i] for i in rng.permutation(len(members))]
        for req_id in shuffled:
            assignments[req_id] = position % k
            position += 1
    return FoldPlan(
        kind=f"stratified-{k}",
        k=k,
        seed=seed,
        assignments={rid: assignments[rid] for rid, _ in items},
    )


def plan_project_fold(
    items: list[tuple[str, str]], k: int = 10, seed: int = 0
) -> FoldPlan:
    """Assign whole projects to folds, balancing requirement counts.

    Projects are taken largest-first and placed on the currently smallest
    fold (ties by fold index), so no project ever spans two folds.
    """
    by_project: dict[str, list[str]] = {}
    for req_id, project_id in items:
        by_project.setdefault(project_id, []).append(req_id)
    if len(by_project) < k:
        raise TooFewProjectsError(
            f"{len(by_project)} projects cannot fill {k} folds"
        )
    ranked = sorted(by_project.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    fold_sizes = [0] * k
    assignments: dict[str, int] = {}
    for project_id, req_ids in ranked:
        fold = min(range(k), key=lambda f: (fold_sizes[f], f))
        fold_sizes[fold] += len(req_ids)
        for req_id in req_ids:
            assignments[req_id] = fold
    return FoldPlan(
        kind="project-p",
        k=k,
        seed=seed,
        assignments={rid: assignments[rid] for rid, _ in items},
    )


def project_counts_per_fold(plan: FoldPlan, items: list[tuple[str, str]]) -> list[int]:
    """Distinct projects per fold for a project plan (diagnostics)."""
    seen: list[set[str]] = [set() for _ in range(plan.k)]
    for req_id, project_id in items:
        seen[plan.assignments[req_id]].add(project_id)
    return [len(s) for s in seen]


# -- cross-validated experiment runner --------------------------------------------


@dataclass(frozen=True)
class RunnerConfig:
    seed: int
    feature_mode: str = "plain"
    min_df: int = 1
    scheme: str = "tfidf"
    svm_c: float = 1.0
    tolerance: float = 1e-4
    max_epochs: int = 1000
    grid_search: bool = False
    param_grid: tuple[float, ...] = DEFAULT_GRID
    inner_folds: int = 3
    threads: int = 1
    include_weighted: bool = False
    undersample_target: str = "min"
    # Research variant: decompose on the full dataset instead of per fold.
    # Deliberately leaks label counts across folds; provenance records it
    # and the leakage audit will flag such runs.
    global_decomposition: bool = False

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "feature_mode": self.feature_mode,
            "min_df": self.min_df,
            "scheme": self.scheme,
            "svm_c": self.svm_c,
            "tolerance": self.tolerance,
            "max_epochs": self.max_epochs,
            "grid_search": self.grid_search,
            "param_grid": list(self.param_grid),
            "inner_folds": self.inner_folds,
            "threads": self.threads,
            "include_weighted": self.include_weighted,
            "undersample_target": self.undersample_target,
            "global_decomposition": self.global_decomposition,
        }


@dataclass(frozen=True)
class FoldProvenance:
    """Which req_ids fed each training-time artifact of one fold."""

    fold: int
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    vocab_source_ids: tuple[str, ...]
    plan_source_ids: tuple[str, ...] | None
    resample_provenance: tuple[str, ...] | None
    grid_source_ids: tuple[str, ...] | None

    def leaks(self) -> dict[str, list[str]]:
        """Test-fold ids that influenced any training artifact (want: none)."""
        test = set(self.test_ids)
        out: dict[str, list[str]] = {}
        checks = {
            "vocabulary": self.vocab_source_ids,
            "plan": self.plan_source_ids,
            "resampling": self.resample_provenance,
            "grid_search": self.grid_source_ids,
        }
        for name, ids in checks.items():
            if ids is None:
                continue
            bad = sorted(test.intersection(ids))
            if bad:
                out[name] = bad
        return out

    def to_json_dict(self) -> dict:
        def digest(ids: tuple[str, ...] | None) -> str | None:
            if ids is None:
                return None
            h = hashlib.sha256("\n".join(ids).encode("utf-8"))
            return h.hexdigest()[:16]

        return {
            "fold": self.fold,
            "ok": not self.leaks(),
            "train_size": len(self.train_ids),
            "test_size": len(self.test_ids),
            "vocab_sources": digest(self.vocab_source_ids),
            "plan_sources": digest(self.plan_source_ids),
            "resample_sources": digest(self.resample_provenance),
            "grid_sources": digest(self.grid_source_ids),
        }


@dataclass(frozen=True)
class FoldResult:
    index: int
    train_size: int
    test_size: int
    vocab_size_d: int
    train_absent_classes: tuple[str, ...]
    confusion: ConfusionMatrix
    plan_summary: dict | None
    resample_counts: dict[str, int] | None
    provenance: FoldProvenance


@dataclass
class EvaluationReport:
    strategy: str
    fold_plan: FoldPlan
    config: RunnerConfig
    labels: tuple[str, ...]
    folds: list[FoldResult]
    pooled: ConfusionMatrix
    wall_clock_seconds: float  # reported in text output only, never in JSON

    def mean_over_folds(self) -> dict[str, float]:
        macros = [macro_metrics(per_class_prf(f.confusion)) for f in self.folds]
        micros = [micro_metrics(f.confusion) for f in self.folds]
        n = len(self.folds)
        return {
            "macro_precision": sum(m.precision for m in macros) / n,
            "macro_recall": sum(m.recall for m in macros) / n,
            "macro_f1": sum(m.f1 for m in macros) / n,
            "macro_f1_mean_per_class": sum(m.f1_mean_per_class for m in macros) / n,
            "micro": sum(micros) / n,
        }

    def to_json_dict(self) -> dict:
        """Deterministic report payload; wall-clock is deliberately absent."""

        def metrics_block(cm: ConfusionMatrix) -> dict:
            pcm = per_class_prf(cm)
            mac = macro_metrics(pcm)
            block = {
                "confusion": cm.counts.tolist(),
                "per_class": {
                    label: {
                        "precision": pcm.precision[label],
                        "recall": pcm.recall[label],
                        "f1": pcm.f1[label],
                        "support": cm.support(label),
                    }
                    for label in cm.labels
                },
                "macro": {
                    "precision": mac.precision,
                    "recall": mac.recall,
                    "f1": mac.f1,
                    "f1_mean_per_class": mac.f1_mean_per_class,
                },
                "micro": micro_metrics(cm) if cm.grand_total else 0.0,
            }
            if self.config.include_weighted and cm.grand_total:
                block["weighted_f1"] = weighted_f1(cm)
            return block

        folds_payload = []
        for f in self.folds:
            entry = {
                "index": f.index,
                "train_size": f.train_size,
                "test_size": f.test_size,
                "hdlss": {"n": f.train_size, "d": f.vocab_size_d},
                "train_absent_classes": list(f.train_absent_classes),
                "plan": f.plan_summary,
                "resample_counts": f.resample_counts,
                "provenance": f.provenance.to_json_dict(),
            }
            entry.update(metrics_block(f.confusion))
            folds_payload.append(entry)

        return {
            "strategy": self.strategy,
            "labels": list(self.labels),
            "fold_plan": {
                "kind": self.fold_plan.kind,
                "k": self.fold_plan.k,
                "seed": self.fold_plan.seed,
                "assignments": dict(sorted(self.fold_plan.assignments.items())),
            },
            "config": self.config.to_json_dict(),
            "folds": folds_payload,
            "pooled": metrics_block(self.pooled),
            "mean_over_folds": self.mean_over_folds(),
        }


def build_featuresets(
    dataset: Dataset,
    annotations: dict[str, list[AnnotatedSentence]],
    feature_mode: str,
) -> dict[str, FeatureSet]:
    """Per-requirement role extraction and feature selection.

    This stage looks at one requirement at a time, so running it over the
    whole dataset before fold splitting leaks nothing.
    """
    missing, _ = annotation_coverage(dataset, annotations)
    if missing:
        preview = ", ".join(missing[:5])
        raise MissingAnnotationError(
            f"{len(missing)} requirements lack annotations (first: {preview})"
        )
    featuresets: dict[str, FeatureSet] = {}
    for req in dataset.requirements:
        sentences = annotations[req.req_id]
        assignment = extract_requirement_roles(sentences)
        featuresets[req.req_id] = roles_to_features(
            assignment, sentences, feature_mode, STOPWORDS
        )
    return featuresets


def _fold_train_config(config: RunnerConfig, fold: int) -> TrainConfig:
    return TrainConfig(
        c=config.svm_c,
        tolerance=config.tolerance,
        max_epochs=config.max_epochs,
        seed=config.seed + 104729 * (fold + 1),
    )


def _resample_seed(config: RunnerConfig, strategy: str, fold: int) -> int:
    return config.seed + 7919 * (fold + 1) + STRATEGIES.index(strategy)


def run_cv(
    dataset: Dataset,
    annotations: dict[str, list[AnnotatedSentence]],
    strategy: str,
    fold_plan: FoldPlan,
    config: RunnerConfig,
) -> EvaluationReport:
    """Train and score one strategy across every fold of the plan."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    uncovered = [
        r.req_id for r in dataset.requirements
        if r.req_id not in fold_plan.assignments
    ]
    if uncovered:
        raise ValueError(
            f"fold plan does not cover {len(uncovered)} requirements "
            f"(first: {uncovered[0]})"
        )

    started = time.monotonic()
    featuresets = build_featuresets(dataset, annotations, config.feature_mode)
    labels = dataset.label_set
    grid = config.param_grid if config.grid_search else None

    global_plan = None
    if config.global_decomposition and strategy == "hc4rc":
        global_plan = decompose(dataset.class_counts())
        all_ids = tuple(r.req_id for r in dataset.requirements)

    fold_results: list[FoldResult] = []
    pooled_counts = np.zeros((len(labels), len(labels)), dtype=np.int64)

    for fold in range(fold_plan.k):
        train_reqs = [
            r for r in dataset.requirements
            if fold_plan.assignments[r.req_id] != fold
        ]
        test_reqs = [
            r for r in dataset.requirements
            if fold_plan.assignments[r.req_id] == fold
        ]
        if not test_reqs:
            continue
        train_ids = tuple(r.req_id for r in train_reqs)
        test_ids = tuple(r.req_id for r in test_reqs)
        tc = _fold_train_config(config, fold)

        plan_summary = None
        resample_counts = None
        plan_sources: tuple[str, ...] | None = None
        resample_rows: tuple[str, ...] | None = None

        if strategy == "hc4rc":
            model = train_hierarchical(
                train_reqs,
                featuresets,
                tc,
                min_df=config.min_df,
                scheme=config.scheme,
                threads=config.threads,
                param_grid=grid,
                inner_folds=config.inner_folds,
                plan_override=global_plan,
            )
            vocab = model.vocab
            plan_summary = {
                "maj_classes": list(model.plan.maj_classes),
                "min_classes": list(model.plan.min_classes),
                "maj_count": model.plan.maj_count,
                "min_count": model.plan.min_count,
                "total": model.plan.total,
            }
            plan_sources = all_ids if global_plan is not None else train_ids
            vocab_sources = train_ids

            def predict_one(fs: FeatureSet) -> str:
                return predict_hierarchical(model, vectorize(fs, vocab, config.scheme))

        else:
            rows = list(train_reqs)
            if strategy == "flat+oversample":
                rs = oversample(rows, _resample_seed(config, strategy, fold))
                rows = list(rs.requirements)
                resample_rows = rs.provenance
                resample_counts = dict(sorted(rs.class_counts().items()))
            elif strategy == "flat+undersample":
                rs = undersample(
                    rows,
                    _resample_seed(config, strategy, fold),
                    target=config.undersample_target,
                )
                rows = list(rs.requirements)
                resample_rows = rs.provenance
                resample_counts = dict(sorted(rs.class_counts().items()))
            trained = train_flat(
                rows,
                featuresets,
                tc,
                min_df=config.min_df,
                scheme=config.scheme,
                threads=config.threads,
                param_grid=grid,
                inner_folds=config.inner_folds,
            )
            vocab = trained.vocab
            vocab_sources = (
                resample_rows if resample_rows is not None else train_ids
            )

            def predict_one(fs: FeatureSet) -> str:
                return predict(trained.model, vectorize(fs, vocab, config.scheme))[0]

        y_true = [r.label for r in test_reqs]
        y_pred = [predict_one(featuresets[r.req_id]) for r in test_reqs]
        cm = confusion_matrix(y_true, y_pred, labels)
        pooled_counts += cm.counts

        train_labels = {r.label for r in train_reqs}
        provenance = FoldProvenance(
            fold=fold,
            train_ids=train_ids,
            test_ids=test_ids,
            vocab_source_ids=vocab_sources,
            plan_source_ids=plan_sources,
            resample_provenance=resample_rows,
            grid_source_ids=(
                (resample_rows if resample_rows is not None else train_ids)
                if config.grid_search
                else None
            ),
        )
        fold_results.append(
            FoldResult(
                index=fold,
                train_size=len(train_reqs),
                test_size=len(test_reqs),
                vocab_size_d=vocab.dimension,
                train_absent_classes=tuple(
                    lab for lab in labels if lab not in train_labels
                ),
                confusion=cm,
                plan_summary=plan_summary,
                resample_counts=resample_counts,
                provenance=provenance,
            )
        )

    pooled = ConfusionMatrix(labels=labels, counts=pooled_counts)
    return EvaluationReport(
        strategy=strategy,
        fold_plan=fold_plan,
        config=config,
        labels=labels,
        folds=fold_results,
        pooled=pooled,
        wall_clock_seconds=time.monotonic() - started,
    )


# -- rendering ---------------------------------------------------------------------


def confusion_csv(cm: ConfusionMatrix) -> str:
    lines = ["true\\predicted," + ",".join(cm.labels)]
    for i, label in enumerate(cm.labels):
        lines.append(label + "," + ",".join(str(int(v)) for v in cm.counts[i]))
    return "\n".join(lines) + "\n"


def render_report_text(reports: list[EvaluationReport]) -> str:
    """Human-readable comparison table, one P/R/F1 column group per strategy."""
    if not reports:
        return "(no strategies run)\n"
    labels = reports[0].labels
    per_strategy = {}
    for rep in reports:
        pcm = per_class_prf(rep.pooled)
        mac = macro_metrics(pcm)
        per_strategy[rep.strategy] = (pcm, mac, micro_metrics(rep.pooled))

    name_width = max(
        len("MacroF1mean"), *(len(lab) for lab in labels)
    )
    header_1 = " " * name_width
    header_2 = f"{'Class':<{name_width}}"
    for rep in reports:
        header_1 += f"  {rep.strategy:^23}"
        header_2 += f"  {'P':>7}{'R':>7}{'F1':>9}"
    lines = [header_1, header_2, "-" * len(header_2)]

    support = {lab: reports[0].pooled.support(lab) for lab in labels}
    ordered = sorted(labels, key=lambda lab: (-support[lab], lab))
    for label in ordered:
        row = f"{label:<{name_width}}"
        for rep in reports:
            pcm, _, _ = per_strategy[rep.strategy]
            row += (
                f"  {pcm.precision[label]:>7.2f}{pcm.recall[label]:>7.2f}"
                f"{pcm.f1[label]:>9.2f}"
            )
        lines.append(row)
    lines.append("-" * len(header_2))
    macro_row = f"{'Macro':<{name_width}}"
    macro_mean_row = f"{'MacroF1mean':<{name_width}}"
    micro_row = f"{'Micro':<{name_width}}"
    for rep in reports:
        _, mac, micro = per_strategy[rep.strategy]
        macro_row += f"  {mac.precision:>7.2f}{mac.recall:>7.2f}{mac.f1:>9.2f}"
        macro_mean_row += f"  {'':>7}{'':>7}{mac.f1_mean_per_class:>9.2f}"
        micro_row += f"  {micro:>7.2f}{micro:>7.2f}{micro:>9.2f}"
    lines.extend([macro_row, macro_mean_row, micro_row, ""])

    for rep in reports:
        mean = rep.mean_over_folds()
        lines.append(
            f"{rep.strategy}: pooled micro={micro_metrics(rep.pooled):.4f} "
            f"macroF1(harmonic)={per_strategy[rep.strategy][1].f1:.4f} "
            f"macroF1(mean-per-class)={per_strategy[rep.strategy][1].f1_mean_per_class:.4f} "
            f"| fold-mean macroF1={mean['macro_f1']:.4f} micro={mean['micro']:.4f} "
            f"| wall-clock {rep.wall_clock_seconds:.2f}s"
        )
        sizes = ", ".join(
            f"fold{f.index}: n={f.train_size} d={f.vocab_size_d}" for f in rep.folds
        )
        lines.append(f"  HDLSS per fold: {sizes}")
    return "\n".join(lines) + "\n"
