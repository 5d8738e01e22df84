"""From-scratch L2-regularized linear SVM with hinge loss.

Binary problems are solved by dual coordinate descent over the box
[0, C]^n, sweeping coordinates in a seeded random order each epoch and
maintaining the primal weight vector incrementally. The bias is carried
as an extra feature coordinate (scaled by ``bias_scale``), the same
device used by the reference liblinear-style solvers; the recorded
solver trace is the negated dual objective, which exact coordinate
maximization makes non-increasing by construction.

Multiclass classification composes one-vs-rest binaries over a sorted
label list; prediction is the argmax of decision values with ties going
to the earliest label.
"""

from __future__ import annotations

import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonFiniteInputError,
    SingleClassWarning,
)
from .vectorize import SparseVector

_MAGIC = b"REQCLASS-SVM 1"


@dataclass(frozen=True)
class TrainConfig:
    c: float = 1.0
    tolerance: float = 1e-4
    max_epochs: int = 1000
    seed: int = 0
    bias_scale: float = 1.0

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("C must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")


DEFAULT_GRID = (0.01, 0.1, 1.0, 10.0)


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float
    positive_label: str
    negative_label: str
    config: TrainConfig
    objective: float
    objective_trace: tuple[float, ...]
    epochs_run: int
    single_class: bool = False

    @property
    def dimension(self) -> int:
        return int(self.weights.shape[0])

    def decision_value(self, x: SparseVector) -> float:
        if x.dimension != self.dimension:
            raise DimensionMismatchError(
                f"vector dimension {x.dimension} != model dimension {self.dimension}"
            )
        return x.dot_dense(self.weights) + self.bias


@dataclass(frozen=True)
class MulticlassModel:
    class_labels: tuple[str, ...]
    per_class_models: tuple[LinearModel, ...]

    @property
    def dimension(self) -> int:
        return self.per_class_models[0].dimension

    def scores(self, x: SparseVector) -> dict[str, float]:
        return {
            label: model.decision_value(x)
            for label, model in zip(self.class_labels, self.per_class_models)
        }


def _as_rows(
    X: list[SparseVector], bias_scale: float
) -> tuple[list[tuple[np.ndarray, np.ndarray]], int]:
    """Convert sparse vectors to (cols, vals) arrays with a bias coordinate."""
    if not X:
        raise ValueError("training set is empty")
    dim = X[0].dimension
    rows = []
    for i, x in enumerate(X):
        if x.dimension != dim:
            raise DimensionMismatchError(
                f"row {i}: dimension {x.dimension} != {dim}"
            )
        vals = np.asarray(x.weights, dtype=np.float64)
        if vals.size and not np.isfinite(vals).all():
            raise NonFiniteInputError(f"row {i}: non-finite feature weight")
        cols = np.concatenate(
            [np.asarray(x.columns, dtype=np.int64), [dim]]
        )
        vals = np.concatenate([vals, [bias_scale]])
        rows.append((cols, vals))
    return rows, dim


def _primal_objective(
    rows: list[tuple[np.ndarray, np.ndarray]],
    y: np.ndarray,
    w_aug: np.ndarray,
    dim: int,
    c: float,
) -> float:
    """Hinge objective 0.5*||w||^2 + C*sum(max(0, 1 - y*(w.x + b)))."""
    w = w_aug[:dim]
    hinge = 0.0
    for i, (cols, vals) in enumerate(rows):
        margin = y[i] * float(w_aug[cols] @ vals)
        hinge += max(0.0, 1.0 - margin)
    return 0.5 * float(w @ w) + c * hinge


def train_binary(
    X: list[SparseVector], y: list[int], config: TrainConfig
) -> LinearModel:
    """Fit one binary hinge-loss SVM by dual coordinate descent.

    ``y`` holds +1/-1 targets. Training stops when the relative dual
    improvement over an epoch drops below ``config.tolerance``, when the
    maximum KKT violation vanishes, or at ``config.max_epochs``. If only
    one class is present the model degenerates to a constant of that sign
    and is flagged (with a warning).
    """
    if len(X) != len(y):
        raise DimensionMismatchError(
            f"{len(X)} vectors but {len(y)} targets"
        )
    yi = np.asarray(y, dtype=np.float64)
    if not np.all(np.isin(yi, (-1.0, 1.0))):
        raise ValueError("binary targets must be +1 or -1")
    rows, dim = _as_rows(X, config.bias_scale)

    if len(set(y)) == 1:
        sign = float(y[0])
        warnings.warn(
            f"single-class training input (all {int(sign):+d})",
            SingleClassWarning,
            stacklevel=2,
        )
        return LinearModel(
            weights=np.zeros(dim),
            bias=sign,
            positive_label="+1",
            negative_label="-1",
            config=config,
            objective=0.0,
            objective_trace=(),
            epochs_run=0,
            single_class=True,
        )

    n = len(rows)
    c = config.c
    qii = np.array([float(vals @ vals) for _, vals in rows])
    alpha = np.zeros(n)
    w = np.zeros(dim + 1)
    rng = np.random.default_rng(config.seed)

    trace: list[float] = []
    dual_prev = 0.0
    epochs_run = 0
    for epoch in range(config.max_epochs):
        order = rng.permutation(n)
        max_violation = 0.0
        for i in order:
            if qii[i] <= 0.0:
                continue
            cols, vals = rows[i]
            g = yi[i] * float(w[cols] @ vals) - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= c:
                pg = max(g, 0.0)
            else:
                pg = g
            if pg != 0.0:
                max_violation = max(max_violation, abs(pg))
                a_new = min(max(a - g / qii[i], 0.0), c)
                delta = a_new - a
                if delta != 0.0:
                    alpha[i] = a_new
                    w[cols] += (delta * yi[i]) * vals
        dual = float(alpha.sum()) - 0.5 * float(w @ w)
        trace.append(-dual)
        epochs_run = epoch + 1
        if max_violation < 1e-12:
            break
        if epoch > 0:
            rel = (dual - dual_prev) / max(1.0, abs(dual))
            if rel < config.tolerance:
                break
        dual_prev = dual

    bias = config.bias_scale * float(w[dim])
    weights = np.array(w[:dim])
    objective = _primal_objective(rows, yi, w, dim, c)
    return LinearModel(
        weights=weights,
        bias=bias,
        positive_label="+1",
        negative_label="-1",
        config=config,
        objective=objective,
        objective_trace=tuple(trace),
        epochs_run=epochs_run,
    )


def train_multiclass(
    X: list[SparseVector],
    y: list[str],
    config: TrainConfig,
    threads: int = 1,
) -> MulticlassModel:
    """Train one-vs-rest binaries, one per distinct label.

    Labels are sorted; the binary for class k trains with seed
    ``config.seed + k`` so the problems stay independent and the whole
    model is reproducible whether or not threads are used.
    """
    if len(X) != len(y):
        raise DimensionMismatchError(f"{len(X)} vectors but {len(y)} targets")
    labels = tuple(sorted(set(y)))

    def fit_one(k: int) -> LinearModel:
        label = labels[k]
        targets = [1 if lab == label else -1 for lab in y]
        cfg = replace(config, seed=config.seed + k)
        with warnings.catch_warnings():
            if len(labels) == 1:
                warnings.simplefilter("ignore", SingleClassWarning)
            model = train_binary(X, targets, cfg)
        return replace(model, positive_label=label, negative_label=f"not-{label}")

    if threads > 1 and len(labels) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            models = tuple(pool.map(fit_one, range(len(labels))))
    else:
        models = tuple(fit_one(k) for k in range(len(labels)))
    if len(labels) == 1:
        warnings.warn(
            f"single-class training input ({labels[0]!r}); constant predictor",
            SingleClassWarning,
            stacklevel=2,
        )
    return MulticlassModel(class_labels=labels, per_class_models=models)


def predict(model: MulticlassModel, x: SparseVector) -> tuple[str, dict[str, float]]:
    """Argmax over per-class decision values; ties go to the earliest label."""
    scores = model.scores(x)
    best_label = model.class_labels[0]
    best_score = scores[best_label]
    for label in model.class_labels[1:]:
        if scores[label] > best_score:
            best_label, best_score = label, scores[label]
    return best_label, scores


# -- hyperparameter grid search ------------------------------------------------


def _stratified_indices(y: list[str], k: int, seed: int) -> list[int]:
    """Fold index per position: per-class seeded shuffle, round-robin deal."""
    rng = np.random.default_rng(seed)
    fold_of = [0] * len(y)
    position = 0
    for label in sorted(set(y)):
        members = [i for i, lab in enumerate(y) if lab == label]
        members = [members[j] for j in rng.permutation(len(members))]
        for i in members:
            fold_of[i] = position % k
            position += 1
    return fold_of


def _macro_f1(y_true: list[str], y_pred: list[str], labels: tuple[str, ...]) -> float:
    precisions, recalls = [], []
    for label in labels:
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == label and p == label)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != label and p == label)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == label and p != label)
        precisions.append(tp / (tp + fp) if tp + fp else 0.0)
        recalls.append(tp / (tp + fn) if tp + fn else 0.0)
    macro_p = sum(precisions) / len(labels)
    macro_r = sum(recalls) / len(labels)
    if macro_p + macro_r == 0.0:
        return 0.0
    return 2.0 * macro_p * macro_r / (macro_p + macro_r)


@dataclass(frozen=True)
class GridSearchResult:
    best_config: TrainConfig
    mean_scores: tuple[tuple[float, float], ...]  # (C, mean macro-F1)


def grid_search(
    X: list[SparseVector],
    y: list[str],
    param_grid: tuple[float, ...] = DEFAULT_GRID,
    base_config: TrainConfig = TrainConfig(),
    inner_folds: int = 3,
) -> GridSearchResult:
    """Pick C by stratified inner cross-validation on the training data.

    Scores are mean macro-F1 over the inner folds; ties break toward the
    smallest C. With fewer than two usable folds the smallest grid value
    is returned unscored.
    """
    if not param_grid:
        raise ValueError("param_grid is empty")
    grid = tuple(sorted(param_grid))
    k = min(inner_folds, len(X))
    if k < 2:
        return GridSearchResult(
            best_config=replace(base_config, c=grid[0]),
            mean_scores=tuple((c, 0.0) for c in grid),
        )
    labels = tuple(sorted(set(y)))
    fold_of = _stratified_indices(y, k, base_config.seed)

    mean_scores = []
    best_c, best_score = None, -1.0
    for c in grid:
        fold_scores = []
        for fold in range(k):
            train_idx = [i for i in range(len(X)) if fold_of[i] != fold]
            test_idx = [i for i in range(len(X)) if fold_of[i] == fold]
            if not train_idx or not test_idx:
                continue
            cfg = replace(base_config, c=c)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SingleClassWarning)
                model = train_multiclass(
                    [X[i] for i in train_idx], [y[i] for i in train_idx], cfg
                )
            preds = [predict(model, X[i])[0] for i in test_idx]
            fold_scores.append(
                _macro_f1([y[i] for i in test_idx], preds, labels)
            )
        score = sum(fold_scores) / len(fold_scores) if fold_scores else 0.0
        mean_scores.append((c, score))
        if score > best_score:
            best_c, best_score = c, score
    return GridSearchResult(
        best_config=replace(base_config, c=best_c),
        mean_scores=tuple(mean_scores),
    )


# -- serialization --------------------------------------------------------------


def binary_to_bytes(model: LinearModel) -> bytes:
    """Serialize one binary model: magic, JSON header, LE float64 weights+bias."""
    header = {
        "dimension": model.dimension,
        "positive_label": model.positive_label,
        "negative_label": model.negative_label,
        "single_class": model.single_class,
        "config": {
            "c": model.config.c,
            "tolerance": model.config.tolerance,
            "max_epochs": model.config.max_epochs,
            "seed": model.config.seed,
            "bias_scale": model.config.bias_scale,
        },
        "objective": model.objective,
        "epochs_run": model.epochs_run,
    }
    payload = np.concatenate([model.weights, [model.bias]]).astype("<f8")
    return (
        _MAGIC
        + b"\n"
        + json.dumps(header, sort_keys=True).encode("utf-8")
        + b"\n"
        + payload.tobytes()
    )


def binary_from_bytes(data: bytes) -> LinearModel:
    magic, rest = data.split(b"\n", 1)
    if magic != _MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    header_line, raw = rest.split(b"\n", 1)
    header = json.loads(header_line.decode("utf-8"))
    dim = header["dimension"]
    values = np.frombuffer(raw[: (dim + 1) * 8], dtype="<f8")
    return LinearModel(
        weights=np.array(values[:dim]),
        bias=float(values[dim]),
        positive_label=header["positive_label"],
        negative_label=header["negative_label"],
        config=TrainConfig(**header["config"]),
        objective=header["objective"],
        objective_trace=(),
        epochs_run=header["epochs_run"],
        single_class=header["single_class"],
    )


def multiclass_to_bytes(model: MulticlassModel) -> bytes:
    """Versioned flat format: magic, JSON header, raw LE float64 weights.

    Each per-class block is ``dimension`` weights followed by the bias, in
    class-label order.
    """
    header = {
        "dimension": model.dimension,
        "labels": list(model.class_labels),
        "per_class": [
            {
                "positive_label": m.positive_label,
                "single_class": m.single_class,
                "config": {
                    "c": m.config.c,
                    "tolerance": m.config.tolerance,
                    "max_epochs": m.config.max_epochs,
                    "seed": m.config.seed,
                    "bias_scale": m.config.bias_scale,
                },
                "objective": m.objective,
                "epochs_run": m.epochs_run,
            }
            for m in model.per_class_models
        ],
    }
    out = [_MAGIC, b"\n", json.dumps(header, sort_keys=True).encode("utf-8"), b"\n"]
    for m in model.per_class_models:
        payload = np.concatenate([m.weights, [m.bias]]).astype("<f8")
        out.append(payload.tobytes())
    return b"".join(out)


def multiclass_from_bytes(data: bytes) -> MulticlassModel:
    magic, rest = data.split(b"\n", 1)
    if magic != _MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    header_line, raw = rest.split(b"\n", 1)
    header = json.loads(header_line.decode("utf-8"))
    dim = header["dimension"]
    block = (dim + 1) * 8
    models = []
    for i, meta in enumerate(header["per_class"]):
        chunk = raw[i * block : (i + 1) * block]
        if len(chunk) != block:
            raise ValueError("truncated weight block")
        values = np.frombuffer(chunk, dtype="<f8")
        models.append(
            LinearModel(
                weights=np.array(values[:dim]),
                bias=float(values[dim]),
                positive_label=meta["positive_label"],
                negative_label=f"not-{meta['positive_label']}",
                config=TrainConfig(**meta["config"]),
                objective=meta["objective"],
                objective_trace=(),
                epochs_run=meta["epochs_run"],
                single_class=meta["single_class"],
            )
        )
    return MulticlassModel(
        class_labels=tuple(header["labels"]),
        per_class_models=tuple(models),
    )


def save_multiclass(model: MulticlassModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(multiclass_to_bytes(model))


def load_multiclass(path) -> MulticlassModel:
    with open(path, "rb") as fh:
        return multiclass_from_bytes(fh.read())
