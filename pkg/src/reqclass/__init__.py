"""Multiclass software-requirements classification under class imbalance.

The pipeline: dependency-annotated requirements are reduced to semantic-
role features, vectorized with TF-IDF over training folds, and classified
either flat or through a majority/minority hierarchy built from a
class-set decomposition of the training fold. A cross-validated runner
scores strategies with macro/micro metrics and full leakage provenance.
"""

from .corpus import (
    AnnotatedSentence,
    AnnotatedToken,
    Dataset,
    Requirement,
    annotation_coverage,
    load_annotations,
    load_dataset,
    preprocess,
)
from .evaluation import (
    ConfusionMatrix,
    EvaluationReport,
    FoldPlan,
    RunnerConfig,
    confusion_matrix,
    macro_metrics,
    micro_metrics,
    per_class_prf,
    plan_project_fold,
    plan_stratified_kfold,
    run_cv,
)
from .hierarchy import (
    DecompositionPlan,
    HierarchicalModel,
    decompose,
    predict_hierarchical,
    train_hierarchical,
)
from .resample import oversample, train_flat, undersample
from .roles import (
    FeatureSet,
    RoleAssignment,
    SemanticRole,
    extract_requirement_roles,
    extract_roles,
    roles_to_features,
)
from .stopwords import STOPWORDS
from .svm import (
    LinearModel,
    MulticlassModel,
    TrainConfig,
    grid_search,
    predict,
    train_binary,
    train_multiclass,
)
from .vectorize import SparseVector, Vocabulary, build_vocabulary, vectorize

__version__ = "0.1.0"
