from __future__ import annotations

from collections import Counter
from pathlib import Path

import pytest

from reqclass.corpus import AnnotatedSentence, AnnotatedToken, Dataset, Requirement
from reqclass.vectorize import SparseVector

FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def golden_csv() -> Path:
    return FIXTURES / "golden_sentences.csv"


@pytest.fixture(scope="session")
def golden_conllu() -> Path:
    return FIXTURES / "golden_sentences.conllu"


@pytest.fixture(scope="session")
def corpus_csv() -> Path:
    return FIXTURES / "fixture_corpus.csv"


@pytest.fixture(scope="session")
def corpus_conllu() -> Path:
    return FIXTURES / "fixture_corpus.conllu"


def dense_vector(values, dimension=None) -> SparseVector:
    """SparseVector from a dense list (test convenience)."""
    dimension = len(values) if dimension is None else dimension
    pairs = [(i, float(v)) for i, v in enumerate(values) if v != 0.0]
    return SparseVector(
        columns=tuple(c for c, _ in pairs),
        weights=tuple(w for _, w in pairs),
        dimension=dimension,
    )


def simple_sentence(req_id: str, words: list[tuple[str, str]]) -> AnnotatedSentence:
    """Minimal SVO parse: 'The <subj> shall <verb> the <obj> .' style.

    ``words`` is [(subj, NOUN), (verb, VERB), (obj, NOUN)]; everything
    hangs off the verb.
    """
    subj, verb, obj = words[0][0], words[1][0], words[2][0]
    tokens = (
        AnnotatedToken(1, "The", "the", "DET", 2, "det"),
        AnnotatedToken(2, subj, subj, "NOUN", 4, "nsubj"),
        AnnotatedToken(3, "shall", "shall", "AUX", 4, "aux"),
        AnnotatedToken(4, verb, verb, "VERB", 0, "root"),
        AnnotatedToken(5, "the", "the", "DET", 6, "det"),
        AnnotatedToken(6, obj, obj, "NOUN", 4, "obj"),
        AnnotatedToken(7, ".", ".", "PUNCT", 4, "punct"),
    )
    return AnnotatedSentence(req_id=req_id, tokens=tokens)


def synthetic_corpus(
    class_words: dict[str, tuple[str, str, str]],
    per_class: int,
    projects: int = 4,
) -> tuple[Dataset, dict[str, list[AnnotatedSentence]]]:
    """Dataset + annotations with one fixed SVO sentence per class.

    Giving each class its own (subject, verb, object) triple makes feature
    supports disjoint across classes, i.e. trivially separable.
    """
    requirements = []
    annotations: dict[str, list[AnnotatedSentence]] = {}
    ordinal = 0
    for label in sorted(class_words):
        subj, verb, obj = class_words[label]
        for _ in range(per_class):
            ordinal += 1
            project = f"P{1 + (ordinal % projects)}"
            req_id = f"{project}-{ordinal}"
            requirements.append(
                Requirement(
                    req_id=req_id,
                    project_id=project,
                    text=f"The {subj} shall {verb} the {obj}.",
                    label=label,
                )
            )
            annotations[req_id] = [
                simple_sentence(req_id, [(subj, "NOUN"), (verb, "VERB"), (obj, "NOUN")])
            ]
    dataset = Dataset(
        requirements=tuple(requirements),
        label_set=tuple(sorted(class_words)),
        project_set=tuple(sorted({r.project_id for r in requirements})),
    )
    return dataset, annotations


def class_counts(dataset: Dataset) -> dict[str, int]:
    return dict(Counter(r.label for r in dataset.requirements))
