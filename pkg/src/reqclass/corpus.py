"""Labeled requirement datasets and their linguistic annotations.

Two file formats are consumed:

* requirements: UTF-8 CSV with header ``ProjectID,RequirementText,Class``
  (RFC-4180 quoting). One requirement per data row; req_ids are synthesized
  as ``<ProjectID>-<row ordinal>`` with the ordinal counting data rows from 1.
* annotations: CoNLL-U, ten tab-separated columns, one ``# req_id = <id>``
  comment per sentence block. Entity tags ride in the MISC column as
  ``NER=<B|I>-<LABEL>``.
"""

from __future__ import annotations

import csv
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    CyclicDependencyError,
    DuplicateReqIdError,
    EmptyDatasetError,
    MalformedConlluError,
    MalformedRowError,
    MissingColumnError,
    MissingReqIdError,
    UnknownReqIdWarning,
)

CSV_COLUMNS = ("ProjectID", "RequirementText", "Class")

# Entity labels recognized on the Measure path; anything else in a NER=
# MISC entry is dropped at load time.
MEASURE_ENTITY_LABELS = frozenset(
    {"DATE", "TIME", "PERCENT", "MONEY", "CARDINAL", "QUANTITY"}
)


@dataclass(frozen=True)
class Requirement:
    req_id: str
    project_id: str
    text: str
    label: str


@dataclass(frozen=True)
class Dataset:
    requirements: tuple[Requirement, ...]
    label_set: tuple[str, ...]
    project_set: tuple[str, ...]

    @property
    def sample_size_n(self) -> int:
        return len(self.requirements)

    def class_counts(self) -> dict[str, int]:
        counts = Counter(r.label for r in self.requirements)
        return {label: counts[label] for label in self.label_set}

    def by_id(self) -> dict[str, Requirement]:
        return {r.req_id: r for r in self.requirements}


@dataclass(frozen=True)
class AnnotatedToken:
    """One CoNLL-U token row. ``head`` is 0 for the sentence root.

    ``entity`` is either None or a BIO-tagged label such as ``B-PERCENT``.
    """

    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str
    entity: str | None = None

    def entity_label(self) -> str | None:
        if self.entity is None:
            return None
        return self.entity.split("-", 1)[1]


@dataclass(frozen=True)
class AnnotatedSentence:
    req_id: str
    tokens: tuple[AnnotatedToken, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def token(self, index: int) -> AnnotatedToken:
        return self.tokens[index - 1]

    def children(self, index: int) -> list[int]:
        return [t.index for t in self.tokens if t.head == index]

    def subtree(self, index: int) -> list[int]:
        """Token indices of ``index`` and all its transitive dependents."""
        out = [index]
        stack = [index]
        while stack:
            node = stack.pop()
            for child in self.children(node):
                out.append(child)
                stack.append(child)
        return sorted(out)


def load_dataset(path: str | Path) -> Dataset:
    """Load a requirements CSV into a Dataset.

    Labels are upper-cased; label and project sets are sorted so that two
    loads of identical bytes yield identical Datasets. Errors carry the
    offending CSV row number (header = row 1).
    """
    path = Path(path)
    with path.open("r", encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path}: file is empty", row=1) from None
        header = [h.strip() for h in header]
        if header != list(CSV_COLUMNS):
            missing = [c for c in CSV_COLUMNS if c not in header]
            raise MissingColumnError(
                f"{path}: expected header {','.join(CSV_COLUMNS)}, got "
                f"{','.join(header)}" + (f"; missing {missing}" if missing else ""),
                row=1,
            )

        requirements: list[Requirement] = []
        seen_ids: set[str] = set()
        ordinal = 0
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_COLUMNS):
                raise MalformedRowError(
                    f"{path}: expected {len(CSV_COLUMNS)} columns, got {len(row)}",
                    row=row_no,
                )
            project_id, text, label = (v.strip() for v in row)
            if not text:
                raise MalformedRowError(
                    f"{path}: empty requirement text", row=row_no
                )
            if not project_id or not label:
                raise MalformedRowError(
                    f"{path}: empty ProjectID or Class", row=row_no
                )
            ordinal += 1
            req_id = f"{project_id}-{ordinal}"
            if req_id in seen_ids:
                raise DuplicateReqIdError(
                    f"{path}: duplicate req_id {req_id!r}", row=row_no
                )
            seen_ids.add(req_id)
            requirements.append(
                Requirement(
                    req_id=req_id,
                    project_id=project_id,
                    text=text,
                    label=label.upper(),
                )
            )

    if not requirements:
        raise EmptyDatasetError(f"{path}: no data rows", row=1)

    label_set = tuple(sorted({r.label for r in requirements}))
    project_set = tuple(sorted({r.project_id for r in requirements}))
    return Dataset(
        requirements=tuple(requirements),
        label_set=label_set,
        project_set=project_set,
    )


def _parse_misc_entity(misc: str) -> str | None:
    if misc == "_":
        return None
    for part in misc.split("|"):
        if part.startswith("NER="):
            value = part[len("NER="):]
            if value in ("", "_", "O"):
                return None
            bio, _, label = value.partition("-")
            if bio not in ("B", "I") or not label:
                return None
            if label not in MEASURE_ENTITY_LABELS:
                return None
            return f"{bio}-{label}"
    return None


def _validate_tree(tokens: list[AnnotatedToken], path: Path, line: int) -> None:
    n = len(tokens)
    for pos, tok in enumerate(tokens, start=1):
        if tok.index != pos:
            raise MalformedConlluError(
                f"{path}: token indices not contiguous (saw {tok.index}, "
                f"expected {pos})",
                row=line,
            )
        if not (0 <= tok.head <= n):
            raise MalformedConlluError(
                f"{path}: head {tok.head} out of range 0..{n}", row=line
            )
    roots = [t.index for t in tokens if t.head == 0]
    if len(roots) != 1:
        raise MalformedConlluError(
            f"{path}: expected exactly one root, found {len(roots)}", row=line
        )
    # climb from every token; a tree reaches 0 in <= n steps
    for tok in tokens:
        seen = set()
        node = tok.index
        while node != 0:
            if node in seen:
                raise CyclicDependencyError(
                    f"{path}: dependency cycle through token {node}", row=line
                )
            seen.add(node)
            node = tokens[node - 1].head


def load_annotations(path: str | Path) -> dict[str, list[AnnotatedSentence]]:
    """Parse a CoNLL-U file into sentences grouped by req_id.

    Multi-sentence requirements contribute one AnnotatedSentence per block,
    kept in file order under the shared req_id. Every sentence must form a
    valid dependency tree (contiguous 1..n indices, single root, no cycles).
    """
    path = Path(path)
    result: dict[str, list[AnnotatedSentence]] = {}

    block_req_id: str | None = None
    block_tokens: list[AnnotatedToken] = []
    block_start_line = 1

    def flush(line_no: int) -> None:
        nonlocal block_req_id, block_tokens
        if not block_tokens and block_req_id is None:
            return
        if not block_tokens:
            block_req_id = None
            return
        if block_req_id is None:
            raise MissingReqIdError(
                f"{path}: sentence block lacks a '# req_id = ...' comment",
                row=block_start_line,
            )
        _validate_tree(block_tokens, path, block_start_line)
        sentence = AnnotatedSentence(
            req_id=block_req_id, tokens=tuple(block_tokens)
        )
        result.setdefault(block_req_id, []).append(sentence)
        block_req_id = None
        block_tokens = []

    with path.open("r", encoding="utf-8") as fh:
        line_no = 0
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                flush(line_no)
                block_start_line = line_no + 1
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("req_id"):
                    _, _, value = body.partition("=")
                    block_req_id = value.strip()
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise MalformedConlluError(
                    f"{path}: expected 10 columns, got {len(cols)}", row=line_no
                )
            if not cols[0].isdigit():
                raise MalformedConlluError(
                    f"{path}: non-integer token id {cols[0]!r}", row=line_no
                )
            if not cols[6].lstrip("-").isdigit():
                raise MalformedConlluError(
                    f"{path}: non-integer head {cols[6]!r}", row=line_no
                )
            index, head = int(cols[0]), int(cols[6])
            if head == index:
                raise CyclicDependencyError(
                    f"{path}: token {index} is its own head", row=line_no
                )
            block_tokens.append(
                AnnotatedToken(
                    index=index,
                    form=cols[1],
                    lemma=cols[2],
                    upos=cols[3],
                    head=head,
                    deprel=cols[7],
                    entity=_parse_misc_entity(cols[9]),
                )
            )
        flush(line_no + 1)

    return result


def annotation_coverage(
    dataset: Dataset, annotations: dict[str, list[AnnotatedSentence]]
) -> tuple[list[str], list[str]]:
    """Return (missing_ids, unknown_ids) for a dataset/annotation join.

    Unknown req_ids (annotated but absent from the dataset) warn and are
    otherwise ignored; missing ones are the caller's problem to escalate.
    """
    dataset_ids = {r.req_id for r in dataset.requirements}
    missing = sorted(
        r.req_id for r in dataset.requirements if r.req_id not in annotations
    )
    unknown = sorted(set(annotations) - dataset_ids)
    for req_id in unknown:
        warnings.warn(
            f"annotation for unknown req_id {req_id!r}", UnknownReqIdWarning,
            stacklevel=2,
        )
    return missing, unknown


def is_content_lemma(lemma: str, stopwords: frozenset[str] | set[str]) -> bool:
    """Apply the pre-processing filters to one lowercased lemma."""
    if len(lemma) < 3:
        return False
    if lemma in stopwords:
        return False
    if not any(ch.isalnum() for ch in lemma):
        return False
    return True


def preprocess(
    tokens: list[AnnotatedToken] | tuple[AnnotatedToken, ...],
    stopwords: frozenset[str] | set[str],
) -> list[str]:
    """Normalize a token sequence to its content lemmas.

    Returns lowercased lemmas in token order, dropping stopwords, lemmas
    shorter than three characters, and punctuation-only tokens.
    """
    out = []
    for tok in tokens:
        lemma = tok.lemma.lower()
        if is_content_lemma(lemma, stopwords):
            out.append(lemma)
    return out
