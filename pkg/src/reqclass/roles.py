"""Rule-based mapping from dependency parses to the six semantic roles.

Each requirement sentence is scanned with six rules, applied in a fixed
precedence order (Measure, Agent, Action, Theme, Goal, Manner); the first
rule to claim a token wins, so no token ever carries two roles. The
lemmas of role-bearing tokens, filtered like any other corpus text,
become the requirement's classifier features.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .corpus import (
    MEASURE_ENTITY_LABELS,
    AnnotatedSentence,
    is_content_lemma,
)
from .errors import IndexOutOfRangeError


class SemanticRole(Enum):
    AGENT = "agent"
    ACTION = "action"
    THEME = "theme"
    GOAL = "goal"
    MANNER = "manner"
    MEASURE = "measure"


@dataclass(frozen=True)
class RoleConfig:
    """Lexical knobs of the role rules.

    The manner preposition list is open-ended in principle; it ships with
    the canonical examples. Dative prepositions mark the Goal rule and are
    deliberately excluded from the manner list.
    """

    dative_prepositions: tuple[str, ...] = ("to", "for")
    manner_prepositions: tuple[str, ...] = ("from", "with", "without", "after")
    measure_entities: frozenset[str] = MEASURE_ENTITY_LABELS
    clausal_deprels: tuple[str, ...] = ("xcomp", "advcl", "ccomp", "acl")


DEFAULT_ROLE_CONFIG = RoleConfig()


@dataclass(frozen=True)
class RoleAssignment:
    """Role-bearing tokens of one requirement.

    ``assignments`` holds (token_index, sentence_index, role) triples,
    sorted by sentence then token position. Token indices are the 1-based
    CoNLL-U indices local to their sentence.
    """

    req_id: str
    assignments: tuple[tuple[int, int, SemanticRole], ...]

    def roles_by_token(self) -> dict[tuple[int, int], SemanticRole]:
        return {(s, t): role for t, s, role in self.assignments}


@dataclass(frozen=True)
class FeatureSet:
    req_id: str
    features: Counter

    def total(self) -> int:
        return sum(self.features.values())


def _base(deprel: str) -> str:
    return deprel.split(":", 1)[0]


def _is_verb(sentence: AnnotatedSentence, index: int) -> bool:
    return index != 0 and sentence.token(index).upos == "VERB"


def _case_lemmas(sentence: AnnotatedSentence, index: int) -> list[str]:
    """Lowercased lemmas of case/mark children of a token."""
    out = []
    for child in sentence.children(index):
        tok = sentence.token(child)
        if _base(tok.deprel) in ("case", "mark"):
            out.append(tok.lemma.lower())
    return out


def extract_roles(
    sentence: AnnotatedSentence,
    sentence_index: int = 0,
    config: RoleConfig = DEFAULT_ROLE_CONFIG,
) -> RoleAssignment:
    """Assign semantic roles to the tokens of one annotated sentence.

    Rules fire in precedence order Measure, Agent, Action, Theme, Goal,
    Manner; a token keeps the first role it receives. Sentences matching
    no rule yield an empty assignment.
    """
    roles: dict[int, SemanticRole] = {}

    def claim(index: int, role: SemanticRole) -> None:
        roles.setdefault(index, role)

    # Measure: entity tokens with their subtrees, then adverbs hanging off
    # an already-claimed measure token (degree modifiers of quantities).
    for tok in sentence.tokens:
        label = tok.entity_label()
        if label is not None and label in config.measure_entities:
            for index in sentence.subtree(tok.index):
                claim(index, SemanticRole.MEASURE)
    changed = True
    while changed:
        changed = False
        for tok in sentence.tokens:
            if tok.index in roles or tok.upos != "ADV":
                continue
            if tok.head != 0 and roles.get(tok.head) is SemanticRole.MEASURE:
                claim(tok.index, SemanticRole.MEASURE)
                changed = True

    # Agent: subject of a verb.
    for tok in sentence.tokens:
        if _base(tok.deprel) == "nsubj" or tok.deprel == "nsubjpass":
            if _is_verb(sentence, tok.head):
                claim(tok.index, SemanticRole.AGENT)

    # Action: a verb that is the root or depends on another verb.
    for tok in sentence.tokens:
        if tok.upos == "VERB" and (tok.head == 0 or _is_verb(sentence, tok.head)):
            claim(tok.index, SemanticRole.ACTION)

    # Theme: direct object of a verb.
    for tok in sentence.tokens:
        if _base(tok.deprel) in ("obj", "dobj") and _is_verb(sentence, tok.head):
            claim(tok.index, SemanticRole.THEME)

    # Goal: indirect object, or an oblique/prepositional object governed by
    # a dative preposition (either as its head, or as a case marker child).
    for tok in sentence.tokens:
        deprel = _base(tok.deprel)
        if deprel == "iobj":
            claim(tok.index, SemanticRole.GOAL)
            continue
        if deprel in ("pobj", "obl"):
            if tok.deprel == "pobj" and tok.head != 0:
                head = sentence.token(tok.head)
                if (
                    head.upos == "ADP"
                    and head.lemma.lower() in config.dative_prepositions
                ):
                    claim(tok.index, SemanticRole.GOAL)
                    continue
            if any(
                lemma in config.dative_prepositions
                for lemma in _case_lemmas(sentence, tok.index)
            ):
                claim(tok.index, SemanticRole.GOAL)

    # Manner, clause 1: adjectives, adverbs and determiners, together with
    # their immediate head word. An adjective's phrase extends over its
    # clausal complements ("easy to use" is one manner phrase, not a bare
    # adjective), so those subtrees come along.
    for tok in sentence.tokens:
        if tok.upos not in ("ADJ", "ADV", "DET"):
            continue
        claim(tok.index, SemanticRole.MANNER)
        if tok.head != 0:
            claim(tok.head, SemanticRole.MANNER)
        if tok.upos == "ADJ":
            for child in sentence.children(tok.index):
                if _base(sentence.token(child).deprel) in config.clausal_deprels:
                    for index in sentence.subtree(child):
                        claim(index, SemanticRole.MANNER)

    # Manner, clause 2: listed prepositions with all their dependents. A
    # preposition attached as a case/mark leaf stands for its head's whole
    # phrase, so the sweep covers that subtree instead.
    for tok in sentence.tokens:
        if tok.upos not in ("ADP", "SCONJ"):
            continue
        if tok.lemma.lower() not in config.manner_prepositions:
            continue
        if _base(tok.deprel) in ("case", "mark") and tok.head != 0:
            span = sentence.subtree(tok.head)
        else:
            span = sentence.subtree(tok.index)
        for index in span:
            claim(index, SemanticRole.MANNER)

    assignments = tuple(
        (index, sentence_index, roles[index]) for index in sorted(roles)
    )
    return RoleAssignment(req_id=sentence.req_id, assignments=assignments)


def extract_requirement_roles(
    sentences: list[AnnotatedSentence],
    config: RoleConfig = DEFAULT_ROLE_CONFIG,
) -> RoleAssignment:
    """Union of per-sentence role assignments for one requirement."""
    merged: list[tuple[int, int, SemanticRole]] = []
    req_id = sentences[0].req_id if sentences else ""
    for sentence_index, sentence in enumerate(sentences):
        part = extract_roles(sentence, sentence_index, config)
        merged.extend(part.assignments)
    merged.sort(key=lambda a: (a[1], a[0]))
    return RoleAssignment(req_id=req_id, assignments=tuple(merged))


def roles_to_features(
    assignment: RoleAssignment,
    sentences: list[AnnotatedSentence],
    mode: str,
    stopwords: frozenset[str] | set[str],
) -> FeatureSet:
    """Turn assigned tokens into a feature multiset.

    Feature terms are the lowercased lemmas of role-bearing tokens that
    survive the corpus pre-processing filters; ``role-prefixed`` mode tags
    each term with its role. Multiplicity is preserved.
    """
    if mode not in ("plain", "role-prefixed"):
        raise ValueError(f"unknown feature mode {mode!r}")
    features: Counter = Counter()
    for token_index, sentence_index, role in assignment.assignments:
        if sentence_index >= len(sentences):
            raise IndexOutOfRangeError(
                f"{assignment.req_id}: sentence {sentence_index} out of range"
            )
        sentence = sentences[sentence_index]
        if not (1 <= token_index <= len(sentence)):
            raise IndexOutOfRangeError(
                f"{assignment.req_id}: token {token_index} out of range in "
                f"sentence {sentence_index}"
            )
        lemma = sentence.token(token_index).lemma.lower()
        if not is_content_lemma(lemma, stopwords):
            continue
        term = lemma if mode == "plain" else f"{role.value}:{lemma}"
        features[term] += 1
    return FeatureSet(req_id=assignment.req_id, features=features)


def debug_record(
    assignment: RoleAssignment,
    sentences: list[AnnotatedSentence],
    featureset: FeatureSet,
) -> str:
    """One JSON line describing a requirement's roles and features."""
    roles = [
        {
            "sentence": s,
            "token": t,
            "form": sentences[s].token(t).form,
            "role": role.value,
        }
        for t, s, role in assignment.assignments
    ]
    payload = {
        "req_id": assignment.req_id,
        "roles": roles,
        "features": dict(sorted(featureset.features.items())),
    }
    return json.dumps(payload, sort_keys=True)
