#!/usr/bin/env python3
"""Generate the checked-in fixture corpus (CSV + CoNLL-U).

The corpus is a miniature, deterministic stand-in for a real requirements
dataset: 12 imbalanced classes, shared subjects, class-distinctive verbs
and objects, a few two-sentence requirements, and the four golden example
sentences under projects G1/G2. Both files are committed; rerun this
script only when changing the corpus on purpose (tests pin its shape).
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

Token = tuple[str, str, str, int, str, str]  # form, lemma, upos, head, deprel, ner


def tok(form, lemma, upos, head, deprel, ner="_") -> Token:
    return (form, lemma, upos, head, deprel, ner)


def sentence_text(tokens: list[Token]) -> str:
    parts: list[str] = []
    for form, _, upos, _, _, _ in tokens:
        if parts and (upos == "PUNCT" or form == "%"):
            parts[-1] += form
        else:
            parts.append(form)
    return " ".join(parts)


def t_svo(subj: str, verb: str, obj: str) -> list[Token]:
    return [
        tok("The", "the", "DET", 2, "det"),
        tok(subj, subj, "NOUN", 4, "nsubj"),
        tok("shall", "shall", "AUX", 4, "aux"),
        tok(verb, verb, "VERB", 0, "root"),
        tok("the", "the", "DET", 6, "det"),
        tok(obj, obj, "NOUN", 4, "obj"),
        tok(".", ".", "PUNCT", 4, "punct"),
    ]


def t_svo_goal(subj: str, verb: str, obj: str, goal: str) -> list[Token]:
    return [
        tok("The", "the", "DET", 2, "det"),
        tok(subj, subj, "NOUN", 4, "nsubj"),
        tok("shall", "shall", "AUX", 4, "aux"),
        tok(verb, verb, "VERB", 0, "root"),
        tok("the", "the", "DET", 6, "det"),
        tok(obj, obj, "NOUN", 4, "obj"),
        tok("to", "to", "ADP", 9, "case"),
        tok("the", "the", "DET", 9, "det"),
        tok(goal, goal, "NOUN", 4, "obl"),
        tok(".", ".", "PUNCT", 4, "punct"),
    ]


def t_svo_measure(subj: str, verb: str, obj: str, num: str, unit: str) -> list[Token]:
    return [
        tok("The", "the", "DET", 2, "det"),
        tok(subj, subj, "NOUN", 4, "nsubj"),
        tok("shall", "shall", "AUX", 4, "aux"),
        tok(verb, verb, "VERB", 0, "root"),
        tok("the", "the", "DET", 6, "det"),
        tok(obj, obj, "NOUN", 4, "obj"),
        tok("within", "within", "ADP", 9, "case"),
        tok(num, num, "NUM", 9, "nummod", "NER=B-CARDINAL"),
        tok(unit + "s", unit, "NOUN", 4, "obl"),
        tok(".", ".", "PUNCT", 4, "punct"),
    ]


def t_adj_inf(subj: str, adj: str, verb: str) -> list[Token]:
    return [
        tok("The", "the", "DET", 2, "det"),
        tok(subj, subj, "NOUN", 5, "nsubj"),
        tok("should", "should", "AUX", 5, "aux"),
        tok("be", "be", "AUX", 5, "cop"),
        tok(adj, adj, "ADJ", 0, "root"),
        tok("to", "to", "PART", 7, "mark"),
        tok(verb, verb, "VERB", 5, "xcomp"),
        tok(".", ".", "PUNCT", 5, "punct"),
    ]


def t_percent(subj: str, num: str) -> list[Token]:
    return [
        tok("The", "the", "DET", 2, "det"),
        tok(subj, subj, "NOUN", 5, "nsubj"),
        tok("must", "must", "AUX", 5, "aux"),
        tok("be", "be", "AUX", 5, "cop"),
        tok("available", "available", "ADJ", 0, "root"),
        tok(num, num, "NUM", 7, "nummod", "NER=B-PERCENT"),
        tok("%", "%", "SYM", 5, "obl", "NER=I-PERCENT"),
        tok("of", "of", "ADP", 10, "case"),
        tok("the", "the", "DET", 10, "det"),
        tok("time", "time", "NOUN", 7, "nmod"),
        tok(".", ".", "PUNCT", 5, "punct"),
    ]


def t_comply(subj: str, obj: str) -> list[Token]:
    return [
        tok("The", "the", "DET", 2, "det"),
        tok(subj, subj, "NOUN", 4, "nsubj"),
        tok("shall", "shall", "AUX", 4, "aux"),
        tok("comply", "comply", "VERB", 0, "root"),
        tok("with", "with", "ADP", 7, "case"),
        tok("the", "the", "DET", 7, "det"),
        tok(obj, obj, "NOUN", 4, "obl"),
        tok(".", ".", "PUNCT", 4, "punct"),
    ]


SUBJECTS = ["system", "application", "service"]

CLASS_RECIPES: dict[str, dict] = {
    "F": {
        "count": 33,
        "verbs": ["send", "create", "update", "delete", "generate", "process",
                  "store", "submit", "restore", "display"],
        "objects": ["report", "record", "invoice", "order", "notification",
                    "profile", "request", "receipt", "session", "backup"],
        "goals": ["user", "customer", "administrator", "manager"],
    },
    "SE": {
        "count": 13,
        "verbs": ["encrypt", "authenticate", "authorize", "audit", "protect"],
        "objects": ["password", "credential", "session", "certificate", "token"],
    },
    "US": {
        "count": 9,
        "adjs": ["easy", "simple", "intuitive"],
        "infs": ["use", "navigate", "learn"],
        "verbs": ["display", "guide"],
        "objects": ["tutorial", "menu", "walkthrough"],
    },
    "O": {
        "count": 8,
        "verbs": ["deploy", "operate", "integrate", "monitor"],
        "objects": ["server", "platform", "environment", "backup"],
    },
    "PE": {
        "count": 7,
        "verbs": ["execute", "complete"],
        "objects": ["query", "transaction", "search"],
        "nums": ["200", "500", "950"],
        "units": ["millisecond", "second"],
    },
    "LF": {
        "count": 6,
        "verbs": ["render", "style"],
        "objects": ["layout", "theme", "font", "banner"],
    },
    "A": {
        "count": 6,
        "nums": ["95", "98", "99"],
    },
    "MN": {
        "count": 5,
        "verbs": ["maintain", "upgrade", "patch", "update"],
        "objects": ["module", "component", "log"],
    },
    "SC": {
        "count": 4,
        "verbs": ["scale", "handle", "process"],
        "objects": ["workload", "volume", "traffic"],
    },
    "FT": {
        "count": 3,
        "verbs": ["recover", "restore", "tolerate"],
        "objects": ["failure", "crash", "fault"],
    },
    "L": {
        "count": 3,
        "objects": ["regulation", "policy", "license"],
    },
    "PO": {
        "count": 3,
        "verbs": ["port", "migrate"],
        "objects": ["browser", "device", "platform"],
    },
}

GOLDEN_ROWS = [
    ("G1", "F", None),   # parses injected verbatim below
    ("G1", "US", None),
    ("G2", "A", None),
    ("G2", "F", None),
]


def golden_parses() -> list[list[list[Token]]]:
    send_sentence = [
        tok("The", "the", "DET", 2, "det"),
        tok("system", "system", "NOUN", 4, "nsubj"),
        tok("shall", "shall", "AUX", 4, "aux"),
        tok("send", "send", "VERB", 0, "root"),
        tok("a", "a", "DET", 7, "det"),
        tok("verification", "verification", "NOUN", 7, "compound"),
        tok("email", "email", "NOUN", 4, "obj"),
        tok("to", "to", "ADP", 10, "case"),
        tok("the", "the", "DET", 10, "det"),
        tok("user", "user", "NOUN", 4, "obl"),
        tok("when", "when", "SCONJ", 13, "mark"),
        tok("they", "they", "PRON", 13, "nsubj"),
        tok("log", "log", "VERB", 4, "advcl"),
        tok("on", "on", "ADP", 13, "compound:prt"),
        tok("to", "to", "ADP", 17, "case"),
        tok("their", "their", "PRON", 17, "nmod:poss"),
        tok("account", "account", "NOUN", 13, "obl"),
        tok("from", "from", "ADP", 21, "case"),
        tok("an", "a", "DET", 21, "det"),
        tok("unfamiliar", "unfamiliar", "ADJ", 21, "amod"),
        tok("computer", "computer", "NOUN", 13, "obl"),
        tok(".", ".", "PUNCT", 4, "punct"),
    ]
    message_sentence = [
        t if i not in (6, 9) else
        (tok("message", "message", "NOUN", 4, "obj") if i == 6
         else tok("users", "user", "NOUN", 4, "obl"))
        for i, t in enumerate(send_sentence)
    ]
    easy_sentence = t_adj_inf("system", "easy", "use")
    percent_sentence = [
        tok("The", "the", "DET", 2, "det"),
        tok("system", "system", "NOUN", 5, "nsubj"),
        tok("must", "must", "AUX", 5, "aux"),
        tok("be", "be", "AUX", 5, "cop"),
        tok("available", "available", "ADJ", 0, "root"),
        tok("to", "to", "ADP", 8, "case"),
        tok("the", "the", "DET", 8, "det"),
        tok("users", "user", "NOUN", 5, "obl"),
        tok("98", "98", "NUM", 10, "nummod", "NER=B-PERCENT"),
        tok("%", "%", "SYM", 5, "obl", "NER=I-PERCENT"),
        tok("of", "of", "ADP", 13, "case"),
        tok("the", "the", "DET", 13, "det"),
        tok("time", "time", "NOUN", 10, "nmod"),
        tok("every", "every", "DET", 15, "det"),
        tok("month", "month", "NOUN", 5, "obl:tmod"),
        tok("during", "during", "ADP", 18, "case"),
        tok("business", "business", "NOUN", 18, "compound"),
        tok("hours", "hour", "NOUN", 5, "obl"),
        tok(".", ".", "PUNCT", 5, "punct"),
    ]
    return [[send_sentence], [easy_sentence], [percent_sentence], [message_sentence]]


def pick(rng: np.random.Generator, pool: list[str]) -> str:
    return pool[int(rng.integers(0, len(pool)))]


def build_requirement(
    label: str, rng: np.random.Generator, two_sentence: bool
) -> list[list[Token]]:
    recipe = CLASS_RECIPES[label]
    subj = pick(rng, SUBJECTS)
    if label == "A":
        return [t_percent(subj, pick(rng, recipe["nums"]))]
    if label == "L":
        return [t_comply(subj, pick(rng, recipe["objects"]))]
    if label == "US" and rng.integers(0, 2) == 0:
        return [t_adj_inf("interface", pick(rng, recipe["adjs"]),
                          pick(rng, recipe["infs"]))]
    if label == "PE":
        return [t_svo_measure(subj, pick(rng, recipe["verbs"]),
                              pick(rng, recipe["objects"]),
                              pick(rng, recipe["nums"]),
                              pick(rng, recipe["units"]))]
    verb = pick(rng, recipe["verbs"])
    obj = pick(rng, recipe["objects"])
    if label == "F" and rng.integers(0, 3) == 0:
        first = t_svo_goal(subj, verb, obj, pick(rng, recipe["goals"]))
    else:
        first = t_svo(subj, verb, obj)
    if two_sentence:
        verb2 = pick(rng, recipe["verbs"])
        obj2 = pick(rng, recipe["objects"])
        second = [
            tok("The", "the", "DET", 2, "det"),
            tok(subj, subj, "NOUN", 5, "nsubj"),
            tok("shall", "shall", "AUX", 5, "aux"),
            tok("also", "also", "ADV", 5, "advmod"),
            tok(verb2, verb2, "VERB", 0, "root"),
            tok("the", "the", "DET", 7, "det"),
            tok(obj2, obj2, "NOUN", 5, "obj"),
            tok(".", ".", "PUNCT", 5, "punct"),
        ]
        return [first, second]
    return [first]


def main() -> None:
    rng = np.random.default_rng(20240811)
    rows: list[tuple[str, str, list[list[Token]]]] = []  # (project, label, parses)

    for project, label, _ in GOLDEN_ROWS:
        rows.append((project, label, None))

    body: list[tuple[str, list[list[Token]]]] = []
    for label, recipe in CLASS_RECIPES.items():
        for i in range(recipe["count"]):
            two_sentence = label == "F" and i in (0, 1, 2)
            body.append((label, build_requirement(label, rng, two_sentence)))
    order = rng.permutation(len(body))
    for slot, i in enumerate(order):
        label, parses = body[int(i)]
        project = f"P{1 + (slot % 14):02d}"
        rows.append((project, label, parses))

    goldens = golden_parses()
    golden_iter = iter(goldens)
    csv_rows: list[tuple[str, str, str]] = []
    conllu_blocks: list[str] = []
    ordinal = 0
    for project, label, parses in rows:
        ordinal += 1
        if parses is None:
            parses = next(golden_iter)
        req_id = f"{project}-{ordinal}"
        text = " ".join(sentence_text(p) for p in parses)
        csv_rows.append((project, text, label))
        for parse in parses:
            lines = [f"# req_id = {req_id}", f"# text = {sentence_text(parse)}"]
            for idx, (form, lemma, upos, head, deprel, ner) in enumerate(parse, 1):
                lines.append(
                    f"{idx}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{deprel}\t_\t{ner}"
                )
            conllu_blocks.append("\n".join(lines))

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    with (OUT_DIR / "fixture_corpus.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ProjectID", "RequirementText", "Class"])
        writer.writerows(csv_rows)
    (OUT_DIR / "fixture_corpus.conllu").write_text(
        "\n\n".join(conllu_blocks) + "\n", encoding="utf-8"
    )
    total = len(csv_rows)
    print(f"wrote {total} requirements, {len(conllu_blocks)} sentence blocks")


if __name__ == "__main__":
    main()
