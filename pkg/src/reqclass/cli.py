"""Batch command-line entry point.

Two subcommands: ``experiment`` runs cross-validated strategies and
writes report files; ``inspect`` prints dataset diagnostics (class
counts, the decomposition trace, annotation coverage, HDLSS summary).

Exit codes: 0 success, 2 configuration error, 3 data error (load or
parse failure), 4 degenerate run (empty vocabulary and friends). Output
files are written to a temporary name and renamed into place, so a
failing run leaves no partial reports behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .corpus import annotation_coverage, load_annotations, load_dataset
from .errors import (
    CorpusError,
    EmptyInputError,
    EmptyVocabularyError,
    KTooLargeError,
    MissingAnnotationError,
    ReqclassError,
    TooFewProjectsError,
)
from .evaluation import (
    REPORT_SCHEMA,
    STRATEGIES,
    RunnerConfig,
    build_featuresets,
    confusion_csv,
    plan_project_fold,
    plan_stratified_kfold,
    render_report_text,
    run_cv,
)
from .hierarchy import decompose
from .roles import extract_requirement_roles, roles_to_features, debug_record
from .stopwords import STOPWORDS
from .svm import DEFAULT_GRID
from .vectorize import build_vocabulary

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DEGENERATE = 4

_DATA_ERRORS = (CorpusError, MissingAnnotationError)
_DEGENERATE_ERRORS = (
    EmptyVocabularyError,
    EmptyInputError,
    KTooLargeError,
    TooFewProjectsError,
)

_EXPERIMENT_DEFAULTS = {
    "strategy": "hc4rc",
    "folds": "ten",
    "feature_mode": "plain",
    "svm_c": 1.0,
    "tolerance": 1e-4,
    "max_epochs": 1000,
    "min_df": 1,
    "grid_search": False,
    "threads": 1,
    "include_weighted": False,
    "undersample_target": "min",
    "global_plan": False,
}


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _atomic_write(path: Path, data: str | bytes) -> None:
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reqclass",
        description=(
            "Multiclass requirements classification with semantic-role "
            "feature selection and majority/minority hierarchy."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("experiment", help="run cross-validated experiments")
    exp.add_argument("--dataset", help="requirements CSV path")
    exp.add_argument("--annotations", help="CoNLL-U annotations path")
    exp.add_argument(
        "--strategy",
        choices=STRATEGIES + ("all",),
        default=argparse.SUPPRESS,
        help="which pipeline(s) to run (default: hc4rc)",
    )
    exp.add_argument(
        "--folds",
        choices=("ten", "project"),
        default=argparse.SUPPRESS,
        help="stratified 10-fold or project-grouped folds (default: ten)",
    )
    exp.add_argument("--seed", type=int, help="required; drives all randomness")
    exp.add_argument(
        "--feature-mode",
        choices=("plain", "role-prefixed"),
        default=argparse.SUPPRESS,
    )
    exp.add_argument("--svm-c", type=float, default=argparse.SUPPRESS)
    exp.add_argument("--tolerance", type=float, default=argparse.SUPPRESS)
    exp.add_argument("--max-epochs", type=int, default=argparse.SUPPRESS)
    exp.add_argument("--min-df", type=int, default=argparse.SUPPRESS)
    exp.add_argument(
        "--grid-search",
        action="store_true",
        default=argparse.SUPPRESS,
        help="tune C by inner CV on each training fold",
    )
    exp.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    exp.add_argument(
        "--include-weighted",
        action="store_true",
        default=argparse.SUPPRESS,
        help="add support-weighted F1 to reports",
    )
    exp.add_argument(
        "--undersample-target",
        choices=("min", "median"),
        default=argparse.SUPPRESS,
        help="class count the undersample baseline cuts down to",
    )
    exp.add_argument(
        "--global-plan",
        action="store_true",
        default=argparse.SUPPRESS,
        dest="global_plan",
        help="decompose once on the full dataset instead of per training "
        "fold (leaks label counts; the provenance audit will flag it)",
    )
    exp.add_argument("--out", help="output directory (created if missing)")
    exp.add_argument(
        "--config",
        help="JSON file of defaults; command-line flags take precedence",
    )

    ins = sub.add_parser("inspect", help="print dataset diagnostics")
    ins.add_argument("--dataset", required=True)
    ins.add_argument("--annotations")
    ins.add_argument("--feature-mode", choices=("plain", "role-prefixed"),
                     default="plain")
    ins.add_argument("--min-df", type=int, default=1)
    ins.add_argument(
        "--dump-roles",
        help="write one JSON line per requirement (roles and features)",
    )
    return parser


def _resolve_experiment_options(args: argparse.Namespace) -> dict:
    """Defaults, then config-file values, then explicit flags."""
    options = dict(_EXPERIMENT_DEFAULTS)
    options.update({"dataset": None, "annotations": None, "seed": None, "out": None})
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(options)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        options.update(loaded)
    for key in options:
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    return options


def cmd_experiment(args: argparse.Namespace) -> int:
    try:
        options = _resolve_experiment_options(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return _fail(str(exc), EXIT_CONFIG)

    for required in ("dataset", "annotations", "out"):
        if not options[required]:
            return _fail(f"--{required} is required", EXIT_CONFIG)
    if options["seed"] is None:
        return _fail("--seed is required (no wall-clock default)", EXIT_CONFIG)
    dataset_path = Path(options["dataset"])
    annotations_path = Path(options["annotations"])
    for path in (dataset_path, annotations_path):
        if not path.exists():
            return _fail(f"no such file: {path}", EXIT_CONFIG)

    config = RunnerConfig(
        seed=int(options["seed"]),
        feature_mode=options["feature_mode"],
        min_df=int(options["min_df"]),
        svm_c=float(options["svm_c"]),
        tolerance=float(options["tolerance"]),
        max_epochs=int(options["max_epochs"]),
        grid_search=bool(options["grid_search"]),
        param_grid=DEFAULT_GRID,
        threads=int(options["threads"]),
        include_weighted=bool(options["include_weighted"]),
        undersample_target=options["undersample_target"],
        global_decomposition=bool(options["global_plan"]),
    )
    strategies = (
        list(STRATEGIES) if options["strategy"] == "all" else [options["strategy"]]
    )

    try:
        dataset = load_dataset(dataset_path)
        annotations = load_annotations(annotations_path)
    except _DATA_ERRORS as exc:
        return _fail(str(exc), EXIT_DATA)

    try:
        items_label = [(r.req_id, r.label) for r in dataset.requirements]
        items_project = [(r.req_id, r.project_id) for r in dataset.requirements]
        if options["folds"] == "ten":
            plan = plan_stratified_kfold(items_label, k=10, seed=config.seed)
        else:
            plan = plan_project_fold(items_project, k=10, seed=config.seed)
        reports = [
            run_cv(dataset, annotations, strategy, plan, config)
            for strategy in strategies
        ]
    except MissingAnnotationError as exc:
        return _fail(str(exc), EXIT_DATA)
    except _DEGENERATE_ERRORS as exc:
        return _fail(str(exc), EXIT_DEGENERATE)

    out_dir = Path(options["out"])
    out_dir.mkdir(parents=True, exist_ok=True)

    report_doc = {
        "schema": REPORT_SCHEMA,
        "run": {
            "dataset": str(options["dataset"]),
            "annotations": str(options["annotations"]),
            "folds": options["folds"],
            "seed": config.seed,
            "strategies": strategies,
            "config": config.to_json_dict(),
            "n": dataset.sample_size_n,
            "projects": len(dataset.project_set),
            "labels": list(dataset.label_set),
        },
        "reports": {rep.strategy: rep.to_json_dict() for rep in reports},
    }
    _atomic_write(
        out_dir / "report.json",
        json.dumps(report_doc, sort_keys=True, indent=2) + "\n",
    )

    text = [
        f"dataset: {options['dataset']} "
        f"(n={dataset.sample_size_n}, projects={len(dataset.project_set)}, "
        f"classes={len(dataset.label_set)})",
        f"folds: {options['folds']}  seed: {config.seed}",
        "",
        render_report_text(reports),
    ]
    _atomic_write(out_dir / "report.txt", "\n".join(text))

    for rep in reports:
        safe = rep.strategy.replace("+", "_")
        for fold_result in rep.folds:
            _atomic_write(
                out_dir / f"confusion_{safe}_{fold_result.index}.csv",
                confusion_csv(fold_result.confusion),
            )
        _atomic_write(
            out_dir / f"confusion_{safe}_pooled.csv", confusion_csv(rep.pooled)
        )
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    try:
        dataset = load_dataset(args.dataset)
    except _DATA_ERRORS as exc:
        return _fail(str(exc), EXIT_DATA)

    counts = dataset.class_counts()
    print(
        f"dataset: {args.dataset} (n={dataset.sample_size_n}, "
        f"projects={len(dataset.project_set)}, classes={len(dataset.label_set)})"
    )
    print("class counts:")
    for label, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        print(f"  {label:<6} {count}")

    plan = decompose(counts)
    half = plan.total / 2.0
    print(f"decomposition trace (half of total = {half}):")
    cumulative = 0
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    for label, count in ranked:
        if label in plan.maj_classes:
            cumulative += count
            mark = "<- cut" if cumulative >= half else ""
            print(f"  {label:<6} {count:>6}  cumulative {cumulative:>6}  {mark}")
    maj = ", ".join(plan.maj_classes)
    if plan.min_classes:
        print(
            f"maj = {{{maj}}} ({plan.maj_count}), "
            f"min = {len(plan.min_classes)} classes ({plan.min_count})"
        )
    else:
        print(f"maj = {{{maj}}} ({plan.maj_count}), min = ∅ (0)")
        print("warning: minority subset is empty; hierarchy degenerates")

    if not args.annotations:
        return EXIT_OK
    try:
        annotations = load_annotations(args.annotations)
    except _DATA_ERRORS as exc:
        return _fail(str(exc), EXIT_DATA)

    import warnings as _warnings

    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")
        missing, unknown = annotation_coverage(dataset, annotations)
    covered = dataset.sample_size_n - len(missing)
    print(
        f"annotation coverage: {covered}/{dataset.sample_size_n} requirements"
    )
    if missing:
        print("missing annotations for:")
        for req_id in missing:
            print(f"  {req_id}")
    if unknown:
        print(f"annotations for unknown req_ids: {', '.join(unknown)}")

    if missing:
        return EXIT_OK

    featuresets = build_featuresets(dataset, annotations, args.feature_mode)
    try:
        vocab = build_vocabulary(list(featuresets.values()), min_df=args.min_df)
    except EmptyVocabularyError as exc:
        return _fail(str(exc), EXIT_DEGENERATE)
    n, d = dataset.sample_size_n, vocab.dimension
    rel = "<<" if n < d else ">="
    print(f"HDLSS summary: n={n}, post-selection d={d} (n {rel} d)")

    if args.dump_roles:
        lines = []
        for req in dataset.requirements:
            sentences = annotations[req.req_id]
            assignment = extract_requirement_roles(sentences)
            fs = roles_to_features(
                assignment, sentences, args.feature_mode, STOPWORDS
            )
            lines.append(debug_record(assignment, sentences, fs))
        _atomic_write(Path(args.dump_roles), "\n".join(lines) + "\n")
        print(f"wrote role dump: {args.dump_roles}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "experiment":
            return cmd_experiment(args)
        if args.command == "inspect":
            return cmd_inspect(args)
    except _DATA_ERRORS as exc:
        return _fail(str(exc), EXIT_DATA)
    except _DEGENERATE_ERRORS as exc:
        return _fail(str(exc), EXIT_DEGENERATE)
    except ReqclassError as exc:
        return _fail(str(exc), EXIT_DATA)
    return _fail(f"unknown command {args.command!r}", EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())
