from __future__ import annotations

import json
import warnings

import numpy as np
import pytest

from conftest import synthetic_corpus
from oracles import oracle_confusion, oracle_macro, oracle_micro, oracle_per_class
from reqclass.corpus import load_annotations, load_dataset
from reqclass.errors import (
    EmptyMatrixError,
    KTooLargeError,
    LengthMismatchError,
    MissingAnnotationError,
    TooFewProjectsError,
    UnknownLabelError,
)
from reqclass.evaluation import (
    STRATEGIES,
    RunnerConfig,
    confusion_matrix,
    macro_metrics,
    micro_metrics,
    per_class_prf,
    plan_project_fold,
    plan_stratified_kfold,
    project_counts_per_fold,
    run_cv,
    weighted_f1,
)

# -- confusion matrix -----------------------------------------------------------


def test_perfect_predictions_diagonal():
    cm = confusion_matrix(["A", "B", "A"], ["A", "B", "A"], ("A", "B"))
    assert cm.counts.tolist() == [[2, 0], [0, 1]]


def test_hand_counted_matrix():
    cm = confusion_matrix(["A", "A", "B"], ["A", "B", "B"], ("A", "B"))
    assert cm.counts.tolist() == [[1, 1], [0, 1]]


def test_empty_inputs_zero_matrix():
    cm = confusion_matrix([], [], ("A", "B"))
    assert cm.counts.tolist() == [[0, 0], [0, 0]]
    assert cm.grand_total == 0


def test_length_mismatch():
    with pytest.raises(LengthMismatchError):
        confusion_matrix(["A"], ["A", "B"], ("A", "B"))


def test_unknown_label():
    with pytest.raises(UnknownLabelError):
        confusion_matrix(["A"], ["Z"], ("A", "B"))


# -- per-class and aggregate metrics ----------------------------------------------


def test_diagonal_gives_perfect_metrics():
    cm = confusion_matrix(["A", "B"], ["A", "B"], ("A", "B"))
    pcm = per_class_prf(cm)
    assert all(v == 1.0 for v in pcm.precision.values())
    assert all(v == 1.0 for v in pcm.recall.values())
    mac = macro_metrics(pcm)
    assert (mac.precision, mac.recall, mac.f1) == (1.0, 1.0, 1.0)


def test_hand_arithmetic_metrics():
    cm = confusion_matrix(["A", "A", "B"], ["A", "B", "B"], ("A", "B"))
    pcm = per_class_prf(cm)
    assert pcm.precision["A"] == pytest.approx(1.0)
    assert pcm.recall["A"] == pytest.approx(0.5)
    assert pcm.f1["A"] == pytest.approx(2 / 3, abs=1e-4)
    assert pcm.precision["B"] == pytest.approx(0.5)
    assert pcm.recall["B"] == pytest.approx(1.0)
    assert pcm.f1["B"] == pytest.approx(2 / 3, abs=1e-4)


def test_absent_class_zero_convention():
    cm = confusion_matrix(["A", "A"], ["A", "A"], ("A", "GHOST"))
    pcm = per_class_prf(cm)
    assert pcm.precision["GHOST"] == 0.0
    assert pcm.recall["GHOST"] == 0.0
    assert pcm.f1["GHOST"] == 0.0


def test_macro_hand_example():
    pcm = per_class_prf(confusion_matrix([], [], ("a", "b", "c")))
    pcm = type(pcm)(
        labels=("a", "b", "c"),
        precision={"a": 1.0, "b": 0.5, "c": 0.0},
        recall={"a": 1.0, "b": 1.0, "c": 0.0},
        f1={"a": 1.0, "b": 2 / 3, "c": 0.0},
    )
    mac = macro_metrics(pcm)
    assert mac.precision == pytest.approx(0.5)
    assert mac.recall == pytest.approx(2 / 3, abs=1e-4)
    assert mac.f1 == pytest.approx(0.5714, abs=1e-4)


def test_harmonic_vs_mean_disagree():
    # the published aggregate row (P=0.61, R=0.48) yields 0.537 under the
    # harmonic definition, not the printed 0.51; both figures are reported
    p, r = 0.61, 0.48
    assert 2 * p * r / (p + r) == pytest.approx(0.5375, abs=1e-3)


def test_micro_is_accuracy():
    cm = confusion_matrix(
        ["A"] * 8 + ["B"] * 2, ["A"] * 8 + ["A"] * 2, ("A", "B")
    )
    assert micro_metrics(cm) == pytest.approx(0.8)


def test_micro_zero_diagonal():
    cm = confusion_matrix(["A", "B"], ["B", "A"], ("A", "B"))
    assert micro_metrics(cm) == 0.0


def test_micro_empty_matrix():
    with pytest.raises(EmptyMatrixError):
        micro_metrics(confusion_matrix([], [], ("A",)))


def test_weighted_f1_weights_by_support():
    cm = confusion_matrix(
        ["A"] * 9 + ["B"], ["A"] * 9 + ["A"], ("A", "B")
    )
    pcm = per_class_prf(cm)
    expected = (pcm.f1["A"] * 9 + pcm.f1["B"] * 1) / 10
    assert weighted_f1(cm) == pytest.approx(expected)


def test_metrics_match_brute_force_oracle():
    rng = np.random.default_rng(29)
    alphabet = [chr(ord("A") + i) for i in range(12)]
    for _ in range(200):
        k = int(rng.integers(1, 13))
        n = int(rng.integers(1, 60))
        labels = tuple(alphabet[:k])
        y_true = [labels[i] for i in rng.integers(0, k, size=n)]
        y_pred = [labels[i] for i in rng.integers(0, k, size=n)]
        cm = confusion_matrix(y_true, y_pred, labels)
        assert cm.counts.tolist() == oracle_confusion(y_true, y_pred, labels)
        pcm = per_class_prf(cm)
        expected = oracle_per_class(y_true, y_pred, labels)
        for lab in labels:
            assert pcm.precision[lab] == pytest.approx(expected[lab][0], abs=1e-9)
            assert pcm.recall[lab] == pytest.approx(expected[lab][1], abs=1e-9)
            assert pcm.f1[lab] == pytest.approx(expected[lab][2], abs=1e-9)
        mac = macro_metrics(pcm)
        mp, mr, mf, fmean = oracle_macro(y_true, y_pred, labels)
        assert mac.precision == pytest.approx(mp, abs=1e-9)
        assert mac.recall == pytest.approx(mr, abs=1e-9)
        assert mac.f1 == pytest.approx(mf, abs=1e-9)
        assert mac.f1_mean_per_class == pytest.approx(fmean, abs=1e-9)
        assert micro_metrics(cm) == pytest.approx(
            oracle_micro(y_true, y_pred), abs=1e-9
        )


# -- fold planning -----------------------------------------------------------------


def test_stratified_even_classes():
    items = [(f"r{i}", "A" if i < 10 else "B") for i in range(20)]
    plan = plan_stratified_kfold(items, k=10, seed=0)
    for fold in range(10):
        fold_labels = [lab for (rid, lab) in items if plan.assignments[rid] == fold]
        assert sorted(fold_labels) == ["A", "B"]


def test_stratified_k_equals_one():
    items = [(f"r{i}", "A") for i in range(5)]
    plan = plan_stratified_kfold(items, k=1, seed=0)
    assert set(plan.assignments.values()) == {0}


def test_stratified_small_class_spread():
    items = [(f"a{i}", "A") for i in range(30)] + [(f"b{i}", "B") for i in range(3)]
    plan = plan_stratified_kfold(items, k=10, seed=1)
    b_folds = [plan.assignments[f"b{i}"] for i in range(3)]
    assert len(set(b_folds)) == 3  # once each in exactly three folds


def test_stratified_k_too_large():
    with pytest.raises(KTooLargeError):
        plan_stratified_kfold([("r1", "A")], k=2, seed=0)


def test_stratified_bound_random_vectors():
    rng = np.random.default_rng(37)
    for _ in range(100):
        n = int(rng.integers(10, 120))
        k = 10
        labels = [f"c{i}" for i in range(int(rng.integers(1, 13)))]
        items = [(f"r{i}", labels[int(rng.integers(0, len(labels)))])
                 for i in range(n)]
        plan = plan_stratified_kfold(items, k=k, seed=int(rng.integers(0, 1000)))
        assert sorted(plan.assignments) == sorted(rid for rid, _ in items)
        per_class = {}
        for rid, lab in items:
            per_class.setdefault(lab, []).append(plan.assignments[rid])
        for lab, folds in per_class.items():
            n_k = len(folds)
            for fold in range(k):
                count = folds.count(fold)
                assert abs(count - n_k / k) <= 1


def test_project_plan_ten_equal_projects():
    items = [
        (f"r{p}-{i}", f"P{p}") for p in range(10) for i in range(4)
    ]
    plan = plan_project_fold(items, k=10, seed=0)
    assert sorted(project_counts_per_fold(plan, items)) == [1] * 10


def test_project_plan_giant_project_isolated():
    items = [(f"g{i}", "GIANT") for i in range(50)]
    for p in range(9):
        items += [(f"t{p}-{i}", f"T{p}") for i in range(2)]
    plan = plan_project_fold(items, k=10, seed=0)
    giant_fold = plan.assignments["g0"]
    sharing = {
        project
        for rid, project in items
        if plan.assignments[rid] == giant_fold
    }
    assert sharing == {"GIANT"}


def test_project_plan_atomicity():
    rng = np.random.default_rng(41)
    items = []
    for p in range(17):
        for i in range(int(rng.integers(2, 30))):
            items.append((f"r{p}-{i}", f"P{p:02d}"))
    plan = plan_project_fold(items, k=10, seed=0)
    fold_of_project = {}
    for rid, project in items:
        fold_of_project.setdefault(project, set()).add(plan.assignments[rid])
    assert all(len(folds) == 1 for folds in fold_of_project.values())


def test_project_plan_too_few_projects():
    items = [("r1", "P1"), ("r2", "P2")]
    with pytest.raises(TooFewProjectsError):
        plan_project_fold(items, k=10, seed=0)


# -- run_cv -------------------------------------------------------------------------


SEPARABLE = {
    "A": ("gateway", "route", "packet"),
    "B": ("monitor", "track", "metric"),
    "C": ("vault", "seal", "secret"),
}


def separable_run(strategy: str, seed: int = 3):
    dataset, anns = synthetic_corpus(SEPARABLE, per_class=10)
    items = [(r.req_id, r.label) for r in dataset.requirements]
    plan = plan_stratified_kfold(items, k=10, seed=seed)
    config = RunnerConfig(seed=seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return run_cv(dataset, anns, strategy, plan, config)


def test_separable_perfect_under_hc4rc_and_flat():
    for strategy in ("hc4rc", "flat"):
        report = separable_run(strategy)
        assert micro_metrics(report.pooled) == 1.0
        mac = macro_metrics(per_class_prf(report.pooled))
        assert mac.f1 == 1.0


def test_pooled_equals_sum_of_folds():
    report = separable_run("flat+oversample")
    summed = np.zeros_like(report.pooled.counts)
    for fold in report.folds:
        summed += fold.confusion.counts
    assert np.array_equal(summed, report.pooled.counts)
    assert report.pooled.grand_total == sum(f.test_size for f in report.folds)


def test_run_cv_deterministic_reports():
    a = separable_run("hc4rc", seed=11)
    b = separable_run("hc4rc", seed=11)
    assert json.dumps(a.to_json_dict(), sort_keys=True) == json.dumps(
        b.to_json_dict(), sort_keys=True
    )


def test_provenance_clean_for_all_strategies(corpus_csv, corpus_conllu):
    dataset = load_dataset(corpus_csv)
    anns = load_annotations(corpus_conllu)
    items = [(r.req_id, r.label) for r in dataset.requirements]
    plan = plan_stratified_kfold(items, k=10, seed=5)
    config = RunnerConfig(seed=5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for strategy in STRATEGIES:
            report = run_cv(dataset, anns, strategy, plan, config)
            for fold in report.folds:
                assert fold.provenance.leaks() == {}
                assert fold.provenance.to_json_dict()["ok"] is True


def test_missing_annotation_rejected():
    dataset, anns = synthetic_corpus(SEPARABLE, per_class=4)
    broken = dict(anns)
    victim = dataset.requirements[0].req_id
    del broken[victim]
    items = [(r.req_id, r.label) for r in dataset.requirements]
    plan = plan_stratified_kfold(items, k=3, seed=0)
    with pytest.raises(MissingAnnotationError):
        run_cv(dataset, broken, "flat", plan, RunnerConfig(seed=0))


def test_unknown_strategy_rejected():
    dataset, anns = synthetic_corpus(SEPARABLE, per_class=4)
    items = [(r.req_id, r.label) for r in dataset.requirements]
    plan = plan_stratified_kfold(items, k=3, seed=0)
    with pytest.raises(ValueError):
        run_cv(dataset, anns, "no-such-strategy", plan, RunnerConfig(seed=0))


def test_incomplete_plan_rejected():
    dataset, anns = synthetic_corpus(SEPARABLE, per_class=4)
    items = [(r.req_id, r.label) for r in dataset.requirements][:-1]
    plan = plan_stratified_kfold(items, k=3, seed=0)
    with pytest.raises(ValueError):
        run_cv(dataset, anns, "flat", plan, RunnerConfig(seed=0))


def test_report_shape_and_hdlss_fields():
    report = separable_run("hc4rc")
    payload = report.to_json_dict()
    assert payload["strategy"] == "hc4rc"
    assert len(payload["folds"]) == 10
    for fold in payload["folds"]:
        assert fold["hdlss"]["n"] == fold["train_size"]
        assert fold["hdlss"]["d"] >= 1
        assert fold["plan"] is not None
    assert "macro" in payload["pooled"] and "micro" in payload["pooled"]
    assert "f1_mean_per_class" in payload["pooled"]["macro"]
    assert "mean_over_folds" in payload
    assert "wall_clock" not in json.dumps(payload)


def test_weighted_flag_adds_field():
    dataset, anns = synthetic_corpus(SEPARABLE, per_class=6)
    items = [(r.req_id, r.label) for r in dataset.requirements]
    plan = plan_stratified_kfold(items, k=3, seed=0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bare = run_cv(dataset, anns, "flat", plan, RunnerConfig(seed=0))
        rich = run_cv(
            dataset, anns, "flat", plan, RunnerConfig(seed=0, include_weighted=True)
        )
    assert "weighted_f1" not in bare.to_json_dict()["pooled"]
    assert "weighted_f1" in rich.to_json_dict()["pooled"]


def test_global_plan_variant_is_flagged_by_audit(corpus_csv, corpus_conllu):
    dataset = load_dataset(corpus_csv)
    anns = load_annotations(corpus_conllu)
    items = [(r.req_id, r.label) for r in dataset.requirements]
    plan = plan_stratified_kfold(items, k=5, seed=4)
    config = RunnerConfig(seed=4, global_decomposition=True)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = run_cv(dataset, anns, "hc4rc", plan, config)
    plans = {json.dumps(f.plan_summary, sort_keys=True) for f in report.folds}
    assert len(plans) == 1  # one dataset-wide decomposition for all folds
    for fold in report.folds:
        assert "plan" in fold.provenance.leaks()
        assert fold.provenance.leaks().keys() == {"plan"}
        assert fold.provenance.to_json_dict()["ok"] is False


def test_undersample_median_wired_through_runner(corpus_csv, corpus_conllu):
    dataset = load_dataset(corpus_csv)
    anns = load_annotations(corpus_conllu)
    items = [(r.req_id, r.label) for r in dataset.requirements]
    plan = plan_stratified_kfold(items, k=5, seed=4)
    config = RunnerConfig(seed=4, undersample_target="median")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = run_cv(dataset, anns, "flat+undersample", plan, config)
    for fold in report.folds:
        assert fold.resample_counts is not None
        original = {}
        for r in dataset.requirements:
            if plan.assignments[r.req_id] != fold.index:
                original[r.label] = original.get(r.label, 0) + 1
        median = int(np.median(sorted(original.values())))
        for label, count in fold.resample_counts.items():
            assert count == min(original[label], median)


def test_grid_search_runs_and_audits(corpus_csv, corpus_conllu):
    dataset = load_dataset(corpus_csv)
    anns = load_annotations(corpus_conllu)
    items = [(r.req_id, r.label) for r in dataset.requirements]
    plan = plan_stratified_kfold(items, k=3, seed=2)
    config = RunnerConfig(seed=2, grid_search=True, param_grid=(0.1, 1.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = run_cv(dataset, anns, "flat", plan, config)
    for fold in report.folds:
        assert fold.provenance.grid_source_ids is not None
        assert fold.provenance.leaks() == {}
