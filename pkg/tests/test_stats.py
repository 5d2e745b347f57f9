"""Evaluation machinery: baselines, folds, t-tests, metrics, kappa."""

import collections
import math
import random

import pytest

import tables
from descsel.features import Example
from descsel.ripper import LearnerParams
from descsel.stats import (
    ConfusionMatrix,
    accuracy,
    cross_validate,
    format_accuracy_table,
    format_confusion,
    format_pairwise_t,
    format_per_class_table,
    kappa,
    majority_baseline,
    majority_learner,
    make_fold_plan,
    paired_t,
    per_class_metrics,
    t_critical,
)


# ---------------------------------------------------------------------------
# majority baseline

def _distribution_labels():
    labels = []
    for label, count in tables.CLASS_DISTRIBUTION.items():
        labels.extend([label] * count)
    return labels


def test_majority_on_corpus_distribution():
    label, fraction = majority_baseline(_distribution_labels())
    assert label == "CPQ"
    assert fraction == 64 / 393


def test_majority_single_label():
    assert majority_baseline(["T", "T", "T"]) == ("T", 1.0)


def test_majority_tie_breaks_by_class_order():
    assert majority_baseline(["O", "O", "O", "CP", "CP", "CP"])[0] == "CP"
    # unknown labels rank after the canonical sixteen, then alphabetically
    assert majority_baseline(["ZZ", "AA"])[0] == "AA"


def test_majority_rejects_empty():
    with pytest.raises(ValueError):
        majority_baseline([])


# ---------------------------------------------------------------------------
# fold plans and cross-validation

def test_fold_plan_sizes_for_393_examples():
    plan = make_fold_plan(393, k=25, seed=0)
    sizes = collections.Counter(plan.assignment)
    assert sorted(sizes.values(), reverse=True) == [16] * 18 + [15] * 7
    assert set(sizes) == set(range(25))


def test_fold_plan_partitions_examples():
    plan = make_fold_plan(100, k=7, seed=3)
    seen = sorted(i for f in range(7) for i in plan.fold_indices(f))
    assert seen == list(range(100))


def test_leave_one_out_plan():
    plan = make_fold_plan(10, k=10, seed=1)
    assert sorted(collections.Counter(plan.assignment).values()) == [1] * 10


def test_fold_plan_validates_k():
    with pytest.raises(ValueError):
        make_fold_plan(5, k=6)
    with pytest.raises(ValueError):
        make_fold_plan(5, k=1)


def _labelled_examples(n=120, seed=5):
    rng = random.Random(seed)
    examples = []
    for _ in range(n):
        flag = rng.random() < 0.7
        vector = {"flag": "yes" if flag else "no"}
        examples.append(Example(vector, "MAJ" if flag else "MIN"))
    return examples


def test_constant_learner_scores_near_majority_fraction():
    examples = _labelled_examples()
    _, fraction = majority_baseline([ex.label for ex in examples])
    result = cross_validate(examples, k=10, seed=2, learner=majority_learner)
    assert result.mean == pytest.approx(fraction, abs=0.02)


def test_cross_validation_is_deterministic():
    examples = _labelled_examples()
    a = cross_validate(examples, LearnerParams(), k=10, seed=4)
    b = cross_validate(examples, LearnerParams(), k=10, seed=4)
    assert a == b


def test_cross_validation_scores_each_example_once():
    examples = _labelled_examples(40)
    plan = make_fold_plan(40, k=40, seed=0)
    result = cross_validate(examples, plan=plan, learner=majority_learner)
    assert len(result.per_fold_accuracy) == 40
    assert all(acc in (0.0, 1.0) for acc in result.per_fold_accuracy)


def test_plan_mismatch_rejected():
    examples = _labelled_examples(30)
    with pytest.raises(ValueError, match="different example count"):
        cross_validate(examples, plan=make_fold_plan(29, k=5, seed=0))


def test_mean_and_se_definitions():
    examples = _labelled_examples(60)
    result = cross_validate(examples, k=6, seed=9, learner=majority_learner)
    per = result.per_fold_accuracy
    mean = sum(per) / len(per)
    var = sum((x - mean) ** 2 for x in per) / (len(per) - 1)
    assert result.mean == pytest.approx(mean)
    assert result.standard_error == pytest.approx(math.sqrt(var) / math.sqrt(6))


# ---------------------------------------------------------------------------
# paired t

def test_t_of_identical_series_is_zero():
    a = [0.5, 0.6, 0.7, 0.4]
    r = paired_t(a, a)
    assert r.t == 0.0 and not r.significant_05 and not r.significant_01


def test_constant_nonzero_difference_is_infinitely_significant():
    a = [0.5 + 0.1] * 25
    b = [0.5] * 25
    r = paired_t(a, b)
    assert math.isinf(r.t) and r.t > 0
    assert r.significant_05 and r.significant_01
    assert paired_t(b, a).t == -math.inf


def test_t_matches_hand_computed_case():
    d = [0.06] * 12 + [-0.02] * 12 + [0.02]
    a = [0.5 + x for x in d]
    b = [0.5] * 25
    r = paired_t(a, b)
    assert r.df == 24
    assert r.t == pytest.approx(2.5, abs=1e-9)
    assert r.significant_05 and not r.significant_01


def test_t_antisymmetry():
    rng = random.Random(0)
    a = [rng.random() for _ in range(25)]
    b = [rng.random() for _ in range(25)]
    assert paired_t(a, b).t == pytest.approx(-paired_t(b, a).t)


def test_critical_values_at_df_24():
    assert t_critical(24) == (2.064, 2.797)
    # unlisted df falls back to the nearest smaller row
    assert t_critical(35) == t_critical(30)
    assert t_critical(10_000) == t_critical(200)


def test_paired_t_validates_input():
    with pytest.raises(ValueError):
        paired_t([1, 2], [1])
    with pytest.raises(ValueError):
        paired_t([1], [1])


# ---------------------------------------------------------------------------
# confusion matrices and per-class metrics

def reference_matrix():
    return ConfusionMatrix(tables.CONFUSION_LABELS, tables.CONFUSION_COUNTS)


def test_reference_matrix_reproduces_published_metrics():
    metrics = per_class_metrics(reference_matrix())
    assert reference_matrix().total == 40
    for label, (recall, precision, fallout, f1) in tables.EXPECTED_CLASS_METRICS.items():
        m = metrics[label]
        assert m.recall * 100 == pytest.approx(recall, abs=0.005), label
        assert m.precision * 100 == pytest.approx(precision, abs=0.005), label
        assert m.fallout * 100 == pytest.approx(fallout, abs=0.005), label
        assert m.f1 == pytest.approx(f1, abs=0.005), label


def test_identity_matrix_metrics():
    m = ConfusionMatrix.from_pairs(["A", "B", "C"], ["A", "B", "C"])
    for metrics in per_class_metrics(m).values():
        assert metrics.recall == metrics.precision == metrics.f1 == 1.0
        assert metrics.fallout == 0.0


def test_accuracy_is_trace_over_total():
    m = reference_matrix()
    trace = sum(m.counts[i][i] for i in range(len(m.labels)))
    assert m.accuracy() == trace / m.total
    # row-weighted recall equals accuracy
    metrics = per_class_metrics(m)
    weighted = sum(
        metrics[lbl].recall * sum(m.counts[i])
        for i, lbl in enumerate(m.labels)
    )
    assert weighted / m.total == pytest.approx(m.accuracy())


def test_from_pairs_orders_labels_canonically():
    m = ConfusionMatrix.from_pairs(["T", "CPQ", "O"], ["T", "CPQ", "CPQ"])
    assert m.labels == ("CPQ", "T", "O")
    assert m.total == 3


def test_exact_match_accuracy_helper():
    assert accuracy(["A", "B"], ["A", "C"]) == 0.5
    with pytest.raises(ValueError):
        accuracy([], [])
    with pytest.raises(ValueError):
        accuracy(["A"], [])


# ---------------------------------------------------------------------------
# kappa

def test_kappa_perfect_agreement():
    assert kappa(["X", "Y", "X"], ["X", "Y", "X"]) == 1.0


def test_kappa_chance_level():
    assert kappa(["X", "Y", "X", "Y"], ["X", "X", "Y", "Y"]) == 0.0


def test_kappa_hand_contingency():
    a = ["X"] * 5 + ["Y"] * 5
    b = ["X", "X", "X", "X", "Y", "X", "Y", "Y", "Y", "Y"]
    assert kappa(a, b) == pytest.approx(0.6)


def test_kappa_validates():
    with pytest.raises(ValueError):
        kappa(["X"], [])
    with pytest.raises(ValueError):
        kappa([], [])


# ---------------------------------------------------------------------------
# report emitters

def test_accuracy_table_text_and_csv():
    rows = [
        ("BASELINE", cross_validate(_labelled_examples(60), k=6, seed=1,
                                    learner=majority_learner)),
    ]
    text = format_accuracy_table(rows)
    assert "BASELINE" in text and "%" in text
    csv = format_accuracy_table(rows, csv=True)
    assert csv.splitlines()[0] == "row,model,accuracy,se"


def test_pairwise_t_matrix_marks_identical_runs():
    examples = _labelled_examples(60)
    r = cross_validate(examples, k=6, seed=1, learner=majority_learner)
    out = format_pairwise_t(["a", "b"], [r, r])
    lines = out.splitlines()
    assert len(lines) == 3
    assert "0.00" in lines[1] or "0.00" in lines[2]


def test_per_class_table_formats():
    metrics = per_class_metrics(reference_matrix())
    text = format_per_class_table(metrics, labels=tables.CONFUSION_LABELS)
    assert "CPQ" in text and "63.64" in text
    csv = format_per_class_table(metrics, csv=True)
    assert csv.splitlines()[0] == "class,recall,precision,fallout,f"


def test_confusion_grid_format():
    m = reference_matrix()
    text = format_confusion(m)
    assert text.splitlines()[1].strip().startswith("CPQ")
    csv = format_confusion(m, csv=True)
    assert csv.splitlines()[0].lstrip(",").startswith("CPQ")
