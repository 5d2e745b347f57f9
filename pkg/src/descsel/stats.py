"""Evaluation protocol: exact-match scoring, k-fold cross-validation with
standard errors, paired t-tests at fixed thresholds, per-class metrics,
confusion matrices, and two-coder kappa.

Fold assignment shuffles example indices with Python's ``random.Random``
(Mersenne Twister) seeded explicitly, then deals them round-robin, so
fold sizes differ by at most one and runs are reproducible.  Significance
is reported against fixed two-tailed critical values (alpha = .05 / .01)
rather than as p-values.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass

from .features import CLASS_ORDER
from .ripper import LearnerParams, RuleList, classify, train

__all__ = [
    "ConfusionMatrix",
    "CVResult",
    "FoldPlan",
    "PairedT",
    "accuracy",
    "cross_validate",
    "format_accuracy_table",
    "format_confusion",
    "format_pairwise_t",
    "format_per_class_table",
    "kappa",
    "majority_baseline",
    "majority_learner",
    "make_fold_plan",
    "paired_t",
    "per_class_metrics",
]


def _label_sort_key(label: str):
    try:
        return (0, CLASS_ORDER.index(label))
    except ValueError:
        return (1, label)


def majority_baseline(labels) -> tuple[str, float]:
    """Most frequent label and its relative frequency; ties break by the
    canonical class order."""
    labels = list(labels)
    if not labels:
        raise ValueError("majority baseline needs at least one label")
    counts: dict[str, int] = {}
    for lbl in labels:
        counts[lbl] = counts.get(lbl, 0) + 1
    winner = min(counts, key=lambda c: (-counts[c], _label_sort_key(c)))
    return winner, counts[winner] / len(labels)


def majority_learner(examples) -> RuleList:
    """A degenerate learner: no rules, default = training majority class."""
    label, _ = majority_baseline([ex.label for ex in examples])
    return RuleList((), label)


# ---------------------------------------------------------------------------
# folds and cross-validation

@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    assignment: tuple  # example index -> fold index

    def fold_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f == fold]


def make_fold_plan(n: int, k: int = 25, seed: int = 0) -> FoldPlan:
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= {n}, got k={k}")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    assignment = [0] * n
    for rank, idx in enumerate(indices):
        assignment[idx] = rank % k
    return FoldPlan(k, seed, tuple(assignment))


@dataclass(frozen=True)
class CVResult:
    per_fold_accuracy: tuple
    mean: float
    standard_error: float


def accuracy(gold, predicted) -> float:
    gold, predicted = list(gold), list(predicted)
    if len(gold) != len(predicted):
        raise ValueError("gold and predicted lengths differ")
    if not gold:
        raise ValueError("cannot score an empty set")
    return sum(g == p for g, p in zip(gold, predicted)) / len(gold)


def cross_validate(
    examples,
    params: LearnerParams | None = None,
    k: int = 25,
    seed: int = 0,
    learner=None,
    plan: FoldPlan | None = None,
) -> CVResult:
    """Exact-match accuracy estimated over k train/test splits.

    ``learner`` maps a training example list to a RuleList; the default
    trains the rule inducer with ``params``.  Passing a shared ``plan``
    keeps several runs pairable for t-tests.
    """
    examples = list(examples)
    if plan is None:
        plan = make_fold_plan(len(examples), k, seed)
    elif len(plan.assignment) != len(examples):
        raise ValueError("fold plan was made for a different example count")
    if learner is None:
        def learner(exs):
            return train(exs, params)

    per_fold = []
    for fold in range(plan.k):
        test = [examples[i] for i in plan.fold_indices(fold)]
        training = [ex for i, ex in enumerate(examples) if plan.assignment[i] != fold]
        model = learner(training)
        per_fold.append(accuracy(
            [ex.label for ex in test],
            [classify(model, ex.vector) for ex in test],
        ))
    mean = statistics.fmean(per_fold)
    se = statistics.stdev(per_fold) / math.sqrt(plan.k)
    return CVResult(tuple(per_fold), mean, se)


# ---------------------------------------------------------------------------
# paired t-test

# two-tailed critical values; rows are degrees of freedom
_T_TABLE = {
    1: (12.706, 63.657), 2: (4.303, 9.925), 3: (3.182, 5.841), 4: (2.776, 4.604),
    5: (2.571, 4.032), 6: (2.447, 3.707), 7: (2.365, 3.499), 8: (2.306, 3.355),
    9: (2.262, 3.250), 10: (2.228, 3.169), 11: (2.201, 3.106), 12: (2.179, 3.055),
    13: (2.160, 3.012), 14: (2.145, 2.977), 15: (2.131, 2.947), 16: (2.120, 2.921),
    17: (2.110, 2.898), 18: (2.101, 2.878), 19: (2.093, 2.861), 20: (2.086, 2.845),
    21: (2.080, 2.831), 22: (2.074, 2.819), 23: (2.069, 2.807), 24: (2.064, 2.797),
    25: (2.060, 2.787), 26: (2.056, 2.779), 27: (2.052, 2.771), 28: (2.048, 2.763),
    29: (2.045, 2.756), 30: (2.042, 2.750), 40: (2.021, 2.704), 50: (2.009, 2.678),
    60: (2.000, 2.660), 80: (1.990, 2.639), 100: (1.984, 2.626), 120: (1.980, 2.617),
    200: (1.972, 2.601),
}


def t_critical(df: int) -> tuple[float, float]:
    """(alpha=.05, alpha=.01) two-tailed critical values; unlisted df fall
    back to the nearest smaller listed row (conservative)."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    candidates = [row for row in _T_TABLE if row <= df]
    return _T_TABLE[max(candidates)]


@dataclass(frozen=True)
class PairedT:
    t: float
    df: int
    significant_05: bool
    significant_01: bool


def paired_t(a, b) -> PairedT:
    """Paired t-test over per-fold accuracies from a shared fold plan."""
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise ValueError("paired series must have equal length")
    k = len(a)
    if k < 2:
        raise ValueError("paired t-test needs at least two pairs")
    d = [x - y for x, y in zip(a, b)]
    mean_d = statistics.fmean(d)
    sd = statistics.stdev(d)
    df = k - 1
    if sd == 0:
        if mean_d == 0:
            return PairedT(0.0, df, False, False)
        t = math.inf if mean_d > 0 else -math.inf
        return PairedT(t, df, True, True)
    t = mean_d / (sd / math.sqrt(k))
    c05, c01 = t_critical(df)
    return PairedT(t, df, abs(t) >= c05, abs(t) >= c01)


# ---------------------------------------------------------------------------
# confusion matrices and per-class metrics

@dataclass(frozen=True)
class ConfusionMatrix:
    """Gold (rows) against predicted (columns) counts over a fixed label order."""

    labels: tuple
    counts: tuple  # counts[i][j] = gold labels[i] predicted as labels[j]

    @classmethod
    def from_pairs(cls, gold, predicted, labels=None) -> "ConfusionMatrix":
        gold, predicted = list(gold), list(predicted)
        if len(gold) != len(predicted):
            raise ValueError("gold and predicted lengths differ")
        if labels is None:
            labels = sorted(set(gold) | set(predicted), key=_label_sort_key)
        labels = tuple(labels)
        index = {lbl: i for i, lbl in enumerate(labels)}
        grid = [[0] * len(labels) for _ in labels]
        for g, p in zip(gold, predicted):
            grid[index[g]][index[p]] += 1
        return cls(labels, tuple(tuple(row) for row in grid))

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def accuracy(self) -> float:
        trace = sum(self.counts[i][i] for i in range(len(self.labels)))
        return trace / self.total if self.total else 0.0


@dataclass(frozen=True)
class ClassMetrics:
    recall: float
    precision: float
    fallout: float
    f1: float


def per_class_metrics(matrix: ConfusionMatrix) -> dict:
    """Recall, precision, fallout and F1 per label.

    Conventions: an empty gold row yields recall 0; an empty predicted
    column yields precision 1 (the class was never wrongly predicted);
    F1 is 0 when precision + recall is 0.
    """
    out = {}
    n = len(matrix.labels)
    total = matrix.total
    for i, label in enumerate(matrix.labels):
        tp = matrix.counts[i][i]
        row_total = sum(matrix.counts[i])
        col_total = sum(matrix.counts[j][i] for j in range(n))
        recall = tp / row_total if row_total else 0.0
        precision = tp / col_total if col_total else 1.0
        fp = col_total - tp
        negatives = total - row_total
        fallout = fp / negatives if negatives else 0.0
        f1 = (2 * precision * recall / (precision + recall)
              if precision + recall else 0.0)
        out[label] = ClassMetrics(recall, precision, fallout, f1)
    return out


def kappa(coding_a, coding_b) -> float:
    """Chance-corrected agreement between two parallel label sequences."""
    a, b = list(coding_a), list(coding_b)
    if len(a) != len(b):
        raise ValueError("codings must have equal length")
    if not a:
        raise ValueError("codings must be nonempty")
    n = len(a)
    po = sum(x == y for x, y in zip(a, b)) / n
    categories = set(a) | set(b)
    pe = sum((a.count(c) / n) * (b.count(c) / n) for c in categories)
    if pe == 1.0:
        return 1.0 if po == 1.0 else 0.0
    return (po - pe) / (1 - pe)


# ---------------------------------------------------------------------------
# report emitters

def format_accuracy_table(rows, csv: bool = False) -> str:
    """Rows of (name, CVResult) rendered like the accuracy summary table."""
    if csv:
        lines = ["row,model,accuracy,se"]
        for i, (name, result) in enumerate(rows, start=1):
            lines.append(f"{i},{name},{result.mean * 100:.1f},{result.standard_error * 100:.1f}")
        return "\n".join(lines) + "\n"
    width = max((len(name) for name, _ in rows), default=10)
    lines = [f"{'Row':>3}  {'Model':<{width}}  Accuracy (SE)"]
    for i, (name, result) in enumerate(rows, start=1):
        lines.append(
            f"{i:>3}  {name:<{width}}  {result.mean * 100:.1f}% ({result.standard_error * 100:.1f})"
        )
    return "\n".join(lines) + "\n"


def format_pairwise_t(names, results) -> str:
    """Matrix of paired t values between named CV runs; * and ** mark
    significance at .05 and .01."""
    cells = {}
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            if i == j:
                cells[i, j] = "-"
                continue
            r = paired_t(results[i].per_fold_accuracy, results[j].per_fold_accuracy)
            mark = "**" if r.significant_01 else "*" if r.significant_05 else ""
            value = "inf" if math.isinf(r.t) else f"{r.t:.2f}"
            cells[i, j] = value + mark
    width = max(len(str(c)) for c in cells.values())
    width = max(width, max(len(n) for n in names))
    header = " " * width + "  " + "  ".join(f"{n:>{width}}" for n in names)
    lines = [header]
    for i, name in enumerate(names):
        row = "  ".join(f"{cells[i, j]:>{width}}" for j in range(len(names)))
        lines.append(f"{name:>{width}}  {row}")
    return "\n".join(lines) + "\n"


def format_per_class_table(metrics: dict, labels=None, csv: bool = False) -> str:
    """Per-class recall/precision/fallout/F table (percentages, F in [0,1])."""
    if labels is None:
        labels = sorted(metrics, key=_label_sort_key)
    if csv:
        lines = ["class,recall,precision,fallout,f"]
        for lbl in labels:
            m = metrics[lbl]
            lines.append(f"{lbl},{m.recall * 100:.2f},{m.precision * 100:.2f},"
                         f"{m.fallout * 100:.2f},{m.f1:.2f}")
        return "\n".join(lines) + "\n"
    lines = [f"{'Class':<6} {'recall':>8} {'precision':>10} {'fallout':>8} {'F':>6}"]
    for lbl in labels:
        m = metrics[lbl]
        lines.append(f"{lbl:<6} {m.recall * 100:>8.2f} {m.precision * 100:>10.2f} "
                     f"{m.fallout * 100:>8.2f} {m.f1:>6.2f}")
    return "\n".join(lines) + "\n"


def format_confusion(matrix: ConfusionMatrix, csv: bool = False) -> str:
    sep = "," if csv else " "
    width = 1 if csv else max(len(str(lbl)) for lbl in matrix.labels) + 1
    head = [""] + [str(lbl) for lbl in matrix.labels]
    lines = [sep.join(f"{h:>{width}}" if not csv else h for h in head)]
    for lbl, row in zip(matrix.labels, matrix.counts):
        cells = [str(lbl)] + [str(c) for c in row]
        lines.append(sep.join(f"{c:>{width}}" if not csv else c for c in cells))
    return "\n".join(lines) + "\n"
