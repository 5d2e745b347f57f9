"""Ordered-rule induction: greedy separate-and-conquer with FOIL gain.

Classes are learned from least to most frequent; the most frequent class
becomes the default and gets no rules.  For each class, rules are grown
condition by condition, always adding the candidate with the highest
information gain, until the rule covers no negatives or no candidate has
positive gain; covered examples are then removed and growing repeats
until the class's positives are exhausted.  Noise correction (off by
default) splits the data into grow/prune parts and prunes each grown
rule by the (p-n)/(p+n) worth metric on the prune part.

Conditions are ``feature = value`` for symbolic/boolean values (``na``
included), and ``feature <= t`` / ``feature >= t`` for numerics, with
thresholds taken at midpoints between observed values.  A numeric
comparison is false when the feature's value is ``na`` or missing;
symbolic equality is case-insensitive.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from importlib import resources

from sklearn.base import BaseEstimator, ClassifierMixin

from .features import CLASS_ORDER, NA, Example

__all__ = [
    "Condition",
    "LearnerParams",
    "Rule",
    "RuleList",
    "RuleListClassifier",
    "RuleSyntaxError",
    "builtin_rules",
    "classify",
    "first_match",
    "foil_gain",
    "foil_gain_counts",
    "format_rulelist",
    "parse_rulelist",
    "train",
]

_OPS = {"eq": "=", "le": "<=", "ge": ">="}
_OPS_BY_SYMBOL = {v: k for k, v in _OPS.items()}


@dataclass(frozen=True)
class Condition:
    feature: str
    op: str        # eq | le | ge
    value: object  # token (symbol/na) or number

    def holds(self, vector) -> bool:
        v = vector.get(self.feature, NA)
        if self.op == "eq":
            return _values_equal(v, self.value)
        if not isinstance(v, (int, float)):
            return False  # na (or missing) never satisfies a numeric comparison
        if self.op == "le":
            return v <= self.value
        return v >= self.value

    def __str__(self):
        return f"{self.feature} {_OPS[self.op]} {_format_value(self.value)}"


def _values_equal(a, b) -> bool:
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return a == b
    return str(a).lower() == str(b).lower()


def _format_value(v) -> str:
    return str(v)


@dataclass(frozen=True)
class Rule:
    conditions: tuple
    label: str

    def matches(self, vector) -> bool:
        return all(c.holds(vector) for c in self.conditions)

    def __str__(self):
        if not self.conditions:
            return f"IF  THEN {self.label}"
        return "IF " + " AND ".join(str(c) for c in self.conditions) + f" THEN {self.label}"


@dataclass(frozen=True)
class RuleList:
    rules: tuple
    default_label: str

    def __len__(self):
        return len(self.rules)


@dataclass(frozen=True)
class LearnerParams:
    noise_correction: bool = False
    min_coverage: int = 1
    rng_seed: int = 0
    grow_prune_ratio: float = 2 / 3   # grow share, used only with noise correction

    def __post_init__(self):
        if not 0 < self.grow_prune_ratio < 1:
            raise ValueError("grow_prune_ratio must be in (0, 1)")
        if self.min_coverage < 1:
            raise ValueError("min_coverage must be >= 1")


# ---------------------------------------------------------------------------
# gain

def foil_gain_counts(p0: int, n0: int, p1: int, n1: int) -> float:
    """Information gained by a refinement covering (p1, n1) of (p0, n0)."""
    if p1 == 0 or p0 == 0:
        return 0.0
    return p1 * (math.log2(p1 / (p1 + n1)) - math.log2(p0 / (p0 + n0)))


def foil_gain(rule_before: Rule, rule_after: Rule, examples) -> float:
    """Gain of ``rule_after`` over ``rule_before`` on labelled examples."""
    if rule_before.label != rule_after.label:
        raise ValueError("rules must target the same class")
    label = rule_after.label

    def counts(rule):
        p = n = 0
        for ex in examples:
            if rule.matches(ex.vector):
                if ex.label == label:
                    p += 1
                else:
                    n += 1
        return p, n

    p0, n0 = counts(rule_before)
    p1, n1 = counts(rule_after)
    return foil_gain_counts(p0, n0, p1, n1)


# ---------------------------------------------------------------------------
# classification

def classify(rule_list: RuleList, vector) -> str:
    """Label of the first matching rule, or the default."""
    for rule in rule_list.rules:
        if rule.matches(vector):
            return rule.label
    return rule_list.default_label


def first_match(rule_list: RuleList, vector) -> int | None:
    """Index of the first matching rule (None when only the default fires)."""
    for i, rule in enumerate(rule_list.rules):
        if rule.matches(vector):
            return i
    return None


# ---------------------------------------------------------------------------
# training

def _label_rank(label: str) -> tuple:
    try:
        return (0, CLASS_ORDER.index(label))
    except ValueError:
        return (1, label)


def train(examples, params: LearnerParams | None = None) -> RuleList:
    """Learn an ordered rule list from labelled examples.

    Deterministic for a given ``params.rng_seed``; with a single distinct
    label the result is an empty list with that label as default.
    """
    params = params or LearnerParams()
    examples = list(examples)
    if not examples:
        raise ValueError("cannot train on an empty example set")

    counts: dict[str, int] = {}
    for ex in examples:
        counts[ex.label] = counts.get(ex.label, 0) + 1
    # most frequent class, ties broken by canonical class order
    default = min(counts, key=lambda c: (-counts[c], _label_rank(c)))
    if len(counts) == 1:
        return RuleList((), default)

    # rarest classes first; ties resolved toward the canonically rarer one
    order = sorted((c for c in counts if c != default),
                   key=lambda c: (counts[c], _rev_rank(c)))

    rng = random.Random(params.rng_seed)
    remaining = examples
    rules: list[Rule] = []
    for label in order:
        while True:
            positives = [ex for ex in remaining if ex.label == label]
            if not positives:
                break
            if params.noise_correction:
                grow_set, prune_set = _grow_prune_split(remaining, params, rng)
                rule = _grow_rule(grow_set, label)
                rule = _prune_rule(rule, prune_set, label)
            else:
                rule = _grow_rule(remaining, label)
            if not rule.conditions:
                break
            covered_pos = sum(
                1 for ex in remaining if ex.label == label and rule.matches(ex.vector)
            )
            if covered_pos < params.min_coverage:
                break
            rules.append(rule)
            remaining = [ex for ex in remaining if not rule.matches(ex.vector)]
    return RuleList(tuple(rules), default)


def _rev_rank(label: str):
    kind, key = _label_rank(label)
    if kind == 0:
        return (0, -key)          # later canonical position = rarer prior
    return (1, tuple(-ord(ch) for ch in key))


def _grow_prune_split(examples, params, rng):
    shuffled = list(examples)
    rng.shuffle(shuffled)
    cut = max(1, round(len(shuffled) * params.grow_prune_ratio))
    return shuffled[:cut], shuffled[cut:]


def _grow_rule(examples, label) -> Rule:
    conditions: list[Condition] = []
    covered = list(examples)
    used_ops = set()
    while True:
        p0 = sum(1 for ex in covered if ex.label == label)
        n0 = len(covered) - p0
        if p0 == 0 or n0 == 0:
            break
        best = _best_condition(covered, label, p0, n0, used_ops)
        if best is None:
            break
        conditions.append(best)
        used_ops.add((best.feature, best.op))
        covered = [ex for ex in covered if best.holds(ex.vector)]
    return Rule(tuple(conditions), label)


def _best_condition(covered, label, p0, n0, used_ops):
    """Highest-gain refinement; candidates are scanned in a fixed order so
    gain ties resolve to the lexicographically first feature/op/value."""
    best = None
    best_gain = 0.0
    features = sorted({f for ex in covered for f in ex.vector})
    for feature in features:
        sym_counts: dict = {}
        numeric: list[tuple[float, bool]] = []
        for ex in covered:
            v = ex.vector.get(feature, NA)
            pos = ex.label == label
            if isinstance(v, (int, float)):
                numeric.append((v, pos))
            else:
                p, n = sym_counts.get(v, (0, 0))
                sym_counts[v] = (p + int(pos), n + int(not pos))

        if (feature, "eq") not in used_ops:
            for value in sorted(sym_counts, key=str):
                p1, n1 = sym_counts[value]
                gain = foil_gain_counts(p0, n0, p1, n1)
                if gain > best_gain:
                    best, best_gain = Condition(feature, "eq", value), gain

        if numeric:
            numeric.sort(key=lambda t: t[0])
            values = [v for v, _ in numeric]
            pos_prefix = [0]
            for _, pos in numeric:
                pos_prefix.append(pos_prefix[-1] + int(pos))
            total_p = pos_prefix[-1]
            total_n = len(numeric) - total_p
            distinct = sorted(set(values))
            for lo, hi in zip(distinct, distinct[1:]):
                mid = (lo + hi) / 2
                cut = _bisect_right(values, mid)
                p_le, n_le = pos_prefix[cut], cut - pos_prefix[cut]
                for op, p1, n1 in (
                    ("ge", total_p - p_le, total_n - n_le),
                    ("le", p_le, n_le),
                ):
                    if (feature, op) in used_ops:
                        continue
                    gain = foil_gain_counts(p0, n0, p1, n1)
                    if gain > best_gain:
                        best, best_gain = Condition(feature, op, mid), gain
    return best


def _bisect_right(values, x):
    lo, hi = 0, len(values)
    while lo < hi:
        mid = (lo + hi) // 2
        if values[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _prune_rule(rule: Rule, prune_set, label) -> Rule:
    """Drop a final run of conditions to maximize (p-n)/(p+n) on the prune set."""
    if not prune_set or not rule.conditions:
        return rule
    best_k = len(rule.conditions)
    best_worth = None
    for k in range(len(rule.conditions), -1, -1):
        candidate = Rule(rule.conditions[:k], label)
        p = n = 0
        for ex in prune_set:
            if candidate.matches(ex.vector):
                if ex.label == label:
                    p += 1
                else:
                    n += 1
        worth = (p - n) / (p + n) if (p + n) else -1.0
        if best_worth is None or worth > best_worth:
            best_worth, best_k = worth, k
    return Rule(rule.conditions[:best_k], label)


# ---------------------------------------------------------------------------
# rule text format

class RuleSyntaxError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _parse_condition_value(raw: str):
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def parse_rulelist(text: str) -> RuleList:
    """Parse the rule text grammar: IF/AND/THEN lines plus a final DEFAULT."""
    rules: list[Rule] = []
    default = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if default is not None:
            raise RuleSyntaxError(line_no, "DEFAULT must be the last line")
        if line.startswith("DEFAULT"):
            parts = line.split()
            if len(parts) != 2:
                raise RuleSyntaxError(line_no, "DEFAULT needs exactly one label")
            default = parts[1]
            continue
        if not line.startswith("IF "):
            raise RuleSyntaxError(line_no, f"expected IF or DEFAULT, got {line.split()[0]!r}")
        body, sep, label = line[3:].rpartition(" THEN ")
        if not sep or not label.strip():
            raise RuleSyntaxError(line_no, "rule needs a THEN <label>")
        label = label.strip()
        conditions = []
        seen_ops = set()
        for chunk in body.split(" AND "):
            parts = chunk.split()
            if len(parts) != 3:
                raise RuleSyntaxError(line_no, f"condition must be <feature> <op> <value>, got {chunk!r}")
            feature, op_symbol, raw_value = parts
            if op_symbol not in _OPS_BY_SYMBOL:
                raise RuleSyntaxError(line_no, f"unknown operator {op_symbol!r}")
            op = _OPS_BY_SYMBOL[op_symbol]
            value = _parse_condition_value(raw_value)
            if op in ("le", "ge") and not isinstance(value, (int, float)):
                raise RuleSyntaxError(line_no, f"{op_symbol} needs a numeric value, got {raw_value!r}")
            if (feature, op) in seen_ops:
                raise RuleSyntaxError(line_no, f"duplicate test {feature} {op_symbol} ...")
            seen_ops.add((feature, op))
            conditions.append(Condition(feature, op, value))
        rules.append(Rule(tuple(conditions), label))
    if default is None:
        raise RuleSyntaxError(text.count("\n") + 1, "missing DEFAULT <label> line")
    return RuleList(tuple(rules), default)


def format_rulelist(rule_list: RuleList) -> str:
    lines = [str(rule) for rule in rule_list.rules]
    lines.append(f"DEFAULT {rule_list.default_label}")
    return "\n".join(lines) + "\n"


def builtin_rules(name: str) -> RuleList:
    """Load a bundled rule asset by name (``fig14`` or ``fig16``)."""
    ref = resources.files("descsel.assets").joinpath(f"{name}.rules")
    if not ref.is_file():
        raise ValueError(f"no builtin rule set named {name!r}")
    return parse_rulelist(ref.read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# estimator

class RuleListClassifier(BaseEstimator, ClassifierMixin):
    """Ordered-rule classifier over feature-dict samples.

    X is a sequence of mappings from feature name to value (as produced
    by feature extraction or :func:`descsel.features.read_dataset`), y a
    sequence of class labels.  The fitted model is exposed on
    ``rule_list_`` and can be serialized with :func:`format_rulelist`.
    """

    def __init__(self, noise_correction=False, min_coverage=1, rng_seed=0,
                 grow_prune_ratio=2 / 3):
        self.noise_correction = noise_correction
        self.min_coverage = min_coverage
        self.rng_seed = rng_seed
        self.grow_prune_ratio = grow_prune_ratio

    def _params(self) -> LearnerParams:
        return LearnerParams(
            noise_correction=self.noise_correction,
            min_coverage=self.min_coverage,
            rng_seed=self.rng_seed,
            grow_prune_ratio=self.grow_prune_ratio,
        )

    def fit(self, X, y):
        X, y = list(X), list(y)
        if len(X) != len(y):
            raise ValueError(f"X has {len(X)} samples but y has {len(y)} labels")
        for i, sample in enumerate(X):
            if not hasattr(sample, "get"):
                raise TypeError(f"sample {i} is not a mapping of feature values")
        examples = [Example(vector=dict(v), label=str(lbl)) for v, lbl in zip(X, y)]
        self.rule_list_ = train(examples, self._params())
        self.classes_ = sorted({str(lbl) for lbl in y})
        return self

    def predict(self, X):
        if not hasattr(self, "rule_list_"):
            raise RuntimeError("classifier is not fitted")
        return [classify(self.rule_list_, v) for v in X]
