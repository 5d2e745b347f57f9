"""Command-line interface for the description content-selection toolkit.

Subcommands::

    validate    check a corpus file against the format invariants
    extract     turn a corpus into a feature dataset
    train       learn a rule list from a dataset or corpus
    predict     apply a rule list (file or @builtin) to a dataset
    experiment  cross-validate several feature configurations, paired
    synth       generate a synthetic corpus with a planted policy
    metrics     score a prediction file against a gold file

All commands are batch-mode and deterministic given their flags; exit
status 0 means success (and, for validate, a clean corpus).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .corpus import CorpusSyntaxError, parse_corpus, serialize_corpus, validate
from .features import (
    Example,
    FeatureGroup,
    extract_examples,
    read_dataset,
    write_dataset,
)
from .focus import FocusModel
from .ripper import (
    LearnerParams,
    builtin_rules,
    classify,
    format_rulelist,
    parse_rulelist,
    train,
)
from .stats import (
    ConfusionMatrix,
    accuracy,
    cross_validate,
    format_accuracy_table,
    format_confusion,
    format_pairwise_t,
    format_per_class_table,
    kappa,
    majority_learner,
    make_fold_plan,
    per_class_metrics,
)
from .synth import SynthParams, generate

__all__ = ["main"]


class CommandError(Exception):
    """User-facing failure; the message goes to stderr and exit status is 2."""


def _parse_groups(raw: str) -> frozenset:
    if raw == "all":
        return frozenset(FeatureGroup)
    by_value = {g.value: g for g in FeatureGroup}
    groups = set()
    for token in raw.split(","):
        token = token.strip()
        if token not in by_value:
            raise CommandError(
                f"unknown feature group {token!r}; use any of "
                f"{','.join(sorted(by_value))} or 'all'"
            )
        groups.add(by_value[token])
    return frozenset(groups)


def _parse_focus(raw: str | None) -> FocusModel | None:
    if raw is None:
        return None
    by_value = {m.value: m for m in FocusModel}
    if raw not in by_value:
        raise CommandError(f"unknown focus model {raw!r}; use seg, 1utt or 5utt")
    return by_value[raw]


def _load_corpus(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandError(f"cannot read corpus file: {exc}")
    try:
        return parse_corpus(text, check=False)
    except CorpusSyntaxError as exc:
        raise CommandError(f"{path}: {exc}")


def _load_rules(spec: str):
    if spec.startswith("@"):
        try:
            return builtin_rules(spec[1:])
        except ValueError as exc:
            raise CommandError(str(exc))
    try:
        return parse_rulelist(Path(spec).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CommandError(f"cannot read rules file: {exc}")
    except ValueError as exc:
        raise CommandError(f"{spec}: {exc}")


def _checked_corpus(path: str):
    corpus = _load_corpus(path)
    violations = validate(corpus)
    if violations:
        raise CommandError(
            f"{path}: corpus has {len(violations)} invariant violation(s); "
            f"run 'descsel validate' for the report"
        )
    return corpus


def _write_or_print(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# subcommands

def cmd_validate(args) -> int:
    corpus = _load_corpus(args.corpus)
    violations = validate(corpus)
    for v in violations:
        print(v)
    n_mentions = sum(len(u.mentions) for d in corpus.dialogues for u in d.utterances)
    print(f"{args.corpus}: {len(corpus.dialogues)} dialogue(s), {n_mentions} mention(s), "
          f"{len(violations)} violation(s)")
    return 1 if violations else 0


def _extract_for(corpus, groups, focus):
    if FeatureGroup.CONTRAST in groups and focus is None:
        raise CommandError("--focus is required when the contrast group is selected")
    return extract_examples(corpus, groups=groups, focus_model=focus)


def cmd_extract(args) -> int:
    corpus = _checked_corpus(args.corpus)
    groups = _parse_groups(args.groups)
    focus = _parse_focus(args.focus)
    examples = _extract_for(corpus, groups, focus)
    if args.out is None:
        write_dataset(examples, sys.stdout)
    else:
        write_dataset(examples, args.out)
        print(f"wrote {len(examples)} examples to {args.out}")
    return 0


def _dataset_examples(path: str):
    try:
        vectors, labels = read_dataset(path)
    except OSError as exc:
        raise CommandError(f"cannot read dataset: {exc}")
    except ValueError as exc:
        raise CommandError(f"{path}: {exc}")
    if labels is None:
        return [Example(v, label="") for v in vectors], False
    return [Example(v, lbl) for v, lbl in zip(vectors, labels)], True


def cmd_train(args) -> int:
    if (args.data is None) == (args.corpus is None):
        raise CommandError("train needs exactly one of --data or --corpus")
    if args.data:
        examples, labelled = _dataset_examples(args.data)
        if not labelled:
            raise CommandError("training dataset has no class column")
    else:
        corpus = _checked_corpus(args.corpus)
        examples = _extract_for(corpus, _parse_groups(args.groups),
                                _parse_focus(args.focus))
    params = LearnerParams(
        noise_correction=args.noise_correction,
        min_coverage=args.min_coverage,
        rng_seed=args.seed,
    )
    rule_list = train(examples, params)
    text = format_rulelist(rule_list)
    _write_or_print(text, args.out)
    fit = accuracy([ex.label for ex in examples],
                   [classify(rule_list, ex.vector) for ex in examples])
    print(f"learned {len(rule_list.rules)} rule(s), default {rule_list.default_label}, "
          f"training accuracy {fit:.3f}", file=sys.stderr)
    return 0


def cmd_predict(args) -> int:
    rule_list = _load_rules(args.rules)
    examples, labelled = _dataset_examples(args.data)
    predictions = [classify(rule_list, ex.vector) for ex in examples]
    _write_or_print("".join(p + "\n" for p in predictions), args.out)
    if labelled and examples:
        gold = [ex.label for ex in examples]
        print(f"exact-match accuracy: {accuracy(gold, predictions):.4f}")
        matrix = ConfusionMatrix.from_pairs(gold, predictions)
        print(format_per_class_table(per_class_metrics(matrix), labels=matrix.labels),
              end="")
        print(format_confusion(matrix), end="")
    return 0


def cmd_experiment(args) -> int:
    corpus = _checked_corpus(args.corpus)
    configs = []
    for raw in args.config:
        name, sep, rest = raw.partition("=")
        if not sep:
            raise CommandError(f"config must look like NAME=groups[/focus], got {raw!r}")
        group_part, sep, focus_part = rest.partition("/")
        configs.append((name, _parse_groups(group_part),
                        _parse_focus(focus_part if sep else None)))

    runs = []
    plan = None
    for name, groups, focus in configs:
        examples = _extract_for(corpus, groups, focus)
        if plan is None:
            plan = make_fold_plan(len(examples), args.k, args.seed)
        if not runs:  # baseline shares the first extraction's labels
            runs.append(("MAJORITY", cross_validate(
                examples, plan=plan, learner=majority_learner)))
        params = LearnerParams(noise_correction=args.noise_correction,
                               rng_seed=args.seed)
        runs.append((name, cross_validate(examples, params, plan=plan)))

    names = [name for name, _ in runs]
    results = [r for _, r in runs]
    report = format_accuracy_table(runs)
    tmatrix = format_pairwise_t(names, results) if len(runs) > 1 else ""
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "accuracy.txt").write_text(report, encoding="utf-8")
        (out / "accuracy.csv").write_text(
            format_accuracy_table(runs, csv=True), encoding="utf-8")
        if tmatrix:
            (out / "paired_t.txt").write_text(tmatrix, encoding="utf-8")
        print(f"wrote report to {out}")
    print(report, end="")
    if tmatrix:
        print()
        print(tmatrix, end="")
    return 0


def cmd_synth(args) -> int:
    policy = _load_rules(args.policy) if args.policy else None
    try:
        params = SynthParams(
            seed=args.seed,
            n_dialogues=args.dialogues,
            policy=policy,
            label_noise=args.noise,
        )
        corpus = generate(params)
    except ValueError as exc:
        raise CommandError(str(exc))
    text = serialize_corpus(corpus)
    _write_or_print(text, args.out)
    if args.out:
        mentions = sum(len(u.mentions) for d in corpus.dialogues for u in d.utterances)
        print(f"wrote {len(corpus.dialogues)} dialogues, {mentions} mentions to {args.out}")
    return 0


def _read_labels(path: str) -> list[str]:
    try:
        return [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()
                if ln.strip()]
    except OSError as exc:
        raise CommandError(f"cannot read label file: {exc}")


def cmd_metrics(args) -> int:
    gold = _read_labels(args.gold)
    pred = _read_labels(args.pred)
    if len(gold) != len(pred):
        raise CommandError(f"gold has {len(gold)} labels, predictions {len(pred)}")
    if not gold:
        raise CommandError("label files are empty")
    print(f"exact-match accuracy: {accuracy(gold, pred):.4f}")
    print(f"kappa: {kappa(gold, pred):.4f}")
    matrix = ConfusionMatrix.from_pairs(gold, pred)
    print(format_per_class_table(per_class_metrics(matrix), labels=matrix.labels), end="")
    print(format_confusion(matrix), end="")
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="descsel",
        description="Content selection for object descriptions in dialogue: "
                    "corpus tooling, feature extraction, rule induction, evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a corpus file")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("extract", help="extract a feature dataset from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--groups", default="all",
                   help="comma list of fam,inh,cp,contrast,iinf (default all)")
    p.add_argument("--focus", help="seg | 1utt | 5utt (needed with contrast)")
    p.add_argument("--out", help="dataset file (default stdout)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="learn a rule list")
    p.add_argument("--data", help="dataset file from 'extract'")
    p.add_argument("--corpus", help="corpus file (extracts in-process)")
    p.add_argument("--groups", default="all")
    p.add_argument("--focus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-correction", action="store_true")
    p.add_argument("--min-coverage", type=int, default=1)
    p.add_argument("--out", help="rule file (default stdout)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify a dataset with a rule list")
    p.add_argument("--rules", required=True, help="rule file, @fig14, or @fig16")
    p.add_argument("--data", required=True)
    p.add_argument("--out", help="prediction file (default stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("experiment", help="cross-validate feature configurations")
    p.add_argument("--corpus", required=True)
    p.add_argument("--config", action="append", required=True,
                   metavar="NAME=groups[/focus]",
                   help="e.g. IINF=fam,iinf or ALL-SEG=all/seg (repeatable)")
    p.add_argument("--k", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-correction", action="store_true")
    p.add_argument("--out", help="report directory")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dialogues", type=int, default=13)
    p.add_argument("--noise", type=float, default=0.0, help="label noise fraction")
    p.add_argument("--policy", help="planted policy rule file (default built-in)")
    p.add_argument("--out", help="corpus file (default stdout)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("metrics", help="score predictions against gold labels")
    p.add_argument("--gold", required=True, help="file with one gold label per line")
    p.add_argument("--pred", required=True, help="file with one predicted label per line")
    p.set_defaults(func=cmd_metrics)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"descsel: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
