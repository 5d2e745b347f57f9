"""Content selection for object descriptions in task-oriented dialogue.

The toolkit covers the full pipeline: parsing annotated two-party design
dialogues, folding them into a discourse model, deriving focus spaces
and distractor sets, producing an 82-feature representation per mention,
inducing ordered classification rules, and evaluating against the human
attribute choices with exact-match scoring, cross-validation and paired
t-tests.  A synthetic corpus generator with a planted selection policy
makes the whole pipeline testable end to end.
"""

from .corpus import (
    Corpus,
    CorpusInvariantError,
    CorpusSyntaxError,
    Dialogue,
    DURecord,
    MentionRecord,
    PSRecord,
    Utterance,
    Violation,
    parse_corpus,
    serialize_corpus,
    validate,
)
from .discourse import DialogueModel, EntitySnapshot, Turn, build_model, turn_index
from .features import (
    CLASS_ORDER,
    REGISTRY,
    Example,
    FeatureGroup,
    FeatureRegistry,
    encode_class,
    extract_examples,
    read_dataset,
    write_dataset,
)
from .focus import DistractorSet, FocusModel, Segment, distractors, segment_structure
from .ripper import (
    Condition,
    LearnerParams,
    Rule,
    RuleList,
    RuleListClassifier,
    builtin_rules,
    classify,
    foil_gain,
    format_rulelist,
    parse_rulelist,
    train,
)
from .stats import (
    ConfusionMatrix,
    CVResult,
    FoldPlan,
    cross_validate,
    kappa,
    majority_baseline,
    make_fold_plan,
    paired_t,
    per_class_metrics,
)
from .synth import SynthParams, default_policy, generate

__version__ = "0.1.0"

__all__ = [
    "CLASS_ORDER",
    "REGISTRY",
    "Condition",
    "ConfusionMatrix",
    "Corpus",
    "CorpusInvariantError",
    "CorpusSyntaxError",
    "CVResult",
    "Dialogue",
    "DialogueModel",
    "DistractorSet",
    "DURecord",
    "EntitySnapshot",
    "Example",
    "FeatureGroup",
    "FeatureRegistry",
    "FocusModel",
    "FoldPlan",
    "LearnerParams",
    "MentionRecord",
    "PSRecord",
    "Rule",
    "RuleList",
    "RuleListClassifier",
    "Segment",
    "SynthParams",
    "Turn",
    "Utterance",
    "Violation",
    "build_model",
    "builtin_rules",
    "classify",
    "cross_validate",
    "default_policy",
    "distractors",
    "encode_class",
    "extract_examples",
    "foil_gain",
    "format_rulelist",
    "generate",
    "kappa",
    "majority_baseline",
    "make_fold_plan",
    "paired_t",
    "parse_corpus",
    "parse_rulelist",
    "per_class_metrics",
    "read_dataset",
    "segment_structure",
    "serialize_corpus",
    "train",
    "turn_index",
    "validate",
    "write_dataset",
]
