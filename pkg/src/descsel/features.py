"""The 82-feature representation of a mention in context, and its class label.

Features fall into five groups:

* FAMILIARITY - what is already mutually known about the entity;
* INHERENT    - task/speaker particulars and the entity's attribute values;
* CP          - reuse of previous descriptions of the same entity;
* CONTRAST    - how the entity differs from currently salient distractors;
* IINF        - problem-solving state: constraint changes, agreement moves,
  and solution contrasts.

Values are ``yes``/``no``/``na`` for booleans, plain tokens for symbolic
features, and ints for numerics.  ``na`` marks "no such value exists" and
is itself testable by rule conditions.  Unknown values of the two numeric
entity attributes (price, quantity) are encoded as ``-1`` so that rules
can threshold on "not yet known"; numeric features that measure distances
use ``na`` when there is no antecedent event, except the agreement-state
distances which use ``-1`` ("no state yet" must satisfy <= 0 tests).

The class label encodes which of color/price/owner/quantity the mention
chose to express explicitly; ``type`` is dropped and an empty remainder is
labelled ``T``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .corpus import ATTRIBUTES, Corpus, Dialogue, DURecord, MentionRecord, Utterance
from .discourse import DialogueModel, EntitySnapshot, absolute_owner, relative_owner
from .focus import DistractorSet, FocusModel, distractor_index

__all__ = [
    "AGREEMENT_STATES",
    "CLASS_ORDER",
    "NA",
    "AgreementIndex",
    "Example",
    "FeatureGroup",
    "FeatureRegistry",
    "REGISTRY",
    "attrs_for_label",
    "contrast_features",
    "derive_agreement_state",
    "encode_class",
    "extract_examples",
    "familiarity_features",
    "inherent_features",
    "iinf_features",
    "pact_features",
    "read_dataset",
    "write_dataset",
]

NA = "na"


class FeatureGroup(enum.Enum):
    FAMILIARITY = "fam"
    INHERENT = "inh"
    CP = "cp"
    CONTRAST = "contrast"
    IINF = "iinf"


ALL_GROUPS = frozenset(FeatureGroup)

_BOOL, _SYM, _NUM = "boolean", "symbolic", "numeric"

_ENTRIES = [
    # -- assumed familiarity --------------------------------------------
    ("type-mk", FeatureGroup.FAMILIARITY, _BOOL),
    ("color-mk", FeatureGroup.FAMILIARITY, _BOOL),
    ("owner-mk", FeatureGroup.FAMILIARITY, _BOOL),
    ("price-mk", FeatureGroup.FAMILIARITY, _BOOL),
    ("quantity-mk", FeatureGroup.FAMILIARITY, _BOOL),
    ("reference-relation", FeatureGroup.FAMILIARITY, _SYM),
    # -- inherent ---------------------------------------------------------
    ("utterance-number", FeatureGroup.INHERENT, _NUM),
    ("speaker-pair", FeatureGroup.INHERENT, _SYM),
    ("speaker", FeatureGroup.INHERENT, _SYM),
    ("problem-number", FeatureGroup.INHERENT, _NUM),
    ("type", FeatureGroup.INHERENT, _SYM),
    ("color", FeatureGroup.INHERENT, _SYM),
    ("owner", FeatureGroup.INHERENT, _SYM),
    ("price", FeatureGroup.INHERENT, _NUM),
    ("quantity", FeatureGroup.INHERENT, _NUM),
    # -- conceptual pact ---------------------------------------------------
    ("distance-last-ref", FeatureGroup.CP, _NUM),
    ("distance-last-ref-in-turns", FeatureGroup.CP, _NUM),
    ("number-prev-mentions", FeatureGroup.CP, _NUM),
    ("speaker-of-last-ref", FeatureGroup.CP, _SYM),
    ("distance-last-related", FeatureGroup.CP, _NUM),
    ("color-in-last-exp", FeatureGroup.CP, _BOOL),
    ("type-in-last-exp", FeatureGroup.CP, _BOOL),
    ("owner-in-last-exp", FeatureGroup.CP, _BOOL),
    ("price-in-last-exp", FeatureGroup.CP, _BOOL),
    ("quantity-in-last-exp", FeatureGroup.CP, _BOOL),
    ("type-in-last-turn", FeatureGroup.CP, _BOOL),
    ("color-in-last-turn", FeatureGroup.CP, _BOOL),
    ("owner-in-last-turn", FeatureGroup.CP, _BOOL),
    ("price-in-last-turn", FeatureGroup.CP, _BOOL),
    ("quantity-in-last-turn", FeatureGroup.CP, _BOOL),
    ("initial-in-last-turn", FeatureGroup.CP, _BOOL),
    ("freq-type-expressed", FeatureGroup.CP, _NUM),
    ("freq-color-expressed", FeatureGroup.CP, _NUM),
    ("freq-price-expressed", FeatureGroup.CP, _NUM),
    ("freq-owner-expressed", FeatureGroup.CP, _NUM),
    ("freq-quantity-expressed", FeatureGroup.CP, _NUM),
    ("cp-given-last-2", FeatureGroup.CP, _SYM),
    ("cp-given-last-3", FeatureGroup.CP, _SYM),
    # -- contrast set -----------------------------------------------------
    ("type-distractors", FeatureGroup.CONTRAST, _NUM),
    ("color-distractors", FeatureGroup.CONTRAST, _NUM),
    ("owner-distractors", FeatureGroup.CONTRAST, _NUM),
    ("price-distractors", FeatureGroup.CONTRAST, _NUM),
    ("quantity-distractors", FeatureGroup.CONTRAST, _NUM),
    ("majority-type", FeatureGroup.CONTRAST, _SYM),
    ("majority-type-freq", FeatureGroup.CONTRAST, _NUM),
    ("majority-color", FeatureGroup.CONTRAST, _SYM),
    ("majority-color-freq", FeatureGroup.CONTRAST, _NUM),
    ("majority-price", FeatureGroup.CONTRAST, _NUM),
    ("majority-price-freq", FeatureGroup.CONTRAST, _NUM),
    ("majority-owner", FeatureGroup.CONTRAST, _SYM),
    ("majority-owner-freq", FeatureGroup.CONTRAST, _NUM),
    ("majority-quantity", FeatureGroup.CONTRAST, _NUM),
    ("majority-quantity-freq", FeatureGroup.CONTRAST, _NUM),
    # -- intentional influences --------------------------------------------
    ("goal", FeatureGroup.IINF, _SYM),
    ("colormatch", FeatureGroup.IINF, _BOOL),
    ("colormatch-constraintpresence", FeatureGroup.IINF, _SYM),
    ("pricelimit", FeatureGroup.IINF, _BOOL),
    ("pricelimit-constraintpresence", FeatureGroup.IINF, _SYM),
    ("priceevaluator", FeatureGroup.IINF, _BOOL),
    ("priceevaluator-constraintpresence", FeatureGroup.IINF, _SYM),
    ("colorlimit", FeatureGroup.IINF, _BOOL),
    ("colorlimit-constraintpresence", FeatureGroup.IINF, _SYM),
    ("priceupperlimit", FeatureGroup.IINF, _BOOL),
    ("priceupperlimit-constraintpresence", FeatureGroup.IINF, _SYM),
    ("influence-on-listener", FeatureGroup.IINF, _SYM),
    ("commit-speaker", FeatureGroup.IINF, _SYM),
    ("solution-size", FeatureGroup.IINF, _SYM),
    ("prev-influence-on-listener", FeatureGroup.IINF, _SYM),
    ("prev-commit-speaker", FeatureGroup.IINF, _SYM),
    ("prev-solution-size", FeatureGroup.IINF, _SYM),
    ("distance-of-last-state-in-utterances", FeatureGroup.IINF, _NUM),
    ("distance-of-last-state-in-turns", FeatureGroup.IINF, _NUM),
    ("ref-made-in-prev-action-state", FeatureGroup.IINF, _BOOL),
    ("speaker-of-last-state", FeatureGroup.IINF, _SYM),
    ("prev-ref-state", FeatureGroup.IINF, _SYM),
    ("prev-state-type-expressed", FeatureGroup.IINF, _BOOL),
    ("prev-state-color-expressed", FeatureGroup.IINF, _BOOL),
    ("prev-state-owner-expressed", FeatureGroup.IINF, _BOOL),
    ("prev-state-price-expressed", FeatureGroup.IINF, _BOOL),
    ("prev-state-quantity-expressed", FeatureGroup.IINF, _BOOL),
    ("color-contrast", FeatureGroup.IINF, _BOOL),
    ("price-contrast", FeatureGroup.IINF, _BOOL),
]


@dataclass(frozen=True)
class FeatureRegistry:
    """Ordered feature catalogue: names, groups and value types."""

    entries: tuple

    @property
    def names(self):
        return [name for name, _, _ in self.entries]

    def group_of(self, name):
        return self._by_name()[name][0]

    def type_of(self, name):
        return self._by_name()[name][1]

    def _by_name(self):
        cache = getattr(self, "_cache", None)
        if cache is None:
            cache = {name: (group, ftype) for name, group, ftype in self.entries}
            object.__setattr__(self, "_cache", cache)
        return cache

    def names_in(self, groups) -> set:
        return {name for name, group, _ in self.entries if group in groups}

    def validate_vector(self, values) -> list[str]:
        """Input-validation helper: returns a list of problems (empty if fine)."""
        problems = []
        names = set(self.names)
        for extra in sorted(set(values) - names):
            problems.append(f"unknown feature {extra!r}")
        for missing in sorted(names - set(values)):
            problems.append(f"missing feature {missing!r}")
        for name, group, ftype in self.entries:
            if name not in values:
                continue
            v = values[name]
            if ftype == _BOOL and v not in ("yes", "no", NA):
                problems.append(f"{name}: boolean value must be yes/no/na, got {v!r}")
            elif ftype == _NUM and not (isinstance(v, (int, float)) or v == NA):
                problems.append(f"{name}: numeric value must be a number or na, got {v!r}")
            elif ftype == _SYM and not isinstance(v, str):
                problems.append(f"{name}: symbolic value must be a token, got {v!r}")
        return problems


REGISTRY = FeatureRegistry(tuple(_ENTRIES))

_EXPECTED_SIZES = {
    FeatureGroup.FAMILIARITY: 6,
    FeatureGroup.INHERENT: 9,
    FeatureGroup.CP: 23,
    FeatureGroup.CONTRAST: 15,
    FeatureGroup.IINF: 29,
}
for _group, _size in _EXPECTED_SIZES.items():
    assert len(REGISTRY.names_in({_group})) == _size, _group
assert len(REGISTRY.entries) == 82


# ---------------------------------------------------------------------------
# class labels

CLASS_ORDER = (
    "CPQ", "CPO", "CPOQ", "T", "CP", "O", "CO", "C",
    "CQ", "COQ", "OQ", "PO", "Q", "P", "PQ", "POQ",
)

_LETTER_FOR_ATTR = (("color", "C"), ("price", "P"), ("owner", "O"), ("quantity", "Q"))


def encode_class(explicit_attrs) -> str:
    """Map a mention's explicit attribute set to its class label.

    ``type`` is dropped; the remaining attributes map to a fixed-order
    letter code; the empty remainder is ``T``.
    """
    letters = "".join(letter for attr, letter in _LETTER_FOR_ATTR if attr in explicit_attrs)
    return letters or "T"


def attrs_for_label(label: str) -> frozenset:
    """Inverse of :func:`encode_class` (without ``type``)."""
    if label == "T":
        return frozenset()
    by_letter = {letter: attr for attr, letter in _LETTER_FOR_ATTR}
    try:
        return frozenset(by_letter[ch] for ch in label)
    except KeyError:
        raise ValueError(f"unknown class label {label!r}") from None


@dataclass(frozen=True)
class Example:
    """A labelled feature vector plus where it came from."""

    vector: dict
    label: str
    provenance: tuple | None = None   # (dialogue id, utterance number, mention id)


# ---------------------------------------------------------------------------
# per-group extractors

def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


def familiarity_features(snapshot: EntitySnapshot, mention: MentionRecord) -> dict:
    out = {f"{a}-mk": _yesno(snapshot.mutually_known[a]) for a in ATTRIBUTES}
    out["reference-relation"] = mention.reference_relation
    return out


def _merged_values(snapshot: EntitySnapshot, mention: MentionRecord,
                   speaker: str, pair) -> dict:
    """Accumulated knowledge plus the current mention's values (owner absolute)."""
    merged = dict(snapshot.known_before)
    for attr, value in mention.attribute_values.items():
        if attr == "owner":
            value = absolute_owner(value, speaker, pair)
        if value != "unk":
            merged[attr] = value
        else:
            merged.setdefault(attr, "unk")
    return merged


def inherent_features(dialogue: Dialogue, utterance: Utterance,
                      mention: MentionRecord, snapshot: EntitySnapshot) -> dict:
    merged = _merged_values(snapshot, mention, utterance.speaker, dialogue.speaker_pair)
    out = {
        "utterance-number": utterance.number,
        "speaker-pair": "-".join(sorted(dialogue.speaker_pair)),
        "speaker": utterance.speaker,
        "problem-number": dialogue.problem_number,
        "type": merged.get("type", "unk"),
        "color": merged.get("color", "unk"),
        "owner": relative_owner(merged.get("owner", "unk"), utterance.speaker),
    }
    for attr in ("price", "quantity"):
        value = merged.get(attr, "unk")
        out[attr] = -1 if value == "unk" else value
    return out


def contrast_features(target_values: dict, ds: DistractorSet, speaker: str) -> dict:
    """Distractor counts and per-attribute majority values.

    ``target_values`` is the described entity's value map with owner in
    absolute form (see :func:`_merged_values`); distractor snapshots carry
    the same form, so owner comparisons are perspective-free.  Majority
    owners are reported relative to ``speaker``.
    """
    out = {}
    for attr in ATTRIBUTES:
        known = [s.known_before[attr] for s in ds
                 if s.known_before.get(attr) not in (None, "unk")]
        target = target_values.get(attr)
        if target in (None, "unk"):
            differing = 0
        else:
            differing = sum(1 for v in known if v != target)
        out[f"{attr}-distractors"] = differing

        if attr == "owner":
            known = [relative_owner(v, speaker) for v in known]
        if not known:
            out[f"majority-{attr}"] = NA
            out[f"majority-{attr}-freq"] = 0
            continue
        counts: dict = {}
        for v in known:
            counts[v] = counts.get(v, 0) + 1
        best = max(counts.values())
        candidates = [v for v, c in counts.items() if c == best]
        if attr in ("price", "quantity"):
            modal = min(candidates)
        else:
            modal = min(candidates, key=str)
        out[f"majority-{attr}"] = modal
        out[f"majority-{attr}-freq"] = best
    return out


def pact_features(model: DialogueModel, position: int) -> dict:
    """How the entity was described before: recency, reuse, and stability."""
    event = model.events[position]
    entity_id = event.record.entity_id
    prior = model.entity_events_before(entity_id, position)
    out: dict = {}

    if prior:
        last = prior[-1]
        out["distance-last-ref"] = event.utterance - last.utterance
        out["distance-last-ref-in-turns"] = event.turn - last.turn
        out["speaker-of-last-ref"] = "self" if last.speaker == event.speaker else "other"
    else:
        out["distance-last-ref"] = NA
        out["distance-last-ref-in-turns"] = NA
        out["speaker-of-last-ref"] = NA
    out["number-prev-mentions"] = len(prior)

    related = [
        e for eid in event.record.linked_entities
        for e in model.entity_events_before(eid, position)
    ]
    out["distance-last-related"] = (
        event.utterance - max(e.utterance for e in related) if related else NA
    )

    if prior:
        last_exp = prior[-1].record.explicit_attrs
        last_turn = prior[-1].turn
        in_turn = frozenset().union(
            *(e.record.explicit_attrs for e in prior if e.turn == last_turn)
        )
        for a in ATTRIBUTES:
            out[f"{a}-in-last-exp"] = _yesno(a in last_exp)
            out[f"{a}-in-last-turn"] = _yesno(a in in_turn)
        out["initial-in-last-turn"] = _yesno(prior[0].turn == last_turn)
    else:
        for a in ATTRIBUTES:
            out[f"{a}-in-last-exp"] = NA
            out[f"{a}-in-last-turn"] = NA
        out["initial-in-last-turn"] = NA

    for a in ATTRIBUTES:
        out[f"freq-{a}-expressed"] = sum(1 for e in prior if a in e.record.explicit_attrs)

    codes = [encode_class(e.record.explicit_attrs) for e in prior]
    for depth in (2, 3):
        window = codes[-depth:]
        shared = window[0] if len(window) == depth and len(set(window)) == 1 else "none"
        out[f"cp-given-last-{depth}"] = shared
    return out


# ---------------------------------------------------------------------------
# intentional influences

AGREEMENT_STATES = (
    "propose", "partner-decidable-option", "unconditional-commit",
    "unendorsed-option", "statement",
)

_CONSTRAINT_FEATURE = {
    "dropcolormatch": "colormatch",
    "pricelimit": "pricelimit",
    "priceevaluator": "priceevaluator",
    "colorlimit": "colorlimit",
    "priceupperlimit": "priceupperlimit",
}


def derive_agreement_state(du: DURecord, solution_size: str) -> str:
    """Classify an utterance's negotiation move from its DU and solution size."""
    if du.influence_on_speaker == "offer":
        if solution_size == "determinate":
            return "propose"
        if solution_size == "indeterminate":
            return "partner-decidable-option"
    if du.influence_on_speaker == "commit":
        return "unconditional-commit"
    if du.influence_on_listener == "open-option" and solution_size == "determinate":
        return "unendorsed-option"
    return "statement"


class AgreementIndex:
    """Per-dialogue timeline of agreement states and constraint changes."""

    def __init__(self, model: DialogueModel):
        self.model = model
        dialogue = model.dialogue
        self.utterances = dialogue.utterances
        self.index_of = {u.number: i for i, u in enumerate(self.utterances)}

        self.sizes: list[str] = []
        last_size = NA
        for u in self.utterances:
            if u.ps:
                last_size = u.ps[0].solution_size
            self.sizes.append(last_size)

        self.states = [
            derive_agreement_state(u.effective_du(), self.sizes[i])
            for i, u in enumerate(self.utterances)
        ]
        self.critical = [s != "statement" for s in self.states]

        # constraint change events in document order: (feature, presence, index)
        self.changes: list[tuple[str, str, int]] = []
        for i, u in enumerate(self.utterances):
            for ps in u.ps:
                if ps.constraint_change != "none":
                    self.changes.append(
                        (_CONSTRAINT_FEATURE[ps.constraint_change], ps.constraint_presence, i)
                    )

        self.mentions_by_index = [
            {m.entity_id for m in u.mentions} for u in self.utterances
        ]
        self.explicit_by_index = [
            {m.entity_id: m.explicit_attrs for m in u.mentions} for u in self.utterances
        ]

    def utterance_size(self, idx: int, goal_id: str | None = None) -> str:
        """Solution size at an utterance, preferring the PS record of ``goal_id``."""
        u = self.utterances[idx]
        if goal_id is not None:
            for ps in u.ps:
                if ps.goal_id == goal_id:
                    return ps.solution_size
        return self.sizes[idx]

    def last_state_at_or_before(self, idx: int) -> int | None:
        for i in range(idx, -1, -1):
            if self.critical[i]:
                return i
        return None

    def last_state_before(self, idx: int) -> int | None:
        return self.last_state_at_or_before(idx - 1) if idx > 0 else None

    def goal_label(self, goal_id: str, idx: int) -> str:
        """The annotated label of a goal as of an utterance (latest PS wins)."""
        label = NA
        for i in range(idx + 1):
            for ps in self.utterances[i].ps:
                if ps.goal_id == goal_id:
                    label = ps.goal_label
        return label


def _partial_solution(index: AgreementIndex, upto_idx: int):
    """Estimate agreed items and open alternatives from agreement states.

    Entities are tracked by their last mention in a critical-state
    utterance strictly before ``upto_idx``: committed entities form the
    agreed set; entities proposed since the last commitment are the
    alternatives still on the table.
    """
    last_touch: dict[str, tuple[str, int]] = {}
    last_commit = -1
    for i in range(upto_idx):
        if not index.critical[i]:
            continue
        state = index.states[i]
        if state == "unconditional-commit":
            last_commit = i
        for eid in index.mentions_by_index[i]:
            last_touch[eid] = (state, i)
    agreed = {eid for eid, (s, _) in last_touch.items() if s == "unconditional-commit"}
    alternatives = {
        eid for eid, (s, i) in last_touch.items()
        if s in ("propose", "partner-decidable-option") and i > last_commit
    }
    return agreed, alternatives


def iinf_features(index: AgreementIndex, position: int) -> dict:
    model = index.model
    event = model.events[position]
    record = event.record
    idx = index.index_of[event.utterance]
    utterance = index.utterances[idx]
    out: dict = {}

    # task situation: cumulative constraint changes up to this utterance
    out["goal"] = index.goal_label(record.goal_id, idx)
    latest = {}
    for feature, presence, i in index.changes:
        if i <= idx:
            latest[feature] = presence
    for feature in ("colormatch", "pricelimit", "priceevaluator", "colorlimit",
                    "priceupperlimit"):
        if feature in latest:
            out[feature] = "yes"
            out[f"{feature}-constraintpresence"] = latest[feature]
        else:
            out[feature] = "no"
            out[f"{feature}-constraintpresence"] = NA

    # agreement state, current and previous utterance
    du = utterance.effective_du()
    out["influence-on-listener"] = du.influence_on_listener
    out["commit-speaker"] = du.influence_on_speaker
    out["solution-size"] = index.utterance_size(idx, record.goal_id)
    if idx > 0:
        prev_du = index.utterances[idx - 1].effective_du()
        out["prev-influence-on-listener"] = prev_du.influence_on_listener
        out["prev-commit-speaker"] = prev_du.influence_on_speaker
        out["prev-solution-size"] = index.sizes[idx - 1]
    else:
        out["prev-influence-on-listener"] = NA
        out["prev-commit-speaker"] = NA
        out["prev-solution-size"] = NA

    # distances to the most recent critical agreement state (current included);
    # -1 when no state has occurred yet
    last_state = index.last_state_at_or_before(idx)
    if last_state is None:
        out["distance-of-last-state-in-utterances"] = -1
        out["distance-of-last-state-in-turns"] = -1
        out["speaker-of-last-state"] = NA
    else:
        state_utt = index.utterances[last_state]
        out["distance-of-last-state-in-utterances"] = utterance.number - state_utt.number
        out["distance-of-last-state-in-turns"] = (
            model.turn_of(utterance.number) - model.turn_of(state_utt.number)
        )
        out["speaker-of-last-state"] = (
            "self" if state_utt.speaker == utterance.speaker else "other"
        )

    prev_state = index.last_state_before(idx)
    if prev_state is None:
        out["ref-made-in-prev-action-state"] = NA
    else:
        out["ref-made-in-prev-action-state"] = _yesno(
            record.entity_id in index.mentions_by_index[prev_state]
        )

    # agreement state of the utterance holding the entity's previous mention
    prior = model.entity_events_before(record.entity_id, position)
    if prior:
        out["prev-ref-state"] = index.states[index.index_of[prior[-1].utterance]]
    else:
        out["prev-ref-state"] = NA

    # what the entity's description expressed at its last critical state
    state_idx = None
    for i in range(idx - 1, -1, -1):
        if index.critical[i] and record.entity_id in index.mentions_by_index[i]:
            state_idx = i
            break
    if state_idx is None:
        for a in ATTRIBUTES:
            out[f"prev-state-{a}-expressed"] = NA
    else:
        expressed = index.explicit_by_index[state_idx][record.entity_id]
        for a in ATTRIBUTES:
            out[f"prev-state-{a}-expressed"] = _yesno(a in expressed)

    # solution interactions
    agreed, alternatives = _partial_solution(index, idx)
    alternatives.discard(record.entity_id)
    known = model.states[position]
    snapshot = model.snapshot_at(position)
    target = _merged_values(snapshot, record, utterance.speaker,
                            model.dialogue.speaker_pair)

    def known_values(eids, attr):
        vals = []
        for eid in eids:
            v = known.get(eid, {}).get(attr)
            if v not in (None, "unk"):
                vals.append(v)
        return vals

    color = target.get("color")
    alt_colors = known_values(alternatives, "color")
    agreed_colors = known_values(agreed, "color")
    out["color-contrast"] = _yesno(
        color not in (None, "unk")
        and color in agreed_colors
        and bool(alt_colors)
        and color not in alt_colors
    )

    price = target.get("price")
    alt_prices = known_values(alternatives, "price")
    nearly_complete = len(known_values(agreed, "price")) >= 2
    out["price-contrast"] = _yesno(
        price not in (None, "unk")
        and bool(alt_prices)
        and (price < min(alt_prices) or (nearly_complete and price > max(alt_prices)))
    )
    return out


# ---------------------------------------------------------------------------
# extraction

def extract_examples(
    corpus: Corpus,
    groups=ALL_GROUPS,
    focus_model: FocusModel | None = None,
) -> list[Example]:
    """One Example per mention, in (dialogue, utterance, mention) order.

    Features outside ``groups`` are set to ``na``.  A focus model is
    required when the CONTRAST group is selected, since distractor sets
    depend on it.
    """
    groups = frozenset(groups)
    if FeatureGroup.CONTRAST in groups and focus_model is None:
        raise ValueError("the CONTRAST feature group needs a focus model")
    active = REGISTRY.names_in(groups)
    examples = []
    for dialogue in corpus.dialogues:
        model = DialogueModel(dialogue)
        index = AgreementIndex(model) if FeatureGroup.IINF in groups else None
        focus = distractor_index(model) if FeatureGroup.CONTRAST in groups else None
        utt_by_number = {u.number: u for u in dialogue.utterances}
        for event in model.events:
            snapshot = model.snapshot_at(event.position)
            utterance = utt_by_number[event.utterance]
            vector: dict = {}
            if FeatureGroup.FAMILIARITY in groups:
                vector.update(familiarity_features(snapshot, event.record))
            if FeatureGroup.INHERENT in groups:
                vector.update(inherent_features(dialogue, utterance, event.record, snapshot))
            if FeatureGroup.CP in groups:
                vector.update(pact_features(model, event.position))
            if FeatureGroup.CONTRAST in groups:
                ds = focus.set_at(event.position, focus_model)
                target = _merged_values(snapshot, event.record, utterance.speaker,
                                        dialogue.speaker_pair)
                vector.update(contrast_features(target, ds, utterance.speaker))
            if FeatureGroup.IINF in groups:
                vector.update(iinf_features(index, event.position))
            full = {name: vector.get(name, NA) if name in active else NA
                    for name in REGISTRY.names}
            examples.append(Example(
                vector=full,
                label=encode_class(event.record.explicit_attrs),
                provenance=(dialogue.id, event.utterance, event.record.mention_id),
            ))
    return examples


# ---------------------------------------------------------------------------
# dataset files

def write_dataset(examples, out) -> None:
    """Write examples as comma-separated rows under an 82-name + class header."""
    close = False
    if isinstance(out, (str, bytes)) or hasattr(out, "__fspath__"):
        out = open(out, "w", encoding="utf-8")
        close = True
    try:
        out.write(",".join(REGISTRY.names + ["class"]) + "\n")
        for ex in examples:
            row = [_format_value(ex.vector[name]) for name in REGISTRY.names]
            row.append(ex.label)
            out.write(",".join(row) + "\n")
    finally:
        if close:
            out.close()


def _format_value(v) -> str:
    if isinstance(v, bool):
        raise TypeError("boolean features must be yes/no/na tokens")
    return str(v)


def _parse_value(name: str, raw: str):
    if raw == NA:
        return NA
    if REGISTRY.type_of(name) == _NUM:
        try:
            return int(raw)
        except ValueError:
            return float(raw)
    return raw


def read_dataset(source) -> tuple[list[dict], list[str] | None]:
    """Read a dataset file; returns (vectors, labels-or-None).

    The header must list the 82 registry names in order, optionally
    followed by ``class``; labels are None when the class column is absent.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = source.read().splitlines()
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        return [], None
    header = lines[0].split(",")
    has_class = header[-1] == "class"
    expected = REGISTRY.names + (["class"] if has_class else [])
    if header != expected:
        raise ValueError("dataset header does not match the feature registry")
    vectors, labels = [], [] if has_class else None
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(header):
            raise ValueError(f"row has {len(cells)} cells, expected {len(header)}")
        vec = {name: _parse_value(name, cell)
               for name, cell in zip(REGISTRY.names, cells)}
        vectors.append(vec)
        if has_class:
            labels.append(cells[-1])
    return vectors, labels
