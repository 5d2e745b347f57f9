"""Synthetic annotated dialogues with a planted attribute-selection policy.

The generator first lays down a plausible dialogue skeleton: goal
episodes with introduce/continue structure, alternating speaker turns,
dialogue-act and solution-size annotations, and entity mentions.  Only
then, mention by mention, it computes the context features exactly as
the extraction pipeline would and applies the planted rule policy to
decide which attributes the mention expresses.  Labels therefore derive
from features and never the other way around, so a noise-free corpus is
perfectly consistent with its policy.

The policy may only test features that do not depend on the mention's
own revealed values (familiarity, dialogue position, description
history, problem-solving state).  :data:`SAFE_POLICY_FEATURES` lists
them; :func:`generate` rejects policies that reach outside.
"""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass

from .corpus import Corpus, Dialogue, DURecord, MentionRecord, PSRecord, Utterance, validate
from .discourse import DialogueModel
from .features import (
    CLASS_ORDER,
    REGISTRY,
    AgreementIndex,
    FeatureGroup,
    attrs_for_label,
    familiarity_features,
    inherent_features,
    iinf_features,
    pact_features,
)
from .ripper import RuleList, classify, parse_rulelist

__all__ = ["SAFE_POLICY_FEATURES", "SynthParams", "default_policy", "generate"]

_SPEAKER_POOL = (
    "ALICE", "BOB", "CARA", "DANA", "EVE", "FRED", "GINA", "HUGO",
    "IRIS", "JACK", "KATE", "LEO", "MONA", "NED", "OLGA", "PETE",
)
_ITEM_TYPES = ("sofa", "chair", "table", "rug", "lamp")
_COLORS = ("red", "blue", "green", "yellow")
_GOAL_POOL = (
    "SelectSofa", "SelectTable", "SelectChairs",
    "SelectOptionalItem", "SelectOptionalItemLR", "SelectOptionalItemDR",
)
_CONSTRAINTS = ("dropcolormatch", "colorlimit", "pricelimit", "priceupperlimit",
                "priceevaluator")

# DU annotation mix; None means the utterance carries no DU record
_DU_CHOICES = (
    (("action-directive", "offer"), 18),
    (("action-directive", "commit"), 22),
    (("open-option", "na"), 10),
    (("info-request", "na"), 8),
    (("action-directive", "na"), 12),
    (("na", "commit"), 8),
    (None, 22),
)

# features a planted policy may test: everything computable without the
# mention's own attribute values (contrast features also depend on the
# focus model chosen at extraction time, so they are excluded too)
SAFE_POLICY_FEATURES = frozenset(
    REGISTRY.names_in({FeatureGroup.FAMILIARITY, FeatureGroup.CP, FeatureGroup.IINF})
    - {"color-contrast", "price-contrast"}
) | {"utterance-number", "speaker-pair", "speaker", "problem-number"}


def default_policy() -> RuleList:
    """A compact selection policy exercising several feature families."""
    return parse_rulelist(
        "IF reference-relation = initial THEN CPO\n"
        "IF commit-speaker = commit AND type-mk = yes THEN T\n"
        "IF solution-size = indeterminate THEN CO\n"
        "IF number-prev-mentions >= 3 THEN C\n"
        "DEFAULT CPQ\n"
    )


@dataclass(frozen=True)
class SynthParams:
    seed: int = 0
    n_dialogues: int = 13
    utterances_per_dialogue: tuple = (26, 40)
    entities_per_dialogue: tuple = (6, 10)
    policy: RuleList | None = None      # None selects default_policy()
    label_noise: float = 0.0

    def __post_init__(self):
        if not 0 <= self.label_noise < 1:
            raise ValueError("label_noise must be in [0, 1)")
        lo, hi = self.utterances_per_dialogue
        if not 3 <= lo <= hi:  # < 3 utterances cannot guarantee two speakers
            raise ValueError(f"infeasible utterances_per_dialogue: ({lo}, {hi})")
        lo, hi = self.entities_per_dialogue
        if not 1 <= lo <= hi:
            raise ValueError(f"infeasible entities_per_dialogue: ({lo}, {hi})")
        if self.n_dialogues < 1:
            raise ValueError("n_dialogues must be >= 1")


@dataclass
class _Item:
    entity_id: str
    type: str
    color: str
    owner: str      # owning speaker token, or "ours"
    price: int
    quantity: int


def _check_policy(policy: RuleList):
    names = {c.feature for rule in policy.rules for c in rule.conditions}
    unknown = names - set(REGISTRY.names)
    if unknown:
        raise ValueError(f"policy tests unknown features: {sorted(unknown)}")
    unsafe = names - SAFE_POLICY_FEATURES
    if unsafe:
        raise ValueError(
            f"policy tests features that depend on the mention's own values: "
            f"{sorted(unsafe)}"
        )
    for label in [r.label for r in policy.rules] + [policy.default_label]:
        attrs_for_label(label)  # raises on unknown labels


def generate(params: SynthParams) -> Corpus:
    """Build a corpus; deterministic for a given seed, always valid."""
    policy = params.policy or default_policy()
    _check_policy(policy)
    rng = random.Random(params.seed)
    dialogues = tuple(
        _generate_dialogue(f"syn{i:03d}", params, policy, rng)
        for i in range(params.n_dialogues)
    )
    corpus = Corpus(dialogues)
    violations = validate(corpus)
    if violations:  # generator bug, not user error
        raise RuntimeError(f"generated corpus fails validation: {violations[:3]}")
    return corpus


def _generate_dialogue(dialogue_id, params, policy, rng) -> Dialogue:
    speakers = tuple(rng.sample(_SPEAKER_POOL, 2))
    problem = rng.randint(1, 3)
    n_utts = rng.randint(*params.utterances_per_dialogue)
    n_entities = rng.randint(*params.entities_per_dialogue)

    items = []
    for i in range(n_entities):
        owner = rng.choice(speakers) if rng.random() < 0.9 else "ours"
        items.append(_Item(
            entity_id=f"e{i + 1}",
            type=rng.choice(_ITEM_TYPES),
            color=rng.choice(_COLORS),
            owner=owner,
            price=rng.randrange(50, 625, 25),
            quantity=rng.randint(1, 4),
        ))

    dialogue = Dialogue(dialogue_id, speakers, problem, ())
    goal_ids: list[str] = []
    goal_labels: dict[str, str] = {}
    introduced: set[str] = set()
    mentioned: set[str] = set()
    group_count = 0
    mention_count = 0

    speaker_idx = rng.randrange(2)
    turn_left = rng.randint(1, 2)
    number = 0

    while number < n_utts:
        # one goal episode: a new goal or a return to an earlier one
        if goal_ids and rng.random() < 0.3:
            goal_id = rng.choice(goal_ids)
        else:
            goal_id = f"act{len(goal_ids) + 1}"
            goal_ids.append(goal_id)
            goal_labels[goal_id] = rng.choice(_GOAL_POOL)
        episode_len = min(rng.randint(2, 5), n_utts - number)
        episode_items = rng.sample(items, k=rng.randint(1, min(3, len(items))))

        for step in range(episode_len):
            number += 1
            speaker = speakers[speaker_idx]
            turn_left -= 1
            if turn_left == 0:
                speaker_idx = 1 - speaker_idx
                turn_left = rng.randint(1, 2)

            mode = "continue" if goal_id in introduced else "introduce"
            introduced.add(goal_id)
            if rng.random() < 0.12:
                constraint = rng.choice(_CONSTRAINTS)
                presence = rng.choice(("implicit", "explicit"))
            else:
                constraint, presence = "none", None
            size = "indeterminate" if step < (episode_len + 1) // 2 else "determinate"
            ps = (PSRecord(goal_labels[goal_id], mode, goal_id, constraint, presence, size),)

            du_choice = _weighted_choice(rng, _DU_CHOICES)
            du = DURecord(*du_choice) if du_choice else None

            utterance = Utterance(number, speaker, f"turn {number} of {dialogue_id}",
                                  ps=ps, du=du, mentions=())
            dialogue = dataclasses.replace(
                dialogue, utterances=dialogue.utterances + (utterance,)
            )

            n_mentions = _weighted_choice(rng, (((0,), 25), ((1,), 55), ((2,), 20)))[0]
            for _ in range(n_mentions):
                item = rng.choice(episode_items)
                links: tuple = ()
                relation = "initial" if item.entity_id not in mentioned else "coref"
                if (relation == "coref" and len(mentioned) >= 2
                        and rng.random() < 0.05):
                    group_count += 1
                    linked = tuple(rng.sample(sorted(mentioned), 2))
                    item = _group_item(f"grp{group_count}", dialogue, linked, rng)
                    relation, links = "set", linked
                dialogue, mention = _add_mention(
                    dialogue, params, policy, rng, item, relation, links,
                    goal_id, mention_count,
                )
                mention_count += 1
                mentioned.add(mention.entity_id)
    return dialogue


def _group_item(entity_id, dialogue, linked, rng) -> _Item:
    """A set-of-items entity; where the linked entities agree on a revealed
    attribute the group inherits it, so its own values never contradict
    the discourse model's linked-entity inheritance."""
    known = DialogueModel(dialogue).states[-1]
    shared = {}
    for attr in ("type", "color", "owner", "price", "quantity"):
        values = {known.get(eid, {}).get(attr) for eid in linked}
        if len(values) == 1:
            value = values.pop()
            if value not in (None, "unk"):
                shared[attr] = value
    return _Item(
        entity_id=entity_id,
        type=shared.get("type", "superordinate"),
        color=shared.get("color", rng.choice(_COLORS)),
        owner=shared.get("owner", "ours"),
        price=shared.get("price", rng.randrange(100, 625, 25)),
        quantity=shared.get("quantity", rng.randint(2, 4)),
    )


def _weighted_choice(rng, table):
    total = sum(w for _, w in table)
    roll = rng.randrange(total)
    acc = 0
    for value, weight in table:
        acc += weight
        if roll < acc:
            return value
    raise AssertionError("unreachable")


def _context_features(dialogue: Dialogue, position: int) -> dict:
    """The feature vector the extraction pipeline will compute, minus the
    contrast group (the planted policy never needs it)."""
    model = DialogueModel(dialogue)
    index = AgreementIndex(model)
    event = model.events[position]
    snapshot = model.snapshot_at(position)
    utterance = next(u for u in dialogue.utterances if u.number == event.utterance)
    vector = familiarity_features(snapshot, event.record)
    vector.update(inherent_features(dialogue, utterance, event.record, snapshot))
    vector.update(pact_features(model, position))
    vector.update(iinf_features(index, position))
    return vector


def _add_mention(dialogue, params, policy, rng, item, relation, links,
                 goal_id, position):
    mention_id = f"x{position + 1}"
    draft = MentionRecord(mention_id, relation, item.entity_id, links,
                          {}, frozenset(), frozenset(), goal_id, "")
    probe = _with_last_mention(dialogue, draft)
    vector = _context_features(probe, position)
    label = classify(policy, vector)
    if params.label_noise and rng.random() < params.label_noise:
        label = rng.choice([c for c in CLASS_ORDER if c != label])

    explicit = attrs_for_label(label) | {"type"}
    inferred = set()
    if "quantity" not in explicit and rng.random() < 0.5:
        inferred.add("quantity")
    if "owner" not in explicit and rng.random() < 0.2:
        inferred.add("owner")

    speaker = dialogue.utterances[-1].speaker
    values = {}
    for attr in explicit | inferred:
        values[attr] = _item_value(item, attr, speaker, rng)
    surface = _surface(item, values)
    final = MentionRecord(mention_id, relation, item.entity_id, links,
                          values, frozenset(explicit), frozenset(inferred),
                          goal_id, surface)
    return _with_last_mention(dialogue, final), final


def _item_value(item: _Item, attr: str, speaker: str, rng):
    if attr == "owner":
        if item.owner == "ours":
            return "ours"
        return "self" if item.owner == speaker else "other"
    if attr == "color":
        # occasionally the color is conveyed only as "matching"
        if rng.random() < 0.06:
            return "unk"
        return item.color
    return getattr(item, attr)


def _surface(item: _Item, values: dict) -> str:
    color = values.get("color")
    bits = [str(values.get("quantity", "a"))]
    if color and color != "unk":
        bits.append(color)
    bits.append(item.type)
    if "price" in values:
        bits.append(f"for {values['price']}")
    return " ".join(bits)


def _with_last_mention(dialogue: Dialogue, mention: MentionRecord) -> Dialogue:
    last = dialogue.utterances[-1]
    updated = dataclasses.replace(last, mentions=last.mentions + (mention,))
    return dataclasses.replace(
        dialogue, utterances=dialogue.utterances[:-1] + (updated,)
    )
