"""Discourse model: fold mentions into per-entity accumulated knowledge.

Each entity's known attribute map grows as the dialogue progresses.  The
snapshot emitted for a mention reflects strictly earlier mentions only;
the mention's own contribution is absorbed afterwards, so downstream
feature extraction cannot leak the attribute choice it must predict.

Owner values are speaker-relative in the corpus annotation (``self`` /
``other``).  The model stores them in absolute form (the owning speaker's
token, or ``ours``) so that "my rug" said by G and "your rug" said by S
accumulate as one fact; consumers re-relativize for the current speaker
via :func:`relative_owner`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .corpus import ATTRIBUTES, Dialogue, MentionRecord, Utterance

__all__ = [
    "AttributeConflictWarning",
    "DialogueModel",
    "EntitySnapshot",
    "MentionEvent",
    "Turn",
    "absolute_owner",
    "build_model",
    "relative_owner",
    "turn_index",
]

INHERITING_RELATIONS = frozenset({"set", "class", "cnanaphora", "predicative"})


class AttributeConflictWarning(UserWarning):
    """Two mentions asserted different values for the same attribute."""


@dataclass(frozen=True)
class Turn:
    """A maximal run of consecutive utterances by one speaker."""

    index: int
    speaker: str
    utterances: tuple[int, ...]


@dataclass(frozen=True)
class EntitySnapshot:
    """What is known about an entity just before one of its mentions."""

    entity_id: str
    known_before: dict           # attr -> accumulated value (owner in absolute form)
    mutually_known: dict         # attr -> bool, true iff the attr has any value
    prior_mentions: int
    last_mention: tuple | None   # (utterance number, turn index, speaker, explicit_attrs)


@dataclass(frozen=True)
class MentionEvent:
    """A mention located in the dialogue: position is the global mention index."""

    position: int
    utterance: int
    turn: int
    speaker: str
    record: MentionRecord


def absolute_owner(value, speaker: str, pair: tuple[str, str]):
    """Map a speaker-relative owner value onto the owning speaker's token."""
    if value == "self":
        return speaker
    if value == "other":
        return pair[0] if speaker == pair[1] else pair[1]
    return value  # ours, unk


def relative_owner(value, speaker: str):
    """Map an absolute owner value back to the given speaker's perspective."""
    if value in ("ours", "unk", None):
        return value
    return "self" if value == speaker else "other"


def _turns(utterances: tuple[Utterance, ...]) -> tuple[Turn, ...]:
    turns = []
    for u in utterances:
        if turns and turns[-1][0] == u.speaker:
            turns[-1][1].append(u.number)
        else:
            turns.append((u.speaker, [u.number]))
    return tuple(Turn(i, spk, tuple(nums)) for i, (spk, nums) in enumerate(turns))


def turn_index(dialogue: Dialogue, utt: int) -> Turn:
    """The maximal same-speaker turn containing utterance ``utt``."""
    for turn in _turns(dialogue.utterances):
        if utt in turn.utterances:
            return turn
    raise ValueError(f"utterance {utt} not in dialogue {dialogue.id!r}")


class DialogueModel:
    """One forward fold over a dialogue's mentions, queryable afterwards.

    ``states[p]`` holds every entity's accumulated knowledge before the
    mention at global position ``p`` (and ``states[n]`` the final state),
    so snapshots of arbitrary entities "as of" any mention are cheap.
    """

    def __init__(self, dialogue: Dialogue):
        self.dialogue = dialogue
        self.turns = _turns(dialogue.utterances)
        self._turn_of = {
            num: turn.index for turn in self.turns for num in turn.utterances
        }
        self.events: list[MentionEvent] = []
        self.states: list[dict] = []
        self._entity_positions: dict[str, list[int]] = {}
        self._fold()

    def turn_of(self, utt: int) -> int:
        return self._turn_of[utt]

    def _fold(self):
        known: dict[str, dict] = {}
        seen: set[str] = set()
        position = 0
        for utt in self.dialogue.utterances:
            for record in utt.mentions:
                if record.reference_relation == "coref" and record.entity_id not in seen:
                    raise ValueError(
                        f"coref mention {record.mention_id!r} of unknown entity "
                        f"{record.entity_id!r} in dialogue {self.dialogue.id!r}"
                    )
                self.states.append({eid: dict(m) for eid, m in known.items()})
                event = MentionEvent(position, utt.number, self._turn_of[utt.number],
                                     utt.speaker, record)
                self.events.append(event)
                self._entity_positions.setdefault(record.entity_id, []).append(position)

                entity = known.setdefault(record.entity_id, {})
                for attr, value in self._inherited(record, known).items():
                    entity.setdefault(attr, value)
                for attr, value in record.attribute_values.items():
                    if attr == "owner":
                        value = absolute_owner(value, utt.speaker, self.dialogue.speaker_pair)
                    self._absorb(entity, attr, value, record)
                seen.add(record.entity_id)
                position += 1
        self.states.append({eid: dict(m) for eid, m in known.items()})

    def _absorb(self, entity: dict, attr: str, value, record: MentionRecord):
        current = entity.get(attr)
        if current is None or current == "unk":
            entity[attr] = value
        elif value == "unk" or value == current:
            pass  # an unk never downgrades accumulated knowledge
        else:
            warnings.warn(
                f"mention {record.mention_id!r} changes {attr} of {record.entity_id!r} "
                f"from {current!r} to {value!r}",
                AttributeConflictWarning,
                stacklevel=2,
            )
            entity[attr] = value

    def _inherited(self, record: MentionRecord, known: dict) -> dict:
        """Attributes shared (same value) by every linked entity."""
        if record.reference_relation not in INHERITING_RELATIONS or not record.linked_entities:
            return {}
        maps = [known.get(eid, {}) for eid in record.linked_entities]
        shared = {}
        for attr in ATTRIBUTES:
            values = {m.get(attr, None) for m in maps}
            if len(values) == 1:
                value = values.pop()
                if value is not None and value != "unk":
                    shared[attr] = value
        return shared

    # -- queries ------------------------------------------------------------

    def entity_known_before(self, entity_id: str, position: int) -> dict:
        """An entity's accumulated values from mentions strictly before ``position``."""
        return dict(self.states[position].get(entity_id, {}))

    def entity_events_before(self, entity_id: str, position: int) -> list[MentionEvent]:
        return [self.events[p] for p in self._entity_positions.get(entity_id, [])
                if p < position]

    def entities_seen_before(self, position: int) -> set[str]:
        return set(self.states[position])

    def snapshot_at(self, position: int, entity_id: str | None = None) -> EntitySnapshot:
        """Snapshot of an entity as of (strictly before) the mention at ``position``.

        With the default ``entity_id`` the mention's own entity is used and
        linked-entity inheritance from the mention itself is applied; for
        any other entity the snapshot is its plain accumulated state.
        """
        event = self.events[position]
        own = entity_id is None or entity_id == event.record.entity_id
        if entity_id is None:
            entity_id = event.record.entity_id
        known = self.entity_known_before(entity_id, position)
        if own:
            for attr, value in self._inherited(event.record, self.states[position]).items():
                known.setdefault(attr, value)
        prior = self.entity_events_before(entity_id, position)
        last = None
        if prior:
            e = prior[-1]
            last = (e.utterance, e.turn, e.speaker, e.record.explicit_attrs)
        return EntitySnapshot(
            entity_id=entity_id,
            known_before=known,
            mutually_known={a: a in known for a in ATTRIBUTES},
            prior_mentions=len(prior),
            last_mention=last,
        )


def build_model(dialogue: Dialogue):
    """Yield (mention, snapshot-of-its-entity) in document order."""
    model = DialogueModel(dialogue)
    for event in model.events:
        yield event.record, model.snapshot_at(event.position)
