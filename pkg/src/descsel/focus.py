"""Focus spaces: which other entities a description must be distinguished from.

Three definitions of "currently salient" are supported:

* ``ONE_UTTERANCE``  - entities mentioned in the single preceding utterance;
* ``FIVE_UTTERANCE`` - entities mentioned in the five preceding utterances;
* ``SEGMENT``        - entities mentioned, before the target, inside the
  active stack of goal-derived discourse segments.

Segments come from the problem-solving annotations alone: introducing a
goal pushes a segment, continuing a goal below the top of the stack pops
back to the segment holding it, and continuing a goal that is no longer
on the stack re-opens a fresh segment for it.  Utterances without PS
records inherit the segment of the nearest preceding PS-bearing utterance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .corpus import Dialogue, MentionRecord
from .discourse import DialogueModel, EntitySnapshot

__all__ = [
    "DistractorSet",
    "FocusModel",
    "Segment",
    "distractor_index",
    "distractors",
    "segment_structure",
]


class FocusModel(enum.Enum):
    SEGMENT = "seg"
    ONE_UTTERANCE = "1utt"
    FIVE_UTTERANCE = "5utt"


@dataclass
class Segment:
    """A span of utterances serving one set of domain goals."""

    goal_ids: frozenset
    start_utt: int
    end_utt: int
    parent: Segment | None = None
    utterances: list[int] = field(default_factory=list, repr=False)

    def chain(self):
        """This segment plus its ancestors, innermost first."""
        seg = self
        while seg is not None:
            yield seg
            seg = seg.parent


def segment_structure(dialogue: Dialogue) -> list[Segment]:
    """Derive the segment tree; segments are returned in creation order.

    Raises ValueError when a goal is continued before being introduced
    (run corpus validation first to report this as data).
    """
    segments, _ = _segments_with_assignment(dialogue)
    return segments


def _segments_with_assignment(dialogue: Dialogue):
    segments: list[Segment] = []
    stack: list[Segment] = []
    assignment: dict[int, Segment] = {}
    introduced: set[str] = set()

    for utt in dialogue.utterances:
        for ps in utt.ps:
            if ps.mode == "continue" and ps.goal_id not in introduced:
                raise ValueError(
                    f"goal {ps.goal_id!r} continued at utterance {utt.number} "
                    f"but never introduced"
                )
            introduced.add(ps.goal_id)
            on_stack = any(ps.goal_id in seg.goal_ids for seg in stack)
            if ps.mode == "introduce" or not on_stack:
                parent = stack[-1] if stack else None
                seg = Segment(frozenset({ps.goal_id}), utt.number, utt.number, parent)
                segments.append(seg)
                stack.append(seg)
            else:
                while ps.goal_id not in stack[-1].goal_ids:
                    stack.pop()
        if stack:
            current = stack[-1]
            current.end_utt = max(current.end_utt, utt.number)
            current.utterances.append(utt.number)
            assignment[utt.number] = current
    return segments, assignment


def _window_distractors(model: DialogueModel, position: int, width: int) -> set[str]:
    target = model.events[position]
    dialogue = model.dialogue
    numbers = [u.number for u in dialogue.utterances]
    idx = numbers.index(target.utterance)
    window = set(numbers[max(0, idx - width): idx])
    return {
        e.record.entity_id
        for e in model.events
        if e.utterance in window and e.record.entity_id != target.record.entity_id
    }


def _segment_distractors(model: DialogueModel, position: int, assignment) -> set[str]:
    target = model.events[position]
    seg = assignment.get(target.utterance)
    if seg is None:
        return set()
    active = list(seg.chain())
    active_utts = {n for s in active for n in s.utterances}
    active_goals = frozenset().union(*(s.goal_ids for s in active))
    out = set()
    for e in model.events[:position]:
        if e.record.entity_id == target.record.entity_id:
            continue
        if e.utterance in active_utts and e.record.goal_id in active_goals:
            out.add(e.record.entity_id)
    return out


class _FocusIndex:
    """Distractor queries against one dialogue, with the segment map cached."""

    def __init__(self, model: DialogueModel):
        self.model = model
        self._assignment = None

    def ids(self, position: int, focus_model: FocusModel) -> set[str]:
        if focus_model is FocusModel.ONE_UTTERANCE:
            return _window_distractors(self.model, position, 1)
        if focus_model is FocusModel.FIVE_UTTERANCE:
            return _window_distractors(self.model, position, 5)
        if focus_model is FocusModel.SEGMENT:
            if self._assignment is None:
                _, self._assignment = _segments_with_assignment(self.model.dialogue)
            return _segment_distractors(self.model, position, self._assignment)
        raise ValueError(f"unknown focus model {focus_model!r}")

    def set_at(self, position: int, focus_model: FocusModel) -> DistractorSet:
        snaps = tuple(
            self.model.snapshot_at(position, entity_id=eid)
            for eid in sorted(self.ids(position, focus_model))
        )
        return DistractorSet(snaps)


def distractor_index(model: DialogueModel) -> _FocusIndex:
    return _FocusIndex(model)


@dataclass(frozen=True)
class DistractorSet:
    """Salient entities other than the target, snapshotted at the target."""

    members: tuple[EntitySnapshot, ...]

    def entity_ids(self) -> set[str]:
        return {s.entity_id for s in self.members}

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def distractors(
    dialogue_or_model,
    target: MentionRecord,
    model: FocusModel,
) -> DistractorSet:
    """Distractor set for ``target`` under the given focus space definition."""
    dm = (dialogue_or_model if isinstance(dialogue_or_model, DialogueModel)
          else DialogueModel(dialogue_or_model))
    position = next(
        e.position for e in dm.events
        if e.record is target or e.record == target
    )
    return _FocusIndex(dm).set_at(position, model)
