"""Annotated dialogue corpus: domain types, text format parser/serializer, validator.

A corpus file is UTF-8 text, one record per line, fields tab-separated
(any whitespace run is accepted on input).  ``#`` starts a comment line.
Record kinds, in required order within an utterance::

    DIALOGUE <id> PAIR <spkA>-<spkB> PROBLEM <n>
    U  <utt-no> <speaker> <free text>
    PS <utt-no> <goal-label> <introduce|continue> <goal-id> <constraint[:implicit|:explicit]|none> <determinate|indeterminate>
    DU <utt-no> <influence-on-listener> <influence-on-speaker>
    DE <utt-no> <mention-id> <ref-relation> <entity-id> LINK=<id,...|-> ATTRS=<attr=val,...|-> EXPL=<attr,...|-> INFR=<attr,...|-> ACT=<goal-id> "<surface>"

An utterance may carry several PS records and several DE records but at
most one DU record.  A missing DU record means both influences are ``na``.
Unknown attribute values are written as the first-class token ``unk``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "ATTRIBUTES",
    "GOAL_LABELS",
    "CONSTRAINT_CHANGES",
    "Corpus",
    "CorpusSyntaxError",
    "CorpusInvariantError",
    "Dialogue",
    "DURecord",
    "MentionRecord",
    "PSRecord",
    "Utterance",
    "Violation",
    "parse_corpus",
    "serialize_corpus",
    "validate",
]

ATTRIBUTES = ("type", "color", "owner", "price", "quantity")

GOAL_LABELS = frozenset({
    "SelectSofa", "SelectTable", "SelectChairs",
    "SelectOptionalItem", "SelectOptionalItemLR", "SelectOptionalItemDR",
})
MODES = frozenset({"introduce", "continue"})
CONSTRAINT_CHANGES = frozenset({
    "dropcolormatch", "colorlimit", "pricelimit", "priceupperlimit", "priceevaluator",
})
PRESENCE_FLAGS = frozenset({"implicit", "explicit"})
SOLUTION_SIZES = frozenset({"determinate", "indeterminate"})
LISTENER_INFLUENCES = frozenset({"action-directive", "open-option", "info-request", "na"})
SPEAKER_INFLUENCES = frozenset({"offer", "commit", "na"})
REFERENCE_RELATIONS = frozenset({"initial", "coref", "set", "class", "cnanaphora", "predicative"})

TYPE_VALUES = frozenset({"sofa", "chair", "table", "rug", "lamp", "superordinate", "unk"})
COLOR_VALUES = frozenset({"red", "blue", "green", "yellow", "unk"})
OWNER_VALUES = frozenset({"self", "other", "ours", "unk"})
QUANTITY_RANGE = range(0, 5)


class CorpusSyntaxError(ValueError):
    """Malformed corpus text; carries the 1-based line and column."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, col {column}: {message}")


@dataclass(frozen=True)
class Violation:
    """A record that breaks a corpus invariant (data, not an exception)."""

    dialogue_id: str
    utterance: int | None
    record_id: str | None
    rule: str
    message: str

    def __str__(self):
        where = self.dialogue_id
        if self.utterance is not None:
            where += f":{self.utterance}"
        if self.record_id:
            where += f":{self.record_id}"
        return f"{where}: [{self.rule}] {self.message}"


class CorpusInvariantError(ValueError):
    """Raised by parse_corpus when the parsed records violate invariants."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "\n".join(str(v) for v in violations)
        super().__init__(f"{len(violations)} invariant violation(s):\n{lines}")


@dataclass(frozen=True)
class PSRecord:
    """Problem-solving annotation: one goal/action touched by an utterance."""

    goal_label: str
    mode: str                    # introduce | continue
    goal_id: str
    constraint_change: str       # "none" or a CONSTRAINT_CHANGES member
    constraint_presence: str | None  # implicit | explicit, None iff no change
    solution_size: str           # determinate | indeterminate


@dataclass(frozen=True)
class DURecord:
    """Dialogue-act annotation: expected influences of the utterance."""

    influence_on_listener: str   # action-directive | open-option | info-request | na
    influence_on_speaker: str    # offer | commit | na


@dataclass(frozen=True)
class MentionRecord:
    """One object description: reference relation, revealed values, explicit choice."""

    mention_id: str
    reference_relation: str
    entity_id: str
    linked_entities: tuple[str, ...]
    attribute_values: dict        # attr -> value (str, or int for price/quantity, or "unk")
    explicit_attrs: frozenset
    inferred_attrs: frozenset
    goal_id: str
    surface: str


@dataclass(frozen=True)
class Utterance:
    number: int
    speaker: str
    text: str
    ps: tuple[PSRecord, ...] = ()
    du: DURecord | None = None
    mentions: tuple[MentionRecord, ...] = ()

    def effective_du(self) -> DURecord:
        """The DU record, defaulting both influences to na when unannotated."""
        return self.du if self.du is not None else DURecord("na", "na")


@dataclass(frozen=True)
class Dialogue:
    id: str
    speaker_pair: tuple[str, str]
    problem_number: int
    utterances: tuple[Utterance, ...] = ()

    def mentions(self):
        """All mention records in document order, as (utterance, mention) pairs."""
        for utt in self.utterances:
            for m in utt.mentions:
                yield utt, m


@dataclass(frozen=True)
class Corpus:
    dialogues: tuple[Dialogue, ...] = ()


# ---------------------------------------------------------------------------
# parsing

_HEADER_RE = re.compile(r"^DIALOGUE\s+(\S+)\s+PAIR\s+(\S+)-(\S+)\s+PROBLEM\s+(\d+)\s*$")
_SURFACE_RE = re.compile(r'"([^"]*)"\s*$')


def _attr_value(attr: str, raw: str, err):
    if attr == "price":
        if raw == "unk":
            return "unk"
        try:
            return int(raw)
        except ValueError:
            raise err(f"price value must be an integer or unk, got {raw!r}")
    if attr == "quantity":
        if raw == "unk":
            return "unk"
        try:
            q = int(raw)
        except ValueError:
            raise err(f"quantity value must be an integer or unk, got {raw!r}")
        if q not in QUANTITY_RANGE:
            raise err(f"quantity must be in 0..4, got {q}")
        return q
    vocab = {"type": TYPE_VALUES, "color": COLOR_VALUES, "owner": OWNER_VALUES}[attr]
    if raw not in vocab:
        raise err(f"bad {attr} value {raw!r}")
    return raw


def _attr_list(raw: str, err) -> frozenset:
    if raw == "-":
        return frozenset()
    attrs = raw.split(",")
    for a in attrs:
        if a not in ATTRIBUTES:
            raise err(f"unknown attribute {a!r}")
    return frozenset(attrs)


def _split_fields(line: str) -> list[str]:
    # Canonical separator is a tab, but any whitespace run is accepted
    # for hand-authored files; only U and DE lines carry embedded spaces
    # and those are re-joined by their parsers.
    return line.split()


class _DialogueBuilder:
    def __init__(self, id_, pair, problem):
        self.id = id_
        self.pair = pair
        self.problem = problem
        self.utterances: list[dict] = []

    def current(self, err):
        if not self.utterances:
            raise err("record before any U line in this dialogue")
        return self.utterances[-1]

    def build(self) -> Dialogue:
        utts = tuple(
            Utterance(
                number=u["number"], speaker=u["speaker"], text=u["text"],
                ps=tuple(u["ps"]), du=u["du"], mentions=tuple(u["mentions"]),
            )
            for u in self.utterances
        )
        return Dialogue(self.id, self.pair, self.problem, utts)


def parse_corpus(text: str, check: bool = True) -> Corpus:
    """Parse corpus text into a Corpus.

    Raises CorpusSyntaxError on malformed lines.  With ``check`` (the
    default), also runs :func:`validate` and raises CorpusInvariantError
    if any record breaks an invariant; pass ``check=False`` to obtain the
    structure and inspect violations yourself.
    """
    dialogues: list[_DialogueBuilder] = []
    cur: _DialogueBuilder | None = None

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue

        def err(message, column=1, _n=line_no):
            return CorpusSyntaxError(_n, column, message)

        kind = line.split(None, 1)[0]

        if kind == "DIALOGUE":
            m = _HEADER_RE.match(line)
            if not m:
                raise err("malformed DIALOGUE header")
            cur = _DialogueBuilder(m.group(1), (m.group(2), m.group(3)), int(m.group(4)))
            dialogues.append(cur)
            continue

        if cur is None:
            raise err(f"{kind} record before any DIALOGUE header")

        if kind == "U":
            parts = line.split(None, 3)
            if len(parts) < 4:
                raise err("U line needs <utt-no> <speaker> <text>")
            _, num, speaker, text_part = parts
            if not num.isdigit():
                raise err(f"utterance number must be an integer, got {num!r}")
            cur.utterances.append({
                "number": int(num), "speaker": speaker, "text": text_part,
                "ps": [], "du": None, "mentions": [],
            })
            continue

        fields = _split_fields(line)
        utt = cur.current(err)
        if not fields[1].isdigit() or int(fields[1]) != utt["number"]:
            raise err(f"{kind} record utterance number {fields[1]!r} does not match "
                      f"current utterance {utt['number']}", column=len(kind) + 2)

        if kind == "PS":
            if utt["du"] is not None or utt["mentions"]:
                raise err("PS record must precede DU and DE records")
            if len(fields) != 7:
                raise err("PS line needs 7 fields")
            _, _, label, mode, goal_id, constraint, size = fields
            if label not in GOAL_LABELS:
                raise err(f"unknown goal label {label!r}")
            if mode not in MODES:
                raise err(f"mode must be introduce or continue, got {mode!r}")
            if constraint == "none":
                change, presence = "none", None
            else:
                change, sep, presence = constraint.partition(":")
                if change not in CONSTRAINT_CHANGES:
                    raise err(f"unknown constraint change {change!r}")
                if not sep or presence not in PRESENCE_FLAGS:
                    raise err(f"constraint change needs :implicit or :explicit, got {constraint!r}")
            if size not in SOLUTION_SIZES:
                raise err(f"solution size must be determinate or indeterminate, got {size!r}")
            utt["ps"].append(PSRecord(label, mode, goal_id, change, presence, size))
            continue

        if kind == "DU":
            if utt["mentions"]:
                raise err("DU record must precede DE records")
            if utt["du"] is not None:
                raise err("at most one DU record per utterance")
            if len(fields) != 4:
                raise err("DU line needs 4 fields")
            _, _, il, is_ = fields
            if il not in LISTENER_INFLUENCES:
                raise err(f"unknown influence on listener {il!r}")
            if is_ not in SPEAKER_INFLUENCES:
                raise err(f"unknown influence on speaker {is_!r}")
            utt["du"] = DURecord(il, is_)
            continue

        if kind == "DE":
            sm = _SURFACE_RE.search(raw_line)
            if not sm:
                raise err('DE line must end with a quoted "<surface>"')
            surface = sm.group(1)
            head = _split_fields(raw_line[: sm.start()])
            if len(head) != 10:
                raise err("DE line needs fields: DE <utt-no> <mention-id> <ref-relation> "
                          "<entity-id> LINK= ATTRS= EXPL= INFR= ACT= \"<surface>\"")
            mention_id, relation, entity_id = head[2], head[3], head[4]
            tags = {}
            for f in head[5:10]:
                key, sep, val = f.partition("=")
                if not sep:
                    raise err(f"expected KEY=value field, got {f!r}")
                tags[key] = val
            missing = {"LINK", "ATTRS", "EXPL", "INFR", "ACT"} - set(tags)
            if missing:
                raise err(f"DE line missing field(s): {', '.join(sorted(missing))}")
            if relation not in REFERENCE_RELATIONS:
                raise err(f"unknown reference relation {relation!r}")

            links = tuple(tags["LINK"].split(",")) if tags["LINK"] != "-" else ()
            values = {}
            if tags["ATTRS"] != "-":
                for pair in tags["ATTRS"].split(","):
                    attr, sep, val = pair.partition("=")
                    if not sep or attr not in ATTRIBUTES:
                        raise err(f"bad ATTRS entry {pair!r}")
                    values[attr] = _attr_value(attr, val, err)
            explicit = _attr_list(tags["EXPL"], err)
            inferred = _attr_list(tags["INFR"], err)
            utt["mentions"].append(MentionRecord(
                mention_id, relation, entity_id, links, values,
                explicit, inferred, tags["ACT"], surface,
            ))
            continue

        raise err(f"unknown record kind {kind!r}")

    corpus = Corpus(tuple(b.build() for b in dialogues))
    if check:
        violations = validate(corpus)
        if violations:
            raise CorpusInvariantError(violations)
    return corpus


# ---------------------------------------------------------------------------
# serialization

_HEADER_COMMENT = "# annotated dialogue corpus (tab-separated records; see descsel.corpus)"


def _format_attrs(values: dict) -> str:
    if not values:
        return "-"
    return ",".join(f"{a}={values[a]}" for a in ATTRIBUTES if a in values)


def _format_attr_set(attrs: frozenset) -> str:
    if not attrs:
        return "-"
    return ",".join(a for a in ATTRIBUTES if a in attrs)


def serialize_corpus(corpus: Corpus) -> str:
    """Render a Corpus in the canonical text format (stable field order)."""
    out = [_HEADER_COMMENT]
    for d in corpus.dialogues:
        out.append("")
        out.append(f"DIALOGUE\t{d.id}\tPAIR\t{d.speaker_pair[0]}-{d.speaker_pair[1]}\tPROBLEM\t{d.problem_number}")
        for u in d.utterances:
            out.append(f"U\t{u.number}\t{u.speaker}\t{u.text}")
            for ps in u.ps:
                constraint = ps.constraint_change
                if ps.constraint_presence is not None:
                    constraint += f":{ps.constraint_presence}"
                out.append(f"PS\t{u.number}\t{ps.goal_label}\t{ps.mode}\t{ps.goal_id}\t{constraint}\t{ps.solution_size}")
            if u.du is not None:
                out.append(f"DU\t{u.number}\t{u.du.influence_on_listener}\t{u.du.influence_on_speaker}")
            for m in u.mentions:
                link = ",".join(m.linked_entities) if m.linked_entities else "-"
                out.append(
                    f"DE\t{u.number}\t{m.mention_id}\t{m.reference_relation}\t{m.entity_id}"
                    f"\tLINK={link}\tATTRS={_format_attrs(m.attribute_values)}"
                    f"\tEXPL={_format_attr_set(m.explicit_attrs)}\tINFR={_format_attr_set(m.inferred_attrs)}"
                    f"\tACT={m.goal_id}\t\"{m.surface}\""
                )
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# validation

def validate(corpus: Corpus) -> list[Violation]:
    """Check every cross-record invariant; returns one Violation per breach."""
    violations: list[Violation] = []
    seen_ids = set()
    for d in corpus.dialogues:
        if d.id in seen_ids:
            violations.append(Violation(d.id, None, None, "dialogue-id-unique",
                                        f"duplicate dialogue id {d.id!r}"))
        seen_ids.add(d.id)
        violations.extend(_validate_dialogue(d))
    return violations


def _validate_dialogue(d: Dialogue) -> list[Violation]:
    v: list[Violation] = []
    pair = set(d.speaker_pair)
    if len(pair) != 2:
        v.append(Violation(d.id, None, None, "speaker-pair",
                           f"speaker pair must name two distinct speakers, got {d.speaker_pair}"))

    speakers_seen = set()
    prev_number = None
    introduced: set[str] = set()
    goals_available: set[str] = set()
    entities_seen: set[str] = set()

    for u in d.utterances:
        if prev_number is not None and u.number <= prev_number:
            v.append(Violation(d.id, u.number, None, "utterance-order",
                               f"utterance number {u.number} not greater than {prev_number}"))
        prev_number = u.number
        speakers_seen.add(u.speaker)
        if u.speaker not in pair:
            v.append(Violation(d.id, u.number, None, "speaker-in-pair",
                               f"speaker {u.speaker!r} not in dialogue pair"))

        for i, ps in enumerate(u.ps):
            if ps.mode == "continue" and ps.goal_id not in introduced:
                v.append(Violation(d.id, u.number, f"ps#{i}", "continue-after-introduce",
                                   f"goal {ps.goal_id!r} continued but never introduced"))
            if ps.mode == "introduce":
                introduced.add(ps.goal_id)
            goals_available.add(ps.goal_id)

        for m in u.mentions:
            if m.reference_relation == "initial" and m.entity_id in entities_seen:
                v.append(Violation(d.id, u.number, m.mention_id, "initial-is-fresh",
                                   f"initial mention of already-seen entity {m.entity_id!r}"))
            if m.reference_relation == "coref" and m.entity_id not in entities_seen:
                v.append(Violation(d.id, u.number, m.mention_id, "coref-needs-antecedent",
                                   f"coref mention of unseen entity {m.entity_id!r}"))
            overlap = m.explicit_attrs & m.inferred_attrs
            if overlap:
                v.append(Violation(d.id, u.number, m.mention_id, "explicit-inferred-disjoint",
                                   f"attributes both explicit and inferred: {sorted(overlap)}"))
            for attr in m.explicit_attrs | m.inferred_attrs:
                if attr not in m.attribute_values:
                    v.append(Violation(d.id, u.number, m.mention_id, "attr-has-value",
                                       f"attribute {attr!r} marked explicit/inferred but has no value"))
            if m.goal_id not in goals_available:
                v.append(Violation(d.id, u.number, m.mention_id, "mention-goal-known",
                                   f"mention goal {m.goal_id!r} not in any PS record at or before "
                                   f"utterance {u.number}"))
            entities_seen.add(m.entity_id)

    if d.utterances and len(speakers_seen) != 2:
        v.append(Violation(d.id, None, None, "two-speakers",
                           f"dialogue must involve exactly two speakers, saw {sorted(speakers_seen)}"))
    return v
