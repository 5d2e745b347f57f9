"""Discourse model: snapshots, turns, accumulation and no-leak behaviour."""

import dataclasses

import pytest

from descsel.corpus import ATTRIBUTES, parse_corpus
from descsel.discourse import (
    AttributeConflictWarning,
    DialogueModel,
    build_model,
    turn_index,
)


def snapshots_by_mention(dialogue):
    return {m.mention_id: snap for m, snap in build_model(dialogue)}


def test_entity_fully_known_after_first_full_mention(sample_dialogue):
    snaps = snapshots_by_mention(sample_dialogue)
    # ref-1 was given type/color/price/owner explicitly and quantity by
    # inference at utterance 37, so everything is known by utterance 40.
    m4 = snaps["m4"]
    assert m4.entity_id == "ref-1"
    assert all(m4.mutually_known[a] for a in ATTRIBUTES)
    assert m4.prior_mentions == 1
    assert m4.last_mention == (37, 0, "G", frozenset({"type", "color", "owner", "price"}))


def test_price_not_known_until_first_stated(sample_dialogue):
    snaps = snapshots_by_mention(sample_dialogue)
    # ref-4's price first appears at utterance 44
    m7 = snaps["m7"]
    assert m7.entity_id == "ref-4"
    assert m7.mutually_known["price"] is False
    assert m7.mutually_known["type"] and m7.mutually_known["color"]
    assert m7.mutually_known["owner"] and m7.mutually_known["quantity"]


def test_first_mention_snapshot_is_empty(sample_dialogue):
    snaps = snapshots_by_mention(sample_dialogue)
    m1 = snaps["m1"]
    assert m1.prior_mentions == 0
    assert m1.last_mention is None
    assert m1.known_before == {}
    assert not any(m1.mutually_known.values())


def test_owner_accumulates_in_absolute_form(sample_dialogue):
    snaps = snapshots_by_mention(sample_dialogue)
    # G said "my rug" at 37; by utterance 40 the accumulated owner is G
    assert snaps["m4"].known_before["owner"] == "G"


def test_linked_entity_inheritance():
    text = (
        "DIALOGUE\td2\tPAIR\tA-B\tPROBLEM\t1\n"
        "U\t1\tA\ttwo green chairs and a green table\n"
        "PS\t1\tSelectChairs\tintroduce\tg1\tnone\tindeterminate\n"
        "DE\t1\ta1\tinitial\te1\tLINK=-\tATTRS=type=chair,color=green,quantity=2\tEXPL=type,color\tINFR=quantity\tACT=g1\t\"2 green chairs\"\n"
        "DE\t1\ta2\tinitial\te2\tLINK=-\tATTRS=type=table,color=green\tEXPL=type,color\tINFR=-\tACT=g1\t\"a green table\"\n"
        "U\t2\tB\tlets get the green set\n"
        "PS\t2\tSelectChairs\tcontinue\tg1\tnone\tdeterminate\n"
        "DE\t2\ta3\tset\te3\tLINK=e1,e2\tATTRS=type=superordinate\tEXPL=type\tINFR=-\tACT=g1\t\"the green set\"\n"
        "U\t3\tA\tyes the set\n"
        "PS\t3\tSelectChairs\tcontinue\tg1\tnone\tdeterminate\n"
        "DE\t3\ta4\tcoref\te3\tLINK=-\tATTRS=type=superordinate\tEXPL=type\tINFR=-\tACT=g1\t\"the set\"\n"
    )
    snaps = snapshots_by_mention(parse_corpus(text).dialogues[0])
    # color=green is shared by both linked entities and inherited; type differs
    assert snaps["a3"].known_before.get("color") == "green"
    assert "type" not in snaps["a3"].known_before
    assert snaps["a3"].mutually_known["color"] is True
    # the inherited value persists to the next mention of the set entity
    assert snaps["a4"].known_before.get("color") == "green"


def test_snapshot_ignores_own_mention_contribution(sample_text):
    # Mutating a mention's own explicit/inferred attrs must not change
    # its snapshot (features must not leak the label).
    base = parse_corpus(sample_text).dialogues[0]
    snaps = snapshots_by_mention(base)

    mutated = parse_corpus(
        sample_text.replace(
            "DE\t48\tm10\tcoref\tref-4\tLINK=-\tATTRS=type=chair,color=green,owner=self,price=100,quantity=1\tEXPL=type,color,owner,price\tINFR=quantity",
            "DE\t48\tm10\tcoref\tref-4\tLINK=-\tATTRS=type=chair,color=green,owner=self,price=100,quantity=1\tEXPL=type\tINFR=quantity",
        )
    ).dialogues[0]
    snaps2 = snapshots_by_mention(mutated)
    assert snaps["m10"] == snaps2["m10"]


def test_mutually_known_is_monotone(sample_dialogue):
    history: dict[str, set] = {}
    for mention, snap in build_model(sample_dialogue):
        known_now = {a for a, v in snap.mutually_known.items() if v}
        assert history.get(mention.entity_id, set()) <= known_now
        history[mention.entity_id] = known_now


def test_prior_mentions_counts_earlier_same_entity(sample_dialogue):
    counts: dict[str, int] = {}
    for mention, snap in build_model(sample_dialogue):
        assert snap.prior_mentions == counts.get(mention.entity_id, 0)
        counts[mention.entity_id] = counts.get(mention.entity_id, 0) + 1


def test_conflicting_value_warns_and_last_writer_wins():
    text = (
        "DIALOGUE\td3\tPAIR\tA-B\tPROBLEM\t1\n"
        "U\t1\tA\ta red sofa\n"
        "PS\t1\tSelectSofa\tintroduce\tg1\tnone\tindeterminate\n"
        "DE\t1\tb1\tinitial\te1\tLINK=-\tATTRS=type=sofa,color=red\tEXPL=type,color\tINFR=-\tACT=g1\t\"a red sofa\"\n"
        "U\t2\tB\tthe blue sofa\n"
        "PS\t2\tSelectSofa\tcontinue\tg1\tnone\tdeterminate\n"
        "DE\t2\tb2\tcoref\te1\tLINK=-\tATTRS=type=sofa,color=blue\tEXPL=type,color\tINFR=-\tACT=g1\t\"the blue sofa\"\n"
        "U\t3\tA\tfine the sofa\n"
        "PS\t3\tSelectSofa\tcontinue\tg1\tnone\tdeterminate\n"
        "DE\t3\tb3\tcoref\te1\tLINK=-\tATTRS=type=sofa\tEXPL=type\tINFR=-\tACT=g1\t\"the sofa\"\n"
    )
    dialogue = parse_corpus(text).dialogues[0]
    with pytest.warns(AttributeConflictWarning):
        snaps = snapshots_by_mention(dialogue)
    assert snaps["b3"].known_before["color"] == "blue"


def test_coref_of_unknown_entity_is_hard_error(sample_dialogue):
    bad = dataclasses.replace(
        sample_dialogue,
        utterances=tuple(
            dataclasses.replace(
                u,
                mentions=tuple(
                    dataclasses.replace(m, entity_id="ref-99") if m.mention_id == "m4" else m
                    for m in u.mentions
                ),
            )
            for u in sample_dialogue.utterances
        ),
    )
    with pytest.raises(ValueError, match="ref-99"):
        list(build_model(bad))


def test_turn_structure(sample_dialogue):
    # utterances 36-38 are one G turn
    t = turn_index(sample_dialogue, 36)
    assert t == turn_index(sample_dialogue, 37) == turn_index(sample_dialogue, 38)
    assert t.index == 0
    assert t.speaker == "G"
    assert t.utterances == (36, 37, 38)


def test_turn_indexing_edge_cases():
    single = parse_corpus(
        "DIALOGUE\td4\tPAIR\tA-B\tPROBLEM\t1\nU\t1\tA\thi\nU\t2\tB\tho\n",
        check=False,
    ).dialogues[0]
    assert turn_index(single, 1).index == 0

    lines = ["DIALOGUE\td5\tPAIR\tA-B\tPROBLEM\t1"]
    for i in range(1, 7):
        lines.append(f"U\t{i}\t{'A' if i % 2 else 'B'}\tblah")
    alternating = parse_corpus("\n".join(lines) + "\n").dialogues[0]
    assert [turn_index(alternating, i).index for i in range(1, 7)] == list(range(6))

    with pytest.raises(ValueError, match="not in dialogue"):
        turn_index(alternating, 99)


def test_model_states_are_isolated_copies(sample_dialogue):
    model = DialogueModel(sample_dialogue)
    before = model.entity_known_before("ref-1", 1)
    before["color"] = "tampered"
    assert model.entity_known_before("ref-1", 1)["color"] == "yellow"
