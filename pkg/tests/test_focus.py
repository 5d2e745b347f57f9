"""Segment derivation and distractor sets under the three focus models."""

import pytest

from descsel.corpus import parse_corpus
from descsel.discourse import DialogueModel
from descsel.focus import FocusModel, distractors, segment_structure


def mention(dialogue, mention_id):
    for _, m in dialogue.mentions():
        if m.mention_id == mention_id:
            return m
    raise KeyError(mention_id)


def test_introduce_pushes_and_continue_pops(sample_dialogue):
    segments = segment_structure(sample_dialogue)
    first, second = segments[0], segments[1]
    assert first.goal_ids == frozenset({"act4"})
    assert first.start_utt == 37
    assert second.goal_ids == frozenset({"act5"})
    assert second.parent is first
    # utterance 40 continues act4, popping act5's segment
    assert 40 in first.utterances
    assert second.utterances == [38, 39]


def test_reopened_goal_gets_fresh_segment(sample_dialogue):
    segments = segment_structure(sample_dialogue)
    act5_segments = [s for s in segments if s.goal_ids == frozenset({"act5"})]
    # act5 runs 38-39, is popped at 40, then re-opens at 43 and again at 47
    assert len(act5_segments) == 3
    assert [s.start_utt for s in act5_segments] == [38, 43, 47]


def test_single_goal_dialogue_is_one_segment():
    lines = ["DIALOGUE\td6\tPAIR\tA-B\tPROBLEM\t1"]
    for i in range(1, 5):
        speaker = "A" if i % 2 else "B"
        mode = "introduce" if i == 1 else "continue"
        lines.append(f"U\t{i}\t{speaker}\ttalk")
        lines.append(f"PS\t{i}\tSelectSofa\t{mode}\tg1\tnone\tindeterminate")
    d = parse_corpus("\n".join(lines) + "\n").dialogues[0]
    (seg,) = segment_structure(d)
    assert seg.utterances == [1, 2, 3, 4]
    assert seg.parent is None


def test_nesting_trace():
    text = (
        "DIALOGUE\td7\tPAIR\tA-B\tPROBLEM\t1\n"
        "U\t1\tA\tstart a\n"
        "PS\t1\tSelectSofa\tintroduce\ta\tnone\tindeterminate\n"
        "U\t2\tB\tstart b\n"
        "PS\t2\tSelectTable\tintroduce\tb\tnone\tindeterminate\n"
        "U\t3\tA\tmore b\n"
        "PS\t3\tSelectTable\tcontinue\tb\tnone\tdeterminate\n"
        "U\t4\tB\tback to a\n"
        "PS\t4\tSelectSofa\tcontinue\ta\tnone\tdeterminate\n"
    )
    seg_a, seg_b = segment_structure(parse_corpus(text).dialogues[0])
    assert seg_b.parent is seg_a
    assert seg_a.utterances == [1, 4]
    assert seg_b.utterances == [2, 3]
    assert seg_a.start_utt == 1 and seg_a.end_utt == 4


def test_continue_without_introduce_raises():
    text = (
        "DIALOGUE\td8\tPAIR\tA-B\tPROBLEM\t1\n"
        "U\t1\tA\thm\n"
        "PS\t1\tSelectSofa\tcontinue\tghost\tnone\tindeterminate\n"
    )
    d = parse_corpus(text, check=False).dialogues[0]
    with pytest.raises(ValueError, match="ghost"):
        segment_structure(d)


def test_one_utterance_distractors(sample_dialogue):
    # target: the chair at utterance 48; utterance 47 mentions rug and chair
    ds = distractors(sample_dialogue, mention(sample_dialogue, "m10"),
                     FocusModel.ONE_UTTERANCE)
    assert ds.entity_ids() == {"ref-1"}


def test_five_utterance_distractors(sample_dialogue):
    # target: the rug at utterance 52; window 47-51 mentions ref-1/ref-4/ref-5
    ds = distractors(sample_dialogue, mention(sample_dialogue, "m13"),
                     FocusModel.FIVE_UTTERANCE)
    assert ds.entity_ids() == {"ref-4", "ref-5"}


def test_segment_distractors_track_active_stack(sample_dialogue):
    # target at 48 sits in the act5 segment re-opened at 47, nested in act4's;
    # entities from the popped 38-39 segment are no longer salient
    ds = distractors(sample_dialogue, mention(sample_dialogue, "m10"),
                     FocusModel.SEGMENT)
    assert ds.entity_ids() == {"ref-1"}


def test_first_utterance_mention_has_no_distractors():
    text = (
        "DIALOGUE\td9\tPAIR\tA-B\tPROBLEM\t1\n"
        "U\t1\tA\ta sofa\n"
        "PS\t1\tSelectSofa\tintroduce\tg1\tnone\tindeterminate\n"
        "DE\t1\tz1\tinitial\te1\tLINK=-\tATTRS=type=sofa\tEXPL=type\tINFR=-\tACT=g1\t\"a sofa\"\n"
        "U\t2\tB\tok\n"
    )
    d = parse_corpus(text).dialogues[0]
    for fm in FocusModel:
        assert distractors(d, mention(d, "z1"), fm).entity_ids() == set()


def test_one_utt_subset_of_five_utt(sample_dialogue):
    for _, m in sample_dialogue.mentions():
        one = distractors(sample_dialogue, m, FocusModel.ONE_UTTERANCE).entity_ids()
        five = distractors(sample_dialogue, m, FocusModel.FIVE_UTTERANCE).entity_ids()
        assert one <= five


def test_target_never_its_own_distractor(sample_dialogue):
    for _, m in sample_dialogue.mentions():
        for fm in FocusModel:
            assert m.entity_id not in distractors(sample_dialogue, m, fm).entity_ids()


def test_distractor_snapshots_are_as_of_target(sample_dialogue):
    # ref-4's price is stated at 44; a snapshot taken for a target at 47
    # must already include it, while one taken at 43 must not
    model = DialogueModel(sample_dialogue)
    ds47 = distractors(model, mention(sample_dialogue, "m8"), FocusModel.FIVE_UTTERANCE)
    ref4 = {s.entity_id: s for s in ds47}["ref-4"]
    assert ref4.known_before.get("price") == 100


def test_same_utterance_earlier_mention_counts_for_segment(sample_dialogue):
    # m12 (ref-5) at utterance 51 follows m11 (ref-4) in the same utterance,
    # but their goals differ: m12's segment chain is act3 < act5 < act4
    ds = distractors(sample_dialogue, mention(sample_dialogue, "m12"), FocusModel.SEGMENT)
    assert "ref-4" in ds.entity_ids()


def test_determinism(sample_dialogue):
    m = mention(sample_dialogue, "m13")
    for fm in FocusModel:
        a = distractors(sample_dialogue, m, fm)
        b = distractors(sample_dialogue, m, fm)
        assert a == b
