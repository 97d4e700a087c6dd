from __future__ import annotations

import json
import random

import pytest

from claimcheck.aggregation import (
    JUDGE_REPAIR_INSTRUCTION,
    JudgeDecision,
    apply_conflict_abstention,
    build_judge_prompt,
    deterministic_fallback,
    judge,
    majority_vote,
    parse_judge_response,
    partition_facts,
)
from claimcheck.errors import SchemaError
from claimcheck.providers import ScriptedChatProvider
from claimcheck.types import Claim, EvidenceDoc, Task, Thresholds, Verdict

from conftest import make_assessment

T = Thresholds()
CLAIM = Claim("the claim under test")
DOC = EvidenceDoc("the evidence document body.")


def test_partition_by_gated_probability():
    assessments = [make_assessment(0.9, i=1), make_assessment(0.1, i=2), make_assessment(0.5, i=3)]
    supported, refuted, uncertain = partition_facts(assessments, T)
    assert [a.fact.id for a in supported] == ["f1"]
    assert [a.fact.id for a in refuted] == ["f2"]
    assert [a.fact.id for a in uncertain] == ["f3"]


def test_partition_empty():
    assert partition_facts([], T) == ([], [], [])


def test_partition_boundary_is_supported():
    assessments = [make_assessment(0.80, i=1), make_assessment(0.80, i=2)]
    supported, refuted, uncertain = partition_facts(assessments, T)
    assert len(supported) == 2 and not refuted and not uncertain


def _assessments_with_texts():
    # distinct uncertain-fact text so the two-way omission is observable
    return [
        make_assessment(0.9, i=1),
        make_assessment(0.1, i=2),
        make_assessment(0.5, i=3, text="uncertain-only-phrase xyzzy"),
    ]


def test_two_way_prompt_omits_uncertain_text():
    assessments = _assessments_with_texts()
    supported, refuted, uncertain = partition_facts(assessments, T)
    prompt = build_judge_prompt(CLAIM, DOC, supported, refuted, Task.TWO_WAY, uncertain)
    assert "xyzzy" not in prompt
    assert "f3" not in prompt
    assert "Uncertain support" not in prompt


def test_three_way_prompt_lists_uncertain():
    assessments = _assessments_with_texts()
    supported, refuted, uncertain = partition_facts(assessments, T)
    prompt = build_judge_prompt(CLAIM, DOC, supported, refuted, Task.THREE_WAY, uncertain)
    assert "xyzzy" in prompt
    assert "Facts with Uncertain support:" in prompt


def test_judge_prompt_contains_inputs_and_is_deterministic():
    assessments = [make_assessment(0.9, i=1)]
    supported, refuted, uncertain = partition_facts(assessments, T)
    prompt = build_judge_prompt(CLAIM, DOC, supported, refuted, Task.THREE_WAY, uncertain)
    assert json.dumps(CLAIM.text) in prompt
    assert json.dumps(DOC.text) in prompt
    assert "[f1]" in prompt and "p=0.9" in prompt
    assert prompt == build_judge_prompt(CLAIM, DOC, supported, refuted, Task.THREE_WAY, uncertain)


def test_parse_judge_response_valid():
    raw = '{"final_verdict":"Supported","explanation":"f1 entails claim","used_facts":["f1"]}'
    decision = parse_judge_response(raw)
    assert decision.final_verdict is Verdict.SUPPORTED
    assert decision.explanation == "f1 entails claim"
    assert decision.used_facts == ("f1",)


def test_parse_judge_response_case_insensitive_verdict():
    raw = '{"final_verdict":"nEi","explanation":"","used_facts":[]}'
    assert parse_judge_response(raw).final_verdict is Verdict.NEI


@pytest.mark.parametrize(
    "raw",
    [
        '{"final_verdict":"maybe","explanation":"","used_facts":[]}',
        "prose answer",
        '{"explanation":"","used_facts":[]}',
        '{"final_verdict":"Supported","used_facts":[]}',
        '{"final_verdict":"Supported","explanation":""}',
        '{"final_verdict":"Supported","explanation":"","used_facts":"f1"}',
        '{"final_verdict":"Supported","explanation":"","used_facts":[1]}',
    ],
)
def test_parse_judge_response_rejects(raw):
    with pytest.raises(SchemaError):
        parse_judge_response(raw)


def test_parse_judge_response_drops_unknown_ids():
    raw = '{"final_verdict":"Supported","explanation":"","used_facts":["f1","f9","f1"]}'
    decision = parse_judge_response(raw, known_ids={"f1", "f2"})
    assert decision.used_facts == ("f1",)


def test_majority_vote_rules():
    assert majority_vote([make_assessment(0.9, i=1), make_assessment(0.95, i=2)], T) is Verdict.SUPPORTED
    assert majority_vote([make_assessment(0.9, i=1), make_assessment(0.1, i=2)], T) is Verdict.NEI
    assert majority_vote([make_assessment(0.5, i=1), make_assessment(0.6, i=2)], T) is Verdict.NEI
    assert majority_vote([], T) is Verdict.NEI
    assert majority_vote([make_assessment(0.1, i=1)], T) is Verdict.REFUTED


def test_majority_vote_permutation_invariant():
    rng = random.Random(99)
    assessments = [make_assessment(rng.random(), i=i) for i in range(1, 10)]
    expected = majority_vote(assessments, T)
    for _ in range(20):
        shuffled = assessments[:]
        rng.shuffle(shuffled)
        assert majority_vote(shuffled, T) is expected


def test_deterministic_fallback():
    assessments = [make_assessment(0.9, i=1), make_assessment(0.95, i=2)]
    decision = deterministic_fallback(assessments, T)
    assert decision.final_verdict is Verdict.SUPPORTED
    assert decision.used_facts == ("f1", "f2")
    assert "Judge unavailable" in decision.explanation

    tie = deterministic_fallback([make_assessment(0.9, i=1), make_assessment(0.1, i=2)], T)
    assert tie.final_verdict is Verdict.NEI
    assert tie.used_facts == ("f1", "f2")

    empty = deterministic_fallback([], T)
    assert empty.final_verdict is Verdict.NEI
    assert empty.used_facts == ()


def test_conflict_abstention_identity_without_conflicts():
    decision = JudgeDecision(Verdict.SUPPORTED, "fine", ("f1",))
    assessments = [make_assessment(0.9, i=1)]
    assert apply_conflict_abstention(decision, assessments) == decision


def test_conflict_abstention_overrides_to_nei():
    conflicted = make_assessment(0.85, p_final=0.1, conflict=True)
    decision = JudgeDecision(Verdict.SUPPORTED, "judge said yes", ())
    out = apply_conflict_abstention(decision, [conflicted])
    assert out.final_verdict is Verdict.NEI
    assert "f1" in out.explanation
    assert "judge said yes" in out.explanation


def test_conflict_abstention_idempotent_and_notes_nei():
    conflicted = make_assessment(0.85, p_final=0.1, conflict=True)
    decision = JudgeDecision(Verdict.NEI, "already abstained", ())
    once = apply_conflict_abstention(decision, [conflicted])
    twice = apply_conflict_abstention(once, [conflicted])
    assert once == twice
    assert once.final_verdict is Verdict.NEI
    assert once.explanation.count("abstaining") == 1


def test_judge_happy_path():
    assessments = [make_assessment(0.9, i=1)]
    raw = '{"final_verdict":"Supported","explanation":"f1","used_facts":["f1"]}'
    chat = ScriptedChatProvider(responses=[raw])
    decision = judge(CLAIM, DOC, assessments, chat, Task.THREE_WAY, T)
    assert decision.final_verdict is Verdict.SUPPORTED
    assert chat.calls == 1


class RecordingChat(ScriptedChatProvider):
    def __init__(self, responses):
        super().__init__(responses=responses)
        self.prompts = []

    def complete(self, prompt, json_mode=False):
        self.prompts.append(prompt)
        return super().complete(prompt, json_mode=json_mode)


def test_judge_retries_once_then_falls_back():
    assessments = [make_assessment(0.9, i=1)]
    chat = RecordingChat(["garbage one", "garbage two"])
    decision = judge(CLAIM, DOC, assessments, chat, Task.THREE_WAY, T)
    assert chat.calls == 2
    assert JUDGE_REPAIR_INSTRUCTION in chat.prompts[1]
    assert decision.final_verdict is Verdict.SUPPORTED  # fallback majority
    assert "Judge unavailable" in decision.explanation


def test_judge_with_no_chat_uses_fallback():
    assessments = [make_assessment(0.1, i=1)]
    decision = judge(CLAIM, DOC, assessments, None, Task.THREE_WAY, T)
    assert decision.final_verdict is Verdict.REFUTED


def test_judge_conflict_overrides_scripted_output():
    conflicted = make_assessment(0.85, p_final=0.1, conflict=True, i=1)
    for scripted in ("Supported", "Refuted", "NEI"):
        raw = json.dumps({"final_verdict": scripted, "explanation": "x", "used_facts": []})
        chat = ScriptedChatProvider(responses=[raw])
        decision = judge(CLAIM, DOC, [conflicted], chat, Task.THREE_WAY, T)
        assert decision.final_verdict is Verdict.NEI


def test_judge_filters_unknown_used_facts():
    assessments = [make_assessment(0.9, i=1)]
    raw = '{"final_verdict":"Supported","explanation":"","used_facts":["f1","ghost"]}'
    chat = ScriptedChatProvider(responses=[raw])
    decision = judge(CLAIM, DOC, assessments, chat, Task.THREE_WAY, T)
    assert decision.used_facts == ("f1",)
