from __future__ import annotations

import json
import random

import pytest

from claimcheck.decomposition import (
    REPAIR_INSTRUCTION,
    FactSet,
    build_decomposition_prompt,
    decompose,
    enforce_fact_constraints,
    parse_decomposition_response,
    single_fact_fallback,
)
from claimcheck.errors import DecompositionFailed, EmptyDecomposition, ProviderError, SchemaError
from claimcheck.providers import ScriptedChatProvider
from claimcheck.types import AtomicFact, Claim, EvidenceDoc, Thresholds, fact_word_count

VALID_RESPONSE = json.dumps(
    {
        "facts": [
            {
                "id": "f1",
                "text": "aspirin reduces stroke risk",
                "targets": ["aspirin", "stroke"],
            }
        ]
    }
)


class RecordingChat(ScriptedChatProvider):
    def __init__(self, responses):
        super().__init__(responses=responses)
        self.prompts = []

    def complete(self, prompt, json_mode=False):
        self.prompts.append(prompt)
        return super().complete(prompt, json_mode=json_mode)


def test_prompt_contains_inputs_and_schema():
    claim = Claim("X")
    doc = EvidenceDoc("Y")
    prompt = build_decomposition_prompt(claim, doc, 25)
    assert '"X"' in prompt
    assert '"Y"' in prompt
    assert "25 words" in prompt
    assert '{"facts": [{"id": "f1", "text": "...", "targets": ["..."]}]}' in prompt


def test_prompt_escapes_embedded_quotes():
    claim = Claim('drug "X" works')
    prompt = build_decomposition_prompt(claim, EvidenceDoc("doc"), 25)
    assert json.dumps(claim.text) in prompt


def test_prompt_is_deterministic():
    claim = Claim("same claim")
    doc = EvidenceDoc("same doc")
    assert build_decomposition_prompt(claim, doc, 25) == build_decomposition_prompt(claim, doc, 25)


def test_parse_valid_response():
    fs = parse_decomposition_response(VALID_RESPONSE)
    assert len(fs.facts) == 1
    fact = fs.facts[0]
    assert fact.id == "f1"
    assert fact.text == "aspirin reduces stroke risk"
    assert fact.targets == ("aspirin", "stroke")
    assert fs.raw_response == VALID_RESPONSE


def test_parse_empty_facts():
    with pytest.raises(EmptyDecomposition):
        parse_decomposition_response('{"facts": []}')


@pytest.mark.parametrize(
    "raw",
    [
        "not json",
        "{}",
        '{"facts": "nope"}',
        '{"facts": [42]}',
        '{"facts": [{"id": "f1"}]}',
        '{"facts": [{"text": "ok", "targets": "nope"}]}',
        '{"facts": [{"text": "ok", "targets": [1]}]}',
        "[1, 2]",
    ],
)
def test_parse_rejects_malformed(raw):
    with pytest.raises(SchemaError):
        parse_decomposition_response(raw)


def test_parse_accepts_fenced_json():
    fs = parse_decomposition_response(f"```json\n{VALID_RESPONSE}\n```")
    assert len(fs.facts) == 1


def test_parse_assigns_ids_when_missing_or_duplicated():
    raw = '{"facts": [{"text": "a b"}, {"text": "c d"}]}'
    fs = parse_decomposition_response(raw)
    assert [f.id for f in fs.facts] == ["f1", "f2"]

    raw = '{"facts": [{"id": "x", "text": "a b"}, {"id": "x", "text": "c d"}]}'
    fs = parse_decomposition_response(raw)
    assert [f.id for f in fs.facts] == ["f1", "f2"]


def test_parse_ignores_extra_fields():
    raw = '{"facts": [{"id": "f1", "text": "a b", "targets": [], "confidence": 0.9}], "note": "x"}'
    assert len(parse_decomposition_response(raw).facts) == 1


def _fact_set(*texts):
    return FactSet(
        facts=tuple(AtomicFact(id=f"a{i}", text=t) for i, t in enumerate(texts, 1)),
        raw_response="raw",
    )


def test_enforce_drops_overlong_fact():
    long_text = " ".join(f"w{i}" for i in range(30))
    assert fact_word_count(long_text) == 30
    fs = enforce_fact_constraints(_fact_set("alpha one", long_text, "beta two"), 25)
    assert [f.text for f in fs.facts] == ["alpha one", "beta two"]
    assert [f.id for f in fs.facts] == ["f1", "f2"]


def test_enforce_dedupes_normalized_text():
    fs = enforce_fact_constraints(_fact_set("Alpha   One", "alpha one", "beta"), 25)
    assert [f.text for f in fs.facts] == ["Alpha   One", "beta"]


def test_enforce_resequences_ids_when_all_valid():
    fs = enforce_fact_constraints(_fact_set("one", "two"), 25)
    assert [f.id for f in fs.facts] == ["f1", "f2"]
    assert [f.text for f in fs.facts] == ["one", "two"]


def test_enforce_is_idempotent():
    rng = random.Random(3)
    for _ in range(50):
        texts = []
        for _ in range(rng.randint(1, 6)):
            n_words = rng.choice([2, 5, 24, 25, 26, 40])
            texts.append(" ".join(rng.choice("abcdefg") for _ in range(n_words)))
        try:
            once = enforce_fact_constraints(_fact_set(*texts), 25)
        except EmptyDecomposition:
            continue
        assert enforce_fact_constraints(once, 25) == once
        assert all(fact_word_count(f.text) <= 25 for f in once.facts)


def test_enforce_all_dropped():
    long_text = " ".join(["w"] * 30)
    with pytest.raises(EmptyDecomposition):
        enforce_fact_constraints(_fact_set(long_text), 25)


def test_decompose_happy_path():
    chat = RecordingChat([VALID_RESPONSE])
    fs = decompose(Claim("c"), EvidenceDoc("d"), chat, Thresholds())
    assert len(fs.facts) == 1
    assert chat.calls == 1


def test_decompose_repairs_after_garbage():
    chat = RecordingChat(["garbage", VALID_RESPONSE])
    fs = decompose(Claim("c"), EvidenceDoc("d"), chat, Thresholds(), retries=1)
    assert len(fs.facts) == 1
    assert chat.calls == 2
    assert REPAIR_INSTRUCTION in chat.prompts[1]
    assert REPAIR_INSTRUCTION not in chat.prompts[0]


def test_decompose_exhausts_retries():
    chat = RecordingChat(["garbage"] * 5)
    with pytest.raises(DecompositionFailed) as excinfo:
        decompose(Claim("c"), EvidenceDoc("d"), chat, Thresholds(), retries=2)
    assert chat.calls == 3
    assert excinfo.value.raw_response == "garbage"


def test_decompose_provider_failure():
    chat = ScriptedChatProvider(responses=[])
    with pytest.raises(DecompositionFailed):
        decompose(Claim("c"), EvidenceDoc("d"), chat, Thresholds())


def test_single_fact_fallback():
    fs = single_fact_fallback(Claim("X causes Y"))
    assert fs.facts == (AtomicFact(id="f1", text="X causes Y", targets=()),)

    long_claim = " ".join(["word"] * 40)
    fs = single_fact_fallback(Claim(long_claim))
    assert len(fs.facts) == 1
    assert fs.facts[0].text == long_claim

    with pytest.raises(ValueError):
        single_fact_fallback(Claim("   "))


def test_fact_set_rejects_duplicate_ids():
    with pytest.raises(ValueError):
        FactSet(facts=(AtomicFact(id="f1", text="a"), AtomicFact(id="f1", text="b")))
