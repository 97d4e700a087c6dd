"""Claim decomposition into atomic facts via a chat provider in JSON mode.

The provider is asked for strict JSON ``{"facts": [{"id", "text",
"targets"}]}``; malformed replies get one repair reissue per retry before
the decomposition is declared failed.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from .errors import DecompositionFailed, EmptyDecomposition, ProviderError, SchemaError
from .textutil import extract_json_object
from .types import AtomicFact, Claim, EvidenceDoc, Thresholds, fact_word_count

logger = logging.getLogger(__name__)

REPAIR_INSTRUCTION = "Your previous reply was not usable. Return only valid JSON matching the schema."


@dataclass(frozen=True)
class FactSet:
    """Validated atomic facts plus the raw provider output kept for traces."""

    facts: tuple[AtomicFact, ...]
    raw_response: str = ""

    def __post_init__(self):
        object.__setattr__(self, "facts", tuple(self.facts))
        ids = [f.id for f in self.facts]
        if len(ids) != len(set(ids)):
            raise ValueError(f"fact ids must be unique, got {ids}")


def build_decomposition_prompt(claim: Claim, doc: EvidenceDoc, max_words: int) -> str:
    """Deterministic prompt; claim and document are embedded as JSON strings
    so embedded quotes cannot break the structure."""
    return (
        "Break the claim below into atomic facts, using the document to resolve "
        "pronouns and abbreviations.\n"
        "Rules:\n"
        "- Each fact states a single predicate-argument relation.\n"
        f"- Each fact is at most {max_words} words.\n"
        '- "targets" lists the entities or terms the fact is about (may be empty).\n'
        "- Respond with a single JSON object and nothing else, shaped exactly like:\n"
        '  {"facts": [{"id": "f1", "text": "...", "targets": ["..."]}]}\n'
        "\n"
        f"Claim: {json.dumps(claim.text, ensure_ascii=False)}\n"
        "\n"
        f"Document: {json.dumps(doc.text, ensure_ascii=False)}\n"
    )


def parse_decomposition_response(raw: str) -> FactSet:
    """Validate the provider reply; ids are reassigned when missing or duplicated."""
    data = extract_json_object(raw)
    entries = data.get("facts")
    if not isinstance(entries, list):
        raise SchemaError('"facts" missing or not an array')
    if not entries:
        raise EmptyDecomposition("decomposition returned no facts")

    texts: list[str] = []
    targets_per_fact: list[tuple[str, ...]] = []
    ids: list[str] = []
    for idx, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise SchemaError(f"facts[{idx}] is not an object")
        text = entry.get("text")
        if not isinstance(text, str):
            raise SchemaError(f"facts[{idx}].text missing or not a string")
        targets = entry.get("targets", [])
        if not isinstance(targets, list) or any(not isinstance(x, str) for x in targets):
            raise SchemaError(f"facts[{idx}].targets is not an array of strings")
        fact_id = entry.get("id")
        if fact_id is not None and not isinstance(fact_id, str):
            raise SchemaError(f"facts[{idx}].id is not a string")
        texts.append(text)
        targets_per_fact.append(tuple(targets))
        ids.append(fact_id or "")

    if any(not fid for fid in ids) or len(set(ids)) != len(ids):
        ids = [f"f{i}" for i in range(1, len(texts) + 1)]
    facts = tuple(
        AtomicFact(id=fid, text=text, targets=targets)
        for fid, text, targets in zip(ids, texts, targets_per_fact)
    )
    return FactSet(facts=facts, raw_response=raw)


def enforce_fact_constraints(fs: FactSet, max_words: int) -> FactSet:
    """Drop over-long and duplicate facts, then re-sequence ids to f1..fn.

    Over-long facts are dropped rather than truncated: truncation could
    silently change the predicate-argument meaning.
    """
    kept: list[AtomicFact] = []
    seen: set[str] = set()
    for fact in fs.facts:
        key = " ".join(fact.text.split()).lower()
        if not key:
            continue
        if fact_word_count(fact.text) > max_words:
            continue
        if key in seen:
            continue
        seen.add(key)
        kept.append(fact)
    if not kept:
        raise EmptyDecomposition("no facts satisfied the word-count constraint")
    facts = tuple(
        AtomicFact(id=f"f{i}", text=fact.text, targets=fact.targets)
        for i, fact in enumerate(kept, start=1)
    )
    return FactSet(facts=facts, raw_response=fs.raw_response)


def decompose(claim: Claim, doc: EvidenceDoc, chat, t: Thresholds, retries: int = 2) -> FactSet:
    """Prompt, parse, and constrain; one repair reissue per retry."""
    prompt = build_decomposition_prompt(claim, doc, t.max_fact_words)
    current = prompt
    raw = ""
    last_error: Exception | None = None
    for _ in range(retries + 1):
        try:
            raw = chat.complete(current, json_mode=True)
        except ProviderError as exc:
            raise DecompositionFailed(f"chat provider failed: {exc}", raw_response=raw) from exc
        try:
            return enforce_fact_constraints(parse_decomposition_response(raw), t.max_fact_words)
        except (SchemaError, EmptyDecomposition) as exc:
            last_error = exc
            logger.debug("decomposition attempt rejected: %s", exc)
            current = f"{prompt}\n{REPAIR_INSTRUCTION}"
    raise DecompositionFailed(
        f"no valid decomposition after {retries + 1} attempts: {last_error}", raw_response=raw
    )


def single_fact_fallback(claim: Claim) -> FactSet:
    """No-atomic ablation: the whole claim as one fact, word cap waived."""
    return FactSet(facts=(AtomicFact(id="f1", text=claim.text, targets=()),), raw_response="")
