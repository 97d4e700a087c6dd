"""Claim-level aggregation: judge prompting, majority vote, conflict abstention.

The judge sees the claim, the document, and the decisive fact sets; its
strict-JSON decision can be overridden to NEI when any fact's web evidence
conflicts with the local context. A deterministic majority-vote fallback
covers judge failures and the no-judge ablation.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from .errors import ProviderError, SchemaError
from .textutil import extract_json_object
from .types import Claim, EvidenceDoc, FactAssessment, FactLabel, Task, Thresholds, Verdict
from .verification import gate

logger = logging.getLogger(__name__)

JUDGE_REPAIR_INSTRUCTION = "Your previous reply was not usable. Return only valid JSON matching the schema."

_VERDICT_BY_LOWER = {v.value.lower(): v for v in Verdict}


@dataclass(frozen=True)
class JudgeDecision:
    final_verdict: Verdict
    explanation: str
    used_facts: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "used_facts", tuple(self.used_facts))


def partition_facts(
    assessments: list[FactAssessment], t: Thresholds
) -> tuple[list[FactAssessment], list[FactAssessment], list[FactAssessment]]:
    """Split into (supported, refuted, uncertain) by gating p_final."""
    supported: list[FactAssessment] = []
    refuted: list[FactAssessment] = []
    uncertain: list[FactAssessment] = []
    for a in assessments:
        label = gate(a.p_final, t)
        if label is FactLabel.SUPPORTED:
            supported.append(a)
        elif label is FactLabel.REFUTED:
            refuted.append(a)
        else:
            uncertain.append(a)
    return supported, refuted, uncertain


def _fact_lines(assessments: list[FactAssessment]) -> str:
    if not assessments:
        return "(none)"
    return "\n".join(f"- [{a.fact.id}] p={a.p_final} {a.fact.text}" for a in assessments)


def build_judge_prompt(
    claim: Claim,
    doc: EvidenceDoc,
    supported: list[FactAssessment],
    refuted: list[FactAssessment],
    mode: Task,
    uncertain: list[FactAssessment],
) -> str:
    """Two-way prompts omit the uncertain facts entirely."""
    sections = [
        "Decide whether the claim is Supported, Refuted, or NEI (not enough "
        "information), given the document and the fact-level verification "
        "results below.",
        "",
        f"Claim: {json.dumps(claim.text, ensure_ascii=False)}",
        "",
        f"Document: {json.dumps(doc.text, ensure_ascii=False)}",
        "",
        "Facts verified as Supported:",
        _fact_lines(supported),
        "",
        "Facts verified as Refuted:",
        _fact_lines(refuted),
    ]
    if mode is Task.THREE_WAY:
        sections += ["", "Facts with Uncertain support:", _fact_lines(uncertain)]
    sections += [
        "",
        "Respond with a single JSON object and nothing else, shaped exactly like:",
        '{"final_verdict": "Supported" | "Refuted" | "NEI", '
        '"explanation": "<short rationale citing fact ids>", '
        '"used_facts": ["<fact id>", ...]}',
    ]
    return "\n".join(sections)


def parse_judge_response(raw: str, known_ids=None) -> JudgeDecision:
    """Validate the judge reply; unknown fact ids are dropped with a warning."""
    data = extract_json_object(raw)
    verdict_raw = data.get("final_verdict")
    if not isinstance(verdict_raw, str) or verdict_raw.strip().lower() not in _VERDICT_BY_LOWER:
        raise SchemaError(f"final_verdict missing or not one of Supported/Refuted/NEI: {verdict_raw!r}")
    explanation = data.get("explanation")
    if not isinstance(explanation, str):
        raise SchemaError("explanation missing or not a string")
    used = data.get("used_facts")
    if not isinstance(used, list) or any(not isinstance(x, str) for x in used):
        raise SchemaError("used_facts missing or not an array of strings")

    deduped: list[str] = []
    for fact_id in used:
        if fact_id not in deduped:
            deduped.append(fact_id)
    if known_ids is not None:
        unknown = [fid for fid in deduped if fid not in known_ids]
        if unknown:
            logger.warning("judge referenced unknown fact ids, dropping: %s", unknown)
            deduped = [fid for fid in deduped if fid in known_ids]
    return JudgeDecision(
        final_verdict=_VERDICT_BY_LOWER[verdict_raw.strip().lower()],
        explanation=explanation,
        used_facts=tuple(deduped),
    )


def majority_vote(assessments: list[FactAssessment], t: Thresholds) -> Verdict:
    """Strict majority of decisive facts; ties (including none) abstain."""
    supported, refuted, _ = partition_facts(assessments, t)
    if len(supported) > len(refuted):
        return Verdict.SUPPORTED
    if len(refuted) > len(supported):
        return Verdict.REFUTED
    return Verdict.NEI


def deterministic_fallback(assessments: list[FactAssessment], t: Thresholds) -> JudgeDecision:
    """Majority-vote decision used when the judge provider is unavailable."""
    supported, refuted, _ = partition_facts(assessments, t)
    supported_ids = [a.fact.id for a in supported]
    refuted_ids = [a.fact.id for a in refuted]
    explanation = (
        "Judge unavailable; deterministic majority vote over decisive facts "
        f"(supported: {supported_ids or '[]'}, refuted: {refuted_ids or '[]'})."
    )
    return JudgeDecision(
        final_verdict=majority_vote(assessments, t),
        explanation=explanation,
        used_facts=tuple(supported_ids + refuted_ids),
    )


def apply_conflict_abstention(
    decision: JudgeDecision, assessments: list[FactAssessment]
) -> JudgeDecision:
    """Override to NEI when any fact's web evidence contradicts its local score."""
    conflicted = [a.fact.id for a in assessments if a.conflict]
    if not conflicted:
        return decision
    note = (
        f"Web evidence conflicts with the provided context for facts "
        f"{', '.join(conflicted)}; abstaining. "
    )
    explanation = decision.explanation
    if not explanation.startswith(note):
        explanation = note + explanation
    return JudgeDecision(
        final_verdict=Verdict.NEI, explanation=explanation, used_facts=decision.used_facts
    )


def judge(
    claim: Claim,
    doc: EvidenceDoc,
    assessments: list[FactAssessment],
    chat,
    mode: Task,
    t: Thresholds,
) -> JudgeDecision:
    """Full aggregation: prompt, parse with one retry, fall back, abstain on conflict."""
    supported, refuted, uncertain = partition_facts(assessments, t)
    prompt = build_judge_prompt(claim, doc, supported, refuted, mode, uncertain)
    known_ids = {a.fact.id for a in assessments}

    decision = None
    if chat is not None:
        current = prompt
        for _ in range(2):
            try:
                raw = chat.complete(current, json_mode=True)
            except ProviderError as exc:
                logger.warning("judge provider failed: %s", exc)
                break
            try:
                decision = parse_judge_response(raw, known_ids=known_ids)
                break
            except SchemaError as exc:
                logger.warning("judge response rejected: %s", exc)
                current = f"{prompt}\n{JUDGE_REPAIR_INSTRUCTION}"
    else:
        logger.warning("no chat provider configured; using deterministic aggregation")
    if decision is None:
        decision = deterministic_fallback(assessments, t)
    return apply_conflict_abstention(decision, assessments)
