"""Core domain vocabulary: claims, evidence, facts, labels, thresholds, traces.

All types are immutable value objects; they can be shared freely across
threads. VerdictTrace serializes to one JSON object per line (JSONL) via
``trace_to_json`` / ``trace_from_json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any


class FactLabel(str, Enum):
    SUPPORTED = "Supported"
    REFUTED = "Refuted"
    UNCERTAIN = "Uncertain"


class Verdict(str, Enum):
    SUPPORTED = "Supported"
    REFUTED = "Refuted"
    NEI = "NEI"


class Regime(str, Enum):
    CONTEXT_ONLY = "context-only"
    CONTEXT_WEB = "context-web"


class Ablation(str, Enum):
    NONE = "none"
    NO_ATOMIC = "no-atomic"
    MAJORITY_VOTE = "majority-vote"


class Task(str, Enum):
    """Claim-level decision space: binary or three-way with NEI."""

    TWO_WAY = "two-way"
    THREE_WAY = "three-way"


class SelectionMethod(str, Enum):
    EMBEDDING = "embedding"
    OVERLAP = "overlap"


def label_to_verdict(label: FactLabel) -> Verdict:
    """Map a fact-level label onto the claim-level verdict space."""
    if label is FactLabel.SUPPORTED:
        return Verdict.SUPPORTED
    if label is FactLabel.REFUTED:
        return Verdict.REFUTED
    return Verdict.NEI


def fact_word_count(text: str) -> int:
    """Number of whitespace-delimited tokens; no linguistic tokenization."""
    return len(text.split())


@dataclass(frozen=True)
class Claim:
    """A natural-language statement to verify."""

    text: str

    def __post_init__(self):
        if not isinstance(self.text, str) or not self.text.strip():
            raise ValueError("claim text must contain a non-whitespace character")


@dataclass(frozen=True)
class EvidenceDoc:
    """The single evidence document a claim is verified against."""

    text: str
    source_id: str = ""

    def __post_init__(self):
        if not isinstance(self.text, str) or not self.text:
            raise ValueError("evidence document text must be nonempty")


@dataclass(frozen=True)
class AtomicFact:
    """One predicate-argument unit extracted from a claim.

    ``targets`` lists the entities or terms the fact is about; it may be
    empty. The word cap is enforced during decomposition, not here, because
    the no-atomic fallback deliberately wraps the whole claim.
    """

    id: str
    text: str
    targets: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if not self.id:
            raise ValueError("fact id must be nonempty")


@dataclass(frozen=True)
class Chunk:
    """A contiguous evidence window; offsets index into the source document."""

    start: int
    end: int
    text: str

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid chunk offsets [{self.start}, {self.end})")
        if len(self.text) != self.end - self.start:
            raise ValueError("chunk text length does not match its offsets")


@dataclass(frozen=True)
class Thresholds:
    """Gating thresholds and size caps.

    ``lo``/``hi`` bound the uncertainty band: probabilities >= hi are
    Supported, <= lo are Refuted, and the open interval between them is
    Uncertain (decisive labels win at the boundaries).
    """

    lo: float = 0.25
    hi: float = 0.80
    max_fact_words: int = 25
    max_chunk_chars: int = 420

    def __post_init__(self):
        validate_thresholds(self)


def validate_thresholds(t: Thresholds) -> Thresholds:
    if not (0.0 <= t.lo <= 1.0) or not (0.0 <= t.hi <= 1.0):
        raise ValueError(f"thresholds must lie in [0, 1], got lo={t.lo}, hi={t.hi}")
    if t.lo >= t.hi:
        raise ValueError(f"threshold lo must be strictly below hi, got lo={t.lo}, hi={t.hi}")
    if t.max_fact_words < 1:
        raise ValueError("max_fact_words must be at least 1")
    if t.max_chunk_chars < 1:
        raise ValueError("max_chunk_chars must be at least 1")
    return t


@dataclass(frozen=True)
class FactAssessment:
    """Per-fact verification state, before and after corroboration.

    ``p_local`` is the support probability against the local snippet and is
    never changed afterwards; ``p_final`` equals it unless the fact was
    rescored against web-augmented evidence. ``conflict`` marks the local
    and final probabilities landing in opposite decisive regions.
    """

    fact: AtomicFact
    snippet: Chunk
    selection_method: SelectionMethod
    p_local: float
    p_final: float
    rescored: bool
    label: FactLabel
    web_evidence: str | None = None
    citations: tuple[str, ...] = ()
    conflict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "citations", tuple(self.citations))
        if not (0.0 <= self.p_local <= 1.0) or not (0.0 <= self.p_final <= 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        if not self.rescored:
            if self.p_final != self.p_local:
                raise ValueError("p_final must equal p_local when not rescored")
            if self.web_evidence is not None:
                raise ValueError("web evidence requires rescored=True")
        if self.conflict and not self.rescored:
            raise ValueError("conflict requires rescored=True")


@dataclass(frozen=True)
class VerdictTrace:
    """Full per-example provenance record."""

    example_id: str
    claim: Claim
    baseline_verdict: Verdict | None
    assessments: tuple[FactAssessment, ...]
    judge_verdict: Verdict
    judge_explanation: str
    used_facts: tuple[str, ...]
    regime: Regime
    ablation: Ablation

    def __post_init__(self):
        object.__setattr__(self, "assessments", tuple(self.assessments))
        object.__setattr__(self, "used_facts", tuple(self.used_facts))
        known = {a.fact.id for a in self.assessments}
        unknown = [fid for fid in self.used_facts if fid not in known]
        if unknown:
            raise ValueError(f"used_facts reference unknown fact ids: {unknown}")
        if self.regime is Regime.CONTEXT_ONLY and any(a.rescored for a in self.assessments):
            raise ValueError("context-only traces cannot contain rescored assessments")


def _assessment_to_dict(a: FactAssessment) -> dict[str, Any]:
    return {
        "fact": {"id": a.fact.id, "text": a.fact.text, "targets": list(a.fact.targets)},
        "snippet": {"start": a.snippet.start, "end": a.snippet.end, "text": a.snippet.text},
        "selection_method": a.selection_method.value,
        "p_local": a.p_local,
        "p_final": a.p_final,
        "rescored": a.rescored,
        "label": a.label.value,
        "web_evidence": a.web_evidence,
        "citations": list(a.citations),
        "conflict": a.conflict,
    }


def _assessment_from_dict(d: dict[str, Any]) -> FactAssessment:
    fact = d["fact"]
    snippet = d["snippet"]
    return FactAssessment(
        fact=AtomicFact(id=fact["id"], text=fact["text"], targets=tuple(fact.get("targets", ()))),
        snippet=Chunk(start=snippet["start"], end=snippet["end"], text=snippet["text"]),
        selection_method=SelectionMethod(d["selection_method"]),
        p_local=d["p_local"],
        p_final=d["p_final"],
        rescored=d["rescored"],
        label=FactLabel(d["label"]),
        web_evidence=d.get("web_evidence"),
        citations=tuple(d.get("citations", ())),
        conflict=d.get("conflict", False),
    )


def trace_to_dict(trace: VerdictTrace) -> dict[str, Any]:
    return {
        "example_id": trace.example_id,
        "claim": trace.claim.text,
        "baseline_verdict": None if trace.baseline_verdict is None else trace.baseline_verdict.value,
        "assessments": [_assessment_to_dict(a) for a in trace.assessments],
        "judge_verdict": trace.judge_verdict.value,
        "judge_explanation": trace.judge_explanation,
        "used_facts": list(trace.used_facts),
        "regime": trace.regime.value,
        "ablation": trace.ablation.value,
    }


def trace_from_dict(d: dict[str, Any]) -> VerdictTrace:
    baseline = d.get("baseline_verdict")
    return VerdictTrace(
        example_id=d["example_id"],
        claim=Claim(d["claim"]),
        baseline_verdict=None if baseline is None else Verdict(baseline),
        assessments=tuple(_assessment_from_dict(a) for a in d["assessments"]),
        judge_verdict=Verdict(d["judge_verdict"]),
        judge_explanation=d["judge_explanation"],
        used_facts=tuple(d["used_facts"]),
        regime=Regime(d["regime"]),
        ablation=Ablation(d["ablation"]),
    )


def trace_to_json(trace: VerdictTrace) -> str:
    """One JSONL line; probabilities keep full float precision."""
    return json.dumps(trace_to_dict(trace), ensure_ascii=False)


def trace_from_json(line: str) -> VerdictTrace:
    return trace_from_dict(json.loads(line))


def read_traces_jsonl(path) -> list[VerdictTrace]:
    traces = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                traces.append(trace_from_json(line))
    return traces
