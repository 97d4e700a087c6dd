"""Per-fact scoring against local snippets and probability gating."""

from __future__ import annotations

from .decomposition import FactSet
from .errors import ProtocolError, ProviderError, VerifierUnavailable
from .evidence import select_snippet
from .types import Chunk, EvidenceDoc, FactAssessment, FactLabel, Thresholds

# Providers may return e.g. 1.0000004 from float round-tripping; anything
# further out of range is a protocol violation.
CLAMP_TOLERANCE = 1e-6


def score_fact(fact_text: str, evidence_text: str, verifier) -> float:
    """Calibrated support probability for a statement given evidence."""
    if not fact_text or not evidence_text:
        raise ValueError("fact and evidence text must be nonempty")
    try:
        p = float(verifier.score(fact_text, evidence_text))
    except ProviderError as exc:
        raise VerifierUnavailable(str(exc)) from exc
    if -CLAMP_TOLERANCE <= p < 0.0:
        p = 0.0
    elif 1.0 < p <= 1.0 + CLAMP_TOLERANCE:
        p = 1.0
    if not 0.0 <= p <= 1.0:
        raise ProtocolError(f"verifier probability out of range: {p}")
    return p


def gate(p: float, t: Thresholds) -> FactLabel:
    """Map a probability to a label; boundaries are decisive.

    p >= hi is Supported and p <= lo is Refuted, so the Uncertain band is
    the open interval (lo, hi).
    """
    if p >= t.hi:
        return FactLabel.SUPPORTED
    if p <= t.lo:
        return FactLabel.REFUTED
    return FactLabel.UNCERTAIN


def assess_all(
    facts: FactSet,
    doc: EvidenceDoc,
    chunks: list[Chunk],
    emb,
    verifier,
    t: Thresholds,
) -> list[FactAssessment]:
    """Select a snippet and score every fact, in input order."""
    if not chunks:
        chunks = [Chunk(0, len(doc.text), doc.text)]
    assessments = []
    for fact in facts.facts:
        scored = select_snippet(fact, chunks, emb)
        p = score_fact(fact.text, scored.chunk.text, verifier)
        assessments.append(
            FactAssessment(
                fact=fact,
                snippet=scored.chunk,
                selection_method=scored.method,
                p_local=p,
                p_final=p,
                rescored=False,
                label=gate(p, t),
            )
        )
    return assessments
