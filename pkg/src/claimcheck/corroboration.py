"""Uncertainty-triggered web corroboration.

Only facts gated Uncertain reach this stage: each gets one web query, the
results are filtered against a domain allowlist, summarized with inline
citations, appended to the local snippet, and re-scored. Degradations
(no results, failed summarization) leave the fact unrescored; they never
abort the example.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, replace
from urllib.parse import urlparse

from .errors import ProviderError, SummarizationFailed
from .textutil import normalize_ws
from .types import AtomicFact, Chunk, FactAssessment, FactLabel, Thresholds
from .verification import gate, score_fact

logger = logging.getLogger(__name__)

WEB_EVIDENCE_SEPARATOR = "---WEB EVIDENCE---"
SUMMARY_WORD_CAP = 120
DEFAULT_QUERY_MAX_LEN = 256

# Reasonable starting point for biomedical claims; the list is configuration,
# not policy baked into the pipeline.
DEFAULT_ALLOWLIST = (
    "nih.gov",
    "who.int",
    "cdc.gov",
    "fda.gov",
    "clinicaltrials.gov",
    "wikipedia.org",
    "pubmed.ncbi.nlm.nih.gov",
)

_MARKER_RE = re.compile(r"\[(\d+)\]")


@dataclass(frozen=True)
class SearchResult:
    url: str
    title: str = ""
    snippet: str = ""


@dataclass(frozen=True)
class Allowlist:
    """Registrable domains web evidence may come from (e.g. "nih.gov")."""

    domains: tuple[str, ...]

    def __post_init__(self):
        normalized = tuple(d.strip().lower() for d in self.domains)
        if not normalized:
            raise ValueError("allowlist must be nonempty")
        for domain in normalized:
            if not domain or "/" in domain or ":" in domain:
                raise ValueError(f"allowlist entries must be bare domains, got {domain!r}")
        object.__setattr__(self, "domains", normalized)


@dataclass(frozen=True)
class WebEvidence:
    """Cited summary of allowlisted search results.

    ``citations[i]`` is the URL the marker ``[i+1]`` in the summary refers to.
    """

    summary: str
    citations: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "citations", tuple(self.citations))
        if not self.summary.strip():
            raise ValueError("web-evidence summary must be nonempty")


def build_web_query(fact: AtomicFact, snippet: Chunk, max_len: int = DEFAULT_QUERY_MAX_LEN) -> str:
    """Fact text plus as much snippet context as fits in max_len characters.

    The fact text itself is never split, even if longer than max_len.
    """
    fact_text = normalize_ws(fact.text)
    budget = max_len - len(fact_text) - 1
    if budget <= 0:
        return fact_text
    context = normalize_ws(snippet.text)[:budget]
    if not context:
        return fact_text
    return f"{fact_text} {context}".rstrip()


def host_matches(host: str, domain: str) -> bool:
    """Suffix match aligned at a label boundary: nih.gov admits
    pubmed.ncbi.nlm.nih.gov but not evil-nih.gov."""
    return host == domain or host.endswith("." + domain)


def filter_results_by_domain(results: list[SearchResult], allow: Allowlist) -> list[SearchResult]:
    kept = []
    for result in results:
        try:
            host = urlparse(result.url).hostname
        except ValueError:
            host = None
        if host and any(host_matches(host, domain) for domain in allow.domains):
            kept.append(result)
    return kept


def build_summary_prompt(results: list[SearchResult], fact: AtomicFact) -> str:
    lines = [
        f"Summarize, in at most {SUMMARY_WORD_CAP} words, what the numbered sources "
        "below say about this statement. Cite sources inline with bracketed numbers "
        "like [1] or [2]; use only the numbered sources.",
        "",
        f"Statement: {json.dumps(fact.text, ensure_ascii=False)}",
        "",
        "Sources:",
    ]
    for i, result in enumerate(results, start=1):
        title = normalize_ws(result.title) or "(untitled)"
        snippet = normalize_ws(result.snippet)
        lines.append(f"[{i}] {title} - {snippet} ({result.url})")
    lines.append("")
    lines.append("Respond with the summary text only.")
    return "\n".join(lines)


def _extract_citations(raw_summary: str, results: list[SearchResult]) -> tuple[str, list[str]]:
    """Keep in-range markers, renumber them by first reference, drop the rest."""
    order: list[int] = []
    for match in _MARKER_RE.finditer(raw_summary):
        n = int(match.group(1))
        if 1 <= n <= len(results) and n not in order:
            order.append(n)
    renumber = {n: i for i, n in enumerate(order, start=1)}

    def _replace(match: re.Match) -> str:
        n = int(match.group(1))
        return f"[{renumber[n]}]" if n in renumber else ""

    summary = _MARKER_RE.sub(_replace, raw_summary).strip()
    citations = [results[n - 1].url for n in order]
    return summary, citations


def summarize_with_citations(results: list[SearchResult], fact: AtomicFact, chat) -> WebEvidence:
    """Summarize filtered results with positional citation markers."""
    if not results:
        raise ValueError("results must be nonempty and already filtered")
    if chat is None:
        raise SummarizationFailed("no chat provider configured")
    prompt = build_summary_prompt(results, fact)
    try:
        raw = chat.complete(prompt, json_mode=False)
    except ProviderError as exc:
        raise SummarizationFailed(str(exc)) from exc
    summary, citations = _extract_citations(raw, results)
    if not summary.strip():
        raise SummarizationFailed("provider returned an empty summary")
    return WebEvidence(summary=summary, citations=tuple(citations))


def augment_evidence(snippet: Chunk, web: WebEvidence) -> str:
    return f"{snippet.text}\n{WEB_EVIDENCE_SEPARATOR}\n{web.summary}"


def corroborate_fact(
    a: FactAssessment,
    search,
    chat,
    verifier,
    allow: Allowlist,
    t: Thresholds,
    k: int = 5,
) -> FactAssessment:
    """Re-score one fact against web-augmented evidence.

    Search failures count as zero results; zero surviving results or a
    failed summarization return the assessment unchanged. ``p_local`` is
    never touched; ``conflict`` marks the local and updated probabilities
    landing in opposite decisive regions.
    """
    query = build_web_query(a.fact, a.snippet)
    try:
        results = search.search(query, limit=k, site_hints=list(allow.domains))
    except ProviderError as exc:
        logger.warning("search failed for fact %s: %s", a.fact.id, exc)
        results = []
    kept = filter_results_by_domain(results, allow)
    if not kept:
        return a
    try:
        web = summarize_with_citations(kept, a.fact, chat)
    except SummarizationFailed as exc:
        logger.warning("summarization failed for fact %s: %s", a.fact.id, exc)
        return a
    augmented = augment_evidence(a.snippet, web)
    p_new = score_fact(a.fact.text, augmented, verifier)
    conflict = (a.p_local >= t.hi and p_new <= t.lo) or (a.p_local <= t.lo and p_new >= t.hi)
    return replace(
        a,
        p_final=p_new,
        rescored=True,
        label=gate(p_new, t),
        web_evidence=web.summary,
        citations=tuple(web.citations),
        conflict=conflict,
    )


def corroborate_uncertain(
    assessments: list[FactAssessment],
    search,
    chat,
    verifier,
    allow: Allowlist,
    t: Thresholds,
    k: int = 5,
) -> list[FactAssessment]:
    """Corroborate exactly the Uncertain-labeled assessments, order preserved."""
    return [
        corroborate_fact(a, search, chat, verifier, allow, t, k)
        if a.label is FactLabel.UNCERTAIN
        else a
        for a in assessments
    ]
