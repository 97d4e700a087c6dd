"""Deterministic test doubles shared across the suite.

StubChat is a pure function of the prompt (no network, no state beyond
call counters), which keeps multi-threaded end-to-end runs byte-for-byte
reproducible.
"""

from __future__ import annotations

import json
import re
import threading

from claimcheck.corroboration import WEB_EVIDENCE_SEPARATOR, SearchResult
from claimcheck.providers import ChatProvider, SearchProvider, VerifierProvider
from claimcheck.types import AtomicFact, Chunk, FactAssessment, SelectionMethod, Thresholds
from claimcheck.verification import gate

_CLAIM_LINE = re.compile(r'^Claim: (".*")$', re.MULTILINE)
_STATEMENT_LINE = re.compile(r'^Statement: (".*")$', re.MULTILINE)
_FACT_ID = re.compile(r"- \[([^\]]+)\]")
_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


class StubChat(ChatProvider):
    """Rule-based chat double: decomposes claims into sentence facts, judges
    by majority of the decisive sections, and summarizes by echoing the
    statement with a [1] citation."""

    def __init__(self):
        self._lock = threading.Lock()
        self.calls = 0
        self.decompose_calls = 0
        self.judge_calls = 0
        self.summary_calls = 0

    def complete(self, prompt: str, json_mode: bool = False) -> str:
        with self._lock:
            self.calls += 1
        if '"facts"' in prompt:
            with self._lock:
                self.decompose_calls += 1
            return self._decompose(prompt)
        if '"final_verdict"' in prompt:
            with self._lock:
                self.judge_calls += 1
            return self._judge(prompt)
        with self._lock:
            self.summary_calls += 1
        return self._summarize(prompt)

    def _decompose(self, prompt: str) -> str:
        claim = json.loads(_CLAIM_LINE.search(prompt).group(1))
        sentences = [s.strip() for s in _SENTENCE_SPLIT.split(claim) if s.strip()]
        facts = [
            {"id": f"f{i}", "text": sentence, "targets": []}
            for i, sentence in enumerate(sentences, start=1)
        ]
        return json.dumps({"facts": facts})

    @staticmethod
    def _section_ids(prompt: str, header: str, stops: tuple[str, ...]) -> list[str]:
        start = prompt.index(header) + len(header)
        end = len(prompt)
        for stop in stops:
            pos = prompt.find(stop, start)
            if pos != -1:
                end = min(end, pos)
        return _FACT_ID.findall(prompt[start:end])

    def _judge(self, prompt: str) -> str:
        supported = self._section_ids(
            prompt,
            "Facts verified as Supported:",
            ("Facts verified as Refuted:",),
        )
        refuted = self._section_ids(
            prompt,
            "Facts verified as Refuted:",
            ("Facts with Uncertain support:", "Respond with"),
        )
        if len(supported) > len(refuted):
            verdict = "Supported"
        elif len(refuted) > len(supported):
            verdict = "Refuted"
        else:
            verdict = "NEI"
        used = supported + refuted
        explanation = f"Decisive facts: {', '.join(used) if used else 'none'}."
        return json.dumps(
            {"final_verdict": verdict, "explanation": explanation, "used_facts": used}
        )

    def _summarize(self, prompt: str) -> str:
        statement = json.loads(_STATEMENT_LINE.search(prompt).group(1))
        return f"Reported findings state that {statement} [1]."


class CountingSearchProvider(SearchProvider):
    """Returns the same canned results for every query; counts invocations."""

    def __init__(self, results=None):
        if results is None:
            results = [
                SearchResult(
                    url="https://pubmed.ncbi.nlm.nih.gov/1234/",
                    title="Reference record",
                    snippet="independent supporting snippet",
                )
            ]
        self.results = list(results)
        self.calls = 0
        self._lock = threading.Lock()

    def search(self, query, limit, site_hints=None):
        with self._lock:
            self.calls += 1
        return self.results[:limit]


class MappingVerifier(VerifierProvider):
    """Fixed probability, switching to a second one once web evidence is appended."""

    def __init__(self, p_base: float, p_augmented: float):
        self.p_base = p_base
        self.p_augmented = p_augmented

    def score(self, claim, evidence):
        if WEB_EVIDENCE_SEPARATOR in evidence:
            return self.p_augmented
        return self.p_base


class ConstantVerifier(VerifierProvider):
    def __init__(self, p: float):
        self.p = p

    def score(self, claim, evidence):
        return self.p


def make_fact(i: int = 1, text: str = "alpha treats beta", targets=()) -> AtomicFact:
    return AtomicFact(id=f"f{i}", text=text, targets=tuple(targets))


def make_chunk(text: str = "alpha treats beta in controlled trials.", start: int = 0) -> Chunk:
    return Chunk(start=start, end=start + len(text), text=text)


def make_assessment(
    p_local: float,
    p_final: float | None = None,
    i: int = 1,
    text: str = "alpha treats beta",
    label=None,
    conflict: bool = False,
    t: Thresholds | None = None,
    citations=(),
    web_evidence=None,
) -> FactAssessment:
    t = t or Thresholds()
    rescored = p_final is not None and (p_final != p_local or conflict or web_evidence is not None)
    if p_final is None:
        p_final = p_local
    return FactAssessment(
        fact=make_fact(i, text=text),
        snippet=make_chunk(),
        selection_method=SelectionMethod.OVERLAP,
        p_local=p_local,
        p_final=p_final,
        rescored=rescored,
        label=label if label is not None else gate(p_final, t),
        web_evidence=web_evidence,
        citations=tuple(citations),
        conflict=conflict,
    )
