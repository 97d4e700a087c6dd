from __future__ import annotations

import random

import pytest

from claimcheck.decomposition import FactSet
from claimcheck.errors import ProtocolError, ProviderError, VerifierUnavailable
from claimcheck.providers import HashEmbeddingProvider, LexicalVerifierProvider
from claimcheck.types import EvidenceDoc, FactLabel, Thresholds
from claimcheck.evidence import chunk_document
from claimcheck.verification import assess_all, gate, score_fact

from conftest import ConstantVerifier, make_fact

T = Thresholds()


def test_score_fact_with_lexical_verifier():
    verifier = LexicalVerifierProvider()
    assert score_fact("aspirin reduces risk", "trials show aspirin reduces risk", verifier) == 1.0
    assert score_fact("gamma delta", "completely unrelated words", verifier) == 0.0
    # half of four claim tokens present
    assert score_fact("alpha beta gamma delta", "alpha beta only", verifier) == 0.5


def test_score_fact_clamps_small_overshoot():
    assert score_fact("a", "b", ConstantVerifier(1.0000004)) == 1.0
    assert score_fact("a", "b", ConstantVerifier(-0.0000004)) == 0.0


def test_score_fact_rejects_out_of_range():
    with pytest.raises(ProtocolError):
        score_fact("a", "b", ConstantVerifier(1.5))


class BrokenVerifier:
    def score(self, claim, evidence):
        raise ProviderError("endpoint down")


def test_score_fact_provider_failure():
    with pytest.raises(VerifierUnavailable):
        score_fact("a", "b", BrokenVerifier())


def test_score_fact_requires_nonempty_inputs():
    with pytest.raises(ValueError):
        score_fact("", "evidence", ConstantVerifier(0.5))
    with pytest.raises(ValueError):
        score_fact("claim", "", ConstantVerifier(0.5))


def test_gate_examples():
    assert gate(0.85, T) is FactLabel.SUPPORTED
    assert gate(0.80, T) is FactLabel.SUPPORTED
    assert gate(0.25, T) is FactLabel.REFUTED
    assert gate(0.50, T) is FactLabel.UNCERTAIN


def test_gate_monotonicity():
    order = {FactLabel.REFUTED: 0, FactLabel.UNCERTAIN: 1, FactLabel.SUPPORTED: 2}
    rng = random.Random(13)
    for _ in range(500):
        p1, p2 = sorted((rng.random(), rng.random()))
        assert order[gate(p1, T)] <= order[gate(p2, T)]


def _facts(*texts):
    return FactSet(facts=tuple(make_fact(i, text) for i, text in enumerate(texts, 1)))


def test_assess_all_order_and_arity():
    doc = EvidenceDoc("alpha beta here. gamma delta there. epsilon zeta everywhere.")
    chunks = chunk_document(doc, 420, 1)
    facts = _facts("alpha beta", "gamma delta", "epsilon zeta")
    assessments = assess_all(facts, doc, chunks, HashEmbeddingProvider(), LexicalVerifierProvider(), T)
    assert [a.fact.id for a in assessments] == ["f1", "f2", "f3"]
    assert all(not a.rescored for a in assessments)
    assert all(a.p_final == a.p_local for a in assessments)


def test_assess_all_supported_end_to_end():
    doc = EvidenceDoc("aspirin reduces stroke risk. platelets aggregate less under aspirin.")
    chunks = chunk_document(doc, 420, 1)
    facts = _facts("aspirin reduces stroke risk", "platelets aggregate less")
    assessments = assess_all(facts, doc, chunks, HashEmbeddingProvider(), LexicalVerifierProvider(), T)
    assert all(a.label is FactLabel.SUPPORTED for a in assessments)
    assert all(a.p_local == 1.0 for a in assessments)


def test_assess_all_labels_consistent_with_gate():
    doc = EvidenceDoc("alpha beta gamma. unrelated filler sentence here.")
    chunks = chunk_document(doc, 420, 1)
    facts = _facts("alpha beta gamma", "alpha beta zeta omega", "missing tokens entirely")
    assessments = assess_all(facts, doc, chunks, None, LexicalVerifierProvider(), T)
    assert [gate(a.p_final, T) for a in assessments] == [a.label for a in assessments]


def test_assess_all_is_deterministic():
    doc = EvidenceDoc("alpha beta gamma. gamma delta epsilon. zeta eta theta.")
    chunks = chunk_document(doc, 30, 1)
    facts = _facts("alpha beta", "zeta eta")
    run = lambda: assess_all(facts, doc, chunks, HashEmbeddingProvider(), LexicalVerifierProvider(), T)
    assert run() == run()
