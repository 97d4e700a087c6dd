"""Evidence windowing and per-fact snippet selection.

The document is split into sentences, packed into overlapping chunks of at
most ``max_chars`` characters, and each fact picks the chunk with the
highest embedding cosine against its query; token overlap is the
deterministic fallback when embeddings are unavailable.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .errors import DimensionError, EmbeddingUnavailable, ProviderError, ZeroVectorError
from .textutil import token_set
from .types import AtomicFact, Chunk, EvidenceDoc, SelectionMethod

logger = logging.getLogger(__name__)

_TERMINATORS = ".!?"


@dataclass(frozen=True)
class ScoredChunk:
    """A chunk together with the score and method that selected it."""

    chunk: Chunk
    score: float
    method: SelectionMethod

    def __post_init__(self):
        if self.method is SelectionMethod.EMBEDDING:
            if not -1.0 <= self.score <= 1.0:
                raise ValueError(f"cosine score out of range: {self.score}")
        elif not 0.0 <= self.score <= 1.0:
            raise ValueError(f"overlap score out of range: {self.score}")


def split_sentences(text: str) -> list[tuple[str, int]]:
    """Split at ``. ! ?`` followed by whitespace or end-of-text.

    The terminator stays with its sentence and offsets index into the
    original text. Abbreviations like "e.g." may split; chunk packing
    absorbs that noise.
    """
    sentences: list[tuple[str, int]] = []
    n = len(text)
    i = 0
    while i < n and text[i].isspace():
        i += 1
    start = i
    while i < n:
        if text[i] in _TERMINATORS and (i + 1 >= n or text[i + 1].isspace()):
            sentences.append((text[start : i + 1], start))
            i += 1
            while i < n and text[i].isspace():
                i += 1
            start = i
        else:
            i += 1
    if start < n:
        sentences.append((text[start:], start))
    return sentences


def chunk_document(doc: EvidenceDoc, max_chars: int, overlap_sentences: int = 1) -> list[Chunk]:
    """Greedily pack consecutive sentences into windows of <= max_chars.

    Each next window starts ``overlap_sentences`` sentences before the
    previous one ended. A single sentence longer than max_chars becomes its
    own chunk. Every sentence lands in at least one chunk.
    """
    if max_chars < 1:
        raise ValueError("max_chars must be at least 1")
    if overlap_sentences < 0:
        raise ValueError("overlap_sentences must be nonnegative")
    sentences = split_sentences(doc.text)
    if not sentences:
        # whitespace-only document: one window covering all of it
        return [Chunk(0, len(doc.text), doc.text)]

    chunks: list[Chunk] = []
    n = len(sentences)
    i = 0
    prev_last = -1
    while i < n:
        start = sentences[i][1]
        j = i
        while j + 1 < n:
            nxt_text, nxt_off = sentences[j + 1]
            if nxt_off + len(nxt_text) - start > max_chars:
                break
            j += 1
        if j <= prev_last:
            # the overlap window cannot fit any new sentence; drop the
            # overlap at this boundary to keep the window bound
            i = prev_last + 1
            continue
        end = sentences[j][1] + len(sentences[j][0])
        chunks.append(Chunk(start, end, doc.text[start:end]))
        if j >= n - 1:
            break
        prev_last = j
        i = max(0, j + 1 - overlap_sentences)
    return chunks


def build_fact_query(fact: AtomicFact) -> str:
    """Fact text plus any targets not already mentioned in it."""
    parts = [fact.text]
    text_lower = fact.text.lower()
    seen: set[str] = set()
    for target in fact.targets:
        target = target.strip()
        key = target.lower()
        if not key or key in seen or key in text_lower:
            continue
        seen.add(key)
        parts.append(target)
    return " ".join(parts)


def cosine(u, v) -> float:
    # plain left-to-right float arithmetic: bit-identical across platforms,
    # unlike BLAS-backed kernels whose summation order varies
    u = [float(x) for x in u]
    v = [float(x) for x in v]
    if len(u) != len(v):
        raise DimensionError(f"vector dimensions differ: {len(u)} vs {len(v)}")
    dot = sum(a * b for a, b in zip(u, v))
    norm_u_sq = sum(a * a for a in u)
    norm_v_sq = sum(b * b for b in v)
    if norm_u_sq == 0.0 or norm_v_sq == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for a zero vector")
    return dot / (math.sqrt(norm_u_sq) * math.sqrt(norm_v_sq))


def _argmax_chunk(scored: list[tuple[Chunk, float]]) -> tuple[Chunk, float]:
    # ties go to the smallest start offset
    best_chunk, best_score = scored[0]
    for chunk, score in scored[1:]:
        if score > best_score or (score == best_score and chunk.start < best_chunk.start):
            best_chunk, best_score = chunk, score
    return best_chunk, best_score


def select_snippet_embedding(query: str, chunks: list[Chunk], emb) -> ScoredChunk:
    """Argmax-cosine chunk for the query, embedding everything in one batch."""
    if not chunks:
        raise ValueError("chunks must be nonempty")
    try:
        vectors = emb.embed([query] + [c.text for c in chunks])
        query_vec = vectors[0]
        scored = [(chunk, cosine(query_vec, vec)) for chunk, vec in zip(chunks, vectors[1:])]
    except (ProviderError, ZeroVectorError, DimensionError) as exc:
        raise EmbeddingUnavailable(str(exc)) from exc
    chunk, score = _argmax_chunk(scored)
    score = min(1.0, max(-1.0, score))
    return ScoredChunk(chunk=chunk, score=score, method=SelectionMethod.EMBEDDING)


def select_snippet_overlap(query: str, chunks: list[Chunk]) -> ScoredChunk:
    """Deterministic fallback: containment of query tokens in the chunk."""
    if not chunks:
        raise ValueError("chunks must be nonempty")
    query_tokens = token_set(query)
    denom = max(1, len(query_tokens))
    scored = [(c, len(query_tokens & token_set(c.text)) / denom) for c in chunks]
    chunk, score = _argmax_chunk(scored)
    return ScoredChunk(chunk=chunk, score=score, method=SelectionMethod.OVERLAP)


def select_snippet(fact: AtomicFact, chunks: list[Chunk], emb=None) -> ScoredChunk:
    """Embedding selection when a provider is available, overlap otherwise."""
    query = build_fact_query(fact)
    if emb is not None:
        try:
            return select_snippet_embedding(query, chunks, emb)
        except EmbeddingUnavailable as exc:
            logger.warning("embedding selection failed (%s); falling back to token overlap", exc)
    return select_snippet_overlap(query, chunks)
