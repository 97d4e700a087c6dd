"""Evidence-grounded claim verification.

Decompose a claim into atomic facts, align each to a local evidence
snippet, score support with a calibrated verifier, corroborate only the
uncertain facts via domain-allowlisted web search, and aggregate into an
interpretable Supported/Refuted/NEI verdict with full provenance.
"""

from .aggregation import JudgeDecision, judge, majority_vote
from .corroboration import Allowlist, SearchResult, WebEvidence
from .datasets import DatasetExample, load_bionli, load_climatefever, load_pubmedfact
from .decomposition import FactSet, decompose, single_fact_fallback
from .errors import ClaimCheckError
from .evidence import chunk_document, select_snippet, split_sentences
from .metrics import NeiPolicy, evaluate, histogram_before_after
from .pipeline import PipelineConfig, ProviderBundle, build_providers, load_config, run_dataset, run_pipeline
from .types import (
    Ablation,
    AtomicFact,
    Chunk,
    Claim,
    EvidenceDoc,
    FactAssessment,
    FactLabel,
    Regime,
    Task,
    Thresholds,
    Verdict,
    VerdictTrace,
    trace_from_json,
    trace_to_json,
)
from .verification import assess_all, gate, score_fact

__version__ = "0.1.0"

__all__ = [
    "Ablation",
    "Allowlist",
    "AtomicFact",
    "Chunk",
    "Claim",
    "ClaimCheckError",
    "DatasetExample",
    "EvidenceDoc",
    "FactAssessment",
    "FactLabel",
    "FactSet",
    "JudgeDecision",
    "NeiPolicy",
    "PipelineConfig",
    "ProviderBundle",
    "Regime",
    "SearchResult",
    "Task",
    "Thresholds",
    "Verdict",
    "VerdictTrace",
    "WebEvidence",
    "assess_all",
    "build_providers",
    "chunk_document",
    "decompose",
    "evaluate",
    "gate",
    "histogram_before_after",
    "judge",
    "load_bionli",
    "load_climatefever",
    "load_config",
    "load_pubmedfact",
    "majority_vote",
    "run_dataset",
    "run_pipeline",
    "score_fact",
    "select_snippet",
    "single_fact_fallback",
    "split_sentences",
    "trace_from_json",
    "trace_to_json",
]
