"""End-to-end orchestration, configuration, and trace persistence.

Per example: baseline verifier score, decomposition (or the whole-claim
fallback), chunking, snippet selection, verification, web corroboration of
Uncertain facts when the regime allows it, and judge aggregation with
conflict abstention. Provider degradations downgrade the example to an NEI
trace with a diagnostic explanation; they never abort a dataset run.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .aggregation import JudgeDecision, apply_conflict_abstention, judge, majority_vote, partition_facts
from .corroboration import Allowlist, corroborate_uncertain
from .datasets import DatasetExample
from .decomposition import decompose, single_fact_fallback
from .errors import ConfigError, DecompositionFailed, ProtocolError, VerifierUnavailable
from .evidence import chunk_document
from .metrics import NeiPolicy, evaluate
from .providers import (
    FixtureSearchProvider,
    HashEmbeddingProvider,
    HttpChatProvider,
    HttpEmbeddingProvider,
    HttpSearchProvider,
    HttpVerifierProvider,
    LexicalVerifierProvider,
    RequestCache,
    ScriptedChatProvider,
    set_inflight_limit,
)
from .types import (
    Ablation,
    Claim,
    EvidenceDoc,
    Regime,
    Task,
    Thresholds,
    Verdict,
    VerdictTrace,
    label_to_verdict,
    trace_to_json,
)
from .verification import assess_all, gate, score_fact

logger = logging.getLogger(__name__)

ENV_CHAT_BASE_URL = "CLAIMCHECK_CHAT_BASE_URL"
ENV_CHAT_API_KEY = "CLAIMCHECK_CHAT_API_KEY"
ENV_EMBEDDING_BASE_URL = "CLAIMCHECK_EMBEDDING_BASE_URL"
ENV_EMBEDDING_API_KEY = "CLAIMCHECK_EMBEDDING_API_KEY"
ENV_VERIFIER_URL = "CLAIMCHECK_VERIFIER_URL"
ENV_SEARCH_URL = "CLAIMCHECK_SEARCH_URL"
ENV_SEARCH_API_KEY = "CLAIMCHECK_SEARCH_API_KEY"


@dataclass
class PipelineConfig:
    thresholds: Thresholds = field(default_factory=Thresholds)
    allowlist: Allowlist | None = None
    regime: Regime = Regime.CONTEXT_ONLY
    ablation: Ablation = Ablation.NONE
    task: Task = Task.THREE_WAY
    nei_policy: NeiPolicy = NeiPolicy.COUNT_AS_ERROR
    providers: dict = field(default_factory=dict)
    retries: int = 2
    search_k: int = 5
    parallelism: int = 8
    cache_dir: str | None = None
    overlap_sentences: int = 1

    def __post_init__(self):
        if self.regime is Regime.CONTEXT_WEB and self.allowlist is None:
            raise ConfigError("allowlist: required when regime is context-web")


@dataclass
class ProviderBundle:
    """Constructed backends; absent ones are None and degrade gracefully."""

    chat: object | None = None
    embedding: object | None = None
    verifier: object | None = None
    search: object | None = None
    cache: RequestCache | None = None


def _enum_value(kind, raw, key: str):
    try:
        return kind(raw)
    except ValueError as exc:
        allowed = ", ".join(v.value for v in kind)
        raise ConfigError(f"{key}: must be one of {allowed}, got {raw!r}") from exc


def _int_value(raw, key: str, minimum: int) -> int:
    if not isinstance(raw, int) or isinstance(raw, bool) or raw < minimum:
        raise ConfigError(f"{key}: must be an integer >= {minimum}, got {raw!r}")
    return raw


_KNOWN_KEYS = {
    "thresholds",
    "allowlist",
    "regime",
    "ablation",
    "task",
    "nei_policy",
    "providers",
    "retries",
    "search_k",
    "parallelism",
    "cache_dir",
    "overlap_sentences",
}
_KNOWN_THRESHOLD_KEYS = {"lo", "hi", "max_fact_words", "max_chunk_chars"}


def config_from_dict(data: dict) -> PipelineConfig:
    """Build a validated config from a raw JSON object, filling defaults."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    for key in data:
        if key not in _KNOWN_KEYS:
            logger.warning("unknown configuration key ignored: %s", key)

    raw_thresholds = data.get("thresholds", {})
    if not isinstance(raw_thresholds, dict):
        raise ConfigError("thresholds: must be an object")
    for key in raw_thresholds:
        if key not in _KNOWN_THRESHOLD_KEYS:
            logger.warning("unknown thresholds key ignored: %s", key)
    try:
        thresholds = Thresholds(
            lo=raw_thresholds.get("lo", 0.25),
            hi=raw_thresholds.get("hi", 0.80),
            max_fact_words=raw_thresholds.get("max_fact_words", 25),
            max_chunk_chars=raw_thresholds.get("max_chunk_chars", 420),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"thresholds: {exc}") from exc

    regime = _enum_value(Regime, data.get("regime", Regime.CONTEXT_ONLY.value), "regime")
    ablation = _enum_value(Ablation, data.get("ablation", Ablation.NONE.value), "ablation")
    task = _enum_value(Task, data.get("task", Task.THREE_WAY.value), "task")
    nei_policy = _enum_value(
        NeiPolicy, data.get("nei_policy", NeiPolicy.COUNT_AS_ERROR.value), "nei_policy"
    )

    allowlist = None
    raw_allow = data.get("allowlist")
    if raw_allow is not None:
        if not isinstance(raw_allow, list) or any(not isinstance(d, str) for d in raw_allow):
            raise ConfigError("allowlist: must be an array of domain strings")
        try:
            allowlist = Allowlist(tuple(raw_allow))
        except ValueError as exc:
            raise ConfigError(f"allowlist: {exc}") from exc
    if regime is Regime.CONTEXT_WEB and allowlist is None:
        raise ConfigError("allowlist: required when regime is context-web")

    providers = data.get("providers", {})
    if not isinstance(providers, dict):
        raise ConfigError("providers: must be an object")

    cache_dir = data.get("cache_dir")
    if cache_dir is not None and not isinstance(cache_dir, str):
        raise ConfigError(f"cache_dir: must be a string path, got {cache_dir!r}")

    return PipelineConfig(
        thresholds=thresholds,
        allowlist=allowlist,
        regime=regime,
        ablation=ablation,
        task=task,
        nei_policy=nei_policy,
        providers=providers,
        retries=_int_value(data.get("retries", 2), "retries", 0),
        search_k=_int_value(data.get("search_k", 5), "search_k", 1),
        parallelism=_int_value(data.get("parallelism", 8), "parallelism", 1),
        cache_dir=cache_dir,
        overlap_sentences=_int_value(data.get("overlap_sentences", 1), "overlap_sentences", 0),
    )


def load_config(path) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"configuration file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return config_from_dict(data)


def _build_chat(section: dict, cache):
    backend = section.get("backend", "http")
    if backend == "scripted":
        path = section.get("script_path")
        if not path:
            raise ConfigError("providers.chat.script_path: required for the scripted backend")
        return ScriptedChatProvider.from_file(path)
    if backend == "http":
        base_url = section.get("base_url") or os.environ.get(ENV_CHAT_BASE_URL)
        if not base_url:
            return None
        return HttpChatProvider(
            base_url=base_url,
            model=section.get("model", "default"),
            api_key=os.environ.get(section.get("api_key_env", ENV_CHAT_API_KEY)),
            cache=cache,
        )
    if backend == "none":
        return None
    raise ConfigError(f"providers.chat.backend: unknown backend {backend!r}")


def _build_embedding(section: dict, cache):
    backend = section.get("backend", "hash")
    if backend == "hash":
        return HashEmbeddingProvider(dim=section.get("dim", 256))
    if backend == "http":
        base_url = section.get("base_url") or os.environ.get(ENV_EMBEDDING_BASE_URL)
        if not base_url:
            return None
        return HttpEmbeddingProvider(
            base_url=base_url,
            model=section.get("model", "default"),
            api_key=os.environ.get(section.get("api_key_env", ENV_EMBEDDING_API_KEY)),
            cache=cache,
        )
    if backend == "none":
        return None
    raise ConfigError(f"providers.embedding.backend: unknown backend {backend!r}")


def _build_verifier(section: dict, cache):
    backend = section.get("backend", "lexical")
    if backend == "lexical":
        return LexicalVerifierProvider()
    if backend == "http":
        url = section.get("url") or os.environ.get(ENV_VERIFIER_URL)
        if not url:
            return None
        return HttpVerifierProvider(
            url=url,
            api_key=os.environ.get(section.get("api_key_env", "CLAIMCHECK_VERIFIER_API_KEY")),
            cache=cache,
        )
    raise ConfigError(f"providers.verifier.backend: unknown backend {backend!r}")


def _build_search(section: dict, cache):
    backend = section.get("backend", "http")
    if backend == "fixture":
        path = section.get("fixture_path")
        if not path:
            raise ConfigError("providers.search.fixture_path: required for the fixture backend")
        return FixtureSearchProvider.from_file(path)
    if backend == "http":
        url = section.get("url") or os.environ.get(ENV_SEARCH_URL)
        if not url:
            return None
        return HttpSearchProvider(
            url=url,
            api_key=os.environ.get(section.get("api_key_env", ENV_SEARCH_API_KEY)),
            cache=cache,
        )
    if backend == "none":
        return None
    raise ConfigError(f"providers.search.backend: unknown backend {backend!r}")


def build_providers(cfg: PipelineConfig) -> ProviderBundle:
    """Construct backends per configuration.

    The search provider only exists under the context-web regime, which
    makes context-only search calls structurally impossible.
    """
    set_inflight_limit(max(cfg.parallelism, 1))
    cache = RequestCache(cfg.cache_dir) if cfg.cache_dir else None
    search = None
    if cfg.regime is Regime.CONTEXT_WEB:
        search = _build_search(cfg.providers.get("search", {}), cache)
    return ProviderBundle(
        chat=_build_chat(cfg.providers.get("chat", {}), cache),
        embedding=_build_embedding(cfg.providers.get("embedding", {}), cache),
        verifier=_build_verifier(cfg.providers.get("verifier", {}), cache),
        search=search,
        cache=cache,
    )


def run_pipeline(example: DatasetExample, cfg: PipelineConfig, providers: ProviderBundle) -> VerdictTrace:
    claim = Claim(example.claim)
    doc = EvidenceDoc(example.document, source_id=example.id)
    t = cfg.thresholds
    baseline: Verdict | None = None

    def diagnostic(reason: str) -> VerdictTrace:
        return VerdictTrace(
            example_id=example.id,
            claim=claim,
            baseline_verdict=baseline,
            assessments=(),
            judge_verdict=Verdict.NEI,
            judge_explanation=reason,
            used_facts=(),
            regime=cfg.regime,
            ablation=cfg.ablation,
        )

    if providers.verifier is None:
        return diagnostic("verifier provider not configured")
    try:
        baseline = label_to_verdict(gate(score_fact(claim.text, doc.text, providers.verifier), t))
    except (VerifierUnavailable, ProtocolError) as exc:
        return diagnostic(f"verifier unavailable: {exc}")

    if cfg.ablation is Ablation.NO_ATOMIC:
        facts = single_fact_fallback(claim)
    else:
        if providers.chat is None:
            return diagnostic("chat provider not configured; decomposition impossible")
        try:
            facts = decompose(claim, doc, providers.chat, t, retries=cfg.retries)
        except DecompositionFailed as exc:
            return diagnostic(f"decomposition failed: {exc}")

    chunks = chunk_document(doc, t.max_chunk_chars, cfg.overlap_sentences)
    try:
        assessments = assess_all(facts, doc, chunks, providers.embedding, providers.verifier, t)
        if cfg.regime is Regime.CONTEXT_WEB and providers.search is not None:
            assessments = corroborate_uncertain(
                assessments,
                providers.search,
                providers.chat,
                providers.verifier,
                cfg.allowlist,
                t,
                cfg.search_k,
            )
    except (VerifierUnavailable, ProtocolError) as exc:
        return diagnostic(f"verifier unavailable: {exc}")

    if cfg.ablation is Ablation.MAJORITY_VOTE:
        supported, refuted, _ = partition_facts(assessments, t)
        decision = JudgeDecision(
            final_verdict=majority_vote(assessments, t),
            explanation="Majority vote over decisive fact labels (no-judge ablation).",
            used_facts=tuple(a.fact.id for a in supported + refuted),
        )
        decision = apply_conflict_abstention(decision, assessments)
    else:
        decision = judge(claim, doc, assessments, providers.chat, cfg.task, t)

    return VerdictTrace(
        example_id=example.id,
        claim=claim,
        baseline_verdict=baseline,
        assessments=tuple(assessments),
        judge_verdict=decision.final_verdict,
        judge_explanation=decision.explanation,
        used_facts=decision.used_facts,
        regime=cfg.regime,
        ablation=cfg.ablation,
    )


def run_dataset(
    examples: list[DatasetExample],
    cfg: PipelineConfig,
    providers: ProviderBundle,
    trace_path=None,
) -> tuple[list[VerdictTrace], dict]:
    """Run every example (parallelism-limited), streaming traces to disk.

    Traces are written in example order, so reruns with deterministic
    providers produce byte-identical files. A failing example yields a
    diagnostic NEI trace; the run always continues.
    """

    def run_one(example: DatasetExample) -> VerdictTrace:
        try:
            return run_pipeline(example, cfg, providers)
        except Exception as exc:  # per-example isolation
            logger.exception("example %s failed", example.id)
            return VerdictTrace(
                example_id=example.id,
                claim=Claim(example.claim),
                baseline_verdict=None,
                assessments=(),
                judge_verdict=Verdict.NEI,
                judge_explanation=f"pipeline error: {exc}",
                used_facts=(),
                regime=cfg.regime,
                ablation=cfg.ablation,
            )

    traces: list[VerdictTrace] = []
    writer = open(trace_path, "w", encoding="utf-8") if trace_path else None
    try:
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            for trace in pool.map(run_one, examples):
                traces.append(trace)
                if writer is not None:
                    writer.write(trace_to_json(trace) + "\n")
                    writer.flush()
    finally:
        if writer is not None:
            writer.close()

    report = evaluate(examples, [t.judge_verdict for t in traces], cfg.task, cfg.nei_policy)
    return traces, report


def write_json_atomic(data: dict, path) -> None:
    """Final metrics write: temp file then rename."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    os.replace(tmp, path)
