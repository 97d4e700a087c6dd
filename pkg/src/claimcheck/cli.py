"""Command-line interface.

Subcommands: verify one claim, eval a dataset, hist for the before/after
probability histogram (CSV plus a rendered PNG), trace show, config check.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .datasets import DATASET_LOADERS, DatasetExample
from .errors import ClaimCheckError, ConfigError, LoadError
from .metrics import format_metrics_text, histogram_before_after, write_histogram_csv
from .pipeline import (
    PipelineConfig,
    build_providers,
    load_config,
    run_dataset,
    run_pipeline,
    write_json_atomic,
)
from .types import Ablation, Regime, read_traces_jsonl, trace_to_json

logger = logging.getLogger(__name__)


def _load_or_default_config(path) -> PipelineConfig:
    if path:
        return load_config(path)
    return PipelineConfig()


def _print_fact_table(trace) -> None:
    print(f"{'id':<6}{'label':<11}{'p_local':>9}{'p_final':>9}  {'rescored':<9}citations")
    for a in trace.assessments:
        citations = ", ".join(a.citations) if a.citations else "-"
        print(
            f"{a.fact.id:<6}{a.label.value:<11}{a.p_local:>9.4f}{a.p_final:>9.4f}  "
            f"{'yes' if a.rescored else 'no':<9}{citations}"
        )


def cmd_verify(args) -> int:
    cfg = _load_or_default_config(args.config)
    if args.regime:
        cfg.regime = Regime(args.regime)
        if cfg.regime is Regime.CONTEXT_WEB and cfg.allowlist is None:
            raise ConfigError("allowlist: required when regime is context-web")
    if args.ablation:
        cfg.ablation = Ablation(args.ablation)
    doc_text = Path(args.doc).read_text(encoding="utf-8")
    example = DatasetExample(id="cli", claim=args.claim, document=doc_text, gold=None)
    providers = build_providers(cfg)
    trace = run_pipeline(example, cfg, providers)
    if args.json:
        print(trace_to_json(trace))
        return 0
    print(f"verdict: {trace.judge_verdict.value}")
    print(f"explanation: {trace.judge_explanation}")
    baseline = trace.baseline_verdict.value if trace.baseline_verdict else "-"
    print(f"baseline: {baseline}")
    if trace.assessments:
        print()
        _print_fact_table(trace)
    return 0


def cmd_eval(args) -> int:
    loader = DATASET_LOADERS[args.dataset]
    examples = loader(args.path)
    cfg = load_config(args.config)
    providers = build_providers(cfg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    traces, report = run_dataset(examples, cfg, providers, trace_path=out_dir / "traces.jsonl")
    write_json_atomic(report, out_dir / "metrics.json")
    (out_dir / "metrics.txt").write_text(format_metrics_text(report), encoding="utf-8")
    print(f"evaluated {len(traces)} examples -> {out_dir}")
    print(format_metrics_text(report), end="")
    return 0


def cmd_hist(args) -> int:
    traces = read_traces_jsonl(args.traces)
    rows = histogram_before_after(traces, args.bins)
    out = Path(args.out)
    write_histogram_csv(rows, out)
    plot_path = Path(args.plot) if args.plot else out.with_suffix(".png")
    from .plotting import render_histogram_png

    render_histogram_png(rows, plot_path)
    print(f"wrote {out} and {plot_path}")
    return 0


def cmd_trace_show(args) -> int:
    traces = read_traces_jsonl(args.traces)
    matches = [t for t in traces if t.example_id == args.id]
    if not matches:
        raise LoadError(f"no trace with example id {args.id!r} in {args.traces}")
    trace = matches[0]
    print(f"example: {trace.example_id}")
    print(f"claim: {trace.claim.text}")
    print(f"regime: {trace.regime.value}   ablation: {trace.ablation.value}")
    baseline = trace.baseline_verdict.value if trace.baseline_verdict else "-"
    print(f"baseline: {baseline}")
    print(f"verdict: {trace.judge_verdict.value}")
    print(f"explanation: {trace.judge_explanation}")
    print(f"used_facts: {', '.join(trace.used_facts) if trace.used_facts else '-'}")
    if trace.assessments:
        print()
        _print_fact_table(trace)
        for a in trace.assessments:
            if a.web_evidence:
                print()
                print(f"web evidence for {a.fact.id}:")
                print(f"  {a.web_evidence}")
                for i, url in enumerate(a.citations, start=1):
                    print(f"  [{i}] {url}")
    return 0


def cmd_config_check(args) -> int:
    cfg = load_config(args.config)
    providers = build_providers(cfg)
    rows = [
        ("chat", providers.chat),
        ("embedding", providers.embedding),
        ("verifier", providers.verifier),
        ("search", providers.search),
    ]
    print("configuration ok")
    for name, provider in rows:
        if provider is None:
            if name == "search" and cfg.regime is not Regime.CONTEXT_WEB:
                status = "not constructed (context-only regime)"
            else:
                status = "unavailable (no backend configured)"
        elif type(provider).__module__.endswith(".offline"):
            status = f"ok, offline ({type(provider).__name__})"
        else:
            status = f"configured ({type(provider).__name__})"
        print(f"  {name:<10} {status}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claimcheck",
        description="Evidence-grounded claim verification with atomic facts, "
        "calibrated gating, and uncertainty-triggered web corroboration.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="enable debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="verify a single claim against a document")
    p_verify.add_argument("--claim", required=True, help="claim text")
    p_verify.add_argument("--doc", required=True, help="path to the evidence document")
    p_verify.add_argument("--config", help="path to a JSON configuration file")
    p_verify.add_argument("--regime", choices=[r.value for r in Regime])
    p_verify.add_argument("--ablation", choices=[a.value for a in Ablation])
    p_verify.add_argument("--json", action="store_true", help="emit the full trace as JSON")
    p_verify.set_defaults(func=cmd_verify)

    p_eval = sub.add_parser("eval", help="run a dataset and write traces and metrics")
    p_eval.add_argument("--dataset", required=True, choices=sorted(DATASET_LOADERS))
    p_eval.add_argument("--path", required=True, help="dataset JSONL file")
    p_eval.add_argument("--config", required=True, help="path to a JSON configuration file")
    p_eval.add_argument("--out", required=True, help="output directory")
    p_eval.set_defaults(func=cmd_eval)

    p_hist = sub.add_parser(
        "hist", help="before/after probability histogram from a trace file (CSV + PNG)"
    )
    p_hist.add_argument("--traces", required=True, help="trace JSONL file")
    p_hist.add_argument("--bins", type=int, default=10)
    p_hist.add_argument("--out", required=True, help="output CSV path")
    p_hist.add_argument("--plot", help="output PNG path (default: CSV path with .png)")
    p_hist.set_defaults(func=cmd_hist)

    p_trace = sub.add_parser("trace", help="inspect persisted traces")
    trace_sub = p_trace.add_subparsers(dest="trace_command", required=True)
    p_show = trace_sub.add_parser("show", help="pretty-print one trace")
    p_show.add_argument("--traces", required=True)
    p_show.add_argument("--id", required=True, help="example id")
    p_show.set_defaults(func=cmd_trace_show)

    p_config = sub.add_parser("config", help="configuration utilities")
    config_sub = p_config.add_subparsers(dest="config_command", required=True)
    p_check = config_sub.add_parser("check", help="validate configuration and providers")
    p_check.add_argument("--config", required=True)
    p_check.set_defaults(func=cmd_config_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, LoadError) as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2
    except ClaimCheckError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
