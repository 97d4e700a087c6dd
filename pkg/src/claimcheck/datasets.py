"""Loaders for the three evaluation datasets, unified into one example format.

Label mappings: yes/no/maybe -> Supported/Refuted/NEI for the biomedical
claims set; entailment/contradiction -> Supported/Refuted for the NLI
subset; SUPPORTS/REFUTES kept (everything else skipped) for the climate
set, whose evidence sentences get merged into a single document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

from .errors import LoadError
from .types import Verdict


@dataclass(frozen=True)
class DatasetExample:
    """(id, claim, document, gold) in the unified three-way label space.

    ``gold`` is None only for ad-hoc CLI verifications; loaders always set it.
    """

    id: str
    claim: str
    document: str
    gold: Verdict | None

    def __post_init__(self):
        if not self.claim or not self.claim.strip():
            raise ValueError("example claim must be nonempty")
        if not self.document or not self.document.strip():
            raise ValueError("example document must be nonempty")


def _read_jsonl(path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LoadError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise LoadError(f"{path}:{lineno}: line is not a JSON object")
            yield lineno, record


def _text_field(record: dict, keys: tuple[str, ...], path, lineno: int) -> str:
    for key in keys:
        value = record.get(key)
        if isinstance(value, list):
            value = " ".join(str(v) for v in value)
        if isinstance(value, str) and value.strip():
            return value
    raise LoadError(f"{path}:{lineno}: missing field (tried {', '.join(keys)})")


_PUBMED_LABELS = {"yes": Verdict.SUPPORTED, "no": Verdict.REFUTED, "maybe": Verdict.NEI}
_BIONLI_LABELS = {"entailment": Verdict.SUPPORTED, "contradiction": Verdict.REFUTED}
_CLIMATE_LABELS = {"SUPPORTS": Verdict.SUPPORTED, "REFUTES": Verdict.REFUTED}


def load_pubmedfact(path) -> list[DatasetExample]:
    """JSONL with id, claim, context/abstract, label in {yes, no, maybe}."""
    examples = []
    for lineno, record in _read_jsonl(path):
        label = str(record.get("label", "")).strip().lower()
        if label not in _PUBMED_LABELS:
            raise LoadError(f"{path}:{lineno}: unknown label {record.get('label')!r}")
        examples.append(
            DatasetExample(
                id=str(record.get("id", lineno)),
                claim=_text_field(record, ("claim",), path, lineno),
                document=_text_field(record, ("context", "abstract"), path, lineno),
                gold=_PUBMED_LABELS[label],
            )
        )
    return examples


def load_bionli(path) -> list[DatasetExample]:
    """JSONL with hypothesis, abstract, label in {entailment, contradiction}."""
    examples = []
    for lineno, record in _read_jsonl(path):
        label = str(record.get("label", "")).strip().lower()
        if label not in _BIONLI_LABELS:
            raise LoadError(f"{path}:{lineno}: unknown label {record.get('label')!r}")
        examples.append(
            DatasetExample(
                id=str(record.get("id", f"bionli-{lineno}")),
                claim=_text_field(record, ("hypothesis", "claim"), path, lineno),
                document=_text_field(record, ("abstract", "context"), path, lineno),
                gold=_BIONLI_LABELS[label],
            )
        )
    return examples


def load_climatefever(path) -> list[DatasetExample]:
    """JSONL with claim, evidence sentence list, and a claim-level label.

    Evidence sentences are joined with single spaces in dataset order;
    only SUPPORTS/REFUTES examples are kept.
    """
    examples = []
    for lineno, record in _read_jsonl(path):
        label = str(record.get("claim_label", record.get("label", ""))).strip().upper()
        if label not in _CLIMATE_LABELS:
            continue
        evidences = record.get("evidences", record.get("evidence"))
        if not isinstance(evidences, list) or not evidences:
            raise LoadError(f"{path}:{lineno}: missing evidence sentence list")
        sentences = []
        for item in evidences:
            if isinstance(item, dict):
                sentence = item.get("evidence")
            else:
                sentence = item
            if not isinstance(sentence, str) or not sentence.strip():
                raise LoadError(f"{path}:{lineno}: malformed evidence sentence")
            sentences.append(sentence.strip())
        examples.append(
            DatasetExample(
                id=str(record.get("claim_id", record.get("id", lineno))),
                claim=_text_field(record, ("claim",), path, lineno),
                document=" ".join(sentences),
                gold=_CLIMATE_LABELS[label],
            )
        )
    return examples


DATASET_LOADERS = {
    "pubmedfact": load_pubmedfact,
    "bionli": load_bionli,
    "climatefever": load_climatefever,
}
