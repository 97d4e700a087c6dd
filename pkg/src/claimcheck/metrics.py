"""Evaluation metrics: confusion matrices, balanced accuracy, F1, histograms."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .datasets import DatasetExample
from .types import Task, Verdict, VerdictTrace


class NeiPolicy(str, Enum):
    """How a two-way evaluation scores NEI predictions."""

    COUNT_AS_ERROR = "count-as-error"
    SEPARATE_COLUMN = "separate-column"


@dataclass
class ConfusionMatrix:
    classes: tuple[Verdict, ...]
    counts: dict[tuple[Verdict, Verdict], int]

    def total(self) -> int:
        return sum(self.counts.values())

    def gold_count(self, c: Verdict) -> int:
        return sum(self.counts[(c, p)] for p in self.classes)

    def predicted_count(self, c: Verdict) -> int:
        return sum(self.counts[(g, c)] for g in self.classes)

    def correct(self, c: Verdict) -> int:
        return self.counts[(c, c)]


def confusion(
    golds: Sequence[Verdict], preds: Sequence[Verdict], classes: Sequence[Verdict]
) -> ConfusionMatrix:
    """Tally (gold, predicted) pairs; ``classes`` fixes the matrix dimensions."""
    if len(golds) != len(preds):
        raise ValueError(f"got {len(golds)} golds but {len(preds)} predictions")
    classes = tuple(classes)
    counts = {(g, p): 0 for g in classes for p in classes}
    for gold, pred in zip(golds, preds):
        if (gold, pred) not in counts:
            raise ValueError(f"pair ({gold}, {pred}) outside the declared classes")
        counts[(gold, pred)] += 1
    return ConfusionMatrix(classes=classes, counts=counts)


def balanced_accuracy(cm: ConfusionMatrix) -> float:
    """Unweighted mean of per-class recall over classes with gold examples."""
    recalls = [
        cm.correct(c) / cm.gold_count(c) for c in cm.classes if cm.gold_count(c) > 0
    ]
    if not recalls:
        raise ValueError("balanced accuracy is undefined with no gold examples")
    return sum(recalls) / len(recalls)


def f1(cm: ConfusionMatrix, positive_class: Verdict) -> float:
    tp = cm.correct(positive_class)
    predicted = cm.predicted_count(positive_class)
    gold = cm.gold_count(positive_class)
    precision = tp / predicted if predicted else 0.0
    recall = tp / gold if gold else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def macro_f1(cm: ConfusionMatrix) -> float:
    """Unweighted mean of per-class F1 over classes present in gold."""
    present = [c for c in cm.classes if cm.gold_count(c) > 0]
    if not present:
        raise ValueError("macro F1 is undefined with no gold examples")
    return sum(f1(cm, c) for c in present) / len(present)


def evaluate(
    examples: Sequence[DatasetExample],
    predictions: Sequence[Verdict],
    task: Task,
    nei_policy: NeiPolicy = NeiPolicy.COUNT_AS_ERROR,
) -> dict:
    """Metrics report for one prediction per example.

    Two-way evaluation handles NEI predictions per policy: count-as-error
    scores them wrong for both gold classes; separate-column excludes those
    examples from the matrix and reports their count.
    """
    if len(predictions) != len(examples):
        raise ValueError("one prediction per example is required")
    golds = []
    for ex in examples:
        if ex.gold is None:
            raise ValueError(f"example {ex.id} has no gold label")
        golds.append(ex.gold)

    nei_predictions = sum(1 for p in predictions if p is Verdict.NEI)
    if task is Task.TWO_WAY:
        if any(g is Verdict.NEI for g in golds):
            raise ValueError("two-way evaluation cannot score NEI gold labels")
        if nei_policy is NeiPolicy.SEPARATE_COLUMN:
            pairs = [(g, p) for g, p in zip(golds, predictions) if p is not Verdict.NEI]
            cm = confusion(
                [g for g, _ in pairs],
                [p for _, p in pairs],
                (Verdict.SUPPORTED, Verdict.REFUTED),
            )
        else:
            cm = confusion(
                golds, predictions, (Verdict.SUPPORTED, Verdict.REFUTED, Verdict.NEI)
            )
    else:
        cm = confusion(golds, predictions, (Verdict.SUPPORTED, Verdict.REFUTED, Verdict.NEI))

    per_class = {}
    for c in cm.classes:
        gold_count = cm.gold_count(c)
        if gold_count == 0:
            continue
        predicted = cm.predicted_count(c)
        tp = cm.correct(c)
        per_class[c.value] = {
            "gold": gold_count,
            "predicted": predicted,
            "correct": tp,
            "recall": tp / gold_count,
            "precision": tp / predicted if predicted else 0.0,
            "f1": f1(cm, c),
        }

    return {
        "task": task.value,
        "nei_policy": nei_policy.value,
        "n_examples": len(examples),
        "evaluated_examples": cm.total(),
        "nei_predictions": nei_predictions,
        "balanced_accuracy": balanced_accuracy(cm),
        "macro_f1": macro_f1(cm),
        "per_class": per_class,
        "classes": [c.value for c in cm.classes],
        "confusion": {
            g.value: {p.value: cm.counts[(g, p)] for p in cm.classes} for g in cm.classes
        },
    }


def format_metrics_text(report: dict) -> str:
    """Human-readable aligned table mirroring the JSON report."""
    lines = [
        f"task: {report['task']}   nei_policy: {report['nei_policy']}",
        f"examples: {report['n_examples']}   evaluated: {report['evaluated_examples']}"
        f"   nei_predictions: {report['nei_predictions']}",
        f"balanced_accuracy: {report['balanced_accuracy']:.4f}",
        f"macro_f1: {report['macro_f1']:.4f}",
        "",
        f"{'class':<12}{'gold':>6}{'pred':>6}{'correct':>9}{'recall':>9}{'precision':>11}{'f1':>9}",
    ]
    for name, row in report["per_class"].items():
        lines.append(
            f"{name:<12}{row['gold']:>6}{row['predicted']:>6}{row['correct']:>9}"
            f"{row['recall']:>9.4f}{row['precision']:>11.4f}{row['f1']:>9.4f}"
        )
    lines.append("")
    classes = report["classes"]
    lines.append("confusion (rows gold, columns predicted):")
    header = f"{'':<12}" + "".join(f"{c:>11}" for c in classes)
    lines.append(header)
    for g in classes:
        row = report["confusion"][g]
        lines.append(f"{g:<12}" + "".join(f"{row[p]:>11}" for p in classes))
    return "\n".join(lines) + "\n"


def histogram_before_after(
    traces: Sequence[VerdictTrace], bins: int
) -> list[tuple[float, float, int, int]]:
    """Equal-width histograms of p_local and p_final over all assessments.

    Rows are (bin_low, bin_high, count_before, count_after); the top bin is
    closed so p = 1.0 lands in it.
    """
    if bins < 1:
        raise ValueError("bins must be at least 1")
    before = [0] * bins
    after = [0] * bins

    def _index(p: float) -> int:
        return min(int(p * bins), bins - 1)

    for trace in traces:
        for a in trace.assessments:
            before[_index(a.p_local)] += 1
            after[_index(a.p_final)] += 1
    return [(i / bins, (i + 1) / bins, before[i], after[i]) for i in range(bins)]


def write_histogram_csv(rows: list[tuple[float, float, int, int]], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low", "bin_high", "count_before", "count_after"])
        writer.writerows(rows)
