"""Entity-level precision, recall and F1 over exact (type, start, end) matches."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus import Corpus, extract_spans


class ShapeMismatchError(ValueError):
    pass


def _prf(tp, fp, fn):
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


@dataclass(frozen=True)
class Counts:
    true_positives: int = 0
    false_positives: int = 0
    false_negatives: int = 0

    @property
    def precision(self):
        return _prf(self.true_positives, self.false_positives, self.false_negatives)[0]

    @property
    def recall(self):
        return _prf(self.true_positives, self.false_positives, self.false_negatives)[1]

    @property
    def f1(self):
        return _prf(self.true_positives, self.false_positives, self.false_negatives)[2]

    def as_dict(self):
        return {
            "tp": self.true_positives,
            "fp": self.false_positives,
            "fn": self.false_negatives,
            "precision": round(100 * self.precision, 2),
            "recall": round(100 * self.recall, 2),
            "f1": round(100 * self.f1, 2),
        }


@dataclass(frozen=True)
class EvalReport(Counts):
    per_type: dict = field(default_factory=dict)


def _span_sets(gold_labels, pred_labels, gold_scheme, pred_scheme):
    return set(extract_spans(gold_labels, gold_scheme)), set(extract_spans(pred_labels, pred_scheme))


def entity_f1(gold: Corpus, pred: Corpus) -> EvalReport:
    if len(gold) != len(pred):
        raise ShapeMismatchError(f"gold has {len(gold)} sentences, prediction has {len(pred)}")
    tp, fp, fn = Counter(), Counter(), Counter()
    for i, (g, p) in enumerate(zip(gold.sentences, pred.sentences)):
        if len(g) != len(p):
            raise ShapeMismatchError(
                f"sentence {i}: gold has {len(g)} tokens, prediction has {len(p)}"
            )
        gs, ps = _span_sets(g.labels, p.labels, gold.scheme, pred.scheme)
        for span in gs & ps:
            tp[span.entity_type] += 1
        for span in ps - gs:
            fp[span.entity_type] += 1
        for span in gs - ps:
            fn[span.entity_type] += 1
    types = sorted(set(tp) | set(fp) | set(fn))
    per_type = {t: Counts(tp[t], fp[t], fn[t]) for t in types}
    return EvalReport(sum(tp.values()), sum(fp.values()), sum(fn.values()), per_type)


def format_report(report: EvalReport) -> str:
    """conlleval-style text: micro totals first, then one line per type."""
    found = report.true_positives + report.false_positives
    gold = report.true_positives + report.false_negatives
    lines = [
        f"processed {gold} gold phrases; found: {found} phrases; correct: {report.true_positives}.",
        "precision: {:6.2f}%; recall: {:6.2f}%; FB1: {:6.2f}".format(
            100 * report.precision, 100 * report.recall, 100 * report.f1
        ),
    ]
    width = max([len(t) for t in report.per_type] + [8])
    for etype, c in report.per_type.items():
        lines.append(
            "{:>{w}}: precision: {:6.2f}%; recall: {:6.2f}%; FB1: {:6.2f}  {}".format(
                etype,
                100 * c.precision,
                100 * c.recall,
                100 * c.f1,
                c.true_positives + c.false_positives,
                w=width,
            )
        )
    return "\n".join(lines)
