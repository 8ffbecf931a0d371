"""
Metrics.

Span-level exact-match scores, token-and-separator partial-credit
scores, and a gold-anchored error typology.

Degenerate ratios follow the 0/0 -> 0 convention so every summary is
total. Matching is label-sensitive throughout.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, fields
from typing import Dict, Iterable, List, Sequence, Set, Tuple

from core.corpus_model import Dataset, Span, check_aligned

logger = logging.getLogger(__name__)


# =============================================================================
# Constants
# =============================================================================

CORRECT = "correct"
MISSED = "missed"
SPURIOUS = "spurious"
BOUNDARY = "boundary"
FUSED = "fused"
SPLIT = "split"

AVERAGES = ("micro", "macro")


# =============================================================================
# Domain Types
# =============================================================================

def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


@dataclass(frozen=True)
class ConfusionCounts:
    """True positive, false positive and false negative counts."""
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError(f"negative counts: {self}")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @property
    def gold(self) -> int:
        return self.tp + self.fn

    @property
    def predicted(self) -> int:
        return self.tp + self.fp

    def summary(self) -> "ScoreSummary":
        return ScoreSummary.from_counts(self)


@dataclass(frozen=True)
class ScoreSummary:
    """Precision, recall and F1 with gold support."""
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    support: int = 0

    @staticmethod
    def harmonic(precision: float, recall: float) -> float:
        return _ratio(2 * precision * recall, precision + recall)

    @classmethod
    def from_counts(cls, counts: ConfusionCounts) -> "ScoreSummary":
        precision = _ratio(counts.tp, counts.tp + counts.fp)
        recall = _ratio(counts.tp, counts.tp + counts.fn)
        return cls(precision, recall, cls.harmonic(precision, recall), counts.gold)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class ErrorTypology:
    """Categorised error counts; gold spans are partitioned across the first five."""
    correct: int = 0
    missed: int = 0
    boundary: int = 0
    fused: int = 0
    split: int = 0
    spurious: int = 0

    def __add__(self, other: "ErrorTypology") -> "ErrorTypology":
        return ErrorTypology(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})

    @property
    def gold_total(self) -> int:
        return self.correct + self.missed + self.boundary + self.fused + self.split

    @classmethod
    def from_categories(cls, categories: Iterable[str], spurious: int = 0) -> "ErrorTypology":
        tally: Dict[str, int] = defaultdict(int)
        for category in categories:
            tally[category] += 1
        return cls(
            correct=tally[CORRECT], missed=tally[MISSED], boundary=tally[BOUNDARY],
            fused=tally[FUSED], split=tally[SPLIT], spurious=spurious,
        )

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# =============================================================================
# Span Scores
# =============================================================================

def match_spans(gold: Sequence[Span], pred: Sequence[Span]) -> Tuple[Set[int], Set[int]]:
    """Indices of gold and predicted spans taking part in an exact match."""
    pred_index = {(p.start, p.end, p.label): j for j, p in enumerate(pred)}
    gold_hits, pred_hits = set(), set()
    for i, g in enumerate(gold):
        j = pred_index.get((g.start, g.end, g.label))
        if j is not None and j not in pred_hits:
            gold_hits.add(i)
            pred_hits.add(j)
    return gold_hits, pred_hits


def span_counts(gold: Sequence[Span], pred: Sequence[Span]) -> ConfusionCounts:
    gold_hits, _ = match_spans(gold, pred)
    tp = len(gold_hits)
    return ConfusionCounts(tp, len(pred) - tp, len(gold) - tp)


def span_scores(gold: Sequence[Span], pred: Sequence[Span]) -> Tuple[ConfusionCounts, ScoreSummary]:
    """Exact (start, end, label) match scores for one sentence."""
    counts = span_counts(gold, pred)
    return counts, counts.summary()


# =============================================================================
# Token and Separator Scores
# =============================================================================

def _positive_slots(spans: Sequence[Span]) -> Set[Tuple[str, int, str]]:
    slots = set()
    for span in spans:
        for i in range(span.start, span.end):
            slots.add(("tok", i, span.label))
        for i in range(span.start, span.end - 1):
            slots.add(("sep", i, span.label))
    return slots


def token_separator_counts(gold: Sequence[Span], pred: Sequence[Span], n: int) -> ConfusionCounts:
    if n == 0:
        return ConfusionCounts()
    g, p = _positive_slots(gold), _positive_slots(pred)
    return ConfusionCounts(len(g & p), len(p - g), len(g - p))


def token_separator_scores(gold: Sequence[Span], pred: Sequence[Span], n: int) -> ScoreSummary:
    """Partial-credit scores over n token slots and n-1 separator slots.

    A separator slot (i, i+1) is positive when both neighbours lie in the
    same span. Support is the number of positive gold slots.
    """
    return token_separator_counts(gold, pred, n).summary()


# =============================================================================
# Error Typology
# =============================================================================

def gold_categories(gold: Sequence[Span], pred: Sequence[Span]) -> Tuple[List[str], List[int]]:
    """Category of every gold span, plus indices of spurious predictions.

    Priority: correct > fused > split > boundary > missed.
    """
    gold_hits, _ = match_spans(gold, pred)
    overlaps = [[j for j, p in enumerate(pred) if g.overlaps(p)] for g in gold]
    gold_by_pred: Dict[int, int] = defaultdict(int)
    for hits in overlaps:
        for j in hits:
            gold_by_pred[j] += 1

    categories = []
    for i, hits in enumerate(overlaps):
        if i in gold_hits:
            categories.append(CORRECT)
        elif len(hits) == 1 and gold_by_pred[hits[0]] > 1:
            categories.append(FUSED)
        elif len(hits) >= 2:
            categories.append(SPLIT)
        elif len(hits) == 1:
            categories.append(BOUNDARY)
        else:
            categories.append(MISSED)

    spurious = [j for j in range(len(pred)) if gold_by_pred[j] == 0]
    return categories, spurious


def classify_errors(gold: Sequence[Span], pred: Sequence[Span]) -> ErrorTypology:
    """Assign every gold span one error category and count spurious predictions."""
    categories, spurious = gold_categories(gold, pred)
    return ErrorTypology.from_categories(categories, len(spurious))


# =============================================================================
# Aggregation
# =============================================================================

def aggregate(per_sentence: Iterable[ConfusionCounts], average: str = "micro") -> ScoreSummary:
    """Pool counts into one summary.

    micro sums counts before computing ratios; macro takes the unweighted
    mean of each entry's precision, recall and F1 (entries with no gold and
    no predictions are skipped) and reports the summed support.
    """
    items = list(per_sentence)
    if average == "micro":
        total = ConfusionCounts()
        for counts in items:
            total = total + counts
        return total.summary()
    if average != "macro":
        raise ValueError(f"unknown average {average!r}; expected one of {AVERAGES}")

    summaries = [c.summary() for c in items if c.gold or c.predicted]
    if not summaries:
        return ScoreSummary()
    k = len(summaries)
    return ScoreSummary(
        precision=sum(s.precision for s in summaries) / k,
        recall=sum(s.recall for s in summaries) / k,
        f1=sum(s.f1 for s in summaries) / k,
        support=sum(c.gold for c in items),
    )


@dataclass(frozen=True)
class DatasetScores:
    """Corpus-level scores of predictions against gold."""
    counts: ConfusionCounts
    summary: ScoreSummary
    typology: ErrorTypology
    token_summary: ScoreSummary
    per_label: Dict[str, ScoreSummary]

    def as_dict(self) -> dict:
        return {
            "counts": {"tp": self.counts.tp, "fp": self.counts.fp, "fn": self.counts.fn},
            "span": self.summary.as_dict(),
            "token_separator": self.token_summary.as_dict(),
            "typology": self.typology.as_dict(),
            "per_label": {label: s.as_dict() for label, s in sorted(self.per_label.items())},
        }


def score_dataset(gold: Dataset, pred: Dataset, average: str = "micro") -> DatasetScores:
    """Score an aligned prediction dataset against gold.

    Raises:
        AlignmentError: If token sequences differ at any sentence
    """
    check_aligned(gold, pred)
    per_label: Dict[str, ConfusionCounts] = defaultdict(ConfusionCounts)
    counts = ConfusionCounts()
    token_counts = ConfusionCounts()
    typology = ErrorTypology()

    for g, p in zip(gold.sentences, pred.sentences):
        counts = counts + span_counts(g.spans, p.spans)
        token_counts = token_counts + token_separator_counts(g.spans, p.spans, len(g))
        typology = typology + classify_errors(g.spans, p.spans)
        for label in {s.label for s in g.spans} | {s.label for s in p.spans}:
            per_label[label] = per_label[label] + span_counts(
                [s for s in g.spans if s.label == label],
                [s for s in p.spans if s.label == label],
            )

    summary = aggregate([counts]) if average == "micro" else aggregate(per_label.values(), average)
    logger.debug(f"Scored {len(gold)} sentences: {counts}")
    return DatasetScores(
        counts=counts,
        summary=summary,
        typology=typology,
        token_summary=token_counts.summary(),
        per_label={label: c.summary() for label, c in per_label.items()},
    )
