"""
Diagnostics.

Attribute-sliced score tables and inter-annotator agreement.

Gold spans are profiled and bucketed by their projection onto the chosen
dimensions. Predictions follow the gold span they match or overlap;
predictions touching no gold span land in a separate spurious bucket so
that bucket counts always add up to the corpus counts.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from sklearn.metrics import cohen_kappa_score

from core.corpus_model import OUTSIDE, Dataset, Sentence, check_aligned, tags_from_spans
from core.metrics import (
    ConfusionCounts,
    ErrorTypology,
    ScoreSummary,
    gold_categories,
    match_spans,
    span_counts,
)
from core.span_attributes import (
    ComplianceRules,
    Lexicon,
    SliceKey,
    profile_span,
    validate_dims,
)

logger = logging.getLogger(__name__)


KAPPA_ALPHABETS = ("binary", "full")
INSIDE = "I"


# =============================================================================
# Slice Types
# =============================================================================

@dataclass(frozen=True)
class SliceRow:
    """Counts and error typology of one bucket."""
    counts: ConfusionCounts = ConfusionCounts()
    typology: ErrorTypology = ErrorTypology()

    def __add__(self, other: "SliceRow") -> "SliceRow":
        return SliceRow(self.counts + other.counts, self.typology + other.typology)

    @property
    def summary(self) -> ScoreSummary:
        return self.counts.summary()


@dataclass
class SliceReport:
    """Bucketed scores keyed by profile projection."""
    dims: List[str]
    rows: Dict[SliceKey, SliceRow] = field(default_factory=dict)
    spurious: SliceRow = SliceRow()

    def total(self) -> SliceRow:
        """Corpus-level row: every bucket plus the spurious pseudo-bucket."""
        out = self.spurious
        for row in self.rows.values():
            out = out + row
        return out

    def coarsen(self, dims: Sequence[str]) -> "SliceReport":
        """Re-aggregate rows onto a subset of this report's dimensions."""
        missing = [d for d in dims if d not in self.dims]
        if missing:
            raise ValueError(f"cannot coarsen onto dimensions not in report: {missing}")
        rows: Dict[SliceKey, SliceRow] = defaultdict(SliceRow)
        for key, row in self.rows.items():
            values = dict(key)
            coarse = tuple((d, values[d]) for d in dims)
            rows[coarse] = rows[coarse] + row
        return SliceReport(list(dims), dict(sorted(rows.items())), self.spurious)


# =============================================================================
# Slicing
# =============================================================================

def _slice_sentence(gold: Sentence, pred: Sentence, dims: Sequence[str],
                    rules: ComplianceRules, lex: Lexicon) -> Tuple[Dict[SliceKey, SliceRow], SliceRow]:
    keys = [profile_span(gold, span, rules, lex).project(dims) for span in gold.spans]
    gold_hits, pred_hits = match_spans(gold.spans, pred.spans)
    categories, spurious = gold_categories(gold.spans, pred.spans)

    tp: Dict[SliceKey, int] = defaultdict(int)
    fn: Dict[SliceKey, int] = defaultdict(int)
    fp: Dict[SliceKey, int] = defaultdict(int)
    cats: Dict[SliceKey, List[str]] = defaultdict(list)

    for i, key in enumerate(keys):
        cats[key].append(categories[i])
        if i in gold_hits:
            tp[key] += 1
        else:
            fn[key] += 1

    orphan_fp = 0
    for j, p in enumerate(pred.spans):
        if j in pred_hits:
            continue
        owner = next((i for i, g in enumerate(gold.spans) if g.overlaps(p)), None)
        if owner is None:
            orphan_fp += 1
        else:
            fp[keys[owner]] += 1

    rows = {
        key: SliceRow(ConfusionCounts(tp[key], fp[key], fn[key]), ErrorTypology.from_categories(cats[key]))
        for key in cats
    }
    spurious_row = SliceRow(ConfusionCounts(0, orphan_fp, 0), ErrorTypology(spurious=len(spurious)))
    return rows, spurious_row


def slice_scores(gold: Dataset, pred: Dataset, dims: Sequence[str],
                 rules: ComplianceRules, lex: Lexicon) -> SliceReport:
    """Score predictions per attribute bucket.

    Raises:
        AlignmentError: If the datasets' token sequences differ
        ValueError: On unknown dimensions
    """
    dims = validate_dims(dims)
    check_aligned(gold, pred)
    rows: Dict[SliceKey, SliceRow] = defaultdict(SliceRow)
    spurious = SliceRow()

    for g, p in zip(gold.sentences, pred.sentences):
        sentence_rows, sentence_spurious = _slice_sentence(g, p, dims, rules, lex)
        for key, row in sentence_rows.items():
            rows[key] = rows[key] + row
        spurious = spurious + sentence_spurious

    logger.debug(f"Sliced {gold.span_count} gold spans into {len(rows)} buckets over {dims}")
    return SliceReport(dims, dict(sorted(rows.items())), spurious)


# =============================================================================
# Agreement
# =============================================================================

@dataclass(frozen=True)
class AgreementReport:
    """Token-level kappa and span-level pairwise F1 between two annotations."""
    kappa_token: float
    pairwise_f1_span: float
    alphabet: str
    tokens: int
    spans_a: int
    spans_b: int

    def as_dict(self) -> dict:
        return {
            "kappa_token": self.kappa_token,
            "pairwise_f1_span": self.pairwise_f1_span,
            "alphabet": self.alphabet,
            "tokens": self.tokens,
            "spans_a": self.spans_a,
            "spans_b": self.spans_b,
        }


def _token_labels(dataset: Dataset, alphabet: str) -> List[str]:
    labels: List[str] = []
    for sentence in dataset.sentences:
        tags = tags_from_spans(len(sentence), sentence.spans)
        if alphabet == "binary":
            tags = [OUTSIDE if t == OUTSIDE else INSIDE for t in tags]
        labels.extend(tags)
    return labels


def cohen_kappa_tokens(a: Dataset, b: Dataset, alphabet: str = "binary") -> float:
    """Cohen's kappa over pooled token tags.

    binary collapses tags to inside/outside; full compares B-/I-/O tags
    with labels. When chance agreement is 1 (both annotators constant and
    equal) kappa is defined as 1.

    Raises:
        AlignmentError: If the datasets' token sequences differ
    """
    if alphabet not in KAPPA_ALPHABETS:
        raise ValueError(f"unknown alphabet {alphabet!r}; expected one of {KAPPA_ALPHABETS}")
    check_aligned(a, b)
    labels_a = _token_labels(a, alphabet)
    labels_b = _token_labels(b, alphabet)
    if len(set(labels_a) | set(labels_b)) <= 1:
        return 1.0
    return float(cohen_kappa_score(np.array(labels_a), np.array(labels_b)))


def pairwise_span_f1(a: Dataset, b: Dataset) -> float:
    """Span F1 treating a as gold and b as predictions; symmetric in a and b.

    Raises:
        AlignmentError: If the datasets' token sequences differ
    """
    check_aligned(a, b)
    total = ConfusionCounts()
    for sa, sb in zip(a.sentences, b.sentences):
        total = total + span_counts(sa.spans, sb.spans)
    # 2tp / (2tp + fp + fn) is symmetric under swapping fp and fn
    denominator = 2 * total.tp + total.fp + total.fn
    return 2 * total.tp / denominator if denominator else 0.0


def agreement(a: Dataset, b: Dataset, alphabet: str = "binary") -> AgreementReport:
    """Full agreement report between two annotations of the same tokens."""
    return AgreementReport(
        kappa_token=cohen_kappa_tokens(a, b, alphabet),
        pairwise_f1_span=pairwise_span_f1(a, b),
        alphabet=alphabet,
        tokens=a.token_count,
        spans_a=a.span_count,
        spans_b=b.span_count,
    )
