"""
Prediction.

Extrapolates a system's recall on an unseen dataset from its per-type
recall on a diagnostic benchmark: every target span of type t is expected
to be retrieved with the benchmark recall of t. Also ranks systems and
correlates predicted against observed scores.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import pearsonr, rankdata

from core.corpus_model import Dataset, check_aligned
from core.diagnostics import slice_scores
from core.errors import CorrelationError, UnseenTypeError
from core.span_attributes import (
    ComplianceRules,
    Lexicon,
    SliceKey,
    key_label,
    profile_span,
    validate_dims,
)

logger = logging.getLogger(__name__)


# =============================================================================
# Constants
# =============================================================================

POLICIES = ("backoff", "strict", "overall-only")

# Dimensions removed at each backoff step, in order
BACKOFF_STEPS: Tuple[Tuple[str, ...], ...] = (
    ("quoted",),
    ("casing", "text_casing", "span_casing"),
    ("position",),
    ("ambiguity",),
    ("adjacent",),
    ("shape", "type"),
)
OVERALL_LEVEL = len(BACKOFF_STEPS) + 1


# =============================================================================
# Domain Types
# =============================================================================

@dataclass(frozen=True)
class TypeRecall:
    """Benchmark recall of one type with its support."""
    hits: int
    support: int

    def __post_init__(self) -> None:
        if self.support < 1 or not 0 <= self.hits <= self.support:
            raise ValueError(f"invalid type recall {self.hits}/{self.support}")

    @property
    def recall(self) -> float:
        return self.hits / self.support


@dataclass
class TypeRecallTable:
    """Per-type benchmark recall over a fixed projection."""
    dims: List[str]
    rows: Dict[SliceKey, TypeRecall] = field(default_factory=dict)

    @property
    def overall(self) -> Optional[TypeRecall]:
        hits = sum(r.hits for r in self.rows.values())
        support = sum(r.support for r in self.rows.values())
        return TypeRecall(hits, support) if support else None

    def lookup(self, partial: SliceKey) -> Optional[TypeRecall]:
        """Pooled recall over every row agreeing with a partial key."""
        if not partial:
            return self.overall
        wanted = dict(partial)
        hits = support = 0
        for key, row in self.rows.items():
            values = dict(key)
            if all(values[d] == v for d, v in wanted.items()):
                hits += row.hits
                support += row.support
        return TypeRecall(hits, support) if support else None


@dataclass
class TargetTypeCounts:
    """Number of gold spans per type in a target dataset."""
    dims: List[str]
    rows: Dict[SliceKey, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.rows.values())


@dataclass(frozen=True)
class PredictionRow:
    key: SliceKey
    count: int
    recall: float
    fallback_level: int
    resolved_key: SliceKey

    def as_dict(self) -> dict:
        return {
            "type": key_label(self.key),
            "count": self.count,
            "recall": self.recall,
            "fallback_level": self.fallback_level,
            "resolved_as": key_label(self.resolved_key),
        }


@dataclass
class PredictionReport:
    """Expected retrieval on the target dataset."""
    expected_tp: float
    expected_fn: float
    predicted_recall: float
    total: int
    policy: str
    per_type: List[PredictionRow] = field(default_factory=list)
    fallback_log: List[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "expected_tp": self.expected_tp,
            "expected_fn": self.expected_fn,
            "predicted_recall": self.predicted_recall,
            "total": self.total,
            "policy": self.policy,
            "per_type": [row.as_dict() for row in self.per_type],
            "fallback_log": list(self.fallback_log),
        }


@dataclass(frozen=True)
class CorrelationReport:
    pearson: float
    spearman: float
    n: int

    def as_dict(self) -> dict:
        return {"pearson": self.pearson, "spearman": self.spearman, "n": self.n}


# =============================================================================
# Tables
# =============================================================================

def per_type_recall(gold: Dataset, pred: Dataset, dims: Sequence[str],
                    rules: ComplianceRules, lex: Lexicon) -> TypeRecallTable:
    """Benchmark exact-match recall per profile projection.

    Raises:
        AlignmentError: If the datasets' token sequences differ
    """
    report = slice_scores(gold, pred, dims, rules, lex)
    rows = {
        key: TypeRecall(row.counts.tp, row.counts.gold)
        for key, row in report.rows.items() if row.counts.gold
    }
    return TypeRecallTable(list(report.dims), rows)


def count_target_types(gold: Dataset, dims: Sequence[str],
                       rules: ComplianceRules, lex: Lexicon) -> TargetTypeCounts:
    """Count the target dataset's gold spans per profile projection."""
    dims = validate_dims(dims)
    rows: Dict[SliceKey, int] = defaultdict(int)
    for sentence in gold.sentences:
        for span in sentence.spans:
            rows[profile_span(sentence, span, rules, lex).project(dims)] += 1
    return TargetTypeCounts(dims, dict(sorted(rows.items())))


# =============================================================================
# Extrapolation
# =============================================================================

def _resolve(table: TypeRecallTable, key: SliceKey, policy: str) -> Tuple[Optional[TypeRecall], int, SliceKey]:
    """Find the recall for a type under a fallback policy.

    Returns:
        Tuple of (recall or None, fallback level, key actually used)
    """
    exact = table.rows.get(key)
    if exact is not None or policy == "strict":
        return exact, 0, key
    if policy == "backoff":
        partial = key
        for level, dropped in enumerate(BACKOFF_STEPS, start=1):
            if not any(d in dropped for d, _ in partial):
                continue
            partial = tuple((d, v) for d, v in partial if d not in dropped)
            if not partial:
                break
            found = table.lookup(partial)
            if found is not None:
                return found, level, partial
    return table.overall, OVERALL_LEVEL, ()


def predict_recall(table: TypeRecallTable, counts: TargetTypeCounts, policy: str = "backoff") -> PredictionReport:
    """Expected true positives on the target: sum over types of m_t * r_t.

    Expected counts stay real-valued. Types missing from the table are
    resolved by the policy: backoff drops dimensions in a fixed order
    before falling back to overall recall; overall-only goes straight to
    overall recall; strict refuses.

    Raises:
        UnseenTypeError: Under the strict policy when a type is missing
        ValueError: On unknown policy or mismatched dimensions
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    if list(table.dims) != list(counts.dims):
        raise ValueError(f"dimension mismatch: benchmark {table.dims} vs target {counts.dims}")

    if policy == "strict":
        unseen = [key_label(k) for k, m in counts.rows.items() if m > 0 and k not in table.rows]
        if unseen:
            raise UnseenTypeError(unseen)

    rows: List[PredictionRow] = []
    fallback_log: List[str] = []
    terms: List[float] = []
    for key, m in counts.rows.items():
        if m <= 0:
            continue
        found, level, resolved = _resolve(table, key, policy)
        recall = found.recall if found is not None else 0.0
        if level:
            message = f"{key_label(key)}: resolved as {key_label(resolved)} (level {level})"
            logger.warning(f"Fallback for {message}")
            fallback_log.append(message)
        rows.append(PredictionRow(key, m, recall, level, resolved))
        terms.append(m * recall)

    total = counts.total
    expected_tp = math.fsum(terms)
    predicted = expected_tp / total if total > 0 else 0.0
    return PredictionReport(
        expected_tp=expected_tp,
        expected_fn=total - expected_tp,
        predicted_recall=predicted,
        total=total,
        policy=policy,
        per_type=rows,
        fallback_log=fallback_log,
    )


def predict_from_datasets(benchmark_gold: Dataset, benchmark_pred: Dataset, target_gold: Dataset,
                          dims: Sequence[str], rules: ComplianceRules, lex: Lexicon,
                          policy: str = "backoff") -> PredictionReport:
    """Profile the benchmark and the target, then extrapolate."""
    check_aligned(benchmark_gold, benchmark_pred)
    table = per_type_recall(benchmark_gold, benchmark_pred, dims, rules, lex)
    counts = count_target_types(target_gold, dims, rules, lex)
    return predict_recall(table, counts, policy)


# =============================================================================
# Ranking and Correlation
# =============================================================================

def rank_systems(scores: Mapping[str, float]) -> Dict[str, float]:
    """Rank systems by descending score; ties share their average position."""
    if not scores:
        raise ValueError("rank_systems needs at least one system")
    names = list(scores)
    ranks = rankdata([-scores[name] for name in names], method="average")
    ordered = sorted(zip(names, ranks), key=lambda item: (item[1], item[0]))
    return {name: float(rank) for name, rank in ordered}


def system_ranks(systems: Sequence[str], predicted: Sequence[float],
                 true: Sequence[float]) -> Dict[str, Dict[str, float]]:
    """Predicted and true rank of every system, ordered by true rank."""
    if len(systems) != len(predicted) or len(systems) != len(true):
        raise ValueError("systems and scores differ in length")
    by_prediction = rank_systems(dict(zip(systems, predicted)))
    by_truth = rank_systems(dict(zip(systems, true)))
    return {name: {"predicted": by_prediction[name], "true": rank} for name, rank in by_truth.items()}


def _check_pair(xs: Sequence[float], ys: Sequence[float]) -> None:
    if len(xs) != len(ys):
        raise CorrelationError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise CorrelationError("correlation needs at least 2 pairs")
    if not (np.isfinite(np.asarray(xs, dtype=float)).all() and np.isfinite(np.asarray(ys, dtype=float)).all()):
        raise CorrelationError("non-finite score in input")


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Product-moment correlation.

    Raises:
        CorrelationError: On length mismatch, fewer than 2 pairs, non-finite
            values or constant input
    """
    _check_pair(xs, ys)
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise CorrelationError("undefined variance: constant input")
    return float(pearsonr(x, y)[0])


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation over average ranks (tie-aware)."""
    _check_pair(xs, ys)
    return pearson(rankdata(xs, method="average"), rankdata(ys, method="average"))


def correlate(pairs: Iterable[Tuple[float, float]]) -> CorrelationReport:
    """Pearson and Spearman between predicted and true scores."""
    pairs = list(pairs)
    xs = [p for p, _ in pairs]
    ys = [t for _, t in pairs]
    return CorrelationReport(pearson(xs, ys), spearman(xs, ys), len(pairs))


def median_correlation(reports: Sequence[CorrelationReport]) -> Dict[str, float]:
    """Median Pearson and Spearman across several datasets."""
    if not reports:
        raise CorrelationError("no correlation reports to summarise")
    return {
        "pearson": float(np.median([r.pearson for r in reports])),
        "spearman": float(np.median([r.spearman for r in reports])),
    }
