import random

import pytest

from core.corpus_model import Dataset, Span
from core.errors import AlignmentError
from core.metrics import (
    ConfusionCounts,
    ErrorTypology,
    ScoreSummary,
    aggregate,
    classify_errors,
    gold_categories,
    score_dataset,
    span_scores,
    token_separator_scores,
)
from helpers import make_sentence, random_dataset, random_predictions, random_spans


def spans(*pairs, label: str = "ENG"):
    return [Span(s, e, label) for s, e in pairs]


class TestSpanScores:
    def test_exact_match(self) -> None:
        counts, summary = span_scores(spans((2, 3)), spans((2, 3)))
        assert counts == ConfusionCounts(1, 0, 0)
        assert (summary.precision, summary.recall, summary.f1) == (1.0, 1.0, 1.0)

    def test_boundary_shift_is_a_miss(self) -> None:
        counts, summary = span_scores(spans((2, 3)), spans((2, 4)))
        assert counts.tp == 0
        assert summary.precision == 0.0 and summary.recall == 0.0

    def test_label_mismatch_is_a_miss(self) -> None:
        counts, _ = span_scores(spans((0, 1)), spans((0, 1), label="OTHER"))
        assert counts == ConfusionCounts(0, 1, 1)

    def test_nine_of_ten(self) -> None:
        gold = spans(*[(2 * i, 2 * i + 1) for i in range(10)])
        pred = gold[:9] + spans((18, 20))
        _, summary = span_scores(gold, pred)
        assert summary.recall == pytest.approx(0.9)
        assert summary.support == 10

    def test_empty(self) -> None:
        counts, summary = span_scores([], [])
        assert counts == ConfusionCounts()
        assert summary == ScoreSummary()


class TestTokenSeparatorScores:
    def test_identical(self) -> None:
        summary = token_separator_scores(spans((1, 3)), spans((1, 3)), 4)
        assert (summary.precision, summary.recall) == (1.0, 1.0)
        assert summary.support == 3

    def test_partial_credit(self) -> None:
        summary = token_separator_scores(spans((1, 3)), spans((1, 2)), 4)
        assert summary.precision == 1.0
        assert summary.recall == pytest.approx(1 / 3)

    def test_separator_between_adjacent_spans_is_negative(self) -> None:
        summary = token_separator_scores(spans((0, 1), (1, 2)), spans((0, 2)), 2)
        assert summary.recall == 1.0
        assert summary.precision == pytest.approx(2 / 3)

    def test_empty(self) -> None:
        summary = token_separator_scores([], [], 3)
        assert summary == ScoreSummary()
        assert token_separator_scores([], [], 0) == ScoreSummary()


class TestErrorTypology:
    def test_fused(self) -> None:
        typology = classify_errors(spans((0, 1), (1, 2)), spans((0, 2)))
        assert typology == ErrorTypology(fused=2)

    def test_split(self) -> None:
        assert classify_errors(spans((0, 3)), spans((0, 1), (2, 3))) == ErrorTypology(split=1)

    def test_missed(self) -> None:
        assert classify_errors(spans((0, 1)), []) == ErrorTypology(missed=1)

    def test_boundary_and_spurious(self) -> None:
        typology = classify_errors(spans((1, 3)), spans((1, 2), (5, 6)))
        assert typology == ErrorTypology(boundary=1, spurious=1)

    def test_correct_wins(self) -> None:
        categories, spurious = gold_categories(spans((0, 1), (2, 4)), spans((0, 1), (2, 3)))
        assert categories == ["correct", "boundary"]
        assert spurious == []

    def test_label_mismatch_is_boundary(self) -> None:
        typology = classify_errors(spans((0, 2)), spans((0, 2), label="OTHER"))
        assert typology == ErrorTypology(boundary=1)

    @pytest.mark.parametrize("seed", range(100))
    def test_partition(self, seed: int) -> None:
        rng = random.Random(seed)
        n = rng.randint(1, 12)
        gold = random_spans(rng, n)
        pred = random_spans(rng, n)
        typology = classify_errors(gold, pred)
        assert typology.gold_total == len(gold)
        counts, _ = span_scores(gold, pred)
        assert typology.correct == counts.tp
        assert typology.spurious <= counts.fp


class TestAggregate:
    def test_micro(self) -> None:
        summary = aggregate([ConfusionCounts(1, 0, 0), ConfusionCounts(0, 0, 1)])
        assert summary.recall == 0.5
        assert summary.support == 2

    def test_empty(self) -> None:
        assert aggregate([]) == ScoreSummary()

    def test_macro(self) -> None:
        summary = aggregate([ConfusionCounts(1, 0, 0), ConfusionCounts(0, 1, 1)], "macro")
        assert summary.recall == 0.5
        assert summary.precision == 0.5
        assert summary.support == 2

    def test_unknown_average(self) -> None:
        with pytest.raises(ValueError):
            aggregate([], "weighted")

    def test_negative_counts(self) -> None:
        with pytest.raises(ValueError):
            ConfusionCounts(-1, 0, 0)

    @pytest.mark.parametrize("seed", range(100))
    def test_bounds_and_harmonic_mean(self, seed: int) -> None:
        rng = random.Random(seed)
        counts = [ConfusionCounts(rng.randint(0, 9), rng.randint(0, 9), rng.randint(0, 9)) for _ in range(5)]
        for average in ("micro", "macro"):
            summary = aggregate(counts, average)
            assert 0.0 <= summary.precision <= 1.0
            assert 0.0 <= summary.recall <= 1.0
            assert 0.0 <= summary.f1 <= 1.0
        micro = aggregate(counts)
        assert micro.f1 == pytest.approx(ScoreSummary.harmonic(micro.precision, micro.recall))
        assert micro.f1 <= max(micro.precision, micro.recall) + 1e-12


class TestScoreDataset:
    def test_identical(self) -> None:
        gold = Dataset((make_sentence("Los burpees son efectivos .", [(1, 2)]),))
        scores = score_dataset(gold, gold)
        assert scores.summary.recall == 1.0
        assert scores.typology == ErrorTypology(correct=1)
        assert scores.as_dict()["per_label"]["ENG"]["f1"] == 1.0

    def test_misaligned(self) -> None:
        gold = Dataset((make_sentence("a b", [(0, 1)]),))
        pred = Dataset((make_sentence("a c", [(0, 1)]),))
        with pytest.raises(AlignmentError):
            score_dataset(gold, pred)

    @pytest.mark.parametrize("seed", range(20))
    def test_macro_over_labels(self, seed: int) -> None:
        rng = random.Random(seed)
        gold = random_dataset(rng, labels=("ENG", "OTHER"))
        pred = random_predictions(rng, gold, labels=("ENG", "OTHER"))
        micro = score_dataset(gold, pred)
        macro = score_dataset(gold, pred, "macro")
        assert micro.counts == macro.counts
        assert macro.summary.support == gold.span_count
        if len(micro.per_label) == 1:
            assert macro.summary.recall == pytest.approx(micro.summary.recall)
        assert all(0.0 <= s.recall <= 1.0 for s in micro.per_label.values())

    @pytest.mark.parametrize("seed", range(100))
    def test_sentence_order_does_not_matter(self, seed: int) -> None:
        rng = random.Random(seed)
        gold = random_dataset(rng, labels=("ENG", "OTHER"))
        pred = random_predictions(rng, gold, labels=("ENG", "OTHER"))
        order = list(range(len(gold)))
        rng.shuffle(order)
        shuffled_gold = Dataset(tuple(gold.sentences[i] for i in order))
        shuffled_pred = Dataset(tuple(pred.sentences[i] for i in order))
        for average in ("micro", "macro"):
            before = score_dataset(gold, pred, average)
            after = score_dataset(shuffled_gold, shuffled_pred, average)
            assert after.counts == before.counts
            assert after.typology == before.typology
            assert after.token_summary == before.token_summary
            assert after.per_label == before.per_label
            assert after.summary.recall == pytest.approx(before.summary.recall, abs=1e-12)
            assert after.summary.f1 == pytest.approx(before.summary.f1, abs=1e-12)
