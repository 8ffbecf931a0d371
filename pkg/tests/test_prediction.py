import itertools
import logging
import math
import random

import pytest

from core.corpus_model import Dataset
from core.diagnostics import slice_scores
from core.errors import CorrelationError, UnseenTypeError
from core.prediction import (
    OVERALL_LEVEL,
    CorrelationReport,
    TargetTypeCounts,
    TypeRecall,
    TypeRecallTable,
    correlate,
    count_target_types,
    median_correlation,
    pearson,
    per_type_recall,
    predict_from_datasets,
    predict_recall,
    rank_systems,
    spearman,
    system_ranks,
)
from helpers import make_sentence, random_dataset, random_predictions

COMPLIANT = (("type", "compliant"),)
NON_COMPLIANT = (("type", "non_compliant"),)

# Predicted and observed recall on an unseen test set, six systems
PREDICTED = (26.58, 86.87, 86.86, 87.86, 92.96, 42.93)
OBSERVED = (44.31, 77.99, 78.85, 80.88, 85.76, 33.33)


def _key(**values: str):
    return tuple(values.items())


class TestPredictRecall:
    def test_worked_example(self) -> None:
        table = TypeRecallTable(["type"], {COMPLIANT: TypeRecall(9, 10)})
        counts = TargetTypeCounts(["type"], {COMPLIANT: 20})
        report = predict_recall(table, counts)
        assert report.expected_tp == pytest.approx(18.0)
        assert report.expected_fn == pytest.approx(2.0)
        assert report.predicted_recall == pytest.approx(0.9)
        assert report.fallback_log == []

    def test_two_types(self) -> None:
        table = TypeRecallTable(["type"], {COMPLIANT: TypeRecall(10, 10), NON_COMPLIANT: TypeRecall(0, 10)})
        counts = TargetTypeCounts(["type"], {COMPLIANT: 10, NON_COMPLIANT: 10})
        assert predict_recall(table, counts).predicted_recall == 0.5

    def test_empty_target(self) -> None:
        table = TypeRecallTable(["type"], {COMPLIANT: TypeRecall(9, 10)})
        report = predict_recall(table, TargetTypeCounts(["type"]))
        assert (report.expected_tp, report.predicted_recall, report.total) == (0.0, 0.0, 0)

    @pytest.mark.parametrize("seed", range(50))
    def test_distribution_identity(self, seed: int) -> None:
        rng = random.Random(seed)
        rows = {}
        for name in rng.sample(["compliant", "non_compliant", "ambiguous", "adjacent", "mixed_compliant"], 3):
            support = rng.randint(1, 40)
            rows[_key(type=name)] = TypeRecall(rng.randint(0, support), support)
        table = TypeRecallTable(["type"], rows)
        scale = rng.randint(1, 5)
        counts = TargetTypeCounts(["type"], {key: row.support * scale for key, row in rows.items()})
        overall = table.overall
        assert abs(predict_recall(table, counts).predicted_recall - overall.recall) <= 1e-12

    @pytest.mark.parametrize("seed", range(50))
    def test_distribution_identity_on_datasets(self, seed: int, rules, lexicon) -> None:
        rng = random.Random(seed)
        gold = random_dataset(rng, sentences=10)
        pred = random_predictions(rng, gold)
        dims = ["type", "length"]
        report = predict_from_datasets(gold, pred, gold, dims, rules, lexicon)
        observed = slice_scores(gold, pred, dims, rules, lexicon)
        tp = sum(row.counts.tp for row in observed.rows.values())
        expected = tp / gold.span_count if gold.span_count else 0.0
        assert abs(report.predicted_recall - expected) <= 1e-12
        assert all(row.fallback_level == 0 for row in report.per_type)

    @pytest.mark.parametrize("seed", range(100))
    def test_prediction_lies_between_type_recalls(self, seed: int) -> None:
        rng = random.Random(seed)
        names = rng.sample(["compliant", "non_compliant", "ambiguous", "adjacent", "mixed_compliant"], rng.randint(1, 5))
        rows = {}
        for name in names:
            support = rng.randint(1, 30)
            rows[_key(type=name)] = TypeRecall(rng.randint(0, support), support)
        counts = TargetTypeCounts(["type"], {key: rng.randint(1, 50) for key in rows})
        predicted = predict_recall(TypeRecallTable(["type"], rows), counts).predicted_recall
        recalls = [row.recall for row in rows.values()]
        assert min(recalls) - 1e-12 <= predicted <= max(recalls) + 1e-12

    def test_strict_refuses_unseen(self) -> None:
        table = TypeRecallTable(["type"], {COMPLIANT: TypeRecall(9, 10)})
        counts = TargetTypeCounts(["type"], {COMPLIANT: 5, NON_COMPLIANT: 5})
        with pytest.raises(UnseenTypeError) as info:
            predict_recall(table, counts, "strict")
        assert info.value.unseen == ["type=non_compliant"]

    def test_backoff_drops_quoted_first(self, caplog) -> None:
        table = TypeRecallTable(["type", "quoted"], {
            _key(type="compliant", quoted="true"): TypeRecall(3, 4),
            _key(type="non_compliant", quoted="true"): TypeRecall(0, 4),
        })
        counts = TargetTypeCounts(["type", "quoted"], {_key(type="compliant", quoted="false"): 8})
        with caplog.at_level(logging.WARNING, logger="core.prediction"):
            report = predict_recall(table, counts)
        row = report.per_type[0]
        assert row.fallback_level == 1
        assert row.resolved_key == COMPLIANT
        assert row.recall == 0.75
        assert report.expected_tp == pytest.approx(6.0)
        assert len(report.fallback_log) == 1
        assert "type=compliant" in caplog.text

    def test_backoff_to_overall(self) -> None:
        table = TypeRecallTable(["type", "quoted"], {_key(type="compliant", quoted="true"): TypeRecall(1, 4)})
        counts = TargetTypeCounts(["type", "quoted"], {_key(type="adjacent", quoted="true"): 4})
        row = predict_recall(table, counts).per_type[0]
        assert row.fallback_level == OVERALL_LEVEL
        assert row.recall == 0.25

    def test_overall_only(self) -> None:
        table = TypeRecallTable(["type"], {COMPLIANT: TypeRecall(3, 4), NON_COMPLIANT: TypeRecall(1, 4)})
        counts = TargetTypeCounts(["type"], {_key(type="adjacent"): 10})
        report = predict_recall(table, counts, "overall-only")
        assert report.predicted_recall == 0.5
        assert report.per_type[0].fallback_level == OVERALL_LEVEL

    def test_dimension_mismatch(self) -> None:
        table = TypeRecallTable(["type"], {COMPLIANT: TypeRecall(9, 10)})
        with pytest.raises(ValueError):
            predict_recall(table, TargetTypeCounts(["length"]))

    def test_unknown_policy(self) -> None:
        table = TypeRecallTable(["type"], {COMPLIANT: TypeRecall(9, 10)})
        with pytest.raises(ValueError):
            predict_recall(table, TargetTypeCounts(["type"]), "optimistic")

    def test_invalid_type_recall(self) -> None:
        with pytest.raises(ValueError):
            TypeRecall(3, 2)
        with pytest.raises(ValueError):
            TypeRecall(0, 0)


class TestTables:
    def test_bucket_of_ten(self, rules, lexicon) -> None:
        sentence = make_sentence("Los burpees son efectivos .", [(1, 2)])
        gold = Dataset((sentence,) * 10)
        pred = Dataset((sentence,) * 9 + (sentence.with_spans([]),))
        table = per_type_recall(gold, pred, ["type"], rules, lexicon)
        assert table.rows[COMPLIANT].recall == pytest.approx(0.9)

    def test_target_counts(self, rules, lexicon) -> None:
        gold = Dataset((
            make_sentence("Los burpees son efectivos .", [(1, 2)]),
            make_sentence("Receta de pie de limón .", [(2, 3)]),
            make_sentence("Los spoilers del capítulo .", [(1, 2)]),
        ))
        counts = count_target_types(gold, ["type"], rules, lexicon)
        assert counts.rows == {_key(type="ambiguous"): 1, COMPLIANT: 1, NON_COMPLIANT: 1}
        assert counts.total == 3

    def test_lookup_pools(self) -> None:
        table = TypeRecallTable(["type", "quoted"], {
            _key(type="compliant", quoted="true"): TypeRecall(3, 4),
            _key(type="compliant", quoted="false"): TypeRecall(1, 4),
        })
        assert table.lookup(COMPLIANT) == TypeRecall(4, 8)
        assert table.lookup(NON_COMPLIANT) is None
        assert table.lookup(()) == table.overall


class TestRanking:
    @pytest.mark.parametrize("seed", range(100))
    def test_positive_affine_rescaling(self, seed: int) -> None:
        rng = random.Random(seed)
        scores = {f"S{i}": rng.randint(0, 12) / 4 for i in range(rng.randint(1, 8))}
        scale = rng.choice([0.5, 2.0, 4.0])
        shift = float(rng.randint(-50, 50))
        rescaled = {name: scale * value + shift for name, value in scores.items()}
        assert rank_systems(rescaled) == rank_systems(scores)

    def test_system_ranks(self) -> None:
        ranks = system_ranks(["A", "B", "C"], [0.9, 0.5, 0.7], [0.6, 0.8, 0.1])
        assert list(ranks) == ["B", "A", "C"]
        assert ranks["A"] == {"predicted": 1.0, "true": 2.0}
        with pytest.raises(ValueError):
            system_ranks(["A"], [0.1, 0.2], [0.3])

    def test_simple(self) -> None:
        assert rank_systems({"A": 0.9, "B": 0.5}) == {"A": 1.0, "B": 2.0}

    def test_tie(self) -> None:
        assert rank_systems({"A": 0.5, "B": 0.5, "C": 0.1}) == {"A": 1.5, "B": 1.5, "C": 3.0}

    def test_six_systems(self) -> None:
        ranks = rank_systems({
            "CRF": 6.50, "BETO": 23.55, "BiLSTM-unad": 23.55,
            "BiLSTM-cs": 23.75, "mBERT": 23.80, "Llama3": 36.37,
        })
        assert ranks == {
            "Llama3": 1.0, "mBERT": 2.0, "BiLSTM-cs": 3.0,
            "BETO": 4.5, "BiLSTM-unad": 4.5, "CRF": 6.0,
        }
        assert list(ranks)[0] == "Llama3"

    def test_empty(self) -> None:
        with pytest.raises(ValueError):
            rank_systems({})


def _oracle_ranks(values):
    """Average 1-based rank by counting smaller and equal values."""
    return [sum(1 for w in values if w < v) + (sum(1 for w in values if w == v) + 1) / 2 for v in values]


def _oracle_pearson(xs, ys) -> float:
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = sum((x - mx) ** 2 for x in xs)
    vy = sum((y - my) ** 2 for y in ys)
    return cov / math.sqrt(vx * vy)


class TestCorrelation:
    def test_reported_scores(self) -> None:
        assert pearson(PREDICTED, OBSERVED) == pytest.approx(0.94, abs=0.005)
        assert spearman(PREDICTED, OBSERVED) == pytest.approx(0.89, abs=0.005)

    def test_affine_invariance(self) -> None:
        xs = [0.1, 0.4, 0.35, 0.8, 0.05]
        assert pearson(xs, [2 * x + 1 for x in xs]) == pytest.approx(1.0)

    def test_constant_input(self) -> None:
        with pytest.raises(CorrelationError):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_non_finite_input(self, bad: float) -> None:
        with pytest.raises(CorrelationError):
            pearson([bad, 2.0, 3.0], [1.0, 2.0, 4.0])
        with pytest.raises(CorrelationError):
            spearman([1.0, 2.0, 3.0], [1.0, bad, 4.0])

    @pytest.mark.parametrize("seed", range(100))
    def test_pearson_symmetric(self, seed: int) -> None:
        rng = random.Random(seed)
        n = rng.randint(3, 12)
        xs = [rng.uniform(-5, 5) for _ in range(n)]
        ys = [rng.uniform(-5, 5) for _ in range(n)]
        assert pearson(xs, ys) == pytest.approx(pearson(ys, xs), abs=1e-12)

    @pytest.mark.parametrize("seed", range(100))
    def test_spearman_monotone_invariance(self, seed: int) -> None:
        rng = random.Random(seed)
        n = rng.randint(3, 12)
        xs = [float(rng.randint(0, 8)) for _ in range(n)] + [-1.0, 9.0]
        ys = [rng.uniform(0, 1) for _ in range(n + 2)]
        warped_x = [x ** 3 + 2 * x for x in xs]
        warped_y = [math.exp(y) for y in ys]
        assert spearman(warped_x, warped_y) == pytest.approx(spearman(xs, ys), abs=1e-12)

    @pytest.mark.parametrize("xs, ys", [([1.0, 2.0], [1.0]), ([1.0], [2.0])])
    def test_bad_lengths(self, xs, ys) -> None:
        with pytest.raises(CorrelationError):
            pearson(xs, ys)

    @pytest.mark.parametrize("ys", list(itertools.permutations([10.0, 20.0, 30.0, 40.0, 50.0])))
    def test_spearman_with_tie_against_oracle(self, ys) -> None:
        xs = [1.0, 2.0, 2.0, 3.0, 4.0]
        expected = _oracle_pearson(_oracle_ranks(xs), _oracle_ranks(list(ys)))
        assert spearman(xs, list(ys)) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_spearman_small_permutations(self, n: int) -> None:
        base = [float(i // 2) for i in range(n)] if n > 2 else [0.0, 1.0]
        for perm in itertools.permutations(range(n)):
            ys = [float(p) for p in perm]
            expected = _oracle_pearson(_oracle_ranks(base), _oracle_ranks(ys))
            assert spearman(base, ys) == pytest.approx(expected, abs=1e-12)

    def test_correlate_and_median(self) -> None:
        report = correlate(zip(PREDICTED, OBSERVED))
        assert report.n == 6
        other = CorrelationReport(0.5, 0.4, 6)
        third = CorrelationReport(0.7, 0.6, 6)
        median = median_correlation([report, other, third])
        assert median["pearson"] == pytest.approx(0.7)
        assert median["spearman"] == pytest.approx(0.6)

    def test_median_needs_reports(self) -> None:
        with pytest.raises(CorrelationError):
            median_correlation([])
