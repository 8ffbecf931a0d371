"""Test data builders: sentences, random corpora and the seed table."""

import random
from typing import Dict, List, Optional, Sequence, Tuple

from core.corpus_model import Dataset, Sentence, Span
from core.perturbation import SeedSentence

WORDS = (
    "la", "casa", "de", "Madrid", "el", "streaming", "online", "burpees", "pie",
    "total", "red", "y", "a", "GOL", "Nigeria", "looks", "casual", "fact", ".", ",",
)

# (text, spans, type, length, position, copies)
SEED_TABLE: Tuple[Tuple[str, Tuple[Tuple[int, int], ...], str, str, str, int], ...] = (
    ("Burpees para perder kilos sin salir de casa .", ((0, 1),), "compliant", "single", "initial", 10),
    ("Los burpees son efectivos para perder peso .", ((1, 2),), "compliant", "single", "mid", 10),
    ("Medal race entre Nigeria y Polonia por la plata .", ((0, 2),), "compliant", "multi", "initial", 10),
    ("Ambos países han llegado a la medal race ajustados de puntos .", ((6, 8),), "compliant", "multi", "mid", 10),
    ("Spoilers del episodio siete a continuación .", ((0, 1),), "non_compliant", "single", "initial", 10),
    ("Las redes amanecieron con mensajes llenos de spoilers del último capítulo .", ((7, 8),),
     "non_compliant", "single", "mid", 10),
    ("Fact checkers confirman que la cifra aportada por el ministerio no es correcta .", ((0, 2),),
     "non_compliant", "multi", "initial", 10),
    ("Los fact checkers contrastarán los datos durante el debate .", ((1, 3),),
     "non_compliant", "multi", "mid", 10),
    ("Joint ventures de todo el mundo se reúnen en la mayor feria mundial de la industria .", ((0, 2),),
     "mixed_compliant", "multi", "initial", 10),
    ("La fusión de ambas compañías supone un hito en la historia de las joint ventures .", ((13, 15),),
     "mixed_compliant", "multi", "mid", 10),
    ("Receta de pie de limón .", ((2, 3),), "ambiguous", "single", "mid", 3),
    ("La reina escogió un conjunto total red para el evento .", ((5, 7),), "ambiguous", "multi", "mid", 10),
    ("Casual looks con bufanda para esta temporada .", ((0, 2),), "mixed_ambiguous", "multi", "initial", 10),
    ("Los vestidos dejan hueco a casual looks más alegres y desenfadados .", ((5, 7),),
     "mixed_ambiguous", "multi", "mid", 10),
    ("La agencia se especializa en campañas de marketing online .", ((7, 8), (8, 9)),
     "adjacent", "single", "mid", 10),
    ("Ahora trabaja como head hunter full time .", ((3, 5), (5, 7)), "adjacent", "multi", "mid", 10),
)


def make_sentence(text: str, spans: Sequence[Tuple[int, int]] = (), label: str = "ENG",
                  meta: Optional[Dict[str, str]] = None) -> Sentence:
    """Whitespace-tokenize text and attach (start, end) spans."""
    return Sentence.from_texts(text.split(), [Span(s, e, label) for s, e in spans], meta)


def random_spans(rng: random.Random, n: int, labels: Sequence[str] = ("ENG",)) -> List[Span]:
    """Random ordered, non-overlapping spans over n tokens (possibly adjacent)."""
    spans = []
    i = 0
    while i < n:
        if rng.random() < 0.3:
            end = rng.randint(i + 1, min(n, i + 3))
            spans.append(Span(i, end, rng.choice(labels)))
            i = end
        else:
            i += 1
    return spans


def random_sentence(rng: random.Random, labels: Sequence[str] = ("ENG",), max_tokens: int = 10) -> Sentence:
    n = rng.randint(1, max_tokens)
    texts = [rng.choice(WORDS) for _ in range(n)]
    return Sentence.from_texts(texts, random_spans(rng, n, labels))


def random_dataset(rng: random.Random, sentences: int = 8, labels: Sequence[str] = ("ENG",)) -> Dataset:
    return Dataset(tuple(random_sentence(rng, labels) for _ in range(sentences)), "random")


def random_predictions(rng: random.Random, gold: Dataset, labels: Sequence[str] = ("ENG",)) -> Dataset:
    """Predictions over gold's tokens: mostly gold spans kept, plus noise."""
    sentences = []
    for sentence in gold.sentences:
        if rng.random() < 0.5:
            spans = [s for s in sentence.spans if rng.random() < 0.7]
        else:
            spans = random_spans(rng, len(sentence), labels)
        sentences.append(sentence.with_spans(spans))
    return Dataset(tuple(sentences), "pred")


def table_seeds() -> List[SeedSentence]:
    """The 153 seeds: 133 one-span and 20 two-span adjacent sentences."""
    seeds = []
    for row, (text, spans, span_type, length, position, copies) in enumerate(SEED_TABLE):
        for copy in range(copies):
            hints = {"type": span_type, "length": length, "position": position}
            seeds.append(SeedSentence(f"row{row}-{copy}", make_sentence(text, spans), hints))
    return seeds


