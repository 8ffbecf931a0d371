"""
Perturbation.

Casing and quotation transforms over span-annotated sentences, and the
suite builder that expands authored seed sentences into the twelve
casing x quotation configurations.

Casing is always applied before quotes, so inserted quote tokens are
never case-transformed.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Sequence, Tuple

from core.corpus_model import Dataset, Sentence, Span
from core.errors import PerturbationError, SeedValidationError
from core.span_attributes import (
    QUOTE_PAIRS,
    ComplianceRules,
    Lexicon,
    is_quote,
    profile_span,
)

logger = logging.getLogger(__name__)


# =============================================================================
# Constants
# =============================================================================

QUOTE_GLYPH = '"'
ADJACENT_QUOTES_META = "adjacent_quotes"

# Seed hints checked against the computed profile, and the dimension each maps to
SEED_HINTS = ("type", "length", "position")


class CasingTransform(str, Enum):
    STANDARD = "standard"
    TEXT_LOWER = "text_lower"
    TEXT_UPPER = "text_upper"
    TEXT_TITLE = "text_title"
    SPAN_UPPER = "span_upper"
    SPAN_TITLE = "span_title"


class QuoteMode(str, Enum):
    QUOTED = "quoted"
    UNQUOTED = "unquoted"


@dataclass(frozen=True)
class Configuration:
    """One casing x quotation combination."""
    casing: CasingTransform
    quotes: QuoteMode

    @property
    def id(self) -> str:
        return f"{self.casing.value}+{self.quotes.value}"

    @classmethod
    def from_id(cls, config_id: str) -> "Configuration":
        casing, _, quotes = config_id.partition("+")
        try:
            return cls(CasingTransform(casing), QuoteMode(quotes))
        except ValueError as e:
            raise PerturbationError(f"unknown configuration {config_id!r}") from e


# Canonical order: casing-major, quoted before unquoted
ALL_CONFIGURATIONS: Tuple[Configuration, ...] = tuple(
    Configuration(casing, quotes) for casing in CasingTransform for quotes in QuoteMode
)


@dataclass(frozen=True)
class SeedSentence:
    """Authored sentence in standard casing plus declared type hints."""
    seed_id: str
    sentence: Sentence
    type_tags: Mapping[str, str] = field(default_factory=dict)


# =============================================================================
# Casing
# =============================================================================

def titlecase_token(text: str) -> str:
    """Uppercase the first letter and lowercase the rest."""
    for i, ch in enumerate(text):
        if ch.isalpha():
            return text[:i] + ch.upper() + text[i + 1:].lower()
    return text


_CASE_FUNCS = {
    "lower": str.lower,
    "upper": str.upper,
    "title": titlecase_token,
}


def apply_casing(s: Sentence, t: CasingTransform) -> Sentence:
    """Apply a casing transform; token count and span offsets are unchanged."""
    if t is CasingTransform.STANDARD:
        return s

    if t in (CasingTransform.TEXT_LOWER, CasingTransform.TEXT_UPPER, CasingTransform.TEXT_TITLE):
        func = _CASE_FUNCS[t.value.split("_")[1]]
        return s.with_texts([func(text) for text in s.texts])

    func = _CASE_FUNCS[t.value.split("_")[1]]
    inside = {i for span in s.spans for i in range(span.start, span.end)}
    texts = [func(text) if i in inside else text for i, text in enumerate(s.texts)]
    return s.with_texts(texts)


# =============================================================================
# Quotes
# =============================================================================

def _surrounded(texts: Sequence[str], span: Span) -> bool:
    if span.start == 0 or span.end >= len(texts):
        return False
    return QUOTE_PAIRS.get(texts[span.start - 1]) == texts[span.end]


def _add_quotes(s: Sentence) -> Sentence:
    texts: List[str] = []
    spans: List[Span] = []
    cursor = 0
    for span in s.spans:
        if _surrounded(s.texts, span):
            raise PerturbationError(f"span [{span.start},{span.end}) is already quoted")
        texts.extend(s.texts[cursor:span.start])
        texts.append(QUOTE_GLYPH)
        start = len(texts)
        texts.extend(s.texts[span.start:span.end])
        spans.append(Span(start, len(texts), span.label))
        texts.append(QUOTE_GLYPH)
        cursor = span.end
    texts.extend(s.texts[cursor:])

    quoted = Sentence.from_texts(texts, spans, s.meta)
    if any(a.end == b.start for a, b in zip(s.spans, s.spans[1:])):
        logger.debug(f"Quoting adjacent spans independently in {' '.join(s.texts)!r}")
        quoted = quoted.with_meta(**{ADJACENT_QUOTES_META: "true"})
    return quoted


def _remove_quotes(s: Sentence) -> Sentence:
    drop = set()
    for span in s.spans:
        if _surrounded(s.texts, span):
            drop.update((span.start - 1, span.end))
    if not drop:
        return s.without_meta(ADJACENT_QUOTES_META)

    remap = {}
    texts: List[str] = []
    for i, text in enumerate(s.texts):
        remap[i] = len(texts)
        if i not in drop:
            texts.append(text)
    remap[len(s.texts)] = len(texts)
    spans = [Span(remap[span.start], remap[span.end], span.label) for span in s.spans]
    return Sentence.from_texts(texts, spans, s.meta).without_meta(ADJACENT_QUOTES_META)


def apply_quotes(s: Sentence, mode: QuoteMode) -> Sentence:
    """Insert or remove quote tokens around every span.

    Quoted inserts a straight double quote token before and after each
    span and shifts later offsets; adjacent spans are quoted independently
    and flagged in meta. Unquoted removes quote pairs that immediately
    surround spans.

    Raises:
        PerturbationError: Quoting a span that is already quoted
    """
    if mode is QuoteMode.QUOTED:
        return _add_quotes(s)
    return _remove_quotes(s)


# =============================================================================
# Expansion and Suite Building
# =============================================================================

def validate_seed(seed: SeedSentence, rules: ComplianceRules, lex: Lexicon) -> None:
    """Check a seed before expansion.

    The sentence must have at least one unquoted span and every declared
    hint (type, length, position) must match the computed profile of
    every span.

    Raises:
        SeedValidationError: Naming the seed and the disagreeing attribute
    """
    s = seed.sentence
    if not s.spans:
        raise SeedValidationError(seed.seed_id, "spans", ">=1", "0")
    for span in s.spans:
        if _surrounded(s.texts, span) or any(is_quote(t) for t in s.span_texts(span)):
            raise SeedValidationError(seed.seed_id, "quoted", "false", "true")
        profile = profile_span(s, span, rules, lex)
        for hint in SEED_HINTS:
            declared = seed.type_tags.get(hint)
            if declared is None:
                continue
            computed = profile.value(hint)
            if declared != computed:
                raise SeedValidationError(seed.seed_id, hint, declared, computed)


def expand(seed: SeedSentence) -> List[Tuple[Configuration, Sentence]]:
    """Produce the twelve configured variants of a seed, in canonical order."""
    variants = []
    base = seed.sentence.with_meta(seed=seed.seed_id, **{k: seed.type_tags[k] for k in SEED_HINTS if k in seed.type_tags})
    for configuration in ALL_CONFIGURATIONS:
        sentence = apply_casing(base, configuration.casing)
        sentence = apply_quotes(sentence, configuration.quotes)
        sentence = sentence.with_meta(config=configuration.id)
        variants.append((configuration, sentence))
    return variants


def build_suite(seeds: Sequence[SeedSentence], rules: ComplianceRules, lex: Lexicon,
                name: str = "suite", threads: int = 1) -> Dataset:
    """Validate and expand seeds into a diagnostic suite.

    Sentences are ordered by (seed index, configuration index) whatever
    the thread count.

    Raises:
        SeedValidationError: On the first invalid seed
    """
    for seed in seeds:
        validate_seed(seed, rules, lex)

    if threads > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            expanded = list(pool.map(expand, seeds))
    else:
        expanded = [expand(seed) for seed in seeds]

    sentences = tuple(sentence for variants in expanded for _, sentence in variants)
    logger.info(f"Built suite {name!r}: {len(seeds)} seeds -> {len(sentences)} sentences")
    return Dataset(sentences, name)


def split_by_configuration(suite: Dataset) -> Dict[str, Dataset]:
    """Group suite sentences by their configuration meta, in canonical order."""
    groups: Dict[str, List[Sentence]] = {c.id: [] for c in ALL_CONFIGURATIONS}
    for sentence in suite.sentences:
        config_id = sentence.meta.get("config")
        if config_id is None:
            raise PerturbationError("sentence without a configuration")
        groups[Configuration.from_id(config_id).id].append(sentence)
    return {cid: Dataset(tuple(items), cid) for cid, items in groups.items()}
