"""
Span Attributes.

Computes the diagnostic attribute profile of a span: length, graphotactic
shape, sentence position, quotation, casing, adjacency and ambiguity.

Graphotactic rules and the native-word lexicon are configuration, loaded
from a TOML rules file (see templates/rules/es.toml for the shipped
Spanish example).
"""

import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from core.corpus_model import Sentence, Span
from core.errors import RulesError, SpanError
from core.file_utils import file_exists, read_lines

logger = logging.getLogger(__name__)


# =============================================================================
# Constants
# =============================================================================

# Opening glyph -> accepted closing glyph
QUOTE_PAIRS = {
    '"': '"',
    "'": "'",
    "“": "”",
    "‘": "’",
    "«": "»",
}
QUOTE_CHARS = frozenset(QUOTE_PAIRS) | frozenset(QUOTE_PAIRS.values())


class LengthClass(str, Enum):
    SINGLE = "single"
    MULTI = "multi"


class ShapeClass(str, Enum):
    COMPLIANT = "compliant"
    NON_COMPLIANT = "non_compliant"
    MIXED_COMPLIANT = "mixed_compliant"


class Position(str, Enum):
    INITIAL = "initial"
    MID = "mid"


class Casing(str, Enum):
    STANDARD = "standard"
    LOWER = "lower"
    UPPER = "upper"
    TITLE = "title"


class AmbiguityClass(str, Enum):
    UNAMBIGUOUS = "unambiguous"
    AMBIGUOUS = "ambiguous"
    MIXED_AMBIGUOUS = "mixed_ambiguous"


# Profile dimensions that can be used to slice, in canonical order.
DIMENSIONS = (
    "type", "shape", "length", "position", "quoted",
    "casing", "text_casing", "span_casing", "adjacent", "ambiguity",
)


# =============================================================================
# Rules and Lexicon
# =============================================================================

def _letters(word: str) -> str:
    return "".join(ch for ch in word if ch.isalpha()).lower()


@dataclass(frozen=True)
class ComplianceRules:
    """Spelling patterns the recipient language does not allow."""
    forbidden_onsets: Tuple[str, ...] = ()
    forbidden_codas: Tuple[str, ...] = ()
    forbidden_infixes: Tuple[str, ...] = ()
    foreign_chars: FrozenSet[str] = frozenset()

    def __post_init__(self) -> None:
        for name in ("forbidden_onsets", "forbidden_codas", "forbidden_infixes"):
            patterns = tuple(p.lower() for p in getattr(self, name))
            for pattern in patterns:
                if not pattern or not pattern.isalpha():
                    raise RulesError(f"{name}: pattern {pattern!r} must be non-empty letters only")
            object.__setattr__(self, name, patterns)
        chars = frozenset(c.lower() for c in self.foreign_chars)
        for c in chars:
            if len(c) != 1 or not c.isalpha():
                raise RulesError(f"foreign_chars: {c!r} is not a single letter")
        object.__setattr__(self, "foreign_chars", chars)


@dataclass(frozen=True)
class Lexicon:
    """Lowercase native wordforms."""
    entries: FrozenSet[str] = frozenset()

    def __post_init__(self) -> None:
        for entry in self.entries:
            if not entry or entry != entry.lower():
                raise RulesError(f"lexicon entry {entry!r} must be non-empty and lowercase")

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries


def load_lexicon(path: Union[str, Path]) -> Lexicon:
    """Read a lexicon file: one lowercase wordform per line, '#' comments."""
    words = []
    for number, line in enumerate(read_lines(path), start=1):
        word = line.strip()
        if not word or word.startswith("#"):
            continue
        if word != word.lower():
            raise RulesError(f"{path} line {number}: lexicon entry {word!r} is not lowercase")
        words.append(word)
    logger.debug(f"Loaded {len(words)} lexicon entries from {path}")
    return Lexicon(frozenset(words))


def load_rules(path: Union[str, Path]) -> Tuple[ComplianceRules, Lexicon]:
    """Load compliance rules and the lexicon they reference.

    Args:
        path: TOML file with forbidden_onsets, forbidden_codas,
            forbidden_infixes, foreign_chars and optional lexicon_path
            (relative paths resolve against the rules file)

    Returns:
        Tuple of (rules, lexicon); no lexicon_path gives an empty lexicon

    Raises:
        RulesError: On unreadable or malformed files
    """
    path = Path(path)
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError as e:
        raise RulesError(f"rules file not found: {path}") from e
    except tomllib.TOMLDecodeError as e:
        raise RulesError(f"{path}: {e}") from e
    except UnicodeDecodeError as e:
        raise RulesError(f"{path}: not valid UTF-8 (byte {e.start})") from e

    for key in ("forbidden_onsets", "forbidden_codas", "forbidden_infixes", "foreign_chars"):
        value = data.get(key, [])
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise RulesError(f"{path}: {key} must be a list of strings")

    rules = ComplianceRules(
        forbidden_onsets=tuple(data.get("forbidden_onsets", [])),
        forbidden_codas=tuple(data.get("forbidden_codas", [])),
        forbidden_infixes=tuple(data.get("forbidden_infixes", [])),
        foreign_chars=frozenset(data.get("foreign_chars", [])),
    )

    lexicon = Lexicon()
    lexicon_path = data.get("lexicon_path", "")
    if lexicon_path:
        resolved = Path(lexicon_path)
        if not resolved.is_absolute():
            resolved = path.parent / resolved
        if not file_exists(resolved):
            raise RulesError(f"{path}: lexicon not found: {resolved}")
        lexicon = load_lexicon(resolved)

    logger.info(f"Loaded rules from {path}")
    return rules, lexicon


# =============================================================================
# Shape and Ambiguity
# =============================================================================

def check_compliance(word: str, rules: ComplianceRules) -> ShapeClass:
    """Classify one word against the graphotactic rules.

    Non-letters are stripped first; an empty remainder is compliant.
    """
    letters = _letters(word)
    if not letters:
        return ShapeClass.COMPLIANT
    if any(letters.startswith(p) for p in rules.forbidden_onsets):
        return ShapeClass.NON_COMPLIANT
    if any(letters.endswith(p) for p in rules.forbidden_codas):
        return ShapeClass.NON_COMPLIANT
    if any(p in letters for p in rules.forbidden_infixes):
        return ShapeClass.NON_COMPLIANT
    if any(c in rules.foreign_chars for c in letters):
        return ShapeClass.NON_COMPLIANT
    return ShapeClass.COMPLIANT


def shape_class(span_tokens: Sequence[str], rules: ComplianceRules) -> ShapeClass:
    """Combine per-token compliance into the span's shape."""
    if not span_tokens:
        raise SpanError("shape_class needs at least one token")
    classes = {check_compliance(t, rules) for t in span_tokens}
    if len(classes) == 1:
        return classes.pop()
    return ShapeClass.MIXED_COMPLIANT


def ambiguity_class(span_tokens: Sequence[str], lex: Lexicon) -> AmbiguityClass:
    """Ambiguous when every token is a native word, mixed when only some are."""
    if not span_tokens:
        raise SpanError("ambiguity_class needs at least one token")
    hits = sum(1 for t in span_tokens if t.lower() in lex.entries)
    if hits == 0:
        return AmbiguityClass.UNAMBIGUOUS
    if hits == len(span_tokens):
        return AmbiguityClass.AMBIGUOUS
    return AmbiguityClass.MIXED_AMBIGUOUS


# =============================================================================
# Casing
# =============================================================================

def is_quote(token: str) -> bool:
    return len(token) == 1 and token in QUOTE_CHARS


def _token_case(text: str) -> Optional[str]:
    """Case of one token: lower, upper, title, mixed; None when no letters."""
    letters = [ch for ch in text if ch.isalpha()]
    if not letters:
        return None
    if len(letters) == 1:
        return "letter_upper" if letters[0].isupper() else "lower"
    if all(ch.islower() for ch in letters):
        return "lower"
    if all(ch.isupper() for ch in letters):
        return "upper"
    if letters[0].isupper() and all(ch.islower() for ch in letters[1:]):
        return "title"
    return "mixed"


def _group_case(cases: Sequence[str], allow_single_upper: bool) -> Casing:
    """Casing of a token group; single uppercase letters fit title, or upper when allowed."""
    if all(c == "lower" for c in cases):
        return Casing.LOWER
    upper_ok = ("upper", "letter_upper") if allow_single_upper else ("upper",)
    if all(c in upper_ok for c in cases):
        return Casing.UPPER
    if all(c in ("title", "letter_upper") for c in cases):
        return Casing.TITLE
    return Casing.STANDARD


def first_content_index(sentence: Sentence) -> int:
    """Index of the first token that is not a quotation mark."""
    for token in sentence.tokens:
        if not is_quote(token.text):
            return token.index
    return 0


def classify_casing(sentence: Sentence, span: Span) -> Tuple[Casing, Casing]:
    """Classify (text_casing, span_casing) for a span in its sentence.

    Lowercase spans inside standard-cased text are reported as standard,
    as is a single-token span whose capital is only the sentence-initial one.
    """
    if not sentence.tokens:
        raise SpanError("classify_casing needs a non-empty sentence")

    initial = first_content_index(sentence)
    outside = [
        (t.index, _token_case(t.text)) for t in sentence.tokens
        if not span.start <= t.index < span.end and _token_case(t.text) is not None
    ]
    inside = [_token_case(t) for t in sentence.span_texts(span)]
    inside = [c for c in inside if c is not None]
    if not outside and not inside:
        return Casing.STANDARD, Casing.STANDARD

    initial_in_span = span.start <= initial < span.end
    initial_capitalised = sentence.tokens[initial].text[:1].isupper()

    text_casing = Casing.STANDARD
    if outside:
        text_casing = _group_case([c for _, c in outside], allow_single_upper=True)
        if text_casing is Casing.LOWER and initial_in_span and initial_capitalised:
            text_casing = Casing.STANDARD
        elif text_casing is Casing.TITLE and all(i == initial for i, _ in outside):
            text_casing = Casing.STANDARD
    elif inside:
        # no cased context: judge the sentence by the span alone
        text_casing = _group_case(inside, allow_single_upper=True)
        if text_casing is Casing.TITLE and len(inside) == 1:
            text_casing = Casing.STANDARD

    if not inside:
        return text_casing, Casing.STANDARD

    span_casing = _group_case(inside, allow_single_upper=text_casing is Casing.UPPER)
    if text_casing is Casing.STANDARD:
        if span_casing is Casing.LOWER:
            span_casing = Casing.STANDARD
        elif span_casing is Casing.TITLE and len(span) == 1 and initial_in_span:
            span_casing = Casing.STANDARD
    return text_casing, span_casing


def casing_configuration(text_casing: Casing, span_casing: Casing) -> str:
    """Name of the casing configuration a (text, span) casing pair reflects."""
    if text_casing is Casing.LOWER:
        return "text_lower"
    if text_casing is Casing.UPPER:
        return "text_upper"
    if text_casing is Casing.TITLE:
        return "text_title"
    if span_casing is Casing.UPPER:
        return "span_upper"
    if span_casing is Casing.TITLE:
        return "span_title"
    return "standard"


# =============================================================================
# Profile
# =============================================================================

SliceKey = Tuple[Tuple[str, str], ...]


@dataclass(frozen=True)
class AttributeProfile:
    """Per-span vector of diagnostic attributes."""
    length_class: LengthClass
    shape_class: ShapeClass
    position: Position
    quoted: bool
    text_casing: Casing
    span_casing: Casing
    adjacent: bool
    ambiguity_class: AmbiguityClass

    def __post_init__(self) -> None:
        if self.length_class is LengthClass.SINGLE and (
                self.shape_class is ShapeClass.MIXED_COMPLIANT
                or self.ambiguity_class is AmbiguityClass.MIXED_AMBIGUOUS):
            raise SpanError("single-token spans cannot be mixed")

    @property
    def span_type(self) -> str:
        """Span-type row: adjacency first, then ambiguity, then shape."""
        if self.adjacent:
            return "adjacent"
        if self.ambiguity_class is not AmbiguityClass.UNAMBIGUOUS:
            return self.ambiguity_class.value
        return self.shape_class.value

    @property
    def casing(self) -> str:
        return casing_configuration(self.text_casing, self.span_casing)

    def value(self, dim: str) -> str:
        """String value of one slicing dimension."""
        if dim == "type":
            return self.span_type
        if dim == "casing":
            return self.casing
        if dim == "shape":
            return self.shape_class.value
        if dim == "length":
            return self.length_class.value
        if dim == "ambiguity":
            return self.ambiguity_class.value
        if dim in ("quoted", "adjacent"):
            return "true" if getattr(self, dim) else "false"
        if dim in ("position", "text_casing", "span_casing"):
            return getattr(self, dim).value
        raise ValueError(f"unknown dimension {dim!r}")

    def project(self, dims: Iterable[str]) -> SliceKey:
        """Projection of the profile onto the given dimensions."""
        return tuple((dim, self.value(dim)) for dim in dims)

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = value.value if isinstance(value, Enum) else value
        out["type"] = self.span_type
        out["casing"] = self.casing
        return out


def validate_dims(dims: Sequence[str]) -> List[str]:
    """Check dimension names and duplicates; returns them as a list."""
    seen = set()
    for dim in dims:
        if dim not in DIMENSIONS:
            raise ValueError(f"unknown dimension {dim!r}; expected one of {', '.join(DIMENSIONS)}")
        if dim in seen:
            raise ValueError(f"dimension {dim!r} given twice")
        seen.add(dim)
    return list(dims)


def key_label(key: SliceKey) -> str:
    """Readable form of a slice key, e.g. ``type=compliant|length=multi``."""
    return "|".join(f"{dim}={value}" for dim, value in key) or "all"


def _is_quoted(sentence: Sentence, span: Span) -> bool:
    if span.start == 0 or span.end >= len(sentence):
        return False
    opening = sentence.tokens[span.start - 1].text
    closing = sentence.tokens[span.end].text
    return QUOTE_PAIRS.get(opening) == closing


def _only_quotes_between(sentence: Sentence, left: int, right: int) -> bool:
    return all(is_quote(t.text) for t in sentence.tokens[left:right])


def _is_adjacent(sentence: Sentence, span: Span) -> bool:
    for other in sentence.spans:
        if other == span:
            continue
        if other.end <= span.start and _only_quotes_between(sentence, other.end, span.start):
            return True
        if other.start >= span.end and _only_quotes_between(sentence, span.end, other.start):
            return True
    return False


def profile_span(sentence: Sentence, span: Span, rules: ComplianceRules, lex: Lexicon) -> AttributeProfile:
    """Compute the attribute profile of a gold span.

    Quote tokens are ignored for position and adjacency, so both are
    stable across quoted and unquoted versions of a sentence.

    Raises:
        SpanError: If the span is not one of the sentence's spans
    """
    if span not in sentence.spans:
        raise SpanError(f"span [{span.start},{span.end}) {span.label} is not in the sentence")

    tokens = sentence.span_texts(span)
    text_casing, span_casing = classify_casing(sentence, span)
    return AttributeProfile(
        length_class=LengthClass.SINGLE if len(span) == 1 else LengthClass.MULTI,
        shape_class=shape_class(tokens, rules),
        position=Position.INITIAL if span.start == first_content_index(sentence) else Position.MID,
        quoted=_is_quoted(sentence, span),
        text_casing=text_casing,
        span_casing=span_casing,
        adjacent=_is_adjacent(sentence, span),
        ambiguity_class=ambiguity_class(tokens, lex),
    )
