"""
Corpus Model.

Immutable types for tokenized, span-annotated text and the CoNLL-style
BIO format used to read and write them.

Spans are half-open token ranges [start, end). Inputs are pre-tokenized;
this module never splits text. Sentence meta travels through BIO files
as comment lines (``# key = value``) placed before the sentence's tokens.
"""

import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from core.errors import AlignmentError, BioFormatError, MetaError, SpanError
from core.file_utils import iter_lines, read_file_as_text, write_text_to_file

logger = logging.getLogger(__name__)


# =============================================================================
# Constants
# =============================================================================

OUTSIDE = "O"
DEFAULT_LABEL = "ENG"

_TAG_RE = re.compile(r"^(?:O|([BI])-(\S+))$")
_META_RE = re.compile(r"^#\s*([^=\s][^=]*?)\s*=\s?(.*)$")
_WHITESPACE = (" ", "\t", "\n", "\r")


# =============================================================================
# Domain Types
# =============================================================================

@dataclass(frozen=True)
class Token:
    """A single token and its position in the sentence."""
    text: str
    index: int

    def __post_init__(self) -> None:
        if not self.text:
            raise SpanError(f"empty token at index {self.index}")
        if any(ch in self.text for ch in _WHITESPACE):
            raise SpanError(f"token {self.text!r} at index {self.index} contains whitespace")


@dataclass(frozen=True, order=True)
class Span:
    """Labeled half-open token range [start, end)."""
    start: int
    end: int
    label: str = DEFAULT_LABEL

    def __len__(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end


def validate_spans(n: int, spans: Sequence[Span]) -> None:
    """Check bounds, ordering and non-overlap of spans in a sentence of n tokens.

    Raises:
        SpanError: On the first violated invariant
    """
    previous_end = 0
    for i, span in enumerate(spans):
        if not 0 <= span.start < span.end <= n:
            raise SpanError(f"span [{span.start},{span.end}) out of bounds for {n} tokens")
        if i and span.start < previous_end:
            raise SpanError(f"span [{span.start},{span.end}) overlaps or precedes the previous span")
        previous_end = span.end


def validate_meta(key: str, value: str) -> None:
    """Check that a meta entry survives the ``# key = value`` comment line.

    Raises:
        MetaError: On an empty or padded key, a key containing '=', or a
            tab or line break in either part
    """
    if not key or key != key.strip() or "=" in key:
        raise MetaError(f"invalid meta key {key!r}")
    for part in (key, value):
        if any(ch in part for ch in ("\t", "\n", "\r")):
            raise MetaError(f"meta entry {key!r} contains a tab or line break")


@dataclass(frozen=True)
class Sentence:
    """Ordered tokens, ordered non-overlapping spans and a meta map."""
    tokens: Tuple[Token, ...]
    spans: Tuple[Span, ...] = ()
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for i, token in enumerate(self.tokens):
            if token.index != i:
                raise SpanError(f"token {token.text!r} has index {token.index}, expected {i}")
        validate_spans(len(self.tokens), self.spans)
        for key, value in self.meta.items():
            validate_meta(key, value)

    @classmethod
    def from_texts(cls, texts: Iterable[str], spans: Iterable[Span] = (),
                   meta: Optional[Mapping[str, str]] = None) -> "Sentence":
        """Build a sentence from token strings, numbering tokens in order."""
        tokens = tuple(Token(text, i) for i, text in enumerate(texts))
        return cls(tokens, tuple(spans), dict(meta or {}))

    @property
    def texts(self) -> List[str]:
        return [token.text for token in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)

    def span_texts(self, span: Span) -> List[str]:
        return [token.text for token in self.tokens[span.start:span.end]]

    def with_texts(self, texts: Sequence[str]) -> "Sentence":
        """Same spans and meta over new token strings of equal count."""
        if len(texts) != len(self.tokens):
            raise SpanError(f"expected {len(self.tokens)} tokens, got {len(texts)}")
        return Sentence.from_texts(texts, self.spans, self.meta)

    def with_spans(self, spans: Iterable[Span]) -> "Sentence":
        return replace(self, spans=tuple(spans))

    def with_meta(self, **values: str) -> "Sentence":
        merged = dict(self.meta)
        merged.update(values)
        return replace(self, meta=merged)

    def without_meta(self, *keys: str) -> "Sentence":
        return replace(self, meta={k: v for k, v in self.meta.items() if k not in keys})


@dataclass(frozen=True)
class Dataset:
    """Named, ordered collection of sentences."""
    sentences: Tuple[Sentence, ...] = ()
    name: str = ""
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def span_count(self) -> int:
        return sum(len(s.spans) for s in self.sentences)

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)


# =============================================================================
# Tag <-> Span Conversion
# =============================================================================

def parse_tag(tag: str) -> Tuple[str, Optional[str]]:
    """Split a BIO tag into (prefix, label); O has label None.

    Raises:
        BioFormatError: If the tag is not O, B-<label> or I-<label>
    """
    m = _TAG_RE.match(tag)
    if not m:
        raise BioFormatError(f"invalid tag {tag!r}")
    if tag == OUTSIDE:
        return OUTSIDE, None
    return m.group(1), m.group(2)


def _decode_tags(tags: Sequence[str], strict: bool = False) -> Tuple[List[Span], List[str]]:
    """Decode tags into spans, repairing orphan I- tags unless strict.

    Returns:
        Tuple of (spans, repair warnings); warnings carry the token position
    """
    spans: List[Span] = []
    warnings: List[str] = []
    start: Optional[int] = None
    label: Optional[str] = None

    for i, tag in enumerate(tags):
        prefix, tag_label = parse_tag(tag)
        if prefix == "I" and (start is None or tag_label != label):
            if strict:
                raise BioFormatError(f"orphan tag {tag!r} at token {i}")
            warnings.append(f"token {i}: orphan {tag} repaired to B-{tag_label}")
            prefix = "B"
        if prefix == "I":
            continue
        if start is not None:
            spans.append(Span(start, i, label))
            start, label = None, None
        if prefix == "B":
            start, label = i, tag_label

    if start is not None:
        spans.append(Span(start, len(tags), label))
    return spans, warnings


def spans_from_tags(tags: Sequence[str], strict: bool = False) -> List[Span]:
    """Convert a BIO tag sequence into maximal B/I spans.

    In lenient mode an orphan ``I-X`` opens a new span and a warning is
    logged; in strict mode it raises BioFormatError.
    """
    spans, warnings = _decode_tags(tags, strict)
    for message in warnings:
        logger.warning(message)
    return spans


def tags_from_spans(n: int, spans: Sequence[Span]) -> List[str]:
    """Encode spans over a sentence of n tokens as BIO2 tags.

    Raises:
        SpanError: If spans are out of bounds or overlap
    """
    validate_spans(n, spans)
    tags = [OUTSIDE] * n
    for span in spans:
        tags[span.start] = f"B-{span.label}"
        for i in range(span.start + 1, span.end):
            tags[i] = f"I-{span.label}"
    return tags


# =============================================================================
# BIO Parsing and Serialization
# =============================================================================

def parse_bio(stream: Union[str, Iterable[str]], name: str = "", strict: bool = False) -> Dataset:
    """Parse CoNLL-style ``token<TAB>tag`` lines into a Dataset.

    Args:
        stream: Whole text or an iterable of lines (terminators optional)
        name: Dataset name
        strict: Raise on orphan I- tags instead of repairing them

    Returns:
        Dataset; empty input gives an empty Dataset

    Raises:
        BioFormatError: Wrong field count, invalid tag, duplicate meta key,
            or an orphan I- tag in strict mode
    """
    lines = iter_lines(stream) if isinstance(stream, str) else stream
    sentences: List[Sentence] = []
    warnings: List[str] = []

    texts: List[str] = []
    tags: List[str] = []
    meta: Dict[str, str] = {}
    first_line = 0

    def flush() -> None:
        nonlocal texts, tags, meta
        if texts:
            try:
                spans, repairs = _decode_tags(tags, strict)
            except BioFormatError as e:
                raise BioFormatError(str(e), first_line) from e
            for message in repairs:
                text = f"sentence {len(sentences)} (line {first_line}): {message}"
                logger.warning(text)
                warnings.append(text)
            sentences.append(Sentence.from_texts(texts, spans, meta))
        elif meta:
            logger.debug(f"Dropping meta with no tokens: {meta}")
        texts, tags, meta = [], [], {}

    for number, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#") and "\t" not in line:
            m = _META_RE.match(line)
            if not m:
                logger.debug(f"line {number}: ignoring comment {line!r}")
                continue
            if texts:
                flush()
            key, value = m.group(1), m.group(2)
            if key in meta:
                raise BioFormatError(f"duplicate meta key {key!r}", number)
            meta[key] = value
            continue

        fields = line.split("\t")
        if len(fields) != 2:
            raise BioFormatError(f"expected 2 tab-separated fields, found {len(fields)}", number)
        token, tag = fields
        if not token or token.strip() != token or " " in token:
            raise BioFormatError(f"invalid token {token!r}", number)
        try:
            parse_tag(tag)
        except BioFormatError as e:
            raise BioFormatError(str(e), number) from e
        if not texts:
            first_line = number
        texts.append(token)
        tags.append(tag)

    flush()
    logger.debug(f"Parsed {len(sentences)} sentences from {name or 'stream'}")
    return Dataset(tuple(sentences), name, tuple(warnings))


def serialize_bio(dataset: Dataset) -> List[str]:
    """Render a Dataset as canonical BIO lines.

    Each sentence is its meta comments, one ``token<TAB>tag`` line per
    token and a terminating blank line. An empty Dataset gives no lines.
    """
    lines: List[str] = []
    for sentence in dataset.sentences:
        for key, value in sentence.meta.items():
            lines.append(f"# {key} = {value}")
        tags = tags_from_spans(len(sentence), sentence.spans)
        for token, tag in zip(sentence.tokens, tags):
            lines.append(f"{token.text}\t{tag}")
        lines.append("")
    return lines


def load_bio(path: Union[str, Path], strict: bool = False) -> Dataset:
    """Read a BIO file; the dataset is named after the file stem."""
    text = read_file_as_text(path)
    return parse_bio(text, name=Path(path).stem, strict=strict)


def save_bio(path: Union[str, Path], dataset: Dataset) -> None:
    """Write a Dataset as a BIO file."""
    lines = serialize_bio(dataset)
    write_text_to_file(path, "".join(f"{line}\n" for line in lines))
    logger.info(f"Wrote {len(dataset)} sentences to {path}")


def check_aligned(a: Dataset, b: Dataset) -> None:
    """Ensure two datasets have identical token sequences.

    Raises:
        AlignmentError: Naming the first mismatching sentence
    """
    if len(a) != len(b):
        raise AlignmentError(f"dataset sizes differ ({len(a)} vs {len(b)})", min(len(a), len(b)))
    for i, (sa, sb) in enumerate(zip(a.sentences, b.sentences)):
        if sa.texts != sb.texts:
            raise AlignmentError("token sequences differ", i)
