"""
Error Types.

Exception hierarchy shared by all modules. Library code raises these;
only the command-line layer turns them into exit codes.
"""

from typing import Iterable, Optional


class SpandiagError(Exception):
    """Base class for every error raised by spandiag."""


class UsageError(SpandiagError):
    """Bad command line: unknown command, missing option or missing file."""


class DataError(SpandiagError, ValueError):
    """Input data or configuration failed validation."""


class BioFormatError(DataError):
    """A BIO file could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None) -> None:
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SpanError(DataError):
    """Spans out of bounds, overlapping or unsorted."""


class MetaError(DataError):
    """A sentence meta entry cannot be written as a comment line."""


class AlignmentError(DataError):
    """Two datasets do not share the same token sequences."""

    def __init__(self, message: str, sentence_index: int) -> None:
        self.sentence_index = sentence_index
        super().__init__(f"sentence {sentence_index}: {message}")


class RulesError(DataError):
    """Malformed compliance rules or lexicon."""


class SeedValidationError(DataError):
    """A seed sentence disagrees with its declared type hints."""

    def __init__(self, seed_id: str, attribute: str, declared: str, computed: str) -> None:
        self.seed_id = seed_id
        self.attribute = attribute
        super().__init__(
            f"seed {seed_id}: declared {attribute}={declared} but computed {attribute}={computed}"
        )


class PerturbationError(DataError):
    """A transform was applied outside its precondition."""


class UnseenTypeError(DataError):
    """Strict prediction met target types missing from the benchmark."""

    def __init__(self, unseen: Iterable[str]) -> None:
        self.unseen = list(unseen)
        super().__init__(f"types absent from benchmark: {', '.join(self.unseen)}")


class CorrelationError(DataError):
    """Correlation is undefined for the given inputs."""
