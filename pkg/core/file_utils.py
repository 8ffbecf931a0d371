"""
File Utilities.

Helper functions for file and directory operations.
"""

import json
import os
from pathlib import Path
from typing import Any, Iterator, List, Union

from core.errors import DataError, UsageError

PathLike = Union[str, Path]


def read_file_as_text(path: PathLike) -> str:
    """Read entire file content as UTF-8 text.

    Args:
        path: Path to the file

    Returns:
        File contents as string

    Raises:
        UsageError: If the file does not exist
        DataError: If the content is not valid UTF-8
    """
    if not file_exists(path):
        raise UsageError(f"file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8', newline='') as f:
            return f.read()
    except UnicodeDecodeError as e:
        raise DataError(f"{path}: not valid UTF-8 (byte {e.start})") from e


def read_lines(path: PathLike) -> List[str]:
    """Read a text file as a list of lines without line terminators.

    LF and CRLF endings are both accepted.
    """
    return list(iter_lines(read_file_as_text(path)))


def iter_lines(text: str) -> Iterator[str]:
    """Split text into lines, dropping LF or CRLF terminators."""
    for line in text.split('\n'):
        yield line[:-1] if line.endswith('\r') else line


def write_text_to_file(path: PathLike, text: str) -> None:
    """Write text content to a file, creating directories if needed.

    Output always uses LF line endings.

    Args:
        path: Path to the file
        text: Content to write
    """
    dirname = os.path.dirname(path)
    if dirname and not os.path.exists(dirname):
        os.makedirs(dirname, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)


def dump_json(payload: Any) -> str:
    """Serialize a payload deterministically (stable key order, UTF-8 kept)."""
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def write_json(path: PathLike, payload: Any) -> None:
    """Write a JSON document to disk."""
    write_text_to_file(path, dump_json(payload))


def file_exists(path: PathLike) -> bool:
    """Check if a file or directory exists.

    Args:
        path: Path to check

    Returns:
        True if path exists, False otherwise
    """
    return os.path.exists(path)


def ensure_directory_exists(path: PathLike) -> None:
    """Create directory if it doesn't exist.

    Args:
        path: Directory path to create
    """
    if not os.path.exists(path):
        os.makedirs(path, exist_ok=True)
