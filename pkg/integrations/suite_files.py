"""
Suite Files.

Reads seed sentences (a BIO file plus a JSON sidecar of type hints) and
writes an expanded suite as one BIO file per configuration plus a
manifest.

Sidecar format: a JSON object mapping the 0-based sentence index (as a
string) to its hints, e.g. ``{"0": {"type": "compliant", "length":
"single", "position": "initial", "id": "burpees-ini"}}``. The ``id`` key
is optional; seeds default to ``seed-<index>``.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Union

from core.corpus_model import Dataset, load_bio, save_bio
from core.errors import DataError
from core.file_utils import ensure_directory_exists, read_file_as_text, write_json
from core.perturbation import SEED_HINTS, SeedSentence, split_by_configuration

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
SCHEMA_VERSION = "1.0"


def load_seed_meta(path: Union[str, Path]) -> Dict[int, Dict[str, str]]:
    """Read a sidecar file into {sentence index: hints}.

    Raises:
        DataError: On malformed JSON, non-integer indices or unknown hints
    """
    try:
        raw = json.loads(read_file_as_text(path))
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from e
    if not isinstance(raw, dict):
        raise DataError(f"{path}: expected a JSON object keyed by sentence index")

    meta: Dict[int, Dict[str, str]] = {}
    for index, hints in raw.items():
        try:
            position = int(index)
        except ValueError as e:
            raise DataError(f"{path}: sentence index {index!r} is not an integer") from e
        if not isinstance(hints, dict):
            raise DataError(f"{path}: hints for sentence {index} must be an object")
        unknown = set(hints) - set(SEED_HINTS) - {"id"}
        if unknown:
            raise DataError(f"{path}: unknown hints for sentence {index}: {sorted(unknown)}")
        meta[position] = {k: str(v) for k, v in hints.items()}
    return meta


def load_seeds(bio_path: Union[str, Path], meta_path: Union[str, Path, None] = None,
               strict: bool = True) -> List[SeedSentence]:
    """Pair seed sentences with their sidecar hints.

    Raises:
        DataError: If the sidecar names a sentence the BIO file lacks
    """
    dataset = load_bio(bio_path, strict=strict)
    meta = load_seed_meta(meta_path) if meta_path else {}
    extra = [i for i in meta if not 0 <= i < len(dataset)]
    if extra:
        raise DataError(f"sidecar refers to missing sentences: {sorted(extra)}")

    seeds = []
    for i, sentence in enumerate(dataset.sentences):
        hints = dict(meta.get(i, {}))
        seed_id = hints.pop("id", "") or sentence.meta.get("seed", "") or f"seed-{i}"
        seeds.append(SeedSentence(seed_id, sentence, hints))
    logger.info(f"Loaded {len(seeds)} seeds from {bio_path}")
    return seeds


def write_suite(suite: Dataset, out_dir: Union[str, Path], seed_count: int) -> dict:
    """Write one BIO file per configuration and a manifest.

    Returns:
        The manifest payload that was written
    """
    out_dir = Path(out_dir)
    ensure_directory_exists(out_dir)
    configurations = []
    for config_id, part in split_by_configuration(suite).items():
        filename = f"{config_id}.bio"
        save_bio(out_dir / filename, part)
        configurations.append({
            "id": config_id,
            "file": filename,
            "sentences": len(part),
            "spans": part.span_count,
        })

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "name": suite.name,
        "seeds": seed_count,
        "sentences": len(suite),
        "spans": suite.span_count,
        "tokens": suite.token_count,
        "configurations": configurations,
    }
    write_json(out_dir / MANIFEST_NAME, manifest)
    logger.info(f"Wrote suite with {len(suite)} sentences to {out_dir}")
    return manifest
