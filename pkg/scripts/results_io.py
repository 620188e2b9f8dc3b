#!/usr/bin/env python3
"""
results_io.py - CSV/JSON writers and the run manifest

Floats are written with 17 significant digits so that aggregated numerics
can be compared byte for byte between runs.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, Literal, NotRequired, TypedDict

import numpy as np

logger = logging.getLogger(__name__)

RunStatus = Literal["complete", "partial", "failed"]


class SampleSeed(TypedDict):
    sample_index: int
    seed: int


class FailedSample(TypedDict):
    sample_index: int
    seed: int
    error: str


class OutputFile(TypedDict):
    path: str
    sha256: str
    bytes: int


class CodeVersion(TypedDict):
    package: str
    git_commit: NotRequired[str]


class RunManifest(TypedDict):
    config: dict[str, Any]
    master_seed: int
    samples: list[SampleSeed]
    failed_samples: list[FailedSample]
    status: RunStatus
    code_version: CodeVersion
    n_workers: int
    wall_time_seconds: float
    outputs: list[OutputFile]


def format_value(value: Any) -> str:
    """CSV cell text: 17 significant digits for floats, plain text otherwise."""
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (np.integer,)):
        return str(int(value))
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                msg = f"{path.name}: row has {len(row)} cells, header has {len(header)}"
                raise ValueError(msg)
            writer.writerow([format_value(v) for v in row])
            count += 1
    logger.debug("Wrote %s (%d rows)", path, count)
    return path


def read_csv(path: Path) -> list[dict[str, str]]:
    with path.open(encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    msg = f"Object of type {type(value).__name__} is not JSON serializable"
    raise TypeError(msg)


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n", encoding="utf-8")
    return path


def write_jsonl(path: Path, records: Iterable[dict[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True, default=_jsonable) + "\n")
    return path


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def inventory(output_dir: Path, paths: Iterable[Path]) -> list[OutputFile]:
    """Checksummed listing of written files, relative to output_dir, sorted by name."""
    entries = [
        OutputFile(path=p.relative_to(output_dir).as_posix(), sha256=file_sha256(p), bytes=p.stat().st_size)
        for p in paths
    ]
    return sorted(entries, key=lambda e: e["path"])


def load_manifest(path: Path) -> RunManifest:
    with path.open(encoding="utf-8") as handle:
        return json.load(handle)
