from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from importlib import metadata
from pathlib import Path
from typing import Any, Iterable, List, NamedTuple, Sequence

__all__ = [
    "FileDigest",
    "dump_json_atomically",
    "file_digest",
    "format_float",
    "tool_version",
    "write_csv_atomically",
    "write_text_atomically",
]

_logger = logging.getLogger(__name__)

_PACKAGE_NAME = "whitham"


class FileDigest(NamedTuple):
    sha256: str
    size: int


def file_digest(file_path: Path) -> FileDigest:
    """
    SHA-256 and byte size of an output file, from a single read.

    Raises:
        RuntimeError: If the file cannot be opened or read
    """
    try:
        with file_path.open("rb") as f:
            size = os.fstat(f.fileno()).st_size
            sha256 = hashlib.file_digest(f, "sha256").hexdigest()
    except OSError as err:
        raise RuntimeError(f"Cannot digest {file_path.as_posix()}: {err}") from err
    return FileDigest(sha256=sha256, size=size)


def write_text_atomically(out_file: Path, text: str, encoding: str = "utf-8") -> None:
    """
    Write text to a file through a temporary sibling and an atomic rename.

    Readers never observe a half-written file, and a failed write leaves any
    previous version in place.

    Raises:
        RuntimeError: If the file cannot be written
    """
    out_file.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(
        prefix=f".{out_file.name}.", suffix=".tmp", dir=out_file.parent
    )
    try:
        with os.fdopen(fd, "w", encoding=encoding, newline="") as out:
            out.write(text)
        os.replace(tmp_name, out_file)
    except Exception as err:
        Path(tmp_name).unlink(missing_ok=True)
        raise RuntimeError(f'Error writing file at path "{out_file}": {err}') from err


def dump_json_atomically(out_file: Path, data: Any) -> None:
    """Serialize data as indented JSON and write it atomically."""
    write_text_atomically(out_file, json.dumps(data, indent=2) + "\n")


def format_float(value: float) -> str:
    """Format a float with 17 significant digits (exact round-trip)."""
    return format(float(value), ".17g")


def write_csv_atomically(
    out_file: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> None:
    """Write a CSV table; floats are emitted with 17 significant digits."""
    lines: List[str] = [",".join(header)]
    for row in rows:
        cells = [
            format_float(cell) if isinstance(cell, float) else str(cell)
            for cell in row
        ]
        lines.append(",".join(cells))
    write_text_atomically(out_file, "\n".join(lines) + "\n")


def tool_version() -> str:
    """Version of the installed package, or a placeholder in a source tree."""
    try:
        return metadata.version(_PACKAGE_NAME)
    except metadata.PackageNotFoundError:
        _logger.info(f"Package {_PACKAGE_NAME} is not installed, using source tree")
        return "0+unknown"
