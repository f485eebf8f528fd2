# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from whitham.util import dump_json_atomically, file_digest, tool_version

__all__ = ["MANIFEST_FILE_NAME", "OutputFileData", "RunManifest"]

_logger = logging.getLogger(__name__)

MANIFEST_FILE_NAME = "manifest.json"


def _relative_path(out_dir: Path, out_file: Path) -> str:
    try:
        return out_file.relative_to(out_dir).as_posix()
    except ValueError:
        return out_file.as_posix()


@dataclass
class OutputFileData:
    """An output file of a run.

    Attributes:
        path: Path relative to the output directory
        checksum: SHA-256 checksum of the file
        size: Size in bytes
    """

    path: str
    checksum: str
    size: int


@dataclass
class RunManifest:
    """Provenance of one CLI run.

    Attributes:
        command: Subcommand name
        config: Fully resolved parameter set
        tool_version: Installed package version
        timestamp: UTC time of the run, ISO-8601
        output_files: Files written by the run, with checksums
        seed: Value of --seed (no stochastic component consumes it)
    """

    command: str
    config: Dict[str, Any]
    tool_version: str = field(default_factory=tool_version)
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )
    output_files: List[OutputFileData] = field(default_factory=list)
    seed: Optional[int] = None

    def add_output(self, out_dir: Path, out_file: Path) -> None:
        digest = file_digest(out_file)
        self.output_files.append(
            OutputFileData(
                path=_relative_path(out_dir, out_file),
                checksum=digest.sha256,
                size=digest.size,
            )
        )

    def write(self, out_dir: Path) -> Path:
        manifest_file = out_dir / MANIFEST_FILE_NAME
        dump_json_atomically(manifest_file, asdict(self))
        _logger.info(
            f"Wrote {manifest_file.as_posix()} ({len(self.output_files)} output files)"
        )
        return manifest_file
