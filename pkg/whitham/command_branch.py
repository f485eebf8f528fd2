import json
import logging
import os
import sys
from pathlib import Path
from typing import IO, List, Optional

from whitham.config import ContinuationConfig
from whitham.errors import BranchIntegrityError, ExitCode
from whitham.manifest import RunManifest
from whitham.util import dump_json_atomically
from whitham.waves import BranchPoint, BranchTrace, trace_branch

__all__ = ["BRANCH_LOG_FILE_NAME", "BranchLogWriter", "command_branch"]

_logger = logging.getLogger(__name__)

BRANCH_LOG_FILE_NAME = "branch.jsonl"
SUMMARY_FILE_NAME = "summary.json"


def wave_file_name(step: int) -> str:
    return f"wave_{step:05d}.json"


class BranchLogWriter:
    """Streams accepted branch points to disk while the trace runs.

    Every point gets its own coefficient dump and one line in the branch log.
    The log is opened on the first point and each record is flushed as it is
    appended, so an aborted run leaves every accepted point on disk.
    """

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.records = 0
        self.files: List[Path] = []
        self._log: Optional[IO[str]] = None

    @property
    def log_file(self) -> Path:
        return self.out_dir / BRANCH_LOG_FILE_NAME

    def __call__(self, point: BranchPoint) -> None:
        wave_file = self.out_dir / wave_file_name(point.step)
        point.wave.to_json(wave_file)
        self.files.append(wave_file)

        record = point.to_record()
        record["coeffs_file"] = wave_file.name
        if self._log is None:
            self._log = self.log_file.open("w", encoding="utf-8", newline="\n")
        self._log.write(json.dumps(record) + "\n")
        self._log.flush()
        self.records += 1

    def close(self) -> None:
        if self._log is not None:
            self._log.close()
            self._log = None

    def __enter__(self) -> "BranchLogWriter":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()


def _summary(trace: BranchTrace, cfg: ContinuationConfig) -> dict:
    last = trace[-1]
    return {
        "stop_reason": trace.stop_reason.value if trace.stop_reason else None,
        "points": len(trace),
        "N": cfg.N,
        "final_mu": last.mu,
        "final_gap": last.diagnostics.gap,
        "final_step": last.step,
        "folds": [
            {"step": f.step, "mu": f.mu, "gap": f.gap, "arclength": f.arclength}
            for f in trace.folds
        ],
    }


def _write_manifest(
    cfg: ContinuationConfig,
    out_dir: Path,
    files: List[Path],
    seed: Optional[int],
) -> None:
    manifest = RunManifest(command="branch", config=cfg.to_dict(), seed=seed)
    for out_file in files:
        manifest.add_output(out_dir, out_file)
    manifest.write(out_dir)


def command_branch(
    config_file: Path, out_dir: Path, seed: Optional[int] = None
) -> None:
    cfg = ContinuationConfig.load(config_file)
    _logger.info(
        f"Continuation from {config_file.as_posix()} into {out_dir.as_posix()}:"
        f"{os.linesep}{json.dumps(cfg.to_dict(), indent=2)}"
    )

    out_dir.mkdir(parents=True, exist_ok=True)
    writer = BranchLogWriter(out_dir)

    try:
        with writer:
            trace = trace_branch(cfg, on_accept=writer)
    except BranchIntegrityError as err:
        _logger.error(
            f"Branch aborted at step {err.point.step} (mu = {err.point.mu:.12f}) "
            f"after {len(err.accepted)} accepted points"
        )
        failed_file = out_dir / f"failed_{wave_file_name(err.point.step)}"
        err.point.wave.to_json(failed_file)
        files = [writer.log_file] if writer.records else []
        _write_manifest(cfg, out_dir, files + writer.files + [failed_file], seed)
        raise

    summary_file = out_dir / SUMMARY_FILE_NAME
    dump_json_atomically(summary_file, _summary(trace, cfg))
    _write_manifest(
        cfg, out_dir, [writer.log_file, summary_file] + writer.files, seed
    )

    print(
        f"Stopped ({trace.stop_reason.value}) after {len(trace)} points: "
        f"mu = {trace[-1].mu:.12f}, gap = {trace[-1].diagnostics.gap:.6e}, "
        f"folds = {len(trace.folds)}"
    )
    sys.exit(ExitCode.OK)
