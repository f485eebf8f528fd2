import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, Optional

from whitham.errors import ExitCode
from whitham.manifest import RunManifest
from whitham.util import dump_json_atomically, write_csv_atomically
from whitham.waves import PeriodicWave, fit_cusp, lower_bound_check, run_diagnostics
from whitham.waves.regularity import CuspFit

__all__ = ["DIAGNOSTICS_FILE_NAME", "command_analyze"]

_logger = logging.getLogger(__name__)

DIAGNOSTICS_FILE_NAME = "diagnostics.json"


def _fit_summary(fit: CuspFit) -> Dict[str, Any]:
    summary = asdict(fit)
    summary["conjecture_deviation"] = fit.conjecture_deviation
    return summary


def command_analyze(
    wave_file: Path, out_dir: Path, out_file: Path, seed: Optional[int] = None
) -> None:
    wave = PeriodicWave.from_json(wave_file)
    _logger.info(
        f"Analyzing {wave_file.as_posix()}: P = {wave.P!r}, N = {wave.N}, "
        f"mu = {wave.mu!r}"
    )

    diagnostics = run_diagnostics(wave)
    report: Dict[str, Any] = {"diagnostics": diagnostics.to_dict()}
    failed = diagnostics.failed_checks()
    if failed:
        _logger.warning(f"Failed checks: {', '.join(failed)}")

    manifest = RunManifest(
        command="analyze",
        config={"wave": wave_file.as_posix(), "P": wave.P, "N": wave.N, "mu": wave.mu},
        seed=seed,
    )

    if diagnostics.is_constant:
        _logger.warning("Constant wave, skipping the crest analysis")
        report["lower_bound"] = None
        report["cusp_fit"] = None
    else:
        lower_bound = lower_bound_check(wave, [-wave.P / 8.0])
        report["lower_bound"] = {
            "ok": lower_bound.ok,
            "entries": [asdict(entry) for entry in lower_bound.entries],
        }

        fit = fit_cusp(wave)
        report["cusp_fit"] = _fit_summary(fit)
        out_path = out_dir / out_file
        write_csv_atomically(out_path, CuspFit.CSV_HEADER, [fit.csv_row()])
        manifest.add_output(out_dir, out_path)
        print(
            f"alpha_pointwise = {fit.alpha_pointwise:.6f}, "
            f"alpha_spectral = {fit.alpha_spectral:.6f}, "
            f"C = {fit.C_pointwise:.6f} "
            f"(|C - sqrt(pi/8)| = {fit.conjecture_deviation:.3e})"
        )

    diagnostics_path = out_dir / DIAGNOSTICS_FILE_NAME
    dump_json_atomically(diagnostics_path, report)
    manifest.add_output(out_dir, diagnostics_path)
    manifest.write(out_dir)

    sys.exit(ExitCode.OK)
