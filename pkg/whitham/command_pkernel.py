import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from whitham.errors import DomainError, ExitCode
from whitham.kernel import (
    parity_comparison_report,
    pkernel_cosh,
    pkernel_direct,
    pkernel_fourier_check,
    pkernel_monotonicity_report,
)
from whitham.manifest import RunManifest
from whitham.util import dump_json_atomically, write_csv_atomically

__all__ = [
    "FOURIER_CHECK_TOL",
    "METHOD_AGREEMENT_TOL",
    "ThreeMethodReport",
    "command_pkernel",
    "three_method_report",
]

_logger = logging.getLogger(__name__)

METHOD_AGREEMENT_TOL = 1e-8
FOURIER_CHECK_TOL = 1e-3
CHECK_FILE_NAME = "pkernel_check.json"

_CSV_HEADER = ("x", "P", "K_P", "method")
_AGREEMENT_POINTS = 20


@dataclass(frozen=True)
class ThreeMethodReport:
    """Consistency of the direct sum, the cosh formula and the Fourier modes.

    Attributes:
        P: Period
        max_direct_cosh: Largest |direct - cosh| over the sample points
        max_fourier_deviation: Largest mode deviation of the Fourier check
        mean_mode: Reassembled zeroth mode, 1/P for a unit-mass kernel
        monotone_ok: Half-period monotonicity and convexity signs hold
        parity_ok: K_P(x - y) > K_P(x + y) held on the sampled grid
    """

    P: float
    max_direct_cosh: float
    max_fourier_deviation: float
    mean_mode: float
    monotone_ok: bool
    parity_ok: bool

    @property
    def ok(self) -> bool:
        return (
            self.max_direct_cosh < METHOD_AGREEMENT_TOL
            and self.max_fourier_deviation < FOURIER_CHECK_TOL
            and self.monotone_ok
            and self.parity_ok
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "P": self.P,
            "max_direct_cosh": self.max_direct_cosh,
            "max_fourier_deviation": self.max_fourier_deviation,
            "mean_mode": self.mean_mode,
            "monotone_ok": self.monotone_ok,
            "parity_ok": self.parity_ok,
            "ok": self.ok,
        }


def _half_period_points(P: float, n: int) -> np.ndarray:
    return P / 2.0 * np.arange(1, n + 1) / n


def three_method_report(P: float, tol: float = 1e-12) -> ThreeMethodReport:
    xs = (np.arange(_AGREEMENT_POINTS) + 0.5) * (P / 2.0) / _AGREEMENT_POINTS
    max_direct_cosh = max(
        abs(
            pkernel_direct(float(x), P, tol).value
            - pkernel_cosh(float(x), P, tol).value
        )
        for x in xs
    )
    fourier = pkernel_fourier_check(P, tol=tol)
    return ThreeMethodReport(
        P=float(P),
        max_direct_cosh=float(max_direct_cosh),
        max_fourier_deviation=fourier.max_deviation,
        mean_mode=fourier.mean_mode,
        monotone_ok=pkernel_monotonicity_report(P).ok,
        parity_ok=parity_comparison_report(P).ok,
    )


def command_pkernel(
    P: float,
    n_points: int,
    method: str,
    out_dir: Path,
    out_file: Path,
    should_check: bool = False,
    tol: float = 1e-12,
    seed: Optional[int] = None,
) -> None:
    if n_points < 1:
        raise DomainError(f"Number of points must be positive, got {n_points!r}")
    if not (math.isfinite(P) and P > 0.0):
        raise DomainError(f"Period must be positive, got {P!r}")

    evaluate = pkernel_cosh if method == "cosh" else pkernel_direct
    _logger.info(f"Tabulating K_P for P = {P!r} on {n_points} points of (0, P/2]")

    rows = []
    for x in _half_period_points(P, n_points):
        value = evaluate(float(x), P, tol)
        rows.append((value.x, value.P, value.value, value.method.value))

    out_path = out_dir / out_file
    write_csv_atomically(out_path, _CSV_HEADER, rows)

    manifest = RunManifest(
        command="pkernel",
        config={
            "period": P,
            "points": n_points,
            "method": method,
            "tol": tol,
            "three_method": should_check,
        },
        seed=seed,
    )
    manifest.add_output(out_dir, out_path)

    report: Optional[ThreeMethodReport] = None
    if should_check:
        report = three_method_report(P, tol)
        check_path = out_dir / CHECK_FILE_NAME
        dump_json_atomically(check_path, report.to_dict())
        manifest.add_output(out_dir, check_path)
        print(
            f"P = {P!r}:{os.linesep}"
            f"  max |direct - cosh|      = {report.max_direct_cosh:.3e}{os.linesep}"
            f"  max Fourier deviation    = "
            f"{report.max_fourier_deviation:.3e}{os.linesep}"
            f"  mean mode * P            = {report.mean_mode * P:.12f}{os.linesep}"
            f"  half-period monotonicity = {report.monotone_ok}{os.linesep}"
            f"  parity comparison        = {report.parity_ok}"
        )

    manifest.write(out_dir)

    if report is not None and not report.ok:
        _logger.error(f"Periodic kernel consistency check failed for P = {P!r}")
        sys.exit(ExitCode.INVARIANT)

    _logger.info(f"Wrote {out_path.as_posix()}")
    sys.exit(ExitCode.OK)
