import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from whitham.errors import DomainError, ExitCode
from whitham.kernel import (
    KernelValue,
    kernel_asymptotic,
    kernel_derivative,
    kernel_series,
    kernel_split,
    kernel_value,
)
from whitham.kernel.whitham_kernel import KernelMethod
from whitham.manifest import RunManifest
from whitham.util import write_csv_atomically

__all__ = ["CROSS_VALIDATION_TOL", "command_kernel", "cross_validate", "kernel_grid"]

_logger = logging.getLogger(__name__)

CROSS_VALIDATION_TOL = 1e-8

_CSV_HEADER = ("x", "K", "K'", "K''", "method", "err_est")


def kernel_grid(x_from: float, x_to: float, step: float) -> np.ndarray:
    """
    x_from, x_from + step, ... up to x_to inclusive.

    Raises:
        DomainError: If the range is not positive and increasing or step <= 0
    """
    if not (math.isfinite(step) and step > 0.0):
        raise DomainError(f"Step must be positive, got {step!r}")
    if not (0.0 < x_from <= x_to and math.isfinite(x_to)):
        raise DomainError(f"Expected 0 < from <= to, got {x_from!r} and {x_to!r}")
    count = int(math.floor((x_to - x_from) / step + 1e-9)) + 1
    return x_from + step * np.arange(count)


def _evaluate(x: float, method: str, tol: float) -> KernelValue:
    if method == "series":
        return kernel_series(x, tol)
    if method == "split":
        split = kernel_split(x, tol)
        return KernelValue(
            x=x, value=split.value, method=KernelMethod.SPLIT, err_est=split.err_est
        )
    if method == "asymptotic":
        return kernel_asymptotic(x)
    return kernel_value(x, tol)


def cross_validate(tol: float = 1e-10, n_points: int = 50) -> Tuple[float, float]:
    """Largest |series - split| over log-spaced x in [0.1, 5], and where it occurs."""
    worst, worst_x = 0.0, math.nan
    for x in np.geomspace(0.1, 5.0, n_points):
        series = kernel_series(float(x), tol).value
        difference = abs(series - kernel_split(float(x), tol).value)
        if difference > worst:
            worst, worst_x = difference, float(x)
    return worst, worst_x


def command_kernel(
    x_from: float,
    x_to: float,
    step: float,
    method: str,
    tol: float,
    out_dir: Path,
    out_file: Path,
    should_cross_validate: bool = False,
    seed: Optional[int] = None,
) -> None:
    xs = kernel_grid(x_from, x_to, step)
    _logger.info(
        f"Tabulating K on [{x_from}, {x_to}] with step {step} "
        f"({xs.size} points, method {method})"
    )

    rows: List[tuple] = []
    for x in xs:
        value = _evaluate(float(x), method, tol)
        rows.append(
            (
                float(x),
                value.value,
                kernel_derivative(float(x), 1, tol),
                kernel_derivative(float(x), 2, tol),
                value.method.value,
                value.err_est,
            )
        )

    out_path = out_dir / out_file
    write_csv_atomically(out_path, _CSV_HEADER, rows)

    manifest = RunManifest(
        command="kernel",
        config={
            "from": x_from,
            "to": x_to,
            "step": step,
            "method": method,
            "tol": tol,
            "cross_validate": should_cross_validate,
        },
        seed=seed,
    )
    manifest.add_output(out_dir, out_path)
    manifest.write(out_dir)

    if should_cross_validate:
        worst, worst_x = cross_validate()
        print(f"max |series - split| = {worst:.3e} at x = {worst_x:.6g}")
        if not worst < CROSS_VALIDATION_TOL:
            _logger.error(
                f"Cross-validation failed: {worst:.3e} >= {CROSS_VALIDATION_TOL:.1e}"
            )
            sys.exit(ExitCode.INVARIANT)

    _logger.info(f"Wrote {out_path.as_posix()}")
    sys.exit(ExitCode.OK)
