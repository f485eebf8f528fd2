# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np
import numpy.typing as npt
from scipy import stats

from whitham.errors import DomainError, ResolutionError
from whitham.kernel.periodic_kernel import pkernel_derivative
from whitham.waves.cosine_grid import PeriodicWave

__all__ = [
    "CONJECTURED_CUSP_CONSTANT",
    "NEAR_HIGHEST_GAP",
    "CuspFit",
    "LowerBoundEntry",
    "LowerBoundReport",
    "default_window",
    "fit_cusp",
    "lower_bound_check",
]

_logger = logging.getLogger(__name__)

# Conjectured crest law mu/2 - phi(x) ~ sqrt(pi/8) |x|^(1/2) of the highest wave.
CONJECTURED_CUSP_CONSTANT = math.sqrt(math.pi / 8.0)
NEAR_HIGHEST_GAP = 0.05
MIN_FIT_POINTS = 8
_SPECTRAL_SAMPLES = 64


@dataclass(frozen=True)
class CuspFit:
    """Power-law fits of the crest of a wave.

    Attributes:
        alpha_pointwise: Slope of log(phi(0) - phi(x)) against log x
        C_pointwise: exp(intercept) of the same fit
        alpha_spectral: Slope of log|a_k| against log k
        fit_window: (x_lo, x_hi) of the pointwise fit
        spectral_window: (k_lo, k_hi) of the spectral fit
        r2_pointwise, r2_spectral: Coefficients of determination
        fit_residual: Largest |log residual| of the pointwise fit
        n_points: Samples in the pointwise window
        gap: mu/2 - max phi of the wave
        near_highest: gap <= NEAR_HIGHEST_GAP
    """

    alpha_pointwise: float
    C_pointwise: float
    alpha_spectral: float
    fit_window: Tuple[float, float]
    spectral_window: Tuple[int, int]
    r2_pointwise: float
    r2_spectral: float
    fit_residual: float
    n_points: int
    gap: float
    near_highest: bool

    @property
    def conjecture_deviation(self) -> float:
        return abs(self.C_pointwise - CONJECTURED_CUSP_CONSTANT)

    CSV_HEADER = (
        "window_lo",
        "window_hi",
        "alpha_pointwise",
        "C_pointwise",
        "alpha_spectral",
        "r2_pointwise",
        "r2_spectral",
    )

    def csv_row(self) -> Tuple[float, ...]:
        return (
            self.fit_window[0],
            self.fit_window[1],
            self.alpha_pointwise,
            self.C_pointwise,
            self.alpha_spectral,
            self.r2_pointwise,
            self.r2_spectral,
        )


def default_window(wave: PeriodicWave) -> Tuple[float, float]:
    """(8 h, P/16) with h = P/(2N) the node spacing."""
    return 8.0 * wave.grid.spacing, wave.P / 16.0


def _spectral_fit(wave: PeriodicWave) -> Tuple[float, float, Tuple[int, int]]:
    """
    Slope of log|a_k| on log-spaced k in [8, N/8].

    Adjacent pairs are averaged, |a_k| + |a_(k+1)|, which cancels an
    alternating (-1)^k contribution from a kink at the trough.
    """
    k_lo, k_hi = 8, wave.N // 8
    if k_hi <= k_lo:
        _logger.warning(f"No spectral window at N = {wave.N}")
        return math.nan, math.nan, (k_lo, k_hi)

    k = np.unique(np.rint(np.geomspace(k_lo, k_hi, _SPECTRAL_SAMPLES)).astype(int))
    magnitude = 0.5 * (np.abs(wave.coeffs[k]) + np.abs(wave.coeffs[k + 1]))
    keep = magnitude > 0.0
    if np.count_nonzero(keep) < 3:
        _logger.warning("Too few nonzero modes for a spectral fit")
        return math.nan, math.nan, (k_lo, k_hi)

    fit = stats.linregress(np.log(k[keep] + 0.5), np.log(magnitude[keep]))
    return float(fit.slope), float(fit.rvalue**2), (k_lo, k_hi)


def fit_cusp(
    wave: PeriodicWave, window: Optional[Tuple[float, float]] = None
) -> CuspFit:
    """
    Fit phi(0) - phi(x) ~ C x^alpha near the crest and |a_k| ~ k^alpha_spectral.

    A |x|^(1/2) cusp gives alpha_pointwise = 1/2 and alpha_spectral = -3/2; a
    smooth crest gives alpha_pointwise = 2.

    Raises:
        DomainError: If the window is not inside (0, P/4]
        ResolutionError: If the window holds fewer than 8 nodes, or the crest
            is not a strict maximum over it
    """
    x_lo, x_hi = default_window(wave) if window is None else window
    if not (0.0 < x_lo < x_hi <= wave.P / 4.0):
        raise DomainError(
            f"Fit window must satisfy 0 < x_lo < x_hi <= P/4, got ({x_lo}, {x_hi})"
        )

    nodes = wave.grid.nodes
    inside = (nodes >= x_lo) & (nodes <= x_hi)
    n_points = int(np.count_nonzero(inside))
    if n_points < MIN_FIT_POINTS:
        raise ResolutionError(
            f"Window ({x_lo}, {x_hi}) holds {n_points} nodes at N = {wave.N}, "
            f"need {MIN_FIT_POINTS}"
        )

    drop = wave.values[0] - wave.values[inside]
    if not np.all(drop > 0.0):
        raise ResolutionError("phi(0) is not a strict maximum over the fit window")

    log_x, log_drop = np.log(nodes[inside]), np.log(drop)
    fit = stats.linregress(log_x, log_drop)
    fit_residual = float(np.max(np.abs(log_drop - (fit.intercept + fit.slope * log_x))))

    alpha_spectral, r2_spectral, spectral_window = _spectral_fit(wave)

    gap = wave.mu / 2.0 - float(wave.values.max())
    result = CuspFit(
        alpha_pointwise=float(fit.slope),
        C_pointwise=float(math.exp(fit.intercept)),
        alpha_spectral=alpha_spectral,
        fit_window=(float(x_lo), float(x_hi)),
        spectral_window=spectral_window,
        r2_pointwise=float(fit.rvalue**2),
        r2_spectral=r2_spectral,
        fit_residual=fit_residual,
        n_points=n_points,
        gap=gap,
        near_highest=gap <= NEAR_HIGHEST_GAP,
    )

    if not result.near_highest:
        _logger.warning(
            f"Wave is not near the highest wave (gap {gap:.3e} > {NEAR_HIGHEST_GAP})"
        )
    _logger.info(
        f"Cusp fit on ({x_lo:.3e}, {x_hi:.3e}): alpha = {result.alpha_pointwise:.4f}, "
        f"C = {result.C_pointwise:.5f} (|C - sqrt(pi/8)| = "
        f"{result.conjecture_deviation:.2e}), alpha_spectral = {alpha_spectral:.4f}"
    )
    return result


@dataclass(frozen=True)
class LowerBoundEntry:
    """
    Attributes:
        x0: Anchor point in (-P/2, 0)
        bound: (1/4) x0^2 |K_P'(2 x0)|
        min_gap: min of mu/2 - phi(x) over nodes with x <= x0
        slack: min_gap - bound
    """

    x0: float
    bound: float
    min_gap: float
    slack: float

    @property
    def ok(self) -> bool:
        return self.slack > 0.0


@dataclass(frozen=True)
class LowerBoundReport:
    entries: Tuple[LowerBoundEntry, ...]

    @property
    def ok(self) -> bool:
        return all(entry.ok for entry in self.entries)

    @property
    def min_slack(self) -> float:
        return min(entry.slack for entry in self.entries)


def lower_bound_check(
    wave: PeriodicWave, x0_list: Iterable[float], tol: float = 1e-12
) -> LowerBoundReport:
    """
    Check mu/2 - phi(x) >= (1/4) x0^2 |K_P'(2 x0)| for all x <= x0, per x0.

    By evenness the nodes x <= x0 on (-P/2, 0) are the nodes |x| >= |x0|.

    Raises:
        DomainError: If an x0 is not in (-P/2, 0) or the list is empty
    """
    entries: List[LowerBoundEntry] = []
    half_gap = wave.mu / 2.0 - wave.values
    for x0 in x0_list:
        if not -wave.P / 2.0 < x0 < 0.0:
            raise DomainError(f"x0 must lie in (-P/2, 0), got {x0!r}")
        bound = 0.25 * x0**2 * abs(pkernel_derivative(2.0 * x0, wave.P, 1, tol))
        min_gap = float(half_gap[wave.grid.nodes >= -x0].min())
        entries.append(
            LowerBoundEntry(
                x0=float(x0), bound=bound, min_gap=min_gap, slack=min_gap - bound
            )
        )
    if not entries:
        raise DomainError("x0_list must not be empty")

    report = LowerBoundReport(entries=tuple(entries))
    _logger.info(f"Crest lower bound: min slack {report.min_slack:.6e}")
    return report
