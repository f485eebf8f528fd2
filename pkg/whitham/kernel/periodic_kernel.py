# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum, unique
from typing import Tuple

import numpy as np
import numpy.typing as npt
from scipy import fft, integrate

from whitham.errors import DomainError, NumericError, SingularPointError
from whitham.kernel.band_quadrature import (
    band_envelope,
    bands_needed,
    integrate_bands,
)
from whitham.kernel.monotonicity import MonotonicityReport, divided_difference_report
from whitham.kernel.symbol import multipliers
from whitham.kernel.whitham_kernel import (
    DEFAULT_TOL,
    X_MIN,
    kernel_values,
    regular_part,
)

__all__ = [
    "FourierCheckReport",
    "ParityComparisonReport",
    "PeriodicKernelMethod",
    "PeriodicKernelValue",
    "PeriodicMonotonicityReport",
    "parity_comparison_report",
    "pkernel_cosh",
    "pkernel_derivative",
    "pkernel_direct",
    "pkernel_fourier_check",
    "pkernel_monotonicity_report",
    "pkernel_values",
]

_logger = logging.getLogger(__name__)

_CHUNK = 256
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@unique
class PeriodicKernelMethod(str, Enum):
    DIRECT_SUM = "direct_sum"
    COSH_FORMULA = "cosh_formula"
    FOURIER_MODES = "fourier_modes"


@dataclass(frozen=True)
class PeriodicKernelValue:
    """An evaluation of K_P(x) = sum_n K(x + nP).

    Attributes:
        x: Evaluation point as passed in
        P: Period
        value: K_P(x)
        method: Evaluation route
        err_est: Absolute error estimate
    """

    x: float
    P: float
    value: float
    method: PeriodicKernelMethod
    err_est: float


def _check_period(P: float) -> None:
    if not (math.isfinite(P) and P > 0.0):
        raise DomainError(f"Period must be positive and finite, got {P!r}")


def _check_tol(tol: float) -> None:
    if not (math.isfinite(tol) and tol > 0.0):
        raise DomainError(f"Tolerance must be positive, got {tol!r}")


def _reduce(xs: npt.NDArray[np.float64], P: float) -> npt.NDArray[np.float64]:
    """Representative of x modulo P in [-P/2, P/2]."""
    return xs - P * np.round(xs / P)


# --- direct periodization -------------------------------------------------


def _envelope(d: float) -> float:
    # Leading asymptotic term with a (1 + 1/d) margin; dominates K for d >= 2.
    return (1.0 + 1.0 / d) * math.sqrt(2.0) / (math.pi * math.sqrt(d)) * math.exp(
        -math.pi * d / 2.0
    )


def _direct_term_count(P: float, tol: float, order: int) -> Tuple[int, float]:
    """Smallest n such that the terms with |k| > n sum to less than tol / 10."""
    n = 0
    while True:
        d = (n + 0.5) * P
        if d >= 2.0:
            bound = (
                2.0
                * _envelope(d)
                * (math.pi / 2.0 + 1.0 / d) ** order
                / -math.expm1(-math.pi * P / 2.0)
            )
            if bound < tol / 10.0:
                return n, bound
        n += 1


def _direct_values(
    xs: npt.NDArray[np.float64], P: float, tol: float, order: int
) -> Tuple[npt.NDArray[np.float64], float]:
    y = _reduce(xs, P)
    if np.any(y == 0.0):
        raise SingularPointError(f"K_P is singular on {P!r}Z")
    n, tail = _direct_term_count(P, tol, order)
    shifts = P * np.arange(-n, n + 1, dtype=np.float64)
    terms = kernel_values((y[:, None] + shifts[None, :]).ravel(), tol, order)
    terms = terms.reshape(y.size, shifts.size)
    # Add the small far terms first.
    ordering = np.argsort(np.abs(np.arange(-n, n + 1)))[::-1]
    return terms[:, ordering].sum(axis=1), tail


def pkernel_direct(x: float, P: float, tol: float = DEFAULT_TOL) -> PeriodicKernelValue:
    """
    K_P(x) as the truncated sum of K(x + nP) over |n| <= n_terms.

    The truncation is chosen from the exponential envelope of K so that the
    discarded terms are below tol / 10.

    Raises:
        DomainError: If P or tol is not positive
        SingularPointError: If x lies in PZ
    """
    _check_period(P)
    _check_tol(tol)
    values, tail = _direct_values(np.array([x], dtype=np.float64), P, tol, 0)
    return PeriodicKernelValue(
        x=float(x),
        P=float(P),
        value=float(values[0]),
        method=PeriodicKernelMethod.DIRECT_SUM,
        err_est=tail + tol,
    )


# --- cosh formula ---------------------------------------------------------


def _cosh_values(
    xs: npt.NDArray[np.float64], P: float, tol: float, order: int
) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Band quadrature of the periodized Laplace representation.

    With w1 = x mod P and w2 = P - w1, summing exp(-s|x + nP|) over n gives

        cosh(s(w1 - P/2)) / sinh(s P/2) = (exp(-s w1) + exp(-s w2)) / (1 - exp(-s P)),

    and only the right-hand side, which has no positive exponents, is evaluated.
    """
    w1 = np.mod(xs, P)
    w2 = P - w1
    distance = np.minimum(w1, w2)
    if np.any(distance == 0.0):
        raise SingularPointError(f"K_P is singular on {P!r}Z")

    values = np.empty_like(w1)
    errors = np.empty_like(w1)
    order_ = np.argsort(distance)
    for start in range(0, w1.size, _CHUNK):
        idx = order_[start : start + _CHUNK]
        c1, c2 = w1[idx], w2[idx]
        nearest = float(distance[idx].min())
        n_bands = bands_needed(nearest, tol, order)

        def integrand(s: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
            denominator = -np.expm1(-s * P)
            return (
                (-s) ** order * np.exp(-np.outer(c1, s))
                + s**order * np.exp(-np.outer(c2, s))
            ) / denominator

        chunk_values, chunk_err = integrate_bands(integrand, n_bands)
        tail = 2.0 * band_envelope(n_bands + 1, nearest, order)
        values[idx] = chunk_values
        errors[idx] = chunk_err + tail

    if not np.all(np.isfinite(values)):
        raise NumericError(f"Non-finite periodized kernel value for P = {P!r}")
    return values, errors


def pkernel_cosh(x: float, P: float, tol: float = DEFAULT_TOL) -> PeriodicKernelValue:
    """
    K_P(x) from the closed-form periodization of the band series.

    Raises:
        DomainError: If P or tol is not positive
        SingularPointError: If x lies in PZ
        NumericError: If the quadrature produces a non-finite value
    """
    _check_period(P)
    _check_tol(tol)
    values, errors = _cosh_values(np.array([x], dtype=np.float64), P, tol, 0)
    return PeriodicKernelValue(
        x=float(x),
        P=float(P),
        value=float(values[0]),
        method=PeriodicKernelMethod.COSH_FORMULA,
        err_est=float(errors[0]),
    )


def pkernel_values(
    xs: npt.ArrayLike,
    P: float,
    tol: float = DEFAULT_TOL,
    method: PeriodicKernelMethod = PeriodicKernelMethod.DIRECT_SUM,
    order: int = 0,
) -> npt.NDArray[np.float64]:
    """
    Vectorized K_P^(order) for order 0, 1 or 2.

    Raises:
        DomainError: If P, tol, order or method is invalid
        SingularPointError: If any point lies in PZ
    """
    _check_period(P)
    _check_tol(tol)
    if order not in (0, 1, 2):
        raise DomainError(f"Derivative order must be 0, 1 or 2, got {order!r}")
    points = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    if not np.all(np.isfinite(points)):
        raise DomainError("Periodic kernel arguments must be finite")

    if method == PeriodicKernelMethod.DIRECT_SUM:
        return _direct_values(points, P, tol, order)[0]
    if method == PeriodicKernelMethod.COSH_FORMULA:
        return _cosh_values(points, P, tol, order)[0]
    raise DomainError(f"Pointwise evaluation is not available for {method.value}")


def pkernel_derivative(
    x: float, P: float, order: int, tol: float = DEFAULT_TOL
) -> float:
    """
    K_P'(x) or K_P''(x) by termwise differentiation of the periodization.

    Raises:
        DomainError: If order is not 1 or 2
        SingularPointError: If x lies in PZ
    """
    if order not in (1, 2):
        raise DomainError(f"Derivative order must be 1 or 2, got {order!r}")
    return float(pkernel_values([x], P, tol, order=order)[0])


# --- Fourier content ------------------------------------------------------


@dataclass(frozen=True)
class FourierCheckReport:
    """Low Fourier modes of K_P against m(2 pi k / P) / P.

    Both sides have the coefficients of the periodized 1/sqrt(2 pi |x|)
    removed.

    Attributes:
        P: Period
        n_grid: Number of samples per period
        computed: DFT coefficients of the singularity-subtracted samples
        expected: m(2 pi k / P) / P minus the singular coefficients
        singular: Coefficients of the periodized singular part
        deviations: |computed - expected| per mode
    """

    P: float
    n_grid: int
    computed: Tuple[float, ...]
    expected: Tuple[float, ...]
    singular: Tuple[float, ...]
    deviations: Tuple[float, ...]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)

    @property
    def mean_mode(self) -> float:
        """Reassembled mode 0, which equals 1/P when the kernel has unit mass."""
        return self.computed[0] + self.singular[0]


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _singular_coefficients(P: float, n_modes: int) -> npt.NDArray[np.float64]:
    """
    (1/P) int_{-P/2}^{P/2} (2 pi |x|)^(-1/2) cos(2 pi k x / P) dx for k = 0..n_modes.

    With x = v^2 the integrand becomes the smooth 2 cos(2 pi k v^2 / P) / sqrt(2 pi).
    """
    upper = math.sqrt(P / 2.0)
    coefficients = np.empty(n_modes + 1)
    for k in range(n_modes + 1):
        omega = 2.0 * math.pi * k / P
        value, _ = integrate.quad(
            lambda v: math.cos(omega * v * v),
            0.0,
            upper,
            epsabs=1e-15,
            epsrel=1e-14,
            limit=400,
        )
        coefficients[k] = 2.0 / P * 2.0 / _SQRT_2PI * value
    return coefficients


def _subtracted_samples(
    distance: npt.NDArray[np.float64], P: float, tol: float
) -> npt.NDArray[np.float64]:
    """K_P - 1/sqrt(2 pi d) at distance d in (0, P/2] from PZ."""
    samples = np.empty_like(distance)

    far = distance >= X_MIN
    if np.any(far):
        samples[far] = _cosh_values(distance[far], P, tol, 0)[0] - 1.0 / np.sqrt(
            2.0 * math.pi * distance[far]
        )

    near = np.flatnonzero(~far)
    if near.size:
        # K_reg(d) + sum_{n != 0} K(d + nP); the singular part cancels exactly.
        n, _ = _direct_term_count(P, tol, 0)
        shifts = P * np.concatenate([np.arange(-n, 0), np.arange(1, n + 1)])
        images = kernel_values(
            (distance[near, None] + shifts[None, :]).ravel(), tol
        ).reshape(near.size, shifts.size)
        for row, i in enumerate(near):
            samples[i] = regular_part(float(distance[i]), tol)[0] + images[row].sum()
    return samples


def pkernel_fourier_check(
    P: float, N_grid: int = 2**14, n_modes: int = 10, tol: float = DEFAULT_TOL
) -> FourierCheckReport:
    """
    Compare the DFT of singularity-subtracted samples of K_P with the multipliers.

    The samples sit on the half-shifted grid x_j = (j + 1/2) P / N_grid, so no
    node falls on the singularity, and the shift is undone in the phase of the
    DFT coefficients.

    Raises:
        DomainError: If P is not positive, N_grid is not a power of two >= 2^12,
            or n_modes is not in 0..16
    """
    _check_period(P)
    _check_tol(tol)
    if not _is_power_of_two(N_grid) or N_grid < 2**12:
        raise DomainError(f"N_grid must be a power of two >= 4096, got {N_grid!r}")
    if not 0 <= n_modes <= 16:
        raise DomainError(f"n_modes must be in 0..16, got {n_modes!r}")

    half = N_grid // 2
    x = (np.arange(half) + 0.5) * P / N_grid
    samples_half = _subtracted_samples(x, P, tol)
    # g(P - x) = g(x)
    samples = np.concatenate([samples_half, samples_half[::-1]])

    k = np.arange(n_modes + 1)
    phase = np.exp(-1j * math.pi * k / N_grid)
    computed = (phase * fft.rfft(samples)[: n_modes + 1]).real / N_grid

    singular = _singular_coefficients(P, n_modes)
    expected = multipliers(P, max(n_modes, 1))[: n_modes + 1] / P - singular
    deviations = np.abs(computed - expected)

    report = FourierCheckReport(
        P=float(P),
        n_grid=N_grid,
        computed=tuple(float(c) for c in computed),
        expected=tuple(float(c) for c in expected),
        singular=tuple(float(c) for c in singular),
        deviations=tuple(float(d) for d in deviations),
    )
    _logger.info(
        f"Fourier check P = {P!r}, N_grid = {N_grid}: max deviation "
        f"{report.max_deviation:.3e} over modes 0..{n_modes}"
    )
    return report


# --- qualitative properties -----------------------------------------------


@dataclass(frozen=True)
class PeriodicMonotonicityReport:
    """
    Attributes:
        P: Period
        half_period: Orders 0..3 on a grid in (0, P/2)
        convexity: Order 2 on a grid in (0, P)
    """

    P: float
    half_period: MonotonicityReport
    convexity: MonotonicityReport

    @property
    def ok(self) -> bool:
        return self.half_period.ok and self.convexity.ok

    def to_dict(self) -> dict:
        return {
            "P": self.P,
            "ok": self.ok,
            "half_period": self.half_period.to_dict(),
            "convexity": self.convexity.to_dict(),
        }


def pkernel_monotonicity_report(
    P: float, n_points: int = 64, tol: float = 1e-13
) -> PeriodicMonotonicityReport:
    """
    Divided-difference signs of K_P on uniform interior grids.

    Raises:
        DomainError: If P is not positive or n_points < 4
    """
    _check_period(P)
    if n_points < 4:
        raise DomainError(f"Need at least 4 grid points, got {n_points!r}")

    half_grid = (P / 2.0) * np.arange(1, n_points + 1) / (n_points + 1)
    half_values = _cosh_values(half_grid, P, tol, 0)[0]
    half_period = divided_difference_report(half_grid, half_values, range(4))

    full_grid = P * np.arange(1, 2 * n_points + 1) / (2 * n_points + 1)
    full_values = _cosh_values(full_grid, P, tol, 0)[0]
    convexity = divided_difference_report(full_grid, full_values, [2])

    report = PeriodicMonotonicityReport(
        P=float(P), half_period=half_period, convexity=convexity
    )
    _logger.info(f"K_P monotonicity for P = {P!r}: {'ok' if report.ok else 'FAILED'}")
    return report


@dataclass(frozen=True)
class ParityComparisonReport:
    """K_P(x - y) - K_P(x + y) on an interior grid of (-P/2, 0)^2, x != y.

    Attributes:
        P: Period
        n: Grid points per axis
        min_difference: Smallest sampled difference
        argmin: (x, y) where it occurs
    """

    P: float
    n: int
    min_difference: float
    argmin: Tuple[float, float]

    @property
    def ok(self) -> bool:
        return self.min_difference > 0.0


def parity_comparison_report(
    P: float, n: int = 24, tol: float = DEFAULT_TOL
) -> ParityComparisonReport:
    """
    Spot-check the kernel comparison K_P(x - y) > K_P(x + y) for x, y in (-P/2, 0).

    Raises:
        DomainError: If P is not positive or n < 2
    """
    _check_period(P)
    if n < 2:
        raise DomainError(f"Need at least 2 points per axis, got {n!r}")

    axis = -P / 2.0 + (np.arange(n) + 0.5) * (P / 2.0) / n
    x, y = np.meshgrid(axis, axis, indexing="ij")
    off_diagonal = ~np.eye(n, dtype=bool)
    xs, ys = x[off_diagonal], y[off_diagonal]

    difference = (
        _cosh_values(xs - ys, P, tol, 0)[0] - _cosh_values(xs + ys, P, tol, 0)[0]
    )
    i = int(np.argmin(difference))
    return ParityComparisonReport(
        P=float(P),
        n=n,
        min_difference=float(difference[i]),
        argmin=(float(xs[i]), float(ys[i])),
    )
