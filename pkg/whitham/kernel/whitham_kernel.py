# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum, unique
from typing import Callable, Tuple

import numpy as np
import numpy.typing as npt
from scipy import integrate, special

from whitham.errors import DomainError, OutOfRangeError, SingularPointError
from whitham.kernel.band_quadrature import (
    band_envelope,
    bands_needed,
    integrate_bands,
)
from whitham.kernel.monotonicity import MonotonicityReport, divided_difference_report

__all__ = [
    "ASYMPTOTIC_MIN",
    "DEFAULT_TOL",
    "X_MIN",
    "KernelMethod",
    "KernelValue",
    "SingularSplit",
    "asymptotic_tail_mass",
    "check_complete_monotone",
    "kernel_asymptotic",
    "kernel_derivative",
    "kernel_mass",
    "kernel_series",
    "kernel_split",
    "kernel_value",
    "kernel_values",
    "regular_part",
]

_logger = logging.getLogger(__name__)

# Crossover between the band series (needs O(1/x) bands) and the singular split.
X_MIN = 0.05
ASYMPTOTIC_MIN = 5.0
DEFAULT_TOL = 1e-12

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_CHUNK = 256
_QUAD_LIMIT = 400


@unique
class KernelMethod(str, Enum):
    """How a kernel value was computed."""

    SERIES = "series"
    SPLIT = "split"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class KernelValue:
    """An evaluation of K (or one of its derivatives) at a point.

    Attributes:
        x: Evaluation point
        value: Kernel value
        method: Evaluation route
        err_est: Absolute error estimate (quadrature order difference plus
            truncation envelope; not a rigorous bound)
    """

    x: float
    value: float
    method: KernelMethod
    err_est: float


@dataclass(frozen=True)
class SingularSplit:
    """K(x) = 1/sqrt(2 pi |x|) + K_reg(x).

    Attributes:
        x: Evaluation point
        singular_part: Closed-form 1/sqrt(2 pi |x|)
        regular_part: K_reg(x), real analytic
        err_est: Absolute error estimate of regular_part
    """

    x: float
    singular_part: float
    regular_part: float
    err_est: float

    @property
    def value(self) -> float:
        return self.singular_part + self.regular_part


def _check_tol(tol: float) -> None:
    if not (math.isfinite(tol) and tol > 0.0):
        raise DomainError(f"Tolerance must be positive, got {tol!r}")


def _check_finite(x: float) -> None:
    if not math.isfinite(x):
        raise DomainError(f"Kernel argument must be finite, got {x!r}")


# --- series route ---------------------------------------------------------


def _series_values(
    xs: npt.NDArray[np.float64], tol: float, order: int = 0
) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Band series for K^(order) at points with |x| >= X_MIN (vectorized)."""
    ax = np.abs(xs)
    values = np.empty_like(ax)
    errors = np.empty_like(ax)

    order_ = np.argsort(ax)
    for start in range(0, ax.size, _CHUNK):
        idx = order_[start : start + _CHUNK]
        chunk = ax[idx]
        n_bands = bands_needed(float(chunk.min()), tol, order)

        def integrand(s: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
            return np.exp(-np.outer(chunk, s)) * (-s) ** order

        chunk_values, chunk_err = integrate_bands(integrand, n_bands)
        tail = band_envelope(n_bands + 1, float(chunk.min()), order)
        values[idx] = chunk_values
        errors[idx] = chunk_err + tail

    # d/dx exp(-s|x|) = -s sign(x) exp(-s|x|)
    return values * np.sign(xs) ** order, errors


def kernel_series(x: float, tol: float = DEFAULT_TOL) -> KernelValue:
    """
    Evaluate K(x) by the band series of its completely monotone representation.

    Raises:
        DomainError: If tol <= 0 or x is not finite
        OutOfRangeError: If |x| < X_MIN; use kernel_split there
    """
    _check_tol(tol)
    _check_finite(x)
    if abs(x) < X_MIN:
        raise OutOfRangeError(
            f"kernel_series needs |x| >= {X_MIN}, got {x!r}; use kernel_split"
        )
    values, errors = _series_values(np.array([x], dtype=np.float64), tol)
    return KernelValue(
        x=float(x),
        value=float(values[0]),
        method=KernelMethod.SERIES,
        err_est=float(errors[0]),
    )


# --- singular split route -------------------------------------------------


def _regular_difference(xi: npt.NDArray[np.float64] | float) -> npt.NDArray[np.float64]:
    """m(xi) - xi^(-1/2), written without cancellation for large xi."""
    xi = np.asarray(xi, dtype=np.float64)
    denominator = np.sqrt(xi) * (1.0 + np.sqrt(np.tanh(xi)))
    return -2.0 * special.expit(-2.0 * xi) / denominator


def _trig_factor(order: int, x: float) -> Callable[[float], float]:
    # d^order/dx^order cos(x xi), as a function of xi
    if order == 0:
        return lambda xi: math.cos(x * xi)
    if order == 1:
        return lambda xi: -xi * math.sin(x * xi)
    return lambda xi: -xi * xi * math.cos(x * xi)


def _regular_cutoff(tol: float, order: int) -> float:
    # |m(xi) - xi^(-1/2)| <= xi^(-1/2) exp(-2 xi)
    cutoff = 1.0
    target = tol * math.pi / 10.0
    while cutoff ** (order - 0.5) * math.exp(-2.0 * cutoff) / 2.0 > target:
        cutoff += 0.5
    return cutoff


def regular_part(
    x: float, tol: float = DEFAULT_TOL, order: int = 0
) -> Tuple[float, float]:
    """
    K_reg^(order)(x) =
        (1/pi) int_0^inf (m(xi) - xi^(-1/2)) d^order/dx^order cos(x xi) dxi.

    The panel [0, 1] is integrated in v with xi = v^2, which turns the
    xi^(-1/2) singularity into the smooth 2 (sqrt(tanh v^2) - 1); beyond 1 the
    integrand decays like exp(-2 xi)/sqrt(xi) and the cosine/sine is handled
    by the oscillatory-weight QUADPACK routine.

    Returns:
        (value, err_est)
    """
    _check_tol(tol)
    trig = _trig_factor(order, x)

    def low(v: float) -> float:
        xi = v * v
        smooth = -4.0 * special.expit(-2.0 * xi) / (1.0 + math.sqrt(math.tanh(xi)))
        return smooth * trig(xi)

    low_value, low_err = integrate.quad(
        low, 0.0, 1.0, epsabs=tol / 10.0, epsrel=1e-14, limit=_QUAD_LIMIT
    )

    cutoff = _regular_cutoff(tol, order)
    power = {0: 0.0, 1: 1.0, 2: 2.0}[order]
    sign = 1.0 if order == 0 else -1.0

    def high(xi: float) -> float:
        return sign * xi**power * float(_regular_difference(xi))

    if x == 0.0:
        high_value, high_err = integrate.quad(
            lambda xi: high(xi) * (1.0 if order != 1 else 0.0),
            1.0,
            cutoff,
            epsabs=tol / 10.0,
            epsrel=1e-14,
            limit=_QUAD_LIMIT,
        )
    else:
        high_value, high_err = integrate.quad(
            high,
            1.0,
            cutoff,
            weight="sin" if order == 1 else "cos",
            wvar=x,
            epsabs=tol / 10.0,
            epsrel=1e-14,
            limit=_QUAD_LIMIT,
        )

    tail = cutoff ** (power - 0.5) * math.exp(-2.0 * cutoff) / 2.0
    return (low_value + high_value) / math.pi, (low_err + high_err + tail) / math.pi


def _singular_part(x: float, order: int = 0) -> float:
    ax = abs(x)
    if order == 0:
        return 1.0 / math.sqrt(2.0 * math.pi * ax)
    if order == 1:
        return -math.copysign(0.5, x) / (_SQRT_2PI * ax**1.5)
    return 0.75 / (_SQRT_2PI * ax**2.5)


def kernel_split(x: float, tol: float = DEFAULT_TOL) -> SingularSplit:
    """
    Split K(x) into its closed-form singular part and analytic remainder.

    Raises:
        DomainError: If tol <= 0 or x is not finite
        SingularPointError: If x == 0
    """
    _check_tol(tol)
    _check_finite(x)
    if x == 0.0:
        raise SingularPointError("K is singular at x = 0")
    regular, err = regular_part(x, tol)
    return SingularSplit(
        x=float(x),
        singular_part=_singular_part(x),
        regular_part=regular,
        err_est=err,
    )


# --- asymptotics ----------------------------------------------------------


def _asymptotic_leading(ax: float) -> float:
    return math.sqrt(2.0) / (math.pi * math.sqrt(ax)) * math.exp(-math.pi * ax / 2.0)


def kernel_asymptotic(x: float) -> KernelValue:
    """
    Leading large-|x| term sqrt(2)/(pi sqrt|x|) exp(-pi|x|/2).

    The error estimate value/|x| reflects the O(|x|^(-3/2) exp(-pi|x|/2))
    remainder, whose constant is not known in closed form.

    Raises:
        OutOfRangeError: If |x| < 5
    """
    _check_finite(x)
    ax = abs(x)
    if ax < ASYMPTOTIC_MIN:
        raise OutOfRangeError(
            f"kernel_asymptotic needs |x| >= {ASYMPTOTIC_MIN}, got {x!r}"
        )
    value = _asymptotic_leading(ax)
    return KernelValue(
        x=float(x), value=value, method=KernelMethod.ASYMPTOTIC, err_est=value / ax
    )


def asymptotic_tail_mass(X: float) -> float:
    """int_X^inf of the asymptotic envelope, (2/pi) erfc(sqrt(pi X / 2))."""
    return 2.0 / math.pi * float(special.erfc(math.sqrt(math.pi * X / 2.0)))


# --- dispatch -------------------------------------------------------------


def kernel_derivative(x: float, order: int, tol: float = DEFAULT_TOL) -> float:
    """
    K'(x) (order 1) or K''(x) (order 2).

    The series route differentiates under the integral (extra factor
    (-s)^order); below X_MIN the closed-form singular derivative is added to
    the differentiated regular quadrature.

    Raises:
        DomainError: If order is not 1 or 2, or tol <= 0
        SingularPointError: If x == 0
    """
    if order not in (1, 2):
        raise DomainError(f"Derivative order must be 1 or 2, got {order!r}")
    _check_tol(tol)
    _check_finite(x)
    if x == 0.0:
        raise SingularPointError("K' and K'' are singular at x = 0")

    if abs(x) >= X_MIN:
        values, _ = _series_values(np.array([x], dtype=np.float64), tol, order)
        return float(values[0])

    regular, _ = regular_part(x, tol, order)
    return _singular_part(x, order) + regular


def kernel_value(x: float, tol: float = DEFAULT_TOL) -> KernelValue:
    """K(x) through the series for |x| >= X_MIN and the singular split below."""
    _check_finite(x)
    if abs(x) >= X_MIN:
        return kernel_series(x, tol)
    split = kernel_split(x, tol)
    return KernelValue(
        x=float(x), value=split.value, method=KernelMethod.SPLIT, err_est=split.err_est
    )


def kernel_values(
    xs: npt.ArrayLike, tol: float = DEFAULT_TOL, order: int = 0
) -> npt.NDArray[np.float64]:
    """
    Vectorized K^(order) for order 0, 1 or 2, dispatching per point.

    Raises:
        DomainError: If order is invalid or any point is not finite
        SingularPointError: If any point equals 0
    """
    if order not in (0, 1, 2):
        raise DomainError(f"Derivative order must be 0, 1 or 2, got {order!r}")
    _check_tol(tol)
    points = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    if not np.all(np.isfinite(points)):
        raise DomainError("Kernel arguments must be finite")
    if np.any(points == 0.0):
        raise SingularPointError("K is singular at x = 0")

    result = np.empty_like(points)
    far = np.abs(points) >= X_MIN
    if np.any(far):
        result[far], _ = _series_values(points[far], tol, order)
    for i in np.flatnonzero(~far):
        x = float(points[i])
        regular, _ = regular_part(x, tol, order)
        result[i] = _singular_part(x, order) + regular
    return result


# --- global properties ----------------------------------------------------


def check_complete_monotone(
    grid: npt.ArrayLike, max_order: int, tol: float = 1e-14
) -> MonotonicityReport:
    """
    Divided differences of K on a grid in (0, inf) up to max_order.

    The n-th divided difference of a completely monotone function has sign
    (-1)^n on every window of n + 1 consecutive points.

    Raises:
        DomainError: If the grid is not strictly increasing in (0, inf), is
            too short, or max_order is not in 0..4
    """
    points = np.asarray(grid, dtype=np.float64)
    if not 0 <= max_order <= 4:
        raise DomainError(f"max_order must be in 0..4, got {max_order!r}")
    if points.ndim != 1 or points.size < max_order + 1:
        raise DomainError(
            f"Grid needs at least {max_order + 1} points, got {points.size}"
        )
    if points[0] <= 0.0 or np.any(np.diff(points) <= 0.0):
        raise DomainError("Grid must be strictly increasing in (0, inf)")

    values = kernel_values(points, tol)
    report = divided_difference_report(points, values, range(max_order + 1))
    _logger.info(
        f"Complete monotonicity of K on [{points[0]}, {points[-1]}]: "
        f"{'ok' if report.ok else 'FAILED'}"
    )
    return report


def kernel_mass(tol: float = 1e-8, n_panels: int = 64, X: float = 40.0) -> float:
    """
    int_R K(x) dx, which equals m(0) = 1.

    Pieces: the closed-form integral of the singular part plus Gauss-Legendre
    of K_reg on [0, X_MIN]; geometric Gauss-Legendre panels of the series on
    [X_MIN, X]; the asymptotic envelope integrated in closed form beyond X.

    Raises:
        DomainError: If tol <= 0 or n_panels < 1
    """
    _check_tol(tol)
    if n_panels < 1:
        raise DomainError(f"Need at least one panel, got {n_panels!r}")
    eval_tol = tol * 1e-3

    nodes, weights = np.polynomial.legendre.leggauss(24)

    # [0, X_MIN]: 2 sqrt(x)/sqrt(2 pi) in closed form plus the analytic part
    near_nodes = X_MIN * (nodes + 1.0) / 2.0
    near_regular = np.array([regular_part(float(x), eval_tol)[0] for x in near_nodes])
    near = 2.0 * math.sqrt(X_MIN) / _SQRT_2PI + X_MIN / 2.0 * float(
        weights @ near_regular
    )

    edges = np.geomspace(X_MIN, X, n_panels + 1)
    left, right = edges[:-1, None], edges[1:, None]
    panel_nodes = (left + right) / 2.0 + (right - left) / 2.0 * nodes[None, :]
    panel_weights = (right - left) / 2.0 * weights[None, :]
    core_values, _ = _series_values(panel_nodes.ravel(), eval_tol)
    core = float(panel_weights.ravel() @ core_values)

    tail = asymptotic_tail_mass(X)
    total = 2.0 * (near + core + tail)
    _logger.info(
        f"Kernel mass {total!r} (near {near:.3e}, core {core:.3e}, tail {tail:.3e})"
    )
    return total
