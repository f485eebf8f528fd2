"""
Gauss-Legendre quadrature over the bands ((2n-1)pi/2, n pi) of the Laplace-type
representation of the Whitham kernel,

    K(x) = (1/pi) sum_n int_{(2n-1)pi/2}^{n pi} exp(-s|x|) sqrt(|tan s|/s) ds.

Each band is split at its midpoint. On the lower half s = (2n-1)pi/2 + u^2
absorbs the inverse square root blow-up of |tan s|, on the upper half
s = n pi - v^2 absorbs the square root zero at s = n pi. Both substituted
integrands are analytic, so a fixed Gauss-Legendre order converges
geometrically and a doubled order serves as the error estimate.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
import numpy.typing as npt

from whitham.errors import DomainError, OutOfRangeError

__all__ = [
    "BASE_ORDER",
    "FINE_ORDER",
    "MAX_BANDS",
    "band_envelope",
    "band_rule",
    "band_start",
    "bands_needed",
    "integrate_bands",
]

BASE_ORDER = 32
FINE_ORDER = 64
MAX_BANDS = 200_000

_HALF_WIDTH = math.sqrt(math.pi) / 2.0  # u, v range over [0, sqrt(pi/4)]

Integrand = Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]


def band_start(n: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Left endpoint a_n = (2n - 1) pi / 2 of band n (n >= 1)."""
    return (2.0 * np.asarray(n, dtype=np.float64) - 1.0) * math.pi / 2.0


@lru_cache(maxsize=64)
def band_rule(
    n_bands: int, order: int
) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Nodes and weights covering bands 1..n_bands.

    The weights already contain 1/pi, the density sqrt(|tan s|/s) and the
    Jacobian of the substitution, so that sum(w * f(s)) approximates
    (1/pi) sum_n int f(s) sqrt(|tan s|/s) ds over the bands.

    Returns:
        (s, w), both flat arrays of length 2 * order * n_bands; read-only
    """
    if n_bands < 1 or order < 2:
        raise DomainError(f"Need n_bands >= 1 and order >= 2, got {n_bands}, {order}")

    x, wx = np.polynomial.legendre.leggauss(order)
    u = _HALF_WIDTH * (x + 1.0) / 2.0
    wu = wx * _HALF_WIDTH / 2.0
    t = u * u

    # u^2 cot(u^2) on the lower half, v^2 tan(v^2) on the upper half
    lower_h = t / np.tan(t)
    upper_h = t * np.tan(t)

    a = band_start(np.arange(1, n_bands + 1))[:, None]
    b = a + math.pi / 2.0

    s_lower = a + t
    s_upper = b - t
    w_lower = 2.0 * np.sqrt(lower_h / s_lower) * wu / math.pi
    w_upper = 2.0 * np.sqrt(upper_h / s_upper) * wu / math.pi

    s = np.concatenate([s_lower, s_upper], axis=1).ravel()
    w = np.concatenate([w_lower, w_upper], axis=1).ravel()
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w


def band_envelope(n: int, distance: float, order: int = 0) -> float:
    """
    Conservative size of the tail starting at band n for decay rate `distance`.

    Band n is bounded by exp(-a_n d) sqrt(pi / a_n) (times a_n^order for
    derivatives); the remaining bands form a geometric series of ratio
    exp(-pi d).
    """
    a = float(band_start(n))
    envelope = math.exp(-a * distance) * math.sqrt(math.pi / a) * a**order
    return envelope / -math.expm1(-math.pi * distance)


def bands_needed(distance: float, tol: float, order: int = 0) -> int:
    """
    Smallest band count whose truncated tail envelope is below tol / 10.

    Raises:
        DomainError: If distance or tol is not positive
        OutOfRangeError: If more than MAX_BANDS bands would be needed
    """
    if not distance > 0.0:
        raise DomainError(f"Band decay distance must be positive, got {distance!r}")
    if not tol > 0.0:
        raise DomainError(f"Tolerance must be positive, got {tol!r}")

    target = tol / 10.0
    # Start near the analytic crossover and walk forward.
    estimate = max(1, int(math.log(1.0 / target) / (math.pi * distance)) // 2)
    n = estimate
    while n > 1 and band_envelope(n, distance, order) < target:
        n = max(1, n // 2)
    while band_envelope(n + 1, distance, order) >= target:
        n += 1
        if n > MAX_BANDS:
            raise OutOfRangeError(
                f"More than {MAX_BANDS} bands needed at distance {distance!r}"
            )
    return n


def integrate_bands(
    integrand: Integrand, n_bands: int
) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Integrate a family of functions against the band density.

    Args:
        integrand: Maps the node array s (shape (M,)) to values of shape
            (n_points, M)
        n_bands: Number of bands to sum

    Returns:
        (values, err_est) of shape (n_points,), from the fine rule and the
        difference between the fine and the base rule
    """
    s_base, w_base = band_rule(n_bands, BASE_ORDER)
    s_fine, w_fine = band_rule(n_bands, FINE_ORDER)
    coarse = integrand(s_base) @ w_base
    fine = integrand(s_fine) @ w_fine
    return fine, np.abs(fine - coarse)
