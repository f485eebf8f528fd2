# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

"""
The steady Whitham operator on a cosine grid,

    F(phi, mu) = mu phi - L phi - phi^2,

with L the Fourier multiplier m(2 pi k / P) on mode k. The quadratic term is
formed on a grid with 2N modes and truncated back to N, which for a quadratic
nonlinearity gives the exact Galerkin coefficients of phi^2.
"""

from __future__ import annotations

import math
from enum import Enum, unique

import numpy as np
import numpy.typing as npt
from scipy import fft, linalg

from whitham.errors import DomainError
from whitham.kernel.periodic_kernel import pkernel_values
from whitham.waves.cosine_grid import CosineGrid, PeriodicWave, cosine_series

__all__ = [
    "Representation",
    "apply_L",
    "apply_L_quadrature",
    "coefficient_jacobian",
    "coefficient_residual",
    "dealiased_square",
    "differentiate",
    "high_mode_taper",
    "jacobian",
    "residual",
]


@unique
class Representation(str, Enum):
    COEFFS = "coeffs"
    VALUES = "values"


def apply_L(
    data: npt.ArrayLike,
    grid: CosineGrid,
    representation: Representation = Representation.COEFFS,
) -> npt.NDArray[np.float64]:
    """
    Apply L to an even function given by coefficients or node values.

    Raises:
        DomainError: If the data does not have N + 1 entries
    """
    array = grid.check_size(data)
    if representation == Representation.COEFFS:
        return grid.multipliers * array
    return grid.to_values(grid.multipliers * grid.to_coeffs(array))


def dealiased_square(
    coeffs: npt.ArrayLike, grid: CosineGrid
) -> npt.NDArray[np.float64]:
    """Cosine coefficients 0..N of phi^2."""
    a = grid.check_size(coeffs)
    fine = grid.refined(2)
    padded = np.zeros(fine.N + 1)
    padded[: grid.N + 1] = a
    square = fine.to_coeffs(fine.to_values(padded) ** 2)
    return square[: grid.N + 1]


def coefficient_residual(wave: PeriodicWave) -> npt.NDArray[np.float64]:
    """Cosine coefficients of F(phi, mu)."""
    a = wave.coeffs
    return wave.mu * a - wave.grid.multipliers * a - dealiased_square(a, wave.grid)


def residual(wave: PeriodicWave) -> npt.NDArray[np.float64]:
    """F(phi, mu) at the collocation nodes."""
    return wave.grid.to_values(coefficient_residual(wave))


def coefficient_jacobian(wave: PeriodicWave) -> npt.NDArray[np.float64]:
    """
    d F / d a in coefficient space: mu I - diag(m) - 2 M(a).

    M(a) b are the truncated coefficients of phi h for h = sum b_l cos. From
    cos(k) cos(l) = (cos(k + l) + cos(k - l)) / 2,

        M[n, l] = a_|n-l| / 2 + a_(n+l) / 2 + a_0 / 2 [n = l]   (n >= 1),
        M[0, l] = a_l / 2 + a_0 / 2 [l = 0],

    with a_(n+l) dropped when n + l > N.
    """
    a = wave.coeffs
    n = a.size
    product = 0.5 * linalg.toeplitz(a)
    product += 0.5 * linalg.hankel(a, np.zeros(n))
    product[np.diag_indices(n)] += 0.5 * a[0]
    product[0, :] = 0.5 * a
    product[0, 0] += 0.5 * a[0]

    jac = -2.0 * product
    jac[np.diag_indices(n)] += wave.mu - wave.grid.multipliers
    return jac


def jacobian(wave: PeriodicWave) -> npt.NDArray[np.float64]:
    """
    Matrix of h -> mu h - L h - 2 phi h acting on node values.

    Conjugates the coefficient Jacobian by the cosine transform T. The inverse
    transform matrix is symmetric, so J T^-1 = (T^-1 J^T)^T.
    """
    grid = wave.grid
    left = grid.to_values(coefficient_jacobian(wave), axis=0)
    return grid.to_coeffs(left.T, axis=0).T


def high_mode_taper(N: int) -> npt.NDArray[np.float64]:
    """
    Weights 1 on modes k <= N/2 falling as a raised cosine to 0 at k = N.

    Partial sums of sum_k (-1)^k k^2 a_k oscillate with amplitude growing
    in N when a_k decays slower than k^(-3); a smooth envelope sums them
    to the limit instead.
    """
    r = np.arange(N + 1) / N
    taper = np.ones(N + 1)
    upper = r > 0.5
    taper[upper] = 0.5 * (1.0 + np.cos(math.pi * (2.0 * r[upper] - 1.0)))
    return taper


def differentiate(
    wave: PeriodicWave, order: int, tapered: bool = False
) -> npt.NDArray[np.float64]:
    """
    Spectral derivative of phi.

    Order 1 returns phi' at the interior nodes x_1..x_(N-1) of (0, P/2)
    (phi' is odd and vanishes at 0 and P/2); order 2 returns phi'' at all
    N + 1 nodes. With tapered set, the coefficients are weighted by
    high_mode_taper first, which keeps the derivative meaningful for
    profiles with a cusp.

    Raises:
        DomainError: If order is not 1 or 2
    """
    grid = wave.grid
    k = grid.wavenumbers
    coeffs = wave.coeffs * high_mode_taper(grid.N) if tapered else wave.coeffs
    if order == 1:
        # DST-I: y_(j-1) = 2 sum_(k=1)^(N-1) b_k sin(pi j k / N)
        b = -0.5 * k[1:-1] * coeffs[1:-1]
        return fft.dst(b, type=1)
    if order == 2:
        return grid.to_values(-(k**2) * coeffs)
    raise DomainError(f"Derivative order must be 1 or 2, got {order!r}")


def apply_L_quadrature(
    coeffs: npt.ArrayLike,
    grid: CosineGrid,
    x: npt.ArrayLike,
    n_nodes: int = 64,
    tol: float = 1e-12,
) -> npt.NDArray[np.float64]:
    """
    L f evaluated through the convolution with K_P instead of the multipliers.

    Uses the unit mass of K_P over a period,

        (L f)(x) = f(x) + int_0^(P/2) K_P(z) (f(x - z) + f(x + z) - 2 f(x)) dz,

    and z = v^2, which makes the integrand smooth, followed by Gauss-Legendre
    in v.

    Raises:
        DomainError: If coeffs has the wrong size or n_nodes < 2
    """
    a = grid.check_size(coeffs)
    if n_nodes < 2:
        raise DomainError(f"Need at least 2 quadrature nodes, got {n_nodes!r}")
    points = np.atleast_1d(np.asarray(x, dtype=np.float64))

    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    upper = math.sqrt(grid.P / 2.0)
    v = upper * (nodes + 1.0) / 2.0
    w = upper / 2.0 * weights
    z = v * v
    density = 2.0 * v * pkernel_values(z, grid.P, tol)

    center = cosine_series(a, grid.P, points)
    left = cosine_series(a, grid.P, np.subtract.outer(points, z))
    right = cosine_series(a, grid.P, np.add.outer(points, z))
    second_difference = left + right - 2.0 * center[:, None]
    return center + second_difference @ (w * density)
