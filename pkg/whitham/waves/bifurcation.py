# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

"""
Closed-form data of the primary pitchfork at mu* = m(xi), xi = 2 pi / P.

With phi = s cos(xi x) + s^2 phi_2 + s^3 phi_3 + s^4 phi_4 + ... and
mu = mu_0 + mu_2 s^2 + mu_4 s^4 + ..., matching powers of s in
mu phi - L phi - phi^2 = 0 and projecting onto modes gives, with
m_k = m(k xi),

    phi_2 = A_0 + A_2 cos(2 xi x)
    A_0   = 1 / (2 (m_1 - m_0)),    A_2 = 1 / (2 (m_1 - m_2))
    mu_2  = 2 A_0 + A_2
    phi_3 = B_3 cos(3 xi x),        B_3 = A_2 / (m_1 - m_3)
    phi_4 = C_0 + C_2 cos(2 xi x) + C_4 cos(4 xi x)
    mu_4  = 2 C_0 + C_2 + A_2 B_3

where the phi_4 coefficients come from the s^4 equation and mu_4 from the
mode-1 part of the s^5 equation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, NamedTuple

import numpy as np
from scipy import optimize

from whitham.errors import DomainError, InternalConsistencyError
from whitham.kernel.symbol import eval_symbol
from whitham.waves.cosine_grid import CosineGrid, PeriodicWave

__all__ = [
    "BifurcationExpansion",
    "CriticalWavenumber",
    "XI0_BRACKET",
    "bifurcation_point",
    "expansion_coeffs",
    "expansion_wave",
    "find_xi0",
]

_logger = logging.getLogger(__name__)

XI0_BRACKET = (0.1, 10.0)


@dataclass(frozen=True)
class BifurcationExpansion:
    """Coefficients of the local bifurcation curve at wavenumber xi.

    Attributes:
        xi: Wavenumber 2 pi / P
        mu0: m(xi)
        mu2: Coefficient of s^2 in mu(s); its sign decides sub/supercritical
        mu4: Coefficient of s^4 in mu(s)
        phi2: Mode -> cosine coefficient of phi_2 (modes 0, 2)
        phi3: Mode -> cosine coefficient of phi_3 (mode 3)
        phi4: Mode -> cosine coefficient of phi_4 (modes 0, 2, 4)
    """

    xi: float
    mu0: float
    mu2: float
    mu4: float
    phi2: Dict[int, float] = field(default_factory=dict)
    phi3: Dict[int, float] = field(default_factory=dict)
    phi4: Dict[int, float] = field(default_factory=dict)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.xi

    def mu(self, s: float) -> float:
        return self.mu0 + self.mu2 * s**2 + self.mu4 * s**4

    def to_dict(self) -> dict:
        return {
            "xi": self.xi,
            "mu0": self.mu0,
            "mu2": self.mu2,
            "mu4": self.mu4,
            "phi2": {str(k): v for k, v in self.phi2.items()},
            "phi3": {str(k): v for k, v in self.phi3.items()},
            "phi4": {str(k): v for k, v in self.phi4.items()},
        }


class CriticalWavenumber(NamedTuple):
    xi0: float
    P0: float
    mu4_at_xi0: float


def bifurcation_point(P: float, k: int = 1) -> float:
    """
    mu*_(P,k) = m(2 pi k / P), where constant solutions lose mode k.

    Raises:
        DomainError: If P <= 0 or k < 1
    """
    if not (math.isfinite(P) and P > 0.0):
        raise DomainError(f"Period must be positive, got {P!r}")
    if k < 1:
        raise DomainError(f"Mode must be >= 1, got {k!r}")
    return eval_symbol(2.0 * math.pi * k / P)


def _mu2(xi: float) -> float:
    m0, m1, m2 = 1.0, eval_symbol(xi), eval_symbol(2.0 * xi)
    return 1.0 / (m1 - m0) + 1.0 / (2.0 * (m1 - m2))


def expansion_coeffs(xi: float) -> BifurcationExpansion:
    """
    Fourth-order expansion of the bifurcation curve at wavenumber xi.

    Raises:
        DomainError: If xi <= 0 or not finite
    """
    if not (math.isfinite(xi) and xi > 0.0):
        raise DomainError(f"Wavenumber must be positive, got {xi!r}")

    m0 = 1.0
    m1, m2, m3, m4 = (eval_symbol(k * xi) for k in (1, 2, 3, 4))

    a0 = 1.0 / (2.0 * (m1 - m0))
    a2 = 1.0 / (2.0 * (m1 - m2))
    mu2 = 2.0 * a0 + a2

    b3 = a2 / (m1 - m3)

    # s^4: (m_1 - m_k) C_k + mu_2 [phi_2]_k = [2 phi_1 phi_3 + phi_2^2]_k
    c0 = (a0**2 + a2**2 / 2.0 - mu2 * a0) / (m1 - m0)
    c2 = (b3 + 2.0 * a0 * a2 - mu2 * a2) / (m1 - m2)
    c4 = (b3 + a2**2 / 2.0) / (m1 - m4)

    # mode 1 of s^5: mu_4 = [2 phi_1 phi_4 + 2 phi_2 phi_3]_1
    mu4 = 2.0 * c0 + c2 + a2 * b3

    return BifurcationExpansion(
        xi=float(xi),
        mu0=m1,
        mu2=mu2,
        mu4=mu4,
        phi2={0: a0, 2: a2},
        phi3={3: b3},
        phi4={0: c0, 2: c2, 4: c4},
    )


def find_xi0() -> CriticalWavenumber:
    """
    The wavenumber where mu_2 changes sign, with P0 = 2 pi / xi0 and mu_4(xi0).

    Raises:
        InternalConsistencyError: If mu_2 does not change sign over the
            bracket, or mu_4(xi0) is not positive
    """
    lo, hi = XI0_BRACKET
    mu2_lo, mu2_hi = _mu2(lo), _mu2(hi)
    if not (mu2_lo < 0.0 < mu2_hi):
        raise InternalConsistencyError(
            f"mu_2 does not change sign on [{lo}, {hi}]: {mu2_lo!r}, {mu2_hi!r}"
        )

    xi0 = optimize.brentq(_mu2, lo, hi, xtol=1e-12)
    mu4 = expansion_coeffs(xi0).mu4
    if not mu4 > 0.0:
        raise InternalConsistencyError(f"mu_4 at xi0 = {xi0!r} is {mu4!r}")

    result = CriticalWavenumber(xi0=float(xi0), P0=2.0 * math.pi / xi0, mu4_at_xi0=mu4)
    _logger.info(
        f"Critical wavenumber xi0 = {result.xi0:.12f}, P0 = {result.P0:.12f}, "
        f"mu4 = {result.mu4_at_xi0:.6e}"
    )
    return result


def expansion_wave(xi: float, s: float, grid: CosineGrid) -> PeriodicWave:
    """
    The truncated expansion as a wave on grid, with [phi]_1 = s exactly.

    Raises:
        DomainError: If the grid period is not 2 pi / xi or the grid cannot hold
            mode 4
    """
    expansion = expansion_coeffs(xi)
    if not math.isclose(grid.P, expansion.period, rel_tol=1e-12):
        raise DomainError(
            f"Grid period {grid.P!r} does not match 2 pi / xi = {expansion.period!r}"
        )
    if grid.N < 4:
        raise DomainError(f"Grid needs N >= 4 for the expansion, got {grid.N}")

    coeffs = np.zeros(grid.N + 1)
    coeffs[1] = s
    for power, modes in ((2, expansion.phi2), (3, expansion.phi3), (4, expansion.phi4)):
        for k, c in modes.items():
            coeffs[k] += c * s**power
    return PeriodicWave.from_coeffs(grid, expansion.mu(s), coeffs)
