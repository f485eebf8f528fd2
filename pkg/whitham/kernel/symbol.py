# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from whitham.errors import DomainError

__all__ = [
    "SMALL_XI_THRESHOLD",
    "SymbolValue",
    "eval_g",
    "eval_symbol",
    "multipliers",
]

# Below this |xi| the square root is taken of the even Maclaurin series of
# tanh(xi)/xi instead of the quotient itself.
SMALL_XI_THRESHOLD = 1e-4


@dataclass(frozen=True)
class SymbolValue:
    """A value of the dispersion symbol m(xi) = sqrt(tanh(xi)/xi).

    Attributes:
        xi: Wavenumber
        value: m(xi), in (0, 1]
    """

    xi: float
    value: float

    @classmethod
    def at(cls, xi: float) -> SymbolValue:
        return cls(xi=float(xi), value=float(eval_symbol(xi)))


def _small_xi_branch(xi: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    xi2 = xi * xi
    return np.sqrt(1.0 - xi2 / 3.0 + 2.0 * xi2 * xi2 / 15.0)


def _direct_branch(xi: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.sqrt(np.tanh(xi) / xi)


def eval_symbol(xi: npt.ArrayLike) -> Any:
    """
    Evaluate the Whitham dispersion symbol m(xi) = sqrt(tanh(xi)/xi).

    Accepts a scalar or an array; scalars come back as floats.

    Raises:
        DomainError: If any input is not finite
    """
    values = np.abs(np.asarray(xi, dtype=np.float64))
    if not np.all(np.isfinite(values)):
        raise DomainError(f"Symbol argument must be finite, got {xi!r}")

    small = values < SMALL_XI_THRESHOLD
    result = np.where(small, _small_xi_branch(values), _direct_branch(values))

    if np.ndim(xi) == 0:
        return float(result)
    return result


def eval_g(lam: float) -> float:
    """
    Evaluate g(lambda) = m(sqrt(lambda)).

    Raises:
        DomainError: If lambda is negative or not finite
    """
    if not math.isfinite(lam) or lam < 0.0:
        raise DomainError(f"g is defined for finite lambda >= 0, got {lam!r}")
    return eval_symbol(math.sqrt(lam))


def multipliers(P: float, N: int) -> npt.NDArray[np.float64]:
    """
    Multipliers [m(2 pi k / P)] for k = 0..N of L acting on P-periodic functions.

    Raises:
        DomainError: If P <= 0 or N < 1
    """
    if not (math.isfinite(P) and P > 0.0):
        raise DomainError(f"Period must be positive, got {P!r}")
    if N < 1:
        raise DomainError(f"Mode count must be >= 1, got {N!r}")
    return eval_symbol(2.0 * math.pi * np.arange(N + 1) / P)
