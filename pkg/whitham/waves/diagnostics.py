# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Any, Dict, Optional

import numpy as np
from scipy import optimize

from whitham.errors import DomainError, NumericError
from whitham.kernel.periodic_kernel import PeriodicKernelMethod, pkernel_values
from whitham.waves.cosine_grid import PeriodicWave
from whitham.waves.spectral_operator import differentiate

__all__ = [
    "MEAN_IDENTITY_TOL",
    "Diagnostics",
    "lambda_bound",
    "run_diagnostics",
]

_logger = logging.getLogger(__name__)

MEAN_IDENTITY_TOL = 1e-8

_STRICTNESS = 1e3 * float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class Diagnostics:
    """Nodal properties, bounds and identities of a computed wave.

    Margins are signed: positive means the inequality holds. Checks that do
    not apply to constant profiles are None for them.

    Attributes:
        phi_max, phi_min: Extremes of the node values
        gap: mu/2 - max phi
        trough_gap: mu/2 - phi(P/2)
        crest_curvature: phi''(0)
        trough_curvature: phi''(P/2)
        monotone_margin: min of phi' over the interior of (-P/2, 0)
        bounds_margin: min(inf phi - (mu - 1), 1 - sup phi)
        mean_identity_residual: Relative residual of (mu - 1) mean(phi) = mean(phi^2)
        lambda_value: lambda_(K,P) the trough gap is compared to
        threshold: Strictness threshold 1e3 eps ||phi||
    """

    phi_max: float
    phi_min: float
    gap: float
    trough_gap: float
    crest_curvature: float
    trough_curvature: float
    monotone_margin: float
    bounds_margin: float
    mean_identity_residual: float
    lambda_value: float
    threshold: float
    is_constant: bool
    monotone_ok: Optional[bool]
    below_mu_half_ok: bool
    second_deriv_crest_ok: Optional[bool]
    second_deriv_trough_ok: Optional[bool]
    mean_identity_ok: bool
    lambda_bound_ok: bool
    bounds_ok: bool
    sign_change_ok: Optional[bool]
    speed_ok: bool

    @property
    def all_ok(self) -> bool:
        return not self.failed_checks()

    def failed_checks(self) -> list[str]:
        checks = {
            "monotone_ok": self.monotone_ok,
            "below_mu_half_ok": self.below_mu_half_ok,
            "second_deriv_crest_ok": self.second_deriv_crest_ok,
            "second_deriv_trough_ok": self.second_deriv_trough_ok,
            "mean_identity_ok": self.mean_identity_ok,
            "lambda_bound_ok": self.lambda_bound_ok,
            "bounds_ok": self.bounds_ok,
            "sign_change_ok": self.sign_change_ok,
            "speed_ok": self.speed_ok,
        }
        return [name for name, ok in checks.items() if ok is False]

    def margins(self) -> Dict[str, float]:
        return {
            "gap": self.gap,
            "trough_gap_minus_lambda": self.trough_gap - self.lambda_value,
            "monotone": self.monotone_margin,
            "crest_curvature": -self.crest_curvature,
            "trough_curvature": self.trough_curvature,
            "bounds": self.bounds_margin,
            "mean_identity": MEAN_IDENTITY_TOL - self.mean_identity_residual,
        }

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["all_ok"] = self.all_ok
        return data


def _mean_identity_residual(wave: PeriodicWave) -> float:
    """
    Relative residual of (mu - 1) int phi = int phi^2 over a period.

    In coefficients: (mu - 1) a_0 = a_0^2 + (1/2) sum_(k>=1) a_k^2.
    """
    a = wave.coeffs
    lhs = (wave.mu - 1.0) * a[0]
    rhs = a[0] ** 2 + 0.5 * float(np.dot(a[1:], a[1:]))
    scale = max(abs(lhs), abs(rhs))
    if scale == 0.0:
        return 0.0
    return float(abs(lhs - rhs) / scale)


def run_diagnostics(wave: PeriodicWave, lam: Optional[float] = None) -> Diagnostics:
    """
    Evaluate every nodal property and bound on a wave. Reports only.

    Args:
        wave: The wave to inspect
        lam: lambda_(K,P); computed by lambda_bound when omitted
    """
    values = wave.values
    mu = wave.mu
    phi_max = float(values.max())
    phi_min = float(values.min())
    norm = float(np.max(np.abs(values)))
    threshold = _STRICTNESS * norm

    is_constant = bool(
        np.max(np.abs(wave.coeffs[1:])) <= _STRICTNESS * max(norm, 1.0)
    )

    d1 = differentiate(wave, 1)
    d2 = differentiate(wave, 2, tapered=True)
    # phi'(-x) = -phi'(x)
    monotone_margin = float(np.min(-d1)) if d1.size else math.inf
    crest_curvature = float(d2[0])
    trough_curvature = float(d2[-1])

    gap = mu / 2.0 - phi_max
    trough_gap = mu / 2.0 - float(values[-1])
    bounds_margin = min(phi_min - (mu - 1.0), 1.0 - phi_max)
    identity = _mean_identity_residual(wave)
    lam = lambda_bound(wave.P) if lam is None else lam

    if is_constant:
        monotone_ok = crest_ok = trough_ok = sign_change_ok = None
    else:
        monotone_ok = bool(monotone_margin > threshold)
        crest_ok = bool(crest_curvature < -threshold)
        trough_ok = bool(trough_curvature > threshold)
        # mu - 1 <= inf phi <= 0 <= sup phi for mu <= 1, and its Galilean image
        level = max(0.0, mu - 1.0)
        sign_change_ok = bool(phi_min <= level <= phi_max)

    return Diagnostics(
        phi_max=phi_max,
        phi_min=phi_min,
        gap=gap,
        trough_gap=trough_gap,
        crest_curvature=crest_curvature,
        trough_curvature=trough_curvature,
        monotone_margin=monotone_margin,
        bounds_margin=bounds_margin,
        mean_identity_residual=identity,
        lambda_value=lam,
        threshold=threshold,
        is_constant=is_constant,
        monotone_ok=monotone_ok,
        below_mu_half_ok=bool(gap > threshold),
        second_deriv_crest_ok=crest_ok,
        second_deriv_trough_ok=trough_ok,
        mean_identity_ok=bool(identity < MEAN_IDENTITY_TOL),
        lambda_bound_ok=bool(trough_gap >= lam),
        bounds_ok=bool(bounds_margin > threshold),
        sign_change_ok=sign_change_ok,
        speed_ok=bool(0.0 < mu < 1.0 and mu <= 2.0),
    )


@lru_cache(maxsize=32)
def lambda_bound(P: float, n_grid: int = 48, tol: float = 1e-12) -> float:
    """
    lambda_(K,P) = (P/8) min { K_P(x - y) - K_P(x + y) : x, y in [-3P/8, -P/8] }.

    The minimum is located on an n_grid x n_grid grid (the diagonal, where
    K_P(x - y) is singular, is excluded) and refined with a bounded
    quasi-Newton search from the best grid point.

    Raises:
        DomainError: If P is not positive
        NumericError: If the minimum is not positive
    """
    if not (math.isfinite(P) and P > 0.0):
        raise DomainError(f"Period must be positive, got {P!r}")

    lo, hi = -3.0 * P / 8.0, -P / 8.0
    axis = np.linspace(lo, hi, n_grid)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    off_diagonal = ~np.eye(n_grid, dtype=bool)
    xs, ys = x[off_diagonal], y[off_diagonal]

    method = PeriodicKernelMethod.COSH_FORMULA
    difference = pkernel_values(xs - ys, P, tol, method) - pkernel_values(
        xs + ys, P, tol, method
    )
    best = int(np.argmin(difference))
    grid_min = float(difference[best])

    def objective(point: np.ndarray) -> float:
        px, py = float(point[0]), float(point[1])
        if abs(px - py) < 1e-9 * P:
            return float(difference.max())
        pair = pkernel_values([px - py, px + py], P, tol, method)
        return float(pair[0] - pair[1])

    refined = optimize.minimize(
        objective,
        x0=np.array([xs[best], ys[best]]),
        method="L-BFGS-B",
        bounds=[(lo, hi), (lo, hi)],
    )
    minimum = min(grid_min, float(refined.fun))

    if not minimum > 0.0:
        raise NumericError(
            f"Kernel comparison minimum {minimum!r} is not positive for P = {P!r}"
        )
    lam = P / 8.0 * minimum
    _logger.info(f"lambda_(K,P) = {lam:.6e} for P = {P!r}")
    return lam
