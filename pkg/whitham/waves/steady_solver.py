# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import Callable, Iterator, List, Optional, Tuple, Union

import numpy as np
import numpy.typing as npt
from scipy import linalg

from whitham.config import ContinuationConfig
from whitham.errors import (
    BranchIntegrityError,
    DivergenceError,
    DomainError,
    FoldDetectedError,
)
from whitham.waves.bifurcation import bifurcation_point, expansion_wave
from whitham.waves.cosine_grid import CosineGrid, PeriodicWave
from whitham.waves.diagnostics import Diagnostics, lambda_bound, run_diagnostics
from whitham.waves.spectral_operator import coefficient_jacobian, coefficient_residual

__all__ = [
    "Arclength",
    "BranchPoint",
    "BranchTrace",
    "Constraint",
    "FixMu",
    "FixS",
    "FoldEvent",
    "StopReason",
    "galilean_map",
    "newton_correct",
    "trace_branch",
]

_logger = logging.getLogger(__name__)

# Pivot ratio below which the bordered matrix is treated as singular.
_SINGULAR_PIVOT_RATIO = 1e-13
_FAST_CONVERGENCE = 3
_STEP_GROWTH = 1.5
_POLISH_STEPS = 2


@dataclass(frozen=True)
class FixMu:
    """Hold the wave speed at mu."""

    mu: float


@dataclass(frozen=True)
class FixS:
    """Hold the first cosine coefficient [phi]_1 at s."""

    s: float


@dataclass(frozen=True)
class Arclength:
    """tangent . (u - prev) = ds, with u = (a_0..a_N, mu)."""

    prev: npt.NDArray[np.float64]
    tangent: npt.NDArray[np.float64]
    ds: float


Constraint = Union[FixMu, FixS, Arclength]


@dataclass(frozen=True)
class BranchPoint:
    """A converged wave on the continuation curve.

    Attributes:
        wave: The converged wave
        s_param: [phi]_1 of the wave
        arclength: Cumulative pseudo-arclength from the first point
        diagnostics: Nodal properties and bounds of the wave
        newton_iters: Corrector iterations used
        residual_norm: Sup-norm of F at the nodes
        step: Index on the branch
        pivot_ratio: min/max pivot magnitude of the last factorized bordered
            matrix, a cheap conditioning estimate
    """

    wave: PeriodicWave
    s_param: float
    arclength: float
    diagnostics: Diagnostics
    newton_iters: int
    residual_norm: float
    step: int = 0
    pivot_ratio: float = math.nan

    @property
    def mu(self) -> float:
        return self.wave.mu

    def to_record(self) -> dict:
        """One line of the branch log."""
        d = self.diagnostics
        return {
            "step": self.step,
            "s_param": self.s_param,
            "mu": self.mu,
            "arclength": self.arclength,
            "gap": d.gap,
            "phi_max": d.phi_max,
            "phi_trough": float(self.wave.values[-1]),
            "newton_iters": self.newton_iters,
            "residual_norm": self.residual_norm,
            "pivot_ratio": self.pivot_ratio,
            "margins": d.margins(),
        }


@dataclass(frozen=True)
class FoldEvent:
    """A sign change of d mu / d arclength between two accepted points."""

    step: int
    mu: float
    gap: float
    arclength: float


@unique
class StopReason(str, Enum):
    GAP = "gap"
    STEP_TOO_SMALL = "ds_min"
    MAX_STEPS = "max_steps"


@dataclass
class BranchTrace(Sequence[BranchPoint]):
    """Accepted branch points in order, plus the fold events met on the way."""

    points: List[BranchPoint] = field(default_factory=list)
    folds: List[FoldEvent] = field(default_factory=list)
    stop_reason: Optional[StopReason] = None

    def __getitem__(self, index):
        return self.points[index]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[BranchPoint]:
        return iter(self.points)


# --- bordered Newton ------------------------------------------------------


def _pack(wave: PeriodicWave) -> npt.NDArray[np.float64]:
    return np.append(wave.coeffs, wave.mu)


def _unpack(grid: CosineGrid, u: npt.NDArray[np.float64]) -> PeriodicWave:
    return PeriodicWave.from_coeffs(grid, float(u[-1]), u[:-1])


def _constraint_row(
    constraint: Constraint, size: int
) -> npt.NDArray[np.float64]:
    row = np.zeros(size)
    if isinstance(constraint, FixMu):
        row[-1] = 1.0
    elif isinstance(constraint, FixS):
        row[1] = 1.0
    else:
        row[:] = constraint.tangent
    return row


def _constraint_value(constraint: Constraint, u: npt.NDArray[np.float64]) -> float:
    if isinstance(constraint, FixMu):
        return float(u[-1] - constraint.mu)
    if isinstance(constraint, FixS):
        return float(u[1] - constraint.s)
    return float(constraint.tangent @ (u - constraint.prev) - constraint.ds)


def _check_constraint(constraint: Constraint, grid: CosineGrid) -> None:
    if isinstance(constraint, Arclength):
        size = grid.N + 2
        if constraint.prev.shape != (size,) or constraint.tangent.shape != (size,):
            raise DomainError(
                f"Arclength vectors must have {size} entries, got "
                f"{constraint.prev.shape} and {constraint.tangent.shape}"
            )
        if not (math.isfinite(constraint.ds) and constraint.ds > 0.0):
            raise DomainError(f"Arclength step must be positive, got {constraint.ds!r}")
    elif isinstance(constraint, (FixMu, FixS)):
        target = constraint.mu if isinstance(constraint, FixMu) else constraint.s
        if not math.isfinite(target):
            raise DomainError(f"Constraint target must be finite, got {target!r}")
    else:
        raise DomainError(f"Unknown constraint {constraint!r}")


@dataclass
class _Factorization:
    lu: Tuple[npt.NDArray[np.float64], npt.NDArray[np.int32]]
    pivot_ratio: float


def _factorize(
    wave: PeriodicWave, constraint: Constraint
) -> _Factorization:
    """LU of the bordered matrix [[dF/da, dF/dmu], [constraint row]]."""
    n = wave.N + 1
    bordered = np.empty((n + 1, n + 1))
    bordered[:n, :n] = coefficient_jacobian(wave)
    bordered[:n, n] = wave.coeffs
    bordered[n, :] = _constraint_row(constraint, n + 1)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu = linalg.lu_factor(bordered, check_finite=False)
    pivots = np.abs(np.diag(lu[0]))
    ratio = float(pivots.min() / pivots.max()) if pivots.max() > 0.0 else 0.0
    return _Factorization(lu=lu, pivot_ratio=ratio)


@dataclass
class _NewtonResult:
    wave: PeriodicWave
    iterations: int
    residual_norm: float
    factorization: _Factorization


def _residual_norms(
    wave: PeriodicWave, constraint: Constraint
) -> Tuple[npt.NDArray[np.float64], float, float]:
    f = coefficient_residual(wave)
    norm = float(np.max(np.abs(wave.grid.to_values(f))))
    return f, norm, _constraint_value(constraint, _pack(wave))


def _newton(
    guess: PeriodicWave,
    constraint: Constraint,
    tol: float,
    max_iter: int,
) -> _NewtonResult:
    """
    Chord Newton on (a, mu) with one scalar constraint.

    The bordered matrix is factorized at the guess and refactorized only when
    the residual stops contracting by at least half. After convergence up to
    _POLISH_STEPS extra chord steps are kept while they lower the residual.
    """
    grid = guess.grid
    _check_constraint(constraint, grid)
    if not (np.all(np.isfinite(guess.coeffs)) and math.isfinite(guess.mu)):
        raise DomainError("Newton guess must be finite")

    wave = guess
    factorization: Optional[_Factorization] = None
    fresh = False
    previous = math.inf

    for iteration in range(max_iter + 1):
        f, norm, c = _residual_norms(wave, constraint)
        if not (math.isfinite(norm) and math.isfinite(c)):
            raise DivergenceError(
                f"Non-finite residual after {iteration} iterations", last_iterate=wave
            )
        if norm < tol and abs(c) < tol:
            if factorization is None:
                factorization = _factorize(wave, constraint)
            wave, norm = _polish(wave, constraint, factorization, norm)
            return _NewtonResult(wave, iteration, norm, factorization)
        if iteration == max_iter:
            break

        if factorization is None or (norm > 0.5 * previous and not fresh):
            factorization = _factorize(wave, constraint)
            fresh = True
            _singular_guard(factorization, constraint, wave)
        else:
            fresh = False
        previous = norm

        delta = linalg.lu_solve(factorization.lu, -np.append(f, c), check_finite=False)
        wave = _unpack(grid, _pack(wave) + delta)

    raise DivergenceError(
        f"Newton did not converge in {max_iter} iterations "
        f"(residual {norm:.3e}, tolerance {tol:.3e})",
        last_iterate=wave,
    )


def _singular_guard(
    factorization: _Factorization, constraint: Constraint, wave: PeriodicWave
) -> None:
    if factorization.pivot_ratio >= _SINGULAR_PIVOT_RATIO:
        return
    if isinstance(constraint, FixMu):
        raise FoldDetectedError(
            f"Bordered matrix is singular at fixed mu = {constraint.mu!r} "
            f"(pivot ratio {factorization.pivot_ratio:.3e})"
        )
    raise DivergenceError(
        f"Bordered matrix is singular (pivot ratio {factorization.pivot_ratio:.3e})",
        last_iterate=wave,
    )


def _polish(
    wave: PeriodicWave,
    constraint: Constraint,
    factorization: _Factorization,
    norm: float,
) -> Tuple[PeriodicWave, float]:
    for _ in range(_POLISH_STEPS):
        f, _, c = _residual_norms(wave, constraint)
        delta = linalg.lu_solve(factorization.lu, -np.append(f, c), check_finite=False)
        candidate = _unpack(wave.grid, _pack(wave) + delta)
        _, candidate_norm, _ = _residual_norms(candidate, constraint)
        if not candidate_norm < norm:
            break
        wave, norm = candidate, candidate_norm
    return wave, norm


def newton_correct(
    guess: PeriodicWave,
    constraint: Constraint,
    tol: float = 1e-11,
    max_iter: int = 25,
    lam: Optional[float] = None,
) -> BranchPoint:
    """
    Solve F(phi, mu) = 0 with one scalar constraint, starting from guess.

    Args:
        guess: Starting wave; its grid is kept
        constraint: FixMu, FixS or Arclength
        tol: Sup-norm tolerance on F at the nodes (and on the constraint)
        max_iter: Iteration cap
        lam: lambda_(K,P) for the diagnostics; computed when omitted

    Raises:
        DivergenceError: If the iteration does not converge
        FoldDetectedError: If the bordered matrix is singular under FixMu
    """
    result = _newton(guess, constraint, tol, max_iter)
    wave = result.wave
    return BranchPoint(
        wave=wave,
        s_param=wave.s_param,
        arclength=0.0,
        diagnostics=run_diagnostics(wave, lam),
        newton_iters=result.iterations,
        residual_norm=result.residual_norm,
        pivot_ratio=result.factorization.pivot_ratio,
    )


# --- continuation ---------------------------------------------------------


def _tangent(
    factorization: _Factorization, orientation: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    """Null direction of dF from the bordered factorization, signed like orientation."""
    rhs = np.zeros(orientation.size)
    rhs[-1] = 1.0
    t = linalg.lu_solve(factorization.lu, rhs, check_finite=False)
    t /= np.linalg.norm(t)
    if t @ orientation < 0.0:
        t = -t
    return t


def trace_branch(
    cfg: ContinuationConfig,
    on_accept: Optional[Callable[[BranchPoint], None]] = None,
) -> BranchTrace:
    """
    Follow the primary branch from (0, mu*) toward the highest wave.

    The first point corrects the expansion wave at [phi]_1 = ds_init; after
    that pseudo-arclength predictor-corrector steps in (a, mu) are taken.
    The tangent comes from the bordered factorization of the last corrector,
    so folds are passed. Steps are halved on divergence and grown after fast
    convergence. Converged points that overshoot mu/2 are rejected with a
    halved step.

    Args:
        cfg: Continuation parameters
        on_accept: Called with every accepted point, in order

    Raises:
        BranchIntegrityError: If a converged point fails its diagnostics
        DivergenceError: If the first point cannot be corrected
    """
    grid = CosineGrid(P=cfg.P, N=cfg.N)
    xi = 2.0 * math.pi / cfg.P
    mu_star = bifurcation_point(cfg.P, 1)
    lam = lambda_bound(cfg.P)
    _logger.info(
        f"Tracing branch P = {cfg.P!r}, N = {cfg.N}, mu* = {mu_star:.12f}, "
        f"lambda = {lam:.6e}"
    )

    trace = BranchTrace()

    def accept(point: BranchPoint) -> None:
        trace.points.append(point)
        d = point.diagnostics
        _logger.info(
            f"step {point.step}: mu = {point.mu:.12f}, s = {point.s_param:.6e}, "
            f"gap = {d.gap:.6e}, iters = {point.newton_iters}, "
            f"pivot ratio = {point.pivot_ratio:.3e}"
        )
        if on_accept is not None:
            on_accept(point)

    def verify(point: BranchPoint) -> None:
        failed = point.diagnostics.failed_checks()
        if failed:
            raise BranchIntegrityError(
                f"Diagnostics failed at step {point.step}: {', '.join(failed)}",
                point=point,
                accepted=list(trace.points),
            )

    first = _newton(
        expansion_wave(xi, cfg.ds_init, grid),
        FixS(cfg.ds_init),
        cfg.newton_tol,
        cfg.max_newton,
    )
    point = BranchPoint(
        wave=first.wave,
        s_param=first.wave.s_param,
        arclength=0.0,
        diagnostics=run_diagnostics(first.wave, lam),
        newton_iters=first.iterations,
        residual_norm=first.residual_norm,
        step=0,
        pivot_ratio=first.factorization.pivot_ratio,
    )
    verify(point)
    accept(point)

    u = _pack(point.wave)
    e_s = np.zeros(u.size)
    e_s[1] = 1.0
    tangent = _tangent(first.factorization, e_s)
    ds = cfg.ds_init
    step = 0

    while trace.stop_reason is None:
        if point.diagnostics.gap < cfg.stop_gap:
            trace.stop_reason = StopReason.GAP
            break
        if step >= cfg.max_steps:
            trace.stop_reason = StopReason.MAX_STEPS
            break
        step += 1

        candidate: Optional[BranchPoint] = None
        while candidate is None:
            if ds < cfg.ds_min:
                trace.stop_reason = StopReason.STEP_TOO_SMALL
                break
            try:
                result = _newton(
                    _unpack(grid, u + ds * tangent),
                    Arclength(prev=u, tangent=tangent, ds=ds),
                    cfg.newton_tol,
                    cfg.max_newton,
                )
            except DivergenceError as e:
                _logger.warning(f"step {step}: corrector failed at ds = {ds:.3e}: {e}")
                ds /= 2.0
                continue

            diagnostics = run_diagnostics(result.wave, lam)
            if not diagnostics.below_mu_half_ok:
                _logger.warning(
                    f"step {step}: overshoot past mu/2 (gap {diagnostics.gap:.3e}), "
                    f"halving ds = {ds:.3e}"
                )
                ds /= 2.0
                continue
            candidate = BranchPoint(
                wave=result.wave,
                s_param=result.wave.s_param,
                arclength=point.arclength + ds,
                diagnostics=diagnostics,
                newton_iters=result.iterations,
                residual_norm=result.residual_norm,
                step=step,
                pivot_ratio=result.factorization.pivot_ratio,
            )

        if candidate is None:
            break

        verify(candidate)
        new_tangent = _tangent(result.factorization, tangent)
        if new_tangent[-1] * tangent[-1] < 0.0:
            fold = FoldEvent(
                step=step,
                mu=candidate.mu,
                gap=candidate.diagnostics.gap,
                arclength=candidate.arclength,
            )
            trace.folds.append(fold)
            _logger.info(
                f"Fold at step {step}: mu = {fold.mu:.12f}, gap = {fold.gap:.6e}"
            )

        accept(candidate)
        point = candidate
        u = _pack(point.wave)
        tangent = new_tangent
        if result.iterations <= _FAST_CONVERGENCE:
            ds = min(ds * _STEP_GROWTH, cfg.ds_max)

    _logger.info(
        f"Branch stopped ({trace.stop_reason.value}) after {len(trace)} points, "
        f"{len(trace.folds)} fold(s); final gap = {point.diagnostics.gap:.6e} "
        f"at N = {cfg.N}"
    )
    return trace


def galilean_map(wave: PeriodicWave) -> PeriodicWave:
    """(phi, mu) -> (phi + 1 - mu, 2 - mu); F is invariant under this map."""
    coeffs = wave.coeffs.copy()
    coeffs[0] += 1.0 - wave.mu
    return wave.with_coeffs(coeffs, 2.0 - wave.mu)
