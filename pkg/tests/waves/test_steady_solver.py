import dataclasses
import math

import numpy as np
import pytest
from pytest_mock import MockerFixture

from whitham.config import ContinuationConfig
from whitham.errors import (
    BranchIntegrityError,
    DivergenceError,
    DomainError,
    FoldDetectedError,
)
from whitham.waves import (
    Arclength,
    CosineGrid,
    FixMu,
    FixS,
    PeriodicWave,
    bifurcation_point,
    expansion_wave,
    fit_cusp,
    galilean_map,
    newton_correct,
    residual,
    run_diagnostics,
    trace_branch,
)
from whitham.waves.spectral_operator import differentiate
from whitham.waves.steady_solver import StopReason

TWO_PI = 2.0 * math.pi


@pytest.fixture
def grid() -> CosineGrid:
    return CosineGrid(P=TWO_PI, N=64)


@pytest.fixture
def small_config() -> ContinuationConfig:
    return ContinuationConfig.validated(
        P=TWO_PI, N=64, ds_init=0.01, ds_max=0.05, max_steps=6
    )


def test_fix_s_converges_from_expansion(grid: CosineGrid) -> None:
    point = newton_correct(expansion_wave(1.0, 0.05, grid), FixS(0.05))
    assert point.s_param == pytest.approx(0.05, abs=1e-13)
    assert point.residual_norm < 1e-11
    assert np.max(np.abs(residual(point.wave))) < 1e-11
    assert point.diagnostics.all_ok
    assert point.pivot_ratio > 0.0


def test_fix_mu_reproduces_converged_point(grid: CosineGrid) -> None:
    reference = newton_correct(expansion_wave(1.0, 0.05, grid), FixS(0.05))
    again = newton_correct(expansion_wave(1.0, 0.049, grid), FixMu(reference.mu))
    assert again.mu == pytest.approx(reference.mu, abs=1e-12)
    assert again.wave.coeffs == pytest.approx(reference.wave.coeffs, abs=1e-9)


def test_solver_matches_expansion_to_fifth_order(grid: CosineGrid) -> None:
    def deviation(s: float) -> float:
        guess = expansion_wave(1.0, s, grid)
        point = newton_correct(guess, FixS(s), tol=1e-14)
        return float(np.max(np.abs(point.wave.values - guess.values)))

    assert deviation(0.02) / deviation(0.01) >= 12.0


@pytest.mark.parametrize("P, subcritical", [(TWO_PI, True), (2.0, False)])
def test_pitchfork_direction(P: float, subcritical: bool) -> None:
    grid = CosineGrid(P=P, N=64)
    point = newton_correct(expansion_wave(TWO_PI / P, 0.01, grid), FixS(0.01))
    assert (point.mu < bifurcation_point(P)) == subcritical


def test_fold_detected_at_trivial_bifurcation(grid: CosineGrid) -> None:
    mu_star = bifurcation_point(TWO_PI)
    with pytest.raises(FoldDetectedError):
        newton_correct(PeriodicWave.constant(grid, mu_star), FixMu(mu_star + 1e-3))


def test_divergence_carries_last_iterate(grid: CosineGrid) -> None:
    coeffs = np.zeros(grid.size)
    coeffs[1] = 0.2
    guess = PeriodicWave.from_coeffs(grid, bifurcation_point(TWO_PI), coeffs)
    with pytest.raises(DivergenceError) as exc_info:
        newton_correct(guess, FixS(0.2), max_iter=1)
    assert exc_info.value.last_iterate is not None
    assert exc_info.value.last_iterate.N == grid.N


def test_overshooting_solution_is_flagged(grid: CosineGrid) -> None:
    point = newton_correct(PeriodicWave.constant(grid, 3.0, 2.0), FixMu(3.0))
    assert point.newton_iters == 0
    assert point.diagnostics.below_mu_half_ok is False


def test_invalid_constraints(grid: CosineGrid) -> None:
    guess = expansion_wave(1.0, 0.01, grid)
    with pytest.raises(DomainError):
        newton_correct(guess, FixMu(math.nan))
    with pytest.raises(DomainError):
        newton_correct(
            guess, Arclength(prev=np.zeros(3), tangent=np.zeros(3), ds=0.01)
        )
    size = grid.N + 2
    with pytest.raises(DomainError):
        newton_correct(
            guess, Arclength(prev=np.zeros(size), tangent=np.ones(size), ds=-1.0)
        )


def test_galilean_map_preserves_solutions(grid: CosineGrid) -> None:
    point = newton_correct(expansion_wave(1.0, 0.05, grid), FixS(0.05))
    mapped = galilean_map(point.wave)
    assert mapped.mu == pytest.approx(2.0 - point.mu)
    assert np.max(np.abs(residual(mapped))) < 1e-11
    assert galilean_map(mapped).coeffs == pytest.approx(point.wave.coeffs, abs=1e-15)


def test_trace_branch_short_run(small_config: ContinuationConfig) -> None:
    accepted = []
    trace = trace_branch(small_config, on_accept=accepted.append)

    assert trace.stop_reason == StopReason.MAX_STEPS
    assert len(trace) == small_config.max_steps + 1
    assert [point.step for point in trace] == list(range(len(trace)))
    assert accepted == list(trace)

    mu_star = bifurcation_point(small_config.P)
    assert trace[0].mu < mu_star
    assert trace[0].s_param == pytest.approx(small_config.ds_init, abs=1e-12)

    arclengths = [point.arclength for point in trace]
    assert all(b > a for a, b in zip(arclengths, arclengths[1:]))
    gaps = [point.diagnostics.gap for point in trace]
    assert gaps[-1] < gaps[0]
    for point in trace:
        assert point.diagnostics.all_ok

    record = trace[-1].to_record()
    assert record["step"] == small_config.max_steps
    assert set(record["margins"]) >= {"gap", "monotone", "mean_identity"}


def test_trace_branch_stops_at_gap(small_config: ContinuationConfig) -> None:
    cfg = dataclasses.replace(small_config, stop_gap=10.0)
    trace = trace_branch(cfg)
    assert trace.stop_reason == StopReason.GAP
    assert len(trace) == 1


def test_trace_branch_aborts_on_failed_diagnostics(
    mocker: MockerFixture, small_config: ContinuationConfig
) -> None:
    def failing(wave, lam=None):
        return dataclasses.replace(run_diagnostics(wave, lam), bounds_ok=False)

    mocker.patch("whitham.waves.steady_solver.run_diagnostics", side_effect=failing)

    with pytest.raises(BranchIntegrityError) as exc_info:
        trace_branch(small_config)
    assert exc_info.value.point.step == 0
    assert exc_info.value.accepted == []


def test_trace_branch_aborts_on_non_monotone_wave(
    mocker: MockerFixture, small_config: ContinuationConfig
) -> None:
    def mirrored(wave, order, tapered=False):
        d = differentiate(wave, order, tapered)
        return -d if order == 1 else d

    mocker.patch("whitham.waves.diagnostics.differentiate", side_effect=mirrored)

    with pytest.raises(BranchIntegrityError) as exc_info:
        trace_branch(small_config)
    assert exc_info.value.point.step == 0
    assert exc_info.value.point.diagnostics.failed_checks() == ["monotone_ok"]
    assert "monotone_ok" in str(exc_info.value)


def test_trace_branch_rejects_gap_below_threshold(
    mocker: MockerFixture, small_config: ContinuationConfig
) -> None:
    calls = []

    def second_call_at_threshold(wave, lam=None):
        real = run_diagnostics(wave, lam)
        calls.append(real)
        if len(calls) == 2:
            return dataclasses.replace(
                real, gap=real.threshold / 2.0, below_mu_half_ok=False
            )
        return real

    mocker.patch(
        "whitham.waves.steady_solver.run_diagnostics",
        side_effect=second_call_at_threshold,
    )
    cfg = dataclasses.replace(small_config, max_steps=2)

    trace = trace_branch(cfg)

    assert trace.stop_reason == StopReason.MAX_STEPS
    assert len(calls) == 4
    assert trace[1].arclength == pytest.approx(cfg.ds_init / 2.0)
    assert all(point.diagnostics.below_mu_half_ok for point in trace)


def test_trace_branch_gap_decreases_along_branch() -> None:
    cfg = ContinuationConfig.validated(
        P=TWO_PI, N=128, ds_init=0.01, ds_max=0.02, stop_gap=0.1, max_steps=60
    )
    trace = trace_branch(cfg)

    gaps = [point.diagnostics.gap for point in trace]
    assert trace.stop_reason == StopReason.GAP
    assert len(gaps) >= 8
    assert all(b < a for a, b in zip(gaps[5:], gaps[6:]))


def test_trace_branch_supercritical_period() -> None:
    cfg = ContinuationConfig.validated(P=2.0, N=64, ds_init=0.01, max_steps=3)
    trace = trace_branch(cfg)

    mu_star = bifurcation_point(2.0)
    assert trace.stop_reason == StopReason.MAX_STEPS
    assert trace[0].mu > mu_star
    for point in trace:
        assert point.mu > mu_star
        assert point.diagnostics.all_ok


@pytest.mark.slow
def test_full_branch_reaches_highest_wave_neighbourhood() -> None:
    cfg = ContinuationConfig()
    trace = trace_branch(cfg)

    assert trace.stop_reason == StopReason.GAP
    final = trace[-1]
    assert final.diagnostics.gap < 5e-3
    for point in trace:
        assert point.diagnostics.all_ok
        assert point.diagnostics.mean_identity_residual < 1e-8

    fit = fit_cusp(final.wave)
    assert 0.45 <= fit.alpha_pointwise <= 0.55
    assert -1.7 <= fit.alpha_spectral <= -1.3
