import json
import math
from pathlib import Path

import numpy as np
import pytest

from whitham.errors import DomainError, WaveFileError
from whitham.waves import CosineGrid, PeriodicWave

TWO_PI = 2.0 * math.pi


@pytest.fixture
def grid() -> CosineGrid:
    return CosineGrid(P=TWO_PI, N=32)


@pytest.fixture
def wave(grid: CosineGrid) -> PeriodicWave:
    rng = np.random.default_rng(7)
    coeffs = rng.standard_normal(grid.N + 1) * 0.5 ** np.arange(grid.N + 1)
    return PeriodicWave.from_coeffs(grid, 0.8, coeffs)


def test_grid_geometry(grid: CosineGrid) -> None:
    assert grid.size == 33
    assert grid.spacing == pytest.approx(math.pi / 32)
    assert grid.nodes[0] == 0.0
    assert grid.nodes[-1] == pytest.approx(math.pi)
    assert grid.wavenumbers[3] == pytest.approx(3.0)
    assert grid.multipliers[0] == 1.0
    assert grid.refined().N == 64


@pytest.mark.parametrize(
    "P, N", [(0.0, 8), (-1.0, 8), (math.nan, 8), (1.0, 12), (1.0, 1)]
)
def test_invalid_grid(P: float, N: int) -> None:
    with pytest.raises(DomainError):
        CosineGrid(P=P, N=N)


@pytest.mark.parametrize("k", [0, 1, 5, 32])
def test_single_mode_values(grid: CosineGrid, k: int) -> None:
    coeffs = np.zeros(grid.size)
    coeffs[k] = 1.0
    expected = np.cos(k * grid.wavenumbers[1] * grid.nodes)
    assert grid.to_values(coeffs) == pytest.approx(expected, abs=1e-14)


def test_transforms_are_inverse(grid: CosineGrid, wave: PeriodicWave) -> None:
    assert grid.to_coeffs(wave.values) == pytest.approx(wave.coeffs, abs=1e-14)


def test_transforms_along_axis(grid: CosineGrid) -> None:
    block = np.random.default_rng(1).standard_normal((4, grid.size))
    along_last = grid.to_values(block, axis=1)
    assert along_last[2] == pytest.approx(grid.to_values(block[2]), abs=1e-13)


def test_size_mismatch(grid: CosineGrid) -> None:
    with pytest.raises(DomainError):
        grid.to_values(np.zeros(grid.N))
    with pytest.raises(DomainError):
        PeriodicWave.from_coeffs(grid, 0.5, np.zeros(grid.N + 2))


def test_evaluate_matches_nodes(wave: PeriodicWave) -> None:
    assert wave.evaluate(wave.grid.nodes) == pytest.approx(wave.values, abs=1e-13)
    assert wave.evaluate([-0.3]) == pytest.approx(wave.evaluate([0.3]), abs=1e-14)


def test_from_values(grid: CosineGrid, wave: PeriodicWave) -> None:
    rebuilt = PeriodicWave.from_values(grid, wave.mu, wave.values)
    assert rebuilt.coeffs == pytest.approx(wave.coeffs, abs=1e-14)


def test_constant_wave(grid: CosineGrid) -> None:
    constant = PeriodicWave.constant(grid, 1.5, 0.5)
    assert np.all(constant.values == 0.5)
    assert constant.mean == 0.5
    assert constant.s_param == 0.0


def test_arrays_are_read_only(wave: PeriodicWave) -> None:
    with pytest.raises(ValueError):
        wave.coeffs[0] = 1.0
    with pytest.raises(ValueError):
        wave.values[0] = 1.0


def test_shifted_half_period(wave: PeriodicWave) -> None:
    shifted = wave.shifted_half_period()
    assert shifted.values == pytest.approx(wave.values[::-1], abs=1e-13)
    assert shifted.mu == wave.mu


def test_json_round_trip_is_exact(tmp_path: Path, wave: PeriodicWave) -> None:
    wave_file = tmp_path / "wave.json"
    wave.to_json(wave_file)
    loaded = PeriodicWave.from_json(wave_file)

    assert loaded.P == wave.P
    assert loaded.mu == wave.mu
    assert np.array_equal(loaded.coeffs, wave.coeffs)


def test_missing_wave_file(tmp_path: Path) -> None:
    with pytest.raises(WaveFileError):
        PeriodicWave.from_json(tmp_path / "missing.json")


def test_corrupt_wave_file(tmp_path: Path) -> None:
    wave_file = tmp_path / "wave.json"
    wave_file.write_text("{ not json", encoding="utf-8")
    with pytest.raises(WaveFileError):
        PeriodicWave.from_json(wave_file)


@pytest.mark.parametrize(
    "data",
    [
        {"P": TWO_PI, "mu": 0.5, "N": 4},
        {"P": -1.0, "mu": 0.5, "N": 4, "coeffs": [0.0] * 5},
        {"P": TWO_PI, "mu": "fast", "N": 4, "coeffs": [0.0] * 5},
        {"P": TWO_PI, "mu": 0.5, "N": 4, "coeffs": [0.0] * 6},
        {"P": TWO_PI, "mu": 0.5, "N": 6, "coeffs": [0.0] * 7},
        [1, 2, 3],
    ],
)
def test_invalid_wave_data(tmp_path: Path, data) -> None:
    wave_file = tmp_path / "wave.json"
    wave_file.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(WaveFileError):
        PeriodicWave.from_json(wave_file)
