# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Dict

import numpy as np
import numpy.typing as npt
from jsonschema import validate
from jsonschema.exceptions import ValidationError
from scipy import fft

from whitham.config import WAVE_SCHEMA
from whitham.errors import DomainError, WaveFileError
from whitham.kernel.symbol import multipliers
from whitham.util import dump_json_atomically

__all__ = ["CosineGrid", "PeriodicWave", "cosine_series"]

_logger = logging.getLogger(__name__)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class CosineGrid:
    """Half-period collocation grid for even P-periodic functions.

    A function is represented by cosine coefficients a_0..a_N,

        phi(x) = sum_k a_k cos(2 pi k x / P),

    or by its values at the N + 1 nodes x_j = (j / N)(P / 2). The two are
    related by a type-I discrete cosine transform.

    Attributes:
        P: Period
        N: Highest cosine mode, a power of two
    """

    P: float
    N: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.P) and self.P > 0.0):
            raise DomainError(f"Period must be positive, got {self.P!r}")
        if not _is_power_of_two(self.N) or self.N < 2:
            raise DomainError(f"N must be a power of two >= 2, got {self.N!r}")

    @property
    def size(self) -> int:
        return self.N + 1

    @property
    def spacing(self) -> float:
        return self.P / (2.0 * self.N)

    @cached_property
    def nodes(self) -> npt.NDArray[np.float64]:
        nodes = np.arange(self.N + 1) * self.spacing
        nodes.setflags(write=False)
        return nodes

    @cached_property
    def wavenumbers(self) -> npt.NDArray[np.float64]:
        """2 pi k / P for k = 0..N."""
        k = 2.0 * math.pi * np.arange(self.N + 1) / self.P
        k.setflags(write=False)
        return k

    @cached_property
    def multipliers(self) -> npt.NDArray[np.float64]:
        """m(2 pi k / P) for k = 0..N."""
        m = multipliers(self.P, self.N)
        m.setflags(write=False)
        return m

    def check_size(self, data: npt.ArrayLike, axis: int = 0) -> npt.NDArray[np.float64]:
        array = np.asarray(data, dtype=np.float64)
        if array.ndim == 0 or array.shape[axis] != self.N + 1:
            raise DomainError(
                f"Expected {self.N + 1} entries along axis {axis}, "
                f"got shape {array.shape}"
            )
        return array

    def to_values(
        self, coeffs: npt.ArrayLike, axis: int = 0
    ) -> npt.NDArray[np.float64]:
        """Cosine coefficients to node values."""
        c = np.moveaxis(self.check_size(coeffs, axis), axis, 0).copy()
        c[1:-1] /= 2.0
        return np.moveaxis(fft.dct(c, type=1, axis=0), 0, axis)

    def to_coeffs(
        self, values: npt.ArrayLike, axis: int = 0
    ) -> npt.NDArray[np.float64]:
        """Node values to cosine coefficients."""
        v = np.moveaxis(self.check_size(values, axis), axis, 0)
        c = fft.idct(v, type=1, axis=0)
        c[1:-1] *= 2.0
        return np.moveaxis(c, 0, axis)

    def refined(self, factor: int = 2) -> CosineGrid:
        return CosineGrid(P=self.P, N=self.N * factor)


def cosine_series(
    coeffs: npt.ArrayLike, P: float, x: npt.ArrayLike
) -> npt.NDArray[np.float64]:
    """sum_k a_k cos(2 pi k x / P) at arbitrary points."""
    a = np.asarray(coeffs, dtype=np.float64)
    points = np.asarray(x, dtype=np.float64)
    phase = np.multiply.outer(points, 2.0 * math.pi * np.arange(a.size) / P)
    return np.cos(phase) @ a


@dataclass(eq=False)
class PeriodicWave:
    """A candidate steady wave: speed mu and an even P-periodic profile phi.

    coeffs is the primary data; values caches the node values and is kept
    consistent by the constructors.

    Attributes:
        grid: Collocation grid
        mu: Wave speed
        coeffs: Cosine coefficients a_0..a_N (read-only)
        values: Node values phi(x_j) (read-only)
    """

    grid: CosineGrid
    mu: float
    coeffs: npt.NDArray[np.float64]
    values: npt.NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        self.coeffs = self.grid.check_size(self.coeffs).copy()
        self.values = self.grid.check_size(self.values).copy()
        self.mu = float(self.mu)
        self.coeffs.setflags(write=False)
        self.values.setflags(write=False)

    @classmethod
    def from_coeffs(
        cls, grid: CosineGrid, mu: float, coeffs: npt.ArrayLike
    ) -> PeriodicWave:
        coeffs = grid.check_size(coeffs)
        return cls(grid=grid, mu=mu, coeffs=coeffs, values=grid.to_values(coeffs))

    @classmethod
    def from_values(
        cls, grid: CosineGrid, mu: float, values: npt.ArrayLike
    ) -> PeriodicWave:
        values = grid.check_size(values)
        return cls(grid=grid, mu=mu, coeffs=grid.to_coeffs(values), values=values)

    @classmethod
    def constant(cls, grid: CosineGrid, mu: float, level: float = 0.0) -> PeriodicWave:
        coeffs = np.zeros(grid.N + 1)
        coeffs[0] = level
        return cls.from_coeffs(grid, mu, coeffs)

    @property
    def P(self) -> float:
        return self.grid.P

    @property
    def N(self) -> int:
        return self.grid.N

    @property
    def s_param(self) -> float:
        """First cosine coefficient [phi]_1."""
        return float(self.coeffs[1])

    @property
    def mean(self) -> float:
        return float(self.coeffs[0])

    def evaluate(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        return cosine_series(self.coeffs, self.P, x)

    def with_coeffs(self, coeffs: npt.ArrayLike, mu: float) -> PeriodicWave:
        return PeriodicWave.from_coeffs(self.grid, mu, coeffs)

    def shifted_half_period(self) -> PeriodicWave:
        """phi(x + P/2): mode k picks up (-1)^k."""
        signs = np.where(np.arange(self.N + 1) % 2 == 0, 1.0, -1.0)
        return self.with_coeffs(signs * self.coeffs, self.mu)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "P": self.P,
            "mu": self.mu,
            "N": self.N,
            "coeffs": [float(c) for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: Any) -> PeriodicWave:
        """
        Build a wave from its JSON object form.

        Raises:
            WaveFileError: If the object does not match the wave schema
        """
        try:
            validate(instance=data, schema=WAVE_SCHEMA)
        except ValidationError as e:
            raise WaveFileError(f"Invalid wave data: {e.message}") from e

        N = data["N"]
        if len(data["coeffs"]) != N + 1:
            raise WaveFileError(
                f"Wave has N = {N} but {len(data['coeffs'])} coefficients"
            )
        try:
            grid = CosineGrid(P=float(data["P"]), N=N)
        except DomainError as e:
            raise WaveFileError(f"Invalid wave grid: {e}") from e
        return cls.from_coeffs(grid, float(data["mu"]), data["coeffs"])

    def to_json(self, out_file: Path) -> None:
        """Write {P, mu, N, coeffs} atomically; floats round-trip exactly."""
        dump_json_atomically(out_file, self.to_dict())

    @classmethod
    def from_json(cls, wave_file: Path) -> PeriodicWave:
        """
        Read a wave written by to_json.

        Raises:
            WaveFileError: If the file cannot be read, parsed or validated
        """
        try:
            with Path(wave_file).open("r", encoding="utf-8") as f:
                data: Any = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise WaveFileError(f"Cannot read wave file {wave_file}: {e}") from e

        wave = cls.from_dict(data)
        _logger.info(f"Loaded wave P = {wave.P!r}, N = {wave.N}, mu = {wave.mu!r}")
        return wave
