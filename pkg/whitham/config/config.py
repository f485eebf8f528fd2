# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

import json
import math
import os
import re
from dataclasses import asdict
from pathlib import Path
from typing import Any, Self

import yaml
from jsonschema import validate
from jsonschema.exceptions import ValidationError
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic.dataclasses import dataclass

from whitham.config.schema import BRANCH_CONFIG_SCHEMA

__all__ = [
    "ContinuationConfig",
    "ConfigErrorBase",
    "ConfigYAMLError",
    "ConfigValidationError",
]


class ConfigErrorBase(Exception):
    """Base exception for configuration errors."""

    pass


class ConfigYAMLError(ConfigErrorBase):
    """Raised when the config file is not valid YAML (or JSON)."""

    pass


class _FloatLoader(yaml.SafeLoader):
    """SafeLoader that also reads exponent floats without a dot, e.g. 1e-11."""


_FloatLoader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


def _parse(config_file: Path) -> Any:
    """Parse by suffix: .json through json, anything else as YAML."""
    kind = "JSON" if config_file.suffix.lower() == ".json" else "YAML"
    try:
        with config_file.open("r", encoding="utf-8") as f:
            if kind == "JSON":
                return json.load(f)
            return yaml.load(f, Loader=_FloatLoader)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigYAMLError(
            f"Invalid {kind} format in {config_file.as_posix()}:{os.linesep}{e}"
        )


class ConfigValidationError(ConfigErrorBase):
    """Raised when the config fails schema validation."""

    pass


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


class ContinuationConfigModel(BaseModel):
    """Pydantic model for a branch continuation config file."""

    model_config = ConfigDict(extra="forbid")

    P: float = Field(default=2.0 * math.pi, gt=0.0, description="Period")
    N: int = Field(default=4096, description="Number of cosine modes")
    newton_tol: float = Field(
        default=1e-11, gt=0.0, description="Residual sup-norm tolerance"
    )
    max_newton: int = Field(default=25, ge=1, description="Newton iteration cap")
    ds_init: float = Field(default=0.01, gt=0.0, description="Initial arclength step")
    ds_min: float = Field(default=1e-6, gt=0.0, description="Smallest arclength step")
    ds_max: float = Field(default=0.05, gt=0.0, description="Largest arclength step")
    stop_gap: float = Field(
        default=5e-3, gt=0.0, description="Stop once mu/2 - max(phi) drops below"
    )
    max_steps: int = Field(default=2000, ge=1, description="Continuation step cap")

    @field_validator("N")
    @classmethod
    def validate_modes(cls, v: int) -> int:
        """Validate that the mode count is a power of two large enough to fit."""
        if not _is_power_of_two(v) or v < 8:
            raise ValueError(f"N must be a power of two >= 8, got {v}")
        return v

    @model_validator(mode="after")
    def validate_steps(self) -> Self:
        """Validate the ordering ds_min <= ds_init <= ds_max."""
        if not (self.ds_min <= self.ds_init <= self.ds_max):
            raise ValueError(
                "Expected ds_min <= ds_init <= ds_max, got "
                f"{self.ds_min} / {self.ds_init} / {self.ds_max}"
            )
        return self


@dataclass(frozen=True)
class ContinuationConfig:
    # Period of the wave
    P: float = 2.0 * math.pi

    # Cosine modes a_0..a_N; collocation nodes x_j = (j/N)(P/2)
    N: int = 4096

    # Newton stops once the collocation residual sup-norm is below newton_tol
    newton_tol: float = 1e-11
    max_newton: int = 25

    # Pseudo-arclength steps in (coeffs, mu)
    ds_init: float = 0.01
    ds_min: float = 1e-6
    ds_max: float = 0.05

    # Terminate when the crest gap mu/2 - max(phi) drops below stop_gap
    stop_gap: float = 5e-3
    max_steps: int = 2000

    @classmethod
    def validated(cls, **values: Any) -> Self:
        """Build a config from keyword values through the file schema.

        Raises:
            ConfigValidationError: If the values fail validation
        """
        try:
            model = ContinuationConfigModel.model_validate(values)
        except Exception as e:
            raise ConfigValidationError(f"Config validation failed:{os.linesep}{e}")
        return cls(**model.model_dump())

    @classmethod
    def load(cls, config_file: Path | str) -> Self:
        """Load and validate a continuation config file.

        Args:
            config_file: Path to a .json file, or a YAML file with any other
                suffix, keyed by ContinuationConfig field names

        Returns:
            A validated ContinuationConfig instance

        Raises:
            ConfigYAMLError: If the config file cannot be parsed
            ConfigValidationError: If the config file fails schema validation
            FileNotFoundError: If the config file does not exist
            PermissionError: If there are permission issues reading the file
            OSError: For other file operation errors
        """
        config_file = Path(config_file)
        config_file_as_str = config_file.as_posix()

        if not config_file.is_file():
            raise FileNotFoundError(f"File not found: {config_file_as_str}")

        config_data: Any = _parse(config_file)

        if not isinstance(config_data, dict):
            raise ConfigYAMLError(
                f"Invalid format in {config_file_as_str}:{os.linesep}"
                f"expected a mapping, got {type(config_data).__name__}"
            )

        try:
            validate(instance=config_data, schema=BRANCH_CONFIG_SCHEMA)
            config = ContinuationConfigModel.model_validate(config_data)
        except ValidationError as e:
            raise ConfigValidationError(
                f"Config validation failed for {config_file_as_str}:{os.linesep}"
                f"{e.message}"
            )
        except Exception as e:
            raise ConfigValidationError(
                f"Config validation failed for {config_file_as_str}:{os.linesep}" f"{e}"
            )

        return cls(**config.model_dump())

    def to_dict(self) -> dict[str, Any]:
        """The resolved parameter set, keyed by field name."""
        return asdict(self)
