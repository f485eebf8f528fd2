# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

import json
import math
import os
from pathlib import Path
from typing import Any

import pytest
import yaml

from whitham.config import (
    ConfigValidationError,
    ConfigYAMLError,
    ContinuationConfig,
)


@pytest.fixture
def valid_config_data() -> dict[str, Any]:
    """Create a valid config data dictionary."""
    return {
        "P": 2.0 * math.pi,
        "N": 256,
        "newton_tol": 1e-10,
        "max_newton": 20,
        "ds_init": 0.01,
        "ds_min": 1e-5,
        "ds_max": 0.04,
        "stop_gap": 0.02,
        "max_steps": 100,
    }


@pytest.fixture
def config_file(tmp_path: Path, valid_config_data: dict[str, Any]) -> Path:
    """Create a temporary JSON config file with valid data."""
    config_path = tmp_path / "config.json"
    with config_path.open("w", encoding="utf-8") as f:
        json.dump(valid_config_data, f)
    return config_path


def test_load_valid_config(config_file: Path) -> None:
    """Test loading a valid config file."""
    config = ContinuationConfig.load(config_file)

    assert config.P == 2.0 * math.pi
    assert config.N == 256
    assert config.newton_tol == 1e-10
    assert config.max_newton == 20
    assert config.ds_init == 0.01
    assert config.ds_min == 1e-5
    assert config.ds_max == 0.04
    assert config.stop_gap == 0.02
    assert config.max_steps == 100


def test_load_yaml_config(tmp_path: Path, valid_config_data: dict[str, Any]) -> None:
    """YAML documents are accepted as well as JSON."""
    config_path = tmp_path / "config.yaml"
    with config_path.open("w", encoding="utf-8") as f:
        yaml.dump(valid_config_data, f)

    assert ContinuationConfig.load(config_path).N == 256


def test_load_with_defaults(config_file: Path) -> None:
    """Test loading a config file with no fields set."""
    with config_file.open("w", encoding="utf-8") as f:
        json.dump({}, f)

    config = ContinuationConfig.load(config_file)

    assert config.P == 2.0 * math.pi
    assert config.N == 4096
    assert config.newton_tol == 1e-11
    assert config.max_newton == 25
    assert config.ds_init == 0.01
    assert config.ds_min == 1e-6
    assert config.ds_max == 0.05
    assert config.stop_gap == 5e-3
    assert config.max_steps == 2000


def test_to_dict_round_trips(config_file: Path) -> None:
    config = ContinuationConfig.load(config_file)
    assert ContinuationConfig.validated(**config.to_dict()) == config


def test_load_nonexistent_file() -> None:
    """Test loading a nonexistent config file."""
    with pytest.raises(FileNotFoundError):
        ContinuationConfig.load("nonexistent.json")


def test_load_json_exponent_floats(tmp_path: Path) -> None:
    """Exponent literals without a dot stay numbers in JSON files."""
    config_path = tmp_path / "config.json"
    config_path.write_text(
        '{"P": 6.283185307179586, "N": 64, "newton_tol": 1e-11, "ds_min": 1e-6}',
        encoding="utf-8",
    )

    config = ContinuationConfig.load(config_path)

    assert config.newton_tol == 1e-11
    assert config.ds_min == 1e-6
    assert config.N == 64


@pytest.mark.parametrize("suffix", [".yaml", ".yml"])
def test_load_yaml_exponent_floats(tmp_path: Path, suffix: str) -> None:
    config_path = tmp_path / f"config{suffix}"
    config_path.write_text(
        "N: 64\nnewton_tol: 1e-11\nds_min: 1E-6\nstop_gap: 5.0e-3\n", encoding="utf-8"
    )

    config = ContinuationConfig.load(config_path)

    assert config.newton_tol == 1e-11
    assert config.ds_min == 1e-6
    assert config.stop_gap == 5e-3


def test_load_invalid_json(config_file: Path) -> None:
    """Test loading a .json config file that is not JSON."""
    with config_file.open("w", encoding="utf-8") as f:
        f.write("N: 64")

    with pytest.raises(ConfigYAMLError) as exc_info:
        ContinuationConfig.load(config_file)
    assert "Invalid JSON format" in str(exc_info.value)


def test_load_invalid_yaml(tmp_path: Path) -> None:
    """Test loading a config file with invalid YAML."""
    config_path = tmp_path / "config.yaml"
    with config_path.open("w", encoding="utf-8") as f:
        f.write("invalid: yaml: content: - - -")

    with pytest.raises(ConfigYAMLError) as exc_info:
        ContinuationConfig.load(config_path)
    assert "Invalid YAML format" in str(exc_info.value)


@pytest.mark.parametrize(
    "override",
    [
        {"N": 100},
        {"N": 4},
        {"P": -1.0},
        {"ds_init": 0.1, "ds_max": 0.05},
        {"ds_min": 0.02, "ds_init": 0.01},
        {"stop_gap": 0.0},
        {"max_newton": 0},
        {"unknown_field": 1},
        {"N": "many"},
    ],
)
def test_load_invalid_schema(
    config_file: Path, valid_config_data: dict[str, Any], override: dict[str, Any]
) -> None:
    """Test loading a config file that fails validation."""
    with config_file.open("w", encoding="utf-8") as f:
        json.dump({**valid_config_data, **override}, f)

    with pytest.raises(ConfigValidationError) as exc_info:
        ContinuationConfig.load(config_file)
    assert "Config validation failed" in str(exc_info.value)


def test_validated_rejects_bad_values() -> None:
    with pytest.raises(ConfigValidationError):
        ContinuationConfig.validated(N=12)


@pytest.mark.parametrize("name", ["config.json", "config.yaml"])
def test_load_empty_file(tmp_path: Path, name: str) -> None:
    """Test loading an empty config file."""
    config_path = tmp_path / name
    config_path.write_text("", encoding="utf-8")

    with pytest.raises(ConfigYAMLError) as exc_info:
        ContinuationConfig.load(config_path)
    assert "Invalid" in str(exc_info.value)


@pytest.mark.skipif(
    not hasattr(os, "geteuid") or os.geteuid() == 0,
    reason="file permissions are not enforced for root",
)
def test_load_permission_error(tmp_path: Path) -> None:
    """Test loading a config file with permission issues."""
    config_file = tmp_path / "config.json"
    config_file.touch()
    os.chmod(config_file, 0o000)  # Remove all permissions

    with pytest.raises(PermissionError):
        ContinuationConfig.load(config_file)

    # Restore permissions for cleanup
    os.chmod(config_file, 0o644)
