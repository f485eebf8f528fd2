import csv
import dataclasses
import json
import math
from pathlib import Path
from typing import List

import pytest
from pytest_mock import MockerFixture

from whitham.command_branch import BranchLogWriter
from whitham.command_pkernel import ThreeMethodReport
from whitham.config import ContinuationConfig
from whitham.errors import ExitCode, NumericError
from whitham.main import main
from whitham.manifest import MANIFEST_FILE_NAME
from whitham.util import file_digest
from whitham.waves import (
    CosineGrid,
    FixS,
    PeriodicWave,
    expansion_wave,
    newton_correct,
    trace_branch,
)
from whitham.waves.diagnostics import run_diagnostics

TWO_PI = 2.0 * math.pi


def run(argv: List[str]) -> int:
    with pytest.raises(SystemExit) as exc_info:
        main(argv)
    return exc_info.value.code


def read_csv(path: Path) -> List[dict]:
    with path.open("r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def read_manifest(out_dir: Path) -> dict:
    with (out_dir / MANIFEST_FILE_NAME).open("r", encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture
def branch_config(tmp_path: Path) -> Path:
    config_file = tmp_path / "config.json"
    config_file.write_text(
        json.dumps({"P": TWO_PI, "N": 64, "max_steps": 3}), encoding="utf-8"
    )
    return config_file


def test_kernel_table(tmp_path: Path) -> None:
    code = run(
        ["--out-dir", str(tmp_path), "kernel", "--from", "0.1", "--to", "5"]
    )
    assert code == ExitCode.OK

    rows = read_csv(tmp_path / "kernel.csv")
    assert len(rows) == 50
    assert list(rows[0]) == ["x", "K", "K'", "K''", "method", "err_est"]
    assert all(float(row["K"]) > 0.0 for row in rows)
    assert all(float(row["K'"]) < 0.0 for row in rows)
    assert {row["method"] for row in rows} == {"series"}

    manifest = read_manifest(tmp_path)
    assert manifest["command"] == "kernel"
    assert manifest["config"]["step"] == 0.1
    [output] = manifest["output_files"]
    assert output["path"] == "kernel.csv"
    digest = file_digest(tmp_path / "kernel.csv")
    assert output["checksum"] == digest.sha256
    assert output["size"] == digest.size == (tmp_path / "kernel.csv").stat().st_size


def test_kernel_output_is_deterministic(tmp_path: Path) -> None:
    argv = ["kernel", "--from", "0.02", "--to", "1", "--step", "0.2"]
    assert run(["--out-dir", str(tmp_path / "a"), *argv]) == ExitCode.OK
    assert run(["--out-dir", str(tmp_path / "b"), *argv]) == ExitCode.OK
    first = (tmp_path / "a" / "kernel.csv").read_bytes()
    assert first == (tmp_path / "b" / "kernel.csv").read_bytes()
    assert b",split," in first


def test_kernel_bad_range(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code = run(["--out-dir", str(tmp_path), "kernel", "--from", "-1", "--to", "-2"])
    assert code == ExitCode.USAGE
    assert "Error" in capsys.readouterr().err


def test_kernel_asymptotic_method_below_range(tmp_path: Path) -> None:
    code = run(
        ["--out-dir", str(tmp_path), "kernel", "--from", "1", "--method", "asymptotic"]
    )
    assert code == ExitCode.USAGE


def test_kernel_cross_validation(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    code = run(
        [
            "--out-dir",
            str(tmp_path),
            "kernel",
            "--from",
            "1",
            "--to",
            "1",
            "--cross-validate",
        ]
    )
    assert code == ExitCode.OK
    assert "max |series - split|" in capsys.readouterr().out


def test_kernel_cross_validation_failure(tmp_path: Path, mocker: MockerFixture) -> None:
    mocker.patch("whitham.command_kernel.cross_validate", return_value=(1e-6, 0.3))
    code = run(
        ["--out-dir", str(tmp_path), "kernel", "--from", "1", "--cross-validate"]
    )
    assert code == ExitCode.INVARIANT
    assert (tmp_path / MANIFEST_FILE_NAME).is_file()


def test_pkernel_table(tmp_path: Path) -> None:
    code = run(
        ["--out-dir", str(tmp_path), "pkernel", "--period", "6.25", "--points", "16"]
    )
    assert code == ExitCode.OK
    rows = read_csv(tmp_path / "pkernel.csv")
    assert len(rows) == 16
    assert all(float(row["K_P"]) > 0.0 for row in rows)
    assert float(rows[-1]["x"]) == pytest.approx(3.125)


def test_pkernel_three_method_report(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    code = run(
        ["--out-dir", str(tmp_path), "pkernel", "--period", "6.25", "--three-method"]
    )
    assert code == ExitCode.OK
    assert "max Fourier deviation" in capsys.readouterr().out
    with (tmp_path / "pkernel_check.json").open("r", encoding="utf-8") as f:
        assert json.load(f)["ok"] is True
    assert len(read_manifest(tmp_path)["output_files"]) == 2


def test_pkernel_three_method_failure(tmp_path: Path, mocker: MockerFixture) -> None:
    report = ThreeMethodReport(
        P=TWO_PI,
        max_direct_cosh=1e-6,
        max_fourier_deviation=1e-5,
        mean_mode=1.0 / TWO_PI,
        monotone_ok=True,
        parity_ok=True,
    )
    mocker.patch("whitham.command_pkernel.three_method_report", return_value=report)
    code = run(
        ["--out-dir", str(tmp_path), "pkernel", "--period", "6.25", "--three-method"]
    )
    assert code == ExitCode.INVARIANT


def test_pkernel_bad_period(tmp_path: Path) -> None:
    argv = ["--out-dir", str(tmp_path), "pkernel", "--period", "-1"]
    assert run(argv) == ExitCode.USAGE


def test_bifurcate_subcritical(tmp_path: Path) -> None:
    assert run(["--out-dir", str(tmp_path), "bifurcate", "--xi", "1"]) == ExitCode.OK
    with (tmp_path / "expansion.json").open("r", encoding="utf-8") as f:
        expansion = json.load(f)
    assert expansion["mu2"] < 0.0
    assert set(expansion["phi4"]) == {"0", "2", "4"}


def test_bifurcate_find_critical(tmp_path: Path) -> None:
    code = run(
        ["--out-dir", str(tmp_path), "bifurcate", "--period", "2", "--find-critical"]
    )
    assert code == ExitCode.OK
    with (tmp_path / "expansion.json").open("r", encoding="utf-8") as f:
        expansion = json.load(f)
    assert expansion["mu2"] > 0.0
    assert 2.43 < expansion["critical"]["xi0"] < 2.45


def test_bifurcate_zero_wavenumber(tmp_path: Path) -> None:
    assert run(["--out-dir", str(tmp_path), "bifurcate", "--xi", "0"]) == ExitCode.USAGE


def test_bifurcate_needs_one_wavenumber(tmp_path: Path) -> None:
    argv = ["--out-dir", str(tmp_path), "bifurcate", "--xi", "1", "--period", "2"]
    assert run(argv) == ExitCode.USAGE


def test_numeric_failure_exit_code(tmp_path: Path, mocker: MockerFixture) -> None:
    mocker.patch(
        "whitham.command_bifurcate.expansion_coeffs", side_effect=NumericError("boom")
    )
    argv = ["--out-dir", str(tmp_path), "bifurcate", "--xi", "1"]
    assert run(argv) == ExitCode.NUMERIC


def test_unexpected_failure_exit_code(
    tmp_path: Path, mocker: MockerFixture, capsys: pytest.CaptureFixture[str]
) -> None:
    mocker.patch(
        "whitham.command_bifurcate.expansion_coeffs", side_effect=RuntimeError("boom")
    )
    argv = ["--out-dir", str(tmp_path), "bifurcate", "--xi", "1"]
    assert run(argv) == ExitCode.UNEXPECTED
    assert "Unexpected error: boom" in capsys.readouterr().err


def test_branch_run(tmp_path: Path, branch_config: Path) -> None:
    out_dir = tmp_path / "run"
    argv = ["--threads", "2", "--out-dir", str(out_dir)]
    argv += ["branch", "--config", str(branch_config)]
    assert run(argv) == ExitCode.OK

    lines = (out_dir / "branch.jsonl").read_text(encoding="utf-8").splitlines()
    records = [json.loads(line) for line in lines]
    assert [record["step"] for record in records] == [0, 1, 2, 3]
    for record in records:
        wave = PeriodicWave.from_json(out_dir / record["coeffs_file"])
        assert wave.mu == record["mu"]

    with (out_dir / "summary.json").open("r", encoding="utf-8") as f:
        summary = json.load(f)
    assert summary["stop_reason"] == "max_steps"
    assert summary["points"] == 4

    paths = {output["path"] for output in read_manifest(out_dir)["output_files"]}
    expected = {"branch.jsonl", "summary.json", "wave_00000.json", "wave_00003.json"}
    assert expected <= paths


def test_branch_missing_config(tmp_path: Path) -> None:
    missing = tmp_path / "missing.json"
    argv = ["--out-dir", str(tmp_path), "branch", "--config", str(missing)]
    assert run(argv) == ExitCode.USAGE


def test_branch_invalid_config(tmp_path: Path) -> None:
    config_file = tmp_path / "config.json"
    config_file.write_text(json.dumps({"N": 100}), encoding="utf-8")
    argv = ["--out-dir", str(tmp_path), "branch", "--config", str(config_file)]
    assert run(argv) == ExitCode.USAGE


def test_branch_integrity_failure(
    tmp_path: Path, branch_config: Path, mocker: MockerFixture
) -> None:
    def failing(wave, lam=None):
        return dataclasses.replace(run_diagnostics(wave, lam), bounds_ok=False)

    mocker.patch("whitham.waves.steady_solver.run_diagnostics", side_effect=failing)
    out_dir = tmp_path / "run"
    argv = ["--out-dir", str(out_dir), "branch", "--config", str(branch_config)]
    assert run(argv) == ExitCode.INVARIANT

    assert not (out_dir / "branch.jsonl").exists()
    assert (out_dir / "failed_wave_00000.json").is_file()
    paths = {output["path"] for output in read_manifest(out_dir)["output_files"]}
    assert paths == {"failed_wave_00000.json"}


def test_branch_integrity_failure_keeps_accepted_points(
    tmp_path: Path, branch_config: Path, mocker: MockerFixture
) -> None:
    calls = []

    def failing_third(wave, lam=None):
        calls.append(wave)
        diagnostics = run_diagnostics(wave, lam)
        if len(calls) == 3:
            return dataclasses.replace(diagnostics, bounds_ok=False)
        return diagnostics

    mocker.patch(
        "whitham.waves.steady_solver.run_diagnostics", side_effect=failing_third
    )
    out_dir = tmp_path / "run"
    argv = ["--out-dir", str(out_dir), "branch", "--config", str(branch_config)]
    assert run(argv) == ExitCode.INVARIANT

    lines = (out_dir / "branch.jsonl").read_text(encoding="utf-8").splitlines()
    assert [json.loads(line)["step"] for line in lines] == [0, 1]
    paths = {output["path"] for output in read_manifest(out_dir)["output_files"]}
    assert paths == {
        "branch.jsonl",
        "wave_00000.json",
        "wave_00001.json",
        "failed_wave_00002.json",
    }


def test_branch_log_grows_one_record_per_point(tmp_path: Path) -> None:
    cfg = ContinuationConfig.validated(P=TWO_PI, N=64, max_steps=2)
    seen = []

    with BranchLogWriter(tmp_path) as writer:

        def on_accept(point) -> None:
            writer(point)
            lines = writer.log_file.read_text(encoding="utf-8").splitlines()
            seen.append(lines)

        trace_branch(cfg, on_accept=on_accept)

    assert [len(lines) for lines in seen] == [1, 2, 3]
    assert seen[2][:2] == seen[1]
    assert writer.records == 3
    assert len(writer.files) == 3


@pytest.fixture
def converged_wave_file(tmp_path: Path) -> Path:
    grid = CosineGrid(P=TWO_PI, N=256)
    point = newton_correct(expansion_wave(1.0, 0.05, grid), FixS(0.05))
    wave_file = tmp_path / "wave.json"
    point.wave.to_json(wave_file)
    return wave_file


def test_analyze_converged_wave(tmp_path: Path, converged_wave_file: Path) -> None:
    out_dir = tmp_path / "analysis"
    argv = ["--out-dir", str(out_dir), "analyze", "--wave", str(converged_wave_file)]
    assert run(argv) == ExitCode.OK

    [row] = read_csv(out_dir / "cusp.csv")
    assert float(row["alpha_pointwise"]) == pytest.approx(2.0, abs=0.1)

    with (out_dir / "diagnostics.json").open("r", encoding="utf-8") as f:
        report = json.load(f)
    assert report["diagnostics"]["all_ok"] is True
    assert report["diagnostics"]["monotone_ok"] is True
    assert report["diagnostics"]["below_mu_half_ok"] is True
    assert report["lower_bound"]["ok"] is True
    assert report["cusp_fit"]["near_highest"] is False


def test_analyze_zero_wave(tmp_path: Path) -> None:
    wave_file = tmp_path / "zero.json"
    PeriodicWave.constant(CosineGrid(P=TWO_PI, N=64), 0.5).to_json(wave_file)
    argv = ["--out-dir", str(tmp_path), "analyze", "--wave", str(wave_file)]
    assert run(argv) == ExitCode.OK

    with (tmp_path / "diagnostics.json").open("r", encoding="utf-8") as f:
        report = json.load(f)
    assert report["diagnostics"]["mean_identity_residual"] == 0.0
    assert report["cusp_fit"] is None
    assert not (tmp_path / "cusp.csv").exists()


def test_analyze_corrupt_wave(tmp_path: Path) -> None:
    wave_file = tmp_path / "wave.json"
    wave_file.write_text("[1, 2", encoding="utf-8")
    argv = ["--out-dir", str(tmp_path), "analyze", "--wave", str(wave_file)]
    assert run(argv) == ExitCode.USAGE


def test_missing_command(tmp_path: Path) -> None:
    assert run(["--out-dir", str(tmp_path)]) == ExitCode.USAGE


def test_unknown_option() -> None:
    assert run(["kernel", "--bogus"]) == ExitCode.USAGE
