# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from __future__ import annotations

from enum import IntEnum, unique
from typing import TYPE_CHECKING, List, Optional

from whitham.config import ConfigErrorBase

if TYPE_CHECKING:
    from whitham.waves.cosine_grid import PeriodicWave
    from whitham.waves.steady_solver import BranchPoint

__all__ = [
    "WhithamErrorBase",
    "DomainError",
    "OutOfRangeError",
    "SingularPointError",
    "NumericError",
    "InternalConsistencyError",
    "DivergenceError",
    "FoldDetectedError",
    "ResolutionError",
    "BranchIntegrityError",
    "WaveFileError",
    "ExitCode",
    "exit_code_for",
]


class WhithamErrorBase(Exception):
    """Base exception for numerical and scientific failures."""

    pass


class DomainError(WhithamErrorBase, ValueError):
    """Raised when an argument lies outside the domain of an operation."""

    pass


class OutOfRangeError(DomainError):
    """Raised when a valid argument is outside the range a routine supports."""

    pass


class SingularPointError(DomainError):
    """Raised when evaluating a kernel at one of its singular points."""

    pass


class NumericError(WhithamErrorBase, ArithmeticError):
    """Raised when a computation produces a non-finite or inconsistent result."""

    pass


class InternalConsistencyError(NumericError):
    """Raised when an analytic sign condition fails at runtime."""

    pass


class DivergenceError(NumericError):
    """Raised when the Newton corrector does not converge.

    Attributes:
        last_iterate: The wave reached by the final Newton iteration
    """

    def __init__(self, message: str, last_iterate: Optional[PeriodicWave] = None):
        super().__init__(message)
        self.last_iterate = last_iterate


class FoldDetectedError(NumericError):
    """Raised when the bordered matrix is singular under a fixed wave speed."""

    pass


class ResolutionError(NumericError):
    """Raised when a fit window holds too few grid samples."""

    pass


class BranchIntegrityError(WhithamErrorBase):
    """Raised when a converged continuation point fails its diagnostics.

    Attributes:
        point: The offending branch point
        accepted: Points accepted before the failure, in branch order
    """

    def __init__(
        self,
        message: str,
        point: BranchPoint,
        accepted: Optional[List[BranchPoint]] = None,
    ):
        super().__init__(message)
        self.point = point
        self.accepted = accepted or []


class WaveFileError(WhithamErrorBase):
    """Raised when a wave file cannot be read or fails schema validation."""

    pass


@unique
class ExitCode(IntEnum):
    """Process exit codes of the command line."""

    OK = 0
    UNEXPECTED = 1
    USAGE = 2  # Bad arguments, config or wave file
    NUMERIC = 3  # Non-finite result, divergence, unresolvable fit
    INVARIANT = 4  # A scientific check failed on a converged result


def exit_code_for(err: BaseException) -> ExitCode:
    """Map an exception raised by a command to its exit code."""
    if isinstance(err, BranchIntegrityError):
        return ExitCode.INVARIANT
    if isinstance(
        err, (DomainError, WaveFileError, ConfigErrorBase, FileNotFoundError)
    ):
        return ExitCode.USAGE
    if isinstance(err, NumericError):
        return ExitCode.NUMERIC
    return ExitCode.UNEXPECTED
