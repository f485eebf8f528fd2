# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from whitham.waves.bifurcation import (
    BifurcationExpansion,
    CriticalWavenumber,
    bifurcation_point,
    expansion_coeffs,
    expansion_wave,
    find_xi0,
)
from whitham.waves.cosine_grid import CosineGrid, PeriodicWave
from whitham.waves.diagnostics import Diagnostics, lambda_bound, run_diagnostics
from whitham.waves.regularity import (
    CuspFit,
    LowerBoundReport,
    fit_cusp,
    lower_bound_check,
)
from whitham.waves.spectral_operator import (
    Representation,
    apply_L,
    apply_L_quadrature,
    differentiate,
    jacobian,
    residual,
)
from whitham.waves.steady_solver import (
    Arclength,
    BranchPoint,
    BranchTrace,
    FixMu,
    FixS,
    FoldEvent,
    galilean_map,
    newton_correct,
    trace_branch,
)

__all__ = [
    "Arclength",
    "BifurcationExpansion",
    "BranchPoint",
    "BranchTrace",
    "CosineGrid",
    "CriticalWavenumber",
    "CuspFit",
    "Diagnostics",
    "FixMu",
    "FixS",
    "FoldEvent",
    "LowerBoundReport",
    "PeriodicWave",
    "Representation",
    "apply_L",
    "apply_L_quadrature",
    "bifurcation_point",
    "differentiate",
    "expansion_coeffs",
    "expansion_wave",
    "find_xi0",
    "fit_cusp",
    "galilean_map",
    "jacobian",
    "lambda_bound",
    "lower_bound_check",
    "newton_correct",
    "residual",
    "run_diagnostics",
    "trace_branch",
]
