# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

from whitham.kernel.monotonicity import MonotonicityReport, OrderCheck
from whitham.kernel.periodic_kernel import (
    FourierCheckReport,
    ParityComparisonReport,
    PeriodicKernelMethod,
    PeriodicKernelValue,
    PeriodicMonotonicityReport,
    parity_comparison_report,
    pkernel_cosh,
    pkernel_derivative,
    pkernel_direct,
    pkernel_fourier_check,
    pkernel_monotonicity_report,
    pkernel_values,
)
from whitham.kernel.symbol import SymbolValue, eval_g, eval_symbol, multipliers
from whitham.kernel.whitham_kernel import (
    X_MIN,
    KernelMethod,
    KernelValue,
    SingularSplit,
    check_complete_monotone,
    kernel_asymptotic,
    kernel_derivative,
    kernel_mass,
    kernel_series,
    kernel_split,
    kernel_value,
    kernel_values,
)

__all__ = [
    "FourierCheckReport",
    "KernelMethod",
    "KernelValue",
    "MonotonicityReport",
    "OrderCheck",
    "ParityComparisonReport",
    "PeriodicKernelMethod",
    "PeriodicKernelValue",
    "PeriodicMonotonicityReport",
    "SingularSplit",
    "SymbolValue",
    "X_MIN",
    "check_complete_monotone",
    "eval_g",
    "eval_symbol",
    "kernel_asymptotic",
    "kernel_derivative",
    "kernel_mass",
    "kernel_series",
    "kernel_split",
    "kernel_value",
    "kernel_values",
    "multipliers",
    "parity_comparison_report",
    "pkernel_cosh",
    "pkernel_derivative",
    "pkernel_direct",
    "pkernel_fourier_check",
    "pkernel_monotonicity_report",
    "pkernel_values",
]
