from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np
import numpy.typing as npt

from whitham.errors import DomainError

__all__ = [
    "MonotonicityReport",
    "OrderCheck",
    "divided_difference_report",
    "divided_differences",
]


@dataclass(frozen=True)
class OrderCheck:
    """Sign check of the divided differences of one order.

    Attributes:
        order: Divided-difference order n
        expected_sign: (-1)^n
        min_margin: Smallest value of expected_sign * f[x_i, ..., x_{i+n}]
            over all windows; positive means strict alternation
        windows: Number of windows of n + 1 consecutive points
        interval: (x_lo, x_hi) covered by the grid
    """

    order: int
    expected_sign: int
    min_margin: float
    windows: int
    interval: Tuple[float, float]

    @property
    def ok(self) -> bool:
        return self.min_margin > 0.0


@dataclass(frozen=True)
class MonotonicityReport:
    checks: Tuple[OrderCheck, ...]

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    @property
    def min_margin(self) -> float:
        return min(check.min_margin for check in self.checks)

    def check(self, order: int) -> OrderCheck:
        for check in self.checks:
            if check.order == order:
                return check
        raise KeyError(order)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {
                    "order": check.order,
                    "expected_sign": check.expected_sign,
                    "min_margin": check.min_margin,
                    "windows": check.windows,
                    "interval": list(check.interval),
                    "ok": check.ok,
                }
                for check in self.checks
            ],
        }


def divided_differences(
    points: npt.NDArray[np.float64], values: npt.NDArray[np.float64], order: int
) -> npt.NDArray[np.float64]:
    """f[x_i, ..., x_{i+order}] for every window of consecutive points."""
    table = np.asarray(values, dtype=np.float64).copy()
    for k in range(1, order + 1):
        table = (table[1:] - table[:-1]) / (points[k:] - points[:-k])
    return table


def divided_difference_report(
    points: npt.NDArray[np.float64],
    values: npt.NDArray[np.float64],
    orders: Iterable[int],
) -> MonotonicityReport:
    """
    Check that the n-th divided differences have sign (-1)^n.

    Raises:
        DomainError: If the grid is too short for the highest order
    """
    checks: List[OrderCheck] = []
    interval = (float(points[0]), float(points[-1]))
    for order in orders:
        if points.size < order + 1:
            raise DomainError(
                f"Order {order} needs {order + 1} points, got {points.size}"
            )
        sign = -1 if order % 2 else 1
        table = divided_differences(points, values, order)
        checks.append(
            OrderCheck(
                order=order,
                expected_sign=sign,
                min_margin=float(np.min(sign * table)),
                windows=int(table.size),
                interval=interval,
            )
        )
    return MonotonicityReport(checks=tuple(checks))
