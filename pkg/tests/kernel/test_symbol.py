import math

import numpy as np
import pytest

from whitham.errors import DomainError
from whitham.kernel import SymbolValue, eval_g, eval_symbol, multipliers
from whitham.kernel.symbol import SMALL_XI_THRESHOLD


def test_symbol_at_zero_is_one() -> None:
    assert eval_symbol(0.0) == 1.0


@pytest.mark.parametrize("xi", [1e-3, 0.5, 1.0, 2.44, 10.0, 1e3])
def test_symbol_matches_definition(xi: float) -> None:
    assert eval_symbol(xi) == pytest.approx(math.sqrt(math.tanh(xi) / xi), rel=1e-15)


def test_symbol_is_even() -> None:
    xi = np.array([0.1, 1.0, 7.5])
    assert np.array_equal(eval_symbol(-xi), eval_symbol(xi))


def test_symbol_is_decreasing_on_positive_axis() -> None:
    values = eval_symbol(np.linspace(0.0, 50.0, 2001))
    assert np.all(np.diff(values) < 0.0)
    assert np.all((values > 0.0) & (values <= 1.0))


def test_symbol_is_continuous_across_small_branch() -> None:
    below = eval_symbol(np.nextafter(SMALL_XI_THRESHOLD, 0.0))
    above = eval_symbol(SMALL_XI_THRESHOLD)
    assert abs(below - above) < 1e-14


def test_symbol_large_xi_behaves_like_inverse_sqrt() -> None:
    xi = 1e6
    assert eval_symbol(xi) * math.sqrt(xi) == pytest.approx(1.0, rel=1e-15)


def test_symbol_array_shape_and_scalar_type() -> None:
    assert isinstance(eval_symbol(1.0), float)
    assert eval_symbol(np.ones((3, 4))).shape == (3, 4)


@pytest.mark.parametrize("xi", [math.nan, math.inf, -math.inf])
def test_symbol_rejects_non_finite(xi: float) -> None:
    with pytest.raises(DomainError):
        eval_symbol(xi)


def test_symbol_value_record() -> None:
    value = SymbolValue.at(1.0)
    assert value.xi == 1.0
    assert value.value == eval_symbol(1.0)


def test_g_is_symbol_of_square_root() -> None:
    assert eval_g(4.0) == eval_symbol(2.0)
    assert eval_g(0.0) == 1.0


@pytest.mark.parametrize("lam", [-1e-12, math.nan, math.inf])
def test_g_rejects_invalid_lambda(lam: float) -> None:
    with pytest.raises(DomainError):
        eval_g(lam)


def test_multipliers() -> None:
    P = 2.0 * math.pi
    m = multipliers(P, 16)
    assert m.shape == (17,)
    assert m[0] == 1.0
    assert m[3] == pytest.approx(eval_symbol(3.0), rel=1e-15)


@pytest.mark.parametrize("P, N", [(0.0, 8), (-1.0, 8), (1.0, 0)])
def test_multipliers_reject_invalid_arguments(P: float, N: int) -> None:
    with pytest.raises(DomainError):
        multipliers(P, N)
