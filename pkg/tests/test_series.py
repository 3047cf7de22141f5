import pytest

from fiperiod.errors import WindowTooShortError
from fiperiod.series import DimensionSeries, fit_polynomial


def test_series_accessors():
    series = DimensionSeries(2, (1, 0, 1, 0))
    assert series.stop == 5
    assert series.value(4) == 1
    assert series.items() == [(2, 1), (3, 0), (4, 1), (5, 0)]
    assert series.restrict(3, 10).values == (0, 1, 0)
    with pytest.raises(IndexError):
        series.value(6)


def test_series_rejects_bad_input():
    with pytest.raises(ValueError):
        DimensionSeries(0, (1, -1))
    with pytest.raises(ValueError):
        DimensionSeries(0, (1,), label="guessed")


def test_fit_recovers_quadratic():
    series = DimensionSeries(0, tuple(n * (n - 1) for n in range(8)))
    fit = fit_polynomial(series, 2)
    assert fit.degree == 2
    assert fit(10) == 90


def test_fit_degree_of_linear_series():
    fit = fit_polynomial(DimensionSeries(1, (0, 1, 2, 3, 4, 5)), 3)
    assert fit.degree == 1


def test_fit_of_zero_series_has_degree_zero():
    assert fit_polynomial(DimensionSeries(0, (0,) * 5), 2).degree == 0


def test_fit_fails_on_periodic_series():
    assert fit_polynomial(DimensionSeries(0, (1, 2) * 5), 2) is None


def test_fit_uses_only_the_tail():
    values = (7, 3) + tuple(2 * n for n in range(2, 10))
    series = DimensionSeries(0, values)
    assert fit_polynomial(series, 1) is None
    assert fit_polynomial(series, 1, tail=8).degree == 1


def test_fit_needs_enough_points():
    with pytest.raises(WindowTooShortError):
        fit_polynomial(DimensionSeries(0, (1, 2, 3)), 2)
