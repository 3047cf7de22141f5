"""Integer series indexed by a contiguous range of levels ``n``."""

from __future__ import annotations

import dataclasses
from typing import List, Optional, Tuple

import sympy

from fiperiod.errors import WindowTooShortError

LABELS = ("computed", "oracle")


@dataclasses.dataclass(frozen=True)
class DimensionSeries:
    """Values ``s(start), s(start + 1), ...`` with their provenance.

    :param start:  First level of the series.
    :param values: Nonnegative integers, one per level.
    :param label:  ``computed`` or ``oracle``.

    Usage::

        >>> series = DimensionSeries(2, (1, 0, 1))
        >>> series.value(4)
        1

    """

    start: int
    values: Tuple[int, ...]
    label: str = "computed"

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if any(v < 0 for v in values):
            raise ValueError("Series values must be nonnegative")
        if self.label not in LABELS:
            raise ValueError(f"Unknown series label {self.label!r}, expected one of {LABELS}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "start", int(self.start))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def stop(self) -> int:
        """Last level of the series."""
        return self.start + len(self.values) - 1

    @property
    def levels(self) -> range:
        return range(self.start, self.start + len(self.values))

    def value(self, n: int) -> int:
        if n not in self.levels:
            raise IndexError(f"Level {n} outside [{self.start}, {self.stop}]")
        return self.values[n - self.start]

    def items(self) -> List[Tuple[int, int]]:
        return list(zip(self.levels, self.values))

    def restrict(self, lo: int, hi: int) -> "DimensionSeries":
        lo, hi = max(lo, self.start), min(hi, self.stop)
        return DimensionSeries(lo, self.values[lo - self.start : hi - self.start + 1], self.label)


@dataclasses.dataclass(frozen=True)
class PolynomialFit:
    polynomial: sympy.Poly

    @property
    def degree(self) -> int:
        """Euler degree of the fitted series; the zero polynomial counts as degree 0."""
        if self.polynomial.is_zero:
            return 0
        return int(self.polynomial.degree())

    @property
    def expression(self) -> sympy.Expr:
        return self.polynomial.as_expr()

    def __call__(self, n: int) -> int:
        return int(self.polynomial.eval(n))


def fit_polynomial(
    series: DimensionSeries, max_degree: int, tail: Optional[int] = None
) -> Optional[PolynomialFit]:
    """Fits a polynomial of degree at most ``max_degree`` to the tail of ``series``.

    The interpolant through the last ``max_degree + 1`` points is checked
    against every point of the tail (the last ``tail`` points, by default the
    whole series). Returns ``None`` when the check fails.

    :raises WindowTooShortError: if the tail has fewer than ``max_degree + 2`` points.
    """
    if max_degree < 0:
        raise ValueError(f"Degree bound must be nonnegative, got {max_degree}")
    window = len(series) if tail is None else tail
    if window > len(series) or window < max_degree + 2:
        raise WindowTooShortError(
            f"Fitting degree <= {max_degree} needs a tail of at least {max_degree + 2} "
            f"points, got {min(window, len(series))}"
        )

    points = series.items()[-window:]
    n = sympy.Symbol("n")
    interpolant = sympy.interpolate(points[-(max_degree + 1) :], n)
    polynomial = sympy.Poly(sympy.expand(interpolant), n)
    if any(polynomial.eval(level) != value for level, value in points):
        return None
    return PolynomialFit(polynomial)
