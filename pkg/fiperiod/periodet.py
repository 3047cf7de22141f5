"""Empirical period detection for finite integer series.

A finite window can only be consistent with eventual periodicity: a period
is reported when it repeats at least ``min_margin`` full times after its
onset, and the report says so explicitly otherwise.
"""

from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np

from fiperiod import gfla
from fiperiod.errors import EmptySeriesError
from fiperiod.series import DimensionSeries

DEFAULT_MIN_MARGIN: int = 3

REPORT_SCHEMA: str = "fiperiod.period-report/1"


@dataclasses.dataclass(frozen=True)
class PeriodReport:
    """Result of :func:`detect_period`.

    :param period: Smallest period found, ``None`` when inconclusive.
    :param onset:  First level from which the period holds in the window.
    :param window: First and last level examined.
    :param margin: Full periods confirmed after the onset.

    """

    period: Optional[int]
    onset: Optional[int]
    window: tuple
    margin: int

    @property
    def inconclusive(self) -> bool:
        return self.period is None

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "period": "inconclusive" if self.period is None else self.period,
            "onset": self.onset,
            "window": list(self.window),
            "margin": self.margin,
        }


def _onset_index(values: np.ndarray, period: int) -> int:
    """Smallest index ``i0`` with ``values[i] == values[i + period]`` for all ``i >= i0``."""
    mismatches = np.flatnonzero(values[:-period] != values[period:])
    return 0 if mismatches.size == 0 else int(mismatches[-1]) + 1


def detect_period(series: DimensionSeries, min_margin: int = DEFAULT_MIN_MARGIN) -> PeriodReport:
    """Smallest in-window period and its onset.

    Candidates are tried in increasing order; the first whose tail after the
    onset spans at least ``min_margin`` periods is reported.

    Usage::

        >>> detect_period(DimensionSeries(1, (1, 0) * 5)).period
        2

    """
    if len(series) == 0:
        raise EmptySeriesError("Cannot detect the period of an empty series")
    if min_margin < 2:
        raise ValueError(f"The confirmation margin must be at least 2, got {min_margin}")

    values = np.asarray(series.values, dtype=np.int64)
    window = (series.start, series.stop)
    for period in range(1, len(values)):
        onset = _onset_index(values, period)
        margin = (len(values) - 1 - onset) // period
        if margin >= min_margin:
            return PeriodReport(period, series.start + onset, window, margin)
    return PeriodReport(None, None, window, 0)


def verify_minimality(report: PeriodReport, series: DimensionSeries) -> bool:
    """Rescans every smaller candidate from the reported onset; ``True`` if none repeats."""
    if report.inconclusive:
        raise ValueError("An inconclusive report has no period to verify")
    values = np.asarray(series.values, dtype=np.int64)[report.onset - series.start :]
    for candidate in range(1, report.period):
        if candidate < len(values) and np.array_equal(values[:-candidate], values[candidate:]):
            return False
    return True


def check_power_of_p(report: PeriodReport, p: int) -> bool:
    """Whether the period is ``p^k`` for some ``k >= 0``.

    Usage::

        >>> check_power_of_p(PeriodReport(4, 5, (5, 40), 8), 2)
        True

    """
    p = gfla.check_prime(p)
    if report.inconclusive:
        raise ValueError("An inconclusive report has no period to check")
    period = report.period
    while period % p == 0:
        period //= p
    return period == 1


def check_divides_bound(report: PeriodReport, p: int, exponent: int) -> bool:
    """Whether the period divides ``p^exponent``."""
    if exponent < 0:
        raise ValueError(f"Exponent must be nonnegative, got {exponent}")
    if report.inconclusive:
        raise ValueError("An inconclusive report has no period to check")
    return (gfla.check_prime(p) ** exponent) % report.period == 0
