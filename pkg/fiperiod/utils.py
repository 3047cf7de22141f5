import csv
import io
import json
from typing import TextIO, Tuple

from fiperiod.errors import SpecError
from fiperiod.series import DimensionSeries

CSV_HEADER: Tuple[str, str] = ("n", "value")

SERIES_SCHEMA: str = "fiperiod.series/1"


def parse_range(text: str) -> range:
    """Parses an inclusive level range.

    :params text: ``lo..hi`` with ``0 <= lo <= hi``.

    Usage::

        >>> parse_range("2..10")
        range(2, 11)

    """
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ValueError(f"Expected a range lo..hi, got {text!r}")
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise ValueError(f"Range bounds must be integers, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise ValueError(f"Range {text!r} is empty or negative")
    return range(lo, hi + 1)


def parse_degrees(text: str) -> Tuple[int, ...]:
    """``"1,3"`` -> ``(1, 3)``."""
    parts = [part.strip() for part in text.split(",") if part.strip()]
    if not parts:
        raise ValueError("Expected at least one degree")
    try:
        degrees = tuple(int(part) for part in parts)
    except ValueError:
        raise ValueError(f"Degrees must be integers, got {text!r}") from None
    if any(m < 0 for m in degrees):
        raise ValueError(f"Degrees must be nonnegative, got {text!r}")
    return degrees


def series_to_csv(series: DimensionSeries) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(series.items())
    return buffer.getvalue()


def series_to_json(series: DimensionSeries, quantity: str = "") -> str:
    body = {
        "schema": SERIES_SCHEMA,
        "label": series.label,
        "quantity": quantity,
        "rows": [{"n": n, "value": value} for n, value in series.items()],
    }
    return json.dumps(body, indent=2, sort_keys=True)


def read_series_csv(stream: TextIO) -> DimensionSeries:
    """Reads ``n,value`` rows with consecutive levels.

    Errors carry the CSV line number as their location.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(cell.strip() for cell in header) != CSV_HEADER:
        raise SpecError(f"expected the header {','.join(CSV_HEADER)}", "line 1")

    levels, values = [], []
    for row in reader:
        if not row:
            continue
        location = f"line {reader.line_num}"
        if len(row) != 2:
            raise SpecError("expected two cells", location)
        try:
            n, value = int(row[0]), int(row[1])
        except ValueError:
            raise SpecError(f"non-integer cell in {row}", location) from None
        if levels and n != levels[-1] + 1:
            raise SpecError(f"levels must be consecutive, got {n} after {levels[-1]}", location)
        levels.append(n)
        values.append(value)
    if not levels:
        raise SpecError("no data rows", "line 2")
    try:
        return DimensionSeries(levels[0], tuple(values))
    except ValueError as error:
        raise SpecError(str(error), "values") from error
