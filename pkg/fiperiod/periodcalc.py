"""Combinatorial bounds on cohomology periods and stable ranges.

A cover is the ordered tuple of generator degrees of a filtered FI-module.
Period profiles attach an exponent to every cover generator; the operators
below refine, transport and combine them. The page recursions turn a whole
resolution shape into a period exponent ``M`` and a stable range ``SD``.

Indices of cover generators are 1-based throughout, as are wiring pairs.
"""

from __future__ import annotations

import dataclasses
import json
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from sympy.ntheory.factor_ import multiplicity_in_factorial

from fiperiod import gfla
from fiperiod.errors import CoverMismatchError, IncompleteShapeError, SpecError


@dataclasses.dataclass(frozen=True)
class CoverShape:
    """Ordered degrees ``(m_1, ..., m_d)``; reordering changes every bound."""

    p: int
    degrees: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", gfla.check_prime(self.p))
        degrees = tuple(int(m) for m in self.degrees)
        if not degrees:
            raise ValueError("A cover needs at least one generator")
        if any(m < 0 for m in degrees):
            raise ValueError(f"Cover degrees must be nonnegative, got {degrees}")
        object.__setattr__(self, "degrees", degrees)

    @classmethod
    def parse(cls, text: str, p: int) -> "CoverShape":
        """``"0,5"`` -> ``CoverShape(p, (0, 5))``."""
        try:
            degrees = tuple(int(part) for part in text.split(",") if part.strip())
        except ValueError as error:
            raise ValueError(f"Malformed cover {text!r}") from error
        return cls(p, degrees)

    @property
    def d(self) -> int:
        return len(self.degrees)

    @property
    def D(self) -> int:
        return max(self.degrees)


@dataclasses.dataclass(frozen=True)
class PeriodProfile:
    cover: CoverShape
    exponents: Tuple[int, ...]

    def __post_init__(self):
        exponents = tuple(int(h) for h in self.exponents)
        if len(exponents) != self.cover.d:
            raise ValueError(f"Profile of length {len(exponents)} on a cover of length {self.cover.d}")
        if any(h < 0 for h in exponents):
            raise ValueError(f"Exponents must be nonnegative, got {exponents}")
        object.__setattr__(self, "exponents", exponents)

    @classmethod
    def zero(cls, cover: CoverShape) -> "PeriodProfile":
        return cls(cover, (0,) * cover.d)


@dataclasses.dataclass(frozen=True)
class SequentialWiring:
    """Degree preserving partial bijection from source to target cover generators."""

    source_cover: CoverShape
    target_cover: CoverShape
    pairing: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.source_cover.p != self.target_cover.p:
            raise ValueError("Wired covers must share the prime")
        pairing = tuple(sorted((int(s), int(t)) for s, t in self.pairing))
        sources = [s for s, _ in pairing]
        targets = [t for _, t in pairing]
        if len(set(sources)) != len(sources) or len(set(targets)) != len(targets):
            raise ValueError(f"Pairing {pairing} is not injective")
        for s, t in pairing:
            if not 1 <= s <= self.source_cover.d or not 1 <= t <= self.target_cover.d:
                raise ValueError(f"Pair ({s}, {t}) outside the covers")
            if self.source_cover.degrees[s - 1] != self.target_cover.degrees[t - 1]:
                raise ValueError(f"Pair ({s}, {t}) joins generators of different degrees")
        object.__setattr__(self, "pairing", pairing)

    @classmethod
    def identity(cls, cover: CoverShape) -> "SequentialWiring":
        return cls(cover, cover, tuple((i, i) for i in range(1, cover.d + 1)))


def delta_h(b1: int, b2: int, p: int) -> int:
    """``v_p((b1 - b2)!) + 1`` if ``b1 > b2``, else 0."""
    if b1 < 0 or b2 < 0:
        raise ValueError(f"Degrees must be nonnegative, got {b1}, {b2}")
    if b1 <= b2:
        return 0
    return int(multiplicity_in_factorial(gfla.check_prime(p), b1 - b2)) + 1


def refine_profile(q: PeriodProfile) -> Dict[Tuple[int, int], int]:
    """The triangle ``H[i, r]`` for ``1 <= i <= r <= d`` with ``H[i, d]`` the input.

    Going down in ``r``, ``H[i, r-1] = max(H[i, r], H[r, r] + dH(m_r, m_i))``
    when ``m_r >= m_i`` and ``H[i, r-1] = H[i, r]`` otherwise.
    """
    degrees, p, d = q.cover.degrees, q.cover.p, q.cover.d
    triangle = {(i, d): h for i, h in enumerate(q.exponents, start=1)}
    for r in range(d, 1, -1):
        m_r = degrees[r - 1]
        for i in range(1, r):
            m_i = degrees[i - 1]
            value = triangle[(i, r)]
            if m_r >= m_i:
                value = max(value, triangle[(r, r)] + delta_h(m_r, m_i, p))
            triangle[(i, r - 1)] = value
    return triangle


def op_D(q: PeriodProfile) -> PeriodProfile:
    triangle = refine_profile(q)
    return PeriodProfile(q.cover, tuple(triangle[(i, i)] for i in range(1, q.cover.d + 1)))


def op_Dr(q: PeriodProfile, r: int) -> PeriodProfile:
    """``(H[i, r])_{i <= r}`` on the first ``r`` generators of the cover."""
    if not 1 <= r <= q.cover.d:
        raise ValueError(f"Need 1 <= r <= {q.cover.d}, got {r}")
    triangle = refine_profile(q)
    cover = CoverShape(q.cover.p, q.cover.degrees[:r])
    return PeriodProfile(cover, tuple(triangle[(i, r)] for i in range(1, r + 1)))


def op_I(q: PeriodProfile) -> int:
    """``max_i (H[i, i] + dH(m_i, 0))``."""
    triangle = refine_profile(q)
    p = q.cover.p
    return max(
        triangle[(i, i)] + delta_h(m, 0, p) for i, m in enumerate(q.cover.degrees, start=1)
    )


def phi_star(q: PeriodProfile, wiring: SequentialWiring) -> PeriodProfile:
    """Moves exponents along the pairing; unpaired target generators get 0."""
    if q.cover != wiring.source_cover:
        raise CoverMismatchError(f"Profile on {q.cover} fed to a wiring from {wiring.source_cover}")
    exponents = [0] * wiring.target_cover.d
    for s, t in wiring.pairing:
        exponents[t - 1] = q.exponents[s - 1]
    return PeriodProfile(wiring.target_cover, tuple(exponents))


def gcd_profiles(q0: PeriodProfile, q1: PeriodProfile) -> PeriodProfile:
    """Componentwise maximum: the profile of the gcd of the two periods."""
    if q0.cover != q1.cover:
        raise CoverMismatchError(f"Profiles on different covers {q0.cover} and {q1.cover}")
    return PeriodProfile(q0.cover, tuple(max(a, b) for a, b in zip(q0.exponents, q1.exponents)))


class FilteredBounds(NamedTuple):
    exponent: int
    stable_range: int


def filtered_bounds(cover: CoverShape, t: int) -> FilteredBounds:
    """Period ``p^exponent`` and stable range of ``H^t`` for a filtered module on ``cover``.

    Usage::

        >>> filtered_bounds(CoverShape(2, (0, 5)), 0)
        FilteredBounds(exponent=4, stable_range=7)

    """
    if t < 0:
        raise ValueError(f"Degree must be nonnegative, got {t}")
    exponent = op_I(op_D(PeriodProfile.zero(cover)))
    return FilteredBounds(exponent, 2 * (t + cover.d - 1) + cover.D)


@dataclasses.dataclass(frozen=True)
class BoundCheck:
    limit_I: int
    limits_D: Tuple[int, ...]
    limit_ID: int
    value_I: int
    values_D: Tuple[int, ...]
    value_ID: int

    @property
    def satisfied(self) -> bool:
        return (
            self.value_I <= self.limit_I
            and all(v <= limit for v, limit in zip(self.values_D, self.limits_D))
            and self.value_ID <= self.limit_ID
        )


def bound_boundonM(q: PeriodProfile) -> BoundCheck:
    """Checks ``I(q) <= D1 + D``, ``D(q)_i <= D1 + D - m_i`` and ``I(D(q)) <= D1 + 2D``.

    ``D1`` is the largest exponent of ``q`` and ``D`` the largest cover degree.
    """
    d1, big_d = max(q.exponents), q.cover.D
    refined = op_D(q)
    return BoundCheck(
        limit_I=d1 + big_d,
        limits_D=tuple(d1 + big_d - m for m in q.cover.degrees),
        limit_ID=d1 + 2 * big_d,
        value_I=op_I(q),
        values_D=refined.exponents,
        value_ID=op_I(refined),
    )


@dataclasses.dataclass(frozen=True)
class ColumnShape:
    """Column ``x`` of a resolution shape.

    :param rows:              Covers of the rows ``u = 0, 1, ...``.
    :param inner:             Wirings from row ``u`` to row ``u + 1``.
    :param onset:             Exactness onset ``C_x``, ``None`` when unknown.
    :param generation_degree: ``D_x``; defaults to the largest degree of row 0.

    """

    rows: Tuple[CoverShape, ...]
    inner: Tuple[SequentialWiring, ...] = ()
    onset: Optional[int] = None
    generation_degree: Optional[int] = None

    def __post_init__(self):
        rows = tuple(self.rows)
        if not rows:
            raise ValueError("A column needs at least one row")
        inner = tuple(self.inner)
        if len(inner) > len(rows) - 1:
            raise ValueError(f"{len(inner)} inner wirings for {len(rows)} rows")
        for u, wiring in enumerate(inner):
            if wiring.source_cover != rows[u] or wiring.target_cover != rows[u + 1]:
                raise CoverMismatchError(f"Inner wiring {u} does not join rows {u} and {u + 1}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "inner", inner)

    @property
    def cover(self) -> CoverShape:
        return self.rows[0]

    @property
    def d(self) -> int:
        return self.rows[0].d

    @property
    def D(self) -> int:
        if self.generation_degree is not None:
            return self.generation_degree
        return self.rows[0].D

    def inner_wiring(self, u: int) -> SequentialWiring:
        if u >= len(self.inner):
            raise IncompleteShapeError(f"Column has no wiring from row {u} to row {u + 1}")
        return self.inner[u]


@dataclasses.dataclass(frozen=True)
class HorizontalWiring:
    """Wirings from column ``x`` to column ``x + 1``, one per row, row 0 first."""

    rows: Tuple[SequentialWiring, ...]


@dataclasses.dataclass(frozen=True)
class ResolutionShape:
    """Cover data of a resolution, columns ``x = 0..N``.

    When the generation degree ``D`` of the resolved module is known, column
    ``x`` must be generated in degree at most ``D - x``.

    Usage::

        >>> shape = ResolutionShape.from_dict(
        ...     {"p": 2, "columns": [{"rows": [{"degrees": [3]}], "C": None}], "wiring": []}
        ... )
        >>> resolution_recursion(shape, 1).M_inf
        6

    """

    p: int
    columns: Tuple[ColumnShape, ...]
    wiring: Tuple[HorizontalWiring, ...] = ()
    module_degree: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "p", gfla.check_prime(self.p))
        columns, wiring = tuple(self.columns), tuple(self.wiring)
        if not columns:
            raise ValueError("A resolution shape needs at least one column")
        if len(wiring) > len(columns) - 1:
            raise ValueError(f"{len(wiring)} wirings for {len(columns)} columns")
        for x, horizontal in enumerate(wiring):
            for u, row in enumerate(horizontal.rows):
                source, target = columns[x], columns[x + 1]
                if u >= len(source.rows) or u >= len(target.rows):
                    raise CoverMismatchError(f"Wiring {x} names row {u}, absent in a column")
                if row.source_cover != source.rows[u] or row.target_cover != target.rows[u]:
                    raise CoverMismatchError(f"Wiring {x} row {u} does not join the column covers")
        if self.module_degree is not None:
            for x, column in enumerate(columns):
                if column.D > self.module_degree - x:
                    raise ValueError(f"Column {x} generated in degree {column.D} > D - x = {self.module_degree - x}")
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "wiring", wiring)

    @property
    def N(self) -> int:
        return len(self.columns) - 1

    def in_range(self, x: int, y: int) -> bool:
        return 0 <= x <= self.N and y >= 0

    def horizontal(self, x: int, u: int = 0) -> Optional[SequentialWiring]:
        """Wiring of row ``u`` from column ``x`` to ``x + 1``; ``None`` maps row ``u`` to zero."""
        if x >= len(self.wiring):
            raise IncompleteShapeError(f"No wiring from column {x} to column {x + 1}")
        rows = self.wiring[x].rows
        if u == 0 and not rows:
            raise IncompleteShapeError(f"Wiring from column {x} lacks row 0")
        return rows[u] if u < len(rows) else None

    def column_resolution(self, x: int) -> "ResolutionShape":
        """The rows of column ``x`` as a one-row-per-column shape."""
        column = self.columns[x]
        return ResolutionShape(
            self.p,
            tuple(ColumnShape((row,)) for row in column.rows),
            tuple(HorizontalWiring((wiring,)) for wiring in column.inner),
        )

    @property
    def onset(self) -> Optional[int]:
        """``max C_x``, or ``None`` if some onset is unknown."""
        onsets = [column.onset for column in self.columns]
        if any(c is None for c in onsets):
            return None
        return max(onsets)

    @classmethod
    def from_json(cls, text: str) -> "ResolutionShape":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as error:
            raise SpecError(error.msg, f"line {error.lineno} column {error.colno}") from error
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data) -> "ResolutionShape":
        if not isinstance(data, dict):
            raise SpecError("expected an object", "<root>")
        p = data.get("p")
        if isinstance(p, bool) or not isinstance(p, int):
            raise SpecError("expected an integer prime", "p")
        try:
            gfla.check_prime(p)
        except ValueError as error:
            raise SpecError(str(error), "p") from error

        raw_columns = data.get("columns")
        if not isinstance(raw_columns, list) or not raw_columns:
            raise SpecError("expected a nonempty list", "columns")
        columns = [_column_from_dict(p, item, f"columns[{x}]") for x, item in enumerate(raw_columns)]

        module_degree = data.get("D")
        if module_degree is not None:
            if isinstance(module_degree, bool) or not isinstance(module_degree, int) or module_degree < 0:
                raise SpecError("expected null or a nonnegative integer", "D")
            for x, column in enumerate(columns):
                if column.D > module_degree - x:
                    if column.generation_degree is not None:
                        field = "Dx"
                    else:
                        field = "rows[0].degrees" if "rows" in raw_columns[x] else "degrees"
                    raise SpecError(
                        f"generated in degree {column.D}, above D - x = {module_degree - x}", f"columns[{x}].{field}"
                    )

        raw_wiring = data.get("wiring", [])
        if not isinstance(raw_wiring, list):
            raise SpecError("expected a list", "wiring")
        if len(raw_wiring) > len(columns) - 1:
            raise SpecError(f"{len(raw_wiring)} wirings for {len(columns)} columns", "wiring")
        wiring = []
        for x, item in enumerate(raw_wiring):
            path = f"wiring[{x}]"
            if not isinstance(item, dict):
                raise SpecError("expected an object", path)
            row_items = item["rows"] if "rows" in item else [item]
            if not isinstance(row_items, list):
                raise SpecError("expected a list", f"{path}.rows")
            rows = []
            for u, row_item in enumerate(row_items):
                row_path = f"{path}.rows[{u}]" if "rows" in item else path
                source, target = columns[x], columns[x + 1]
                if u >= len(source.rows) or u >= len(target.rows):
                    raise SpecError(f"row {u} is absent in column {x} or {x + 1}", row_path)
                rows.append(_wiring_from_dict(source.rows[u], target.rows[u], row_item, row_path))
            wiring.append(HorizontalWiring(tuple(rows)))
        return cls(p, tuple(columns), tuple(wiring), module_degree)


def _cover_from_dict(p: int, data, path: str) -> CoverShape:
    degrees = data.get("degrees") if isinstance(data, dict) else None
    if not isinstance(degrees, list) or not all(isinstance(m, int) and not isinstance(m, bool) for m in degrees):
        raise SpecError("expected a list of integer degrees", f"{path}.degrees")
    try:
        return CoverShape(p, tuple(degrees))
    except ValueError as error:
        raise SpecError(str(error), f"{path}.degrees") from error


def _wiring_from_dict(source: CoverShape, target: CoverShape, data, path: str) -> SequentialWiring:
    pairs = data.get("pairs", []) if isinstance(data, dict) else None
    if not isinstance(pairs, list) or not all(
        isinstance(pair, list) and len(pair) == 2 and all(isinstance(v, int) for v in pair) for pair in pairs
    ):
        raise SpecError("expected a list of [source, target] pairs", f"{path}.pairs")
    try:
        return SequentialWiring(source, target, tuple(tuple(pair) for pair in pairs))
    except ValueError as error:
        raise SpecError(str(error), f"{path}.pairs") from error


def _column_from_dict(p: int, data, path: str) -> ColumnShape:
    if not isinstance(data, dict):
        raise SpecError("expected an object", path)
    if "rows" in data:
        if not isinstance(data["rows"], list) or not data["rows"]:
            raise SpecError("expected a nonempty list", f"{path}.rows")
        rows = [_cover_from_dict(p, row, f"{path}.rows[{u}]") for u, row in enumerate(data["rows"])]
    else:
        rows = [_cover_from_dict(p, data, path)]

    onset = data.get("C")
    if onset is not None and (isinstance(onset, bool) or not isinstance(onset, int) or onset < 0):
        raise SpecError("expected null or a nonnegative integer", f"{path}.C")
    generation_degree = data.get("Dx")
    if generation_degree is not None and (
        isinstance(generation_degree, bool) or not isinstance(generation_degree, int) or generation_degree < 0
    ):
        raise SpecError("expected null or a nonnegative integer", f"{path}.Dx")

    raw_inner = data.get("inner", [])
    if not isinstance(raw_inner, list) or len(raw_inner) > len(rows) - 1:
        raise SpecError(f"expected at most {len(rows) - 1} wirings", f"{path}.inner")
    inner = [
        _wiring_from_dict(rows[u], rows[u + 1], item, f"{path}.inner[{u}]") for u, item in enumerate(raw_inner)
    ]
    return ColumnShape(tuple(rows), tuple(inner), onset, generation_degree)


class _PageRecursion(object):
    """Memoized page recursion shared by the scalar and vector variants.

    ``M[x, y, r+1]`` is the maximum over the present entries among
    ``M[x, y, r]``, ``M[x-r, y+r-1, r]``, ``M[x+r, y-r+1, r]``,
    ``N[x, y, r]`` and ``N[x-r, y+r-1, r]``; ``SD`` follows the same pattern
    without the ``N`` terms. ``N[x, y, r]`` is present only when its target
    cell ``(x+r, y-r+1)`` is in range.
    """

    def __init__(self, shape: ResolutionShape):
        self.shape = shape
        self._m = {}
        self._sd = {}
        self._n = {}

    def base_m(self, x, y) -> int:
        raise NotImplementedError

    def base_sd(self, x, y) -> int:
        raise NotImplementedError

    def chain_value(self, x, y, r) -> int:
        raise NotImplementedError

    def neighbours(self, x, y, r):
        cells = [(x, y)]
        if self.shape.in_range(x - r, y + r - 1):
            cells.append((x - r, y + r - 1))
        if self.shape.in_range(x + r, y - r + 1):
            cells.append((x + r, y - r + 1))
        return cells

    def n(self, x, y, r) -> Optional[int]:
        if not self.shape.in_range(x, y) or not self.shape.in_range(x + r, y - r + 1):
            return None
        key = (x, y, r)
        if key not in self._n:
            self._n[key] = self.chain_value(x, y, r)
        return self._n[key]

    def m(self, x, y, r) -> int:
        key = (x, y, r)
        if key not in self._m:
            if r == 1:
                value = self.base_m(x, y)
            else:
                page = r - 1
                values = [self.m(cx, cy, page) for cx, cy in self.neighbours(x, y, page)]
                for cx, cy in ((x, y), (x - page, y + page - 1)):
                    chain = self.n(cx, cy, page)
                    if chain is not None:
                        values.append(chain)
                value = max(values)
            self._m[key] = value
        return self._m[key]

    def sd(self, x, y, r) -> int:
        key = (x, y, r)
        if key not in self._sd:
            if r == 1:
                value = self.base_sd(x, y)
            else:
                page = r - 1
                value = max(self.sd(cx, cy, page) for cx, cy in self.neighbours(x, y, page))
            self._sd[key] = value
        return self._sd[key]

    def finals(self, t: int) -> Tuple[int, int]:
        """Maxima over ``x + y = t`` and pages ``r <= t + 2``."""
        cells = [(x, t - x) for x in range(0, min(self.shape.N, t) + 1)]
        pages = range(1, t + 3)
        return (
            max(self.m(x, y, r) for x, y in cells for r in pages),
            max(self.sd(x, y, r) for x, y in cells for r in pages),
        )


class _ScalarRecursion(_PageRecursion):
    def __init__(self, shape: ResolutionShape):
        super().__init__(shape)
        self._chains: Dict[int, List[int]] = {}
        self._profiles: Dict[int, PeriodProfile] = {}

    def base_m(self, x, y):
        return 2 * self.shape.columns[x].D

    def base_sd(self, x, y):
        column = self.shape.columns[x]
        return 2 * (y + column.d - 1) + column.D

    def _chain(self, x: int, length: int) -> List[int]:
        """``[I(0 on column x), I(phi^x Q_0), I(phi^{x+1} Q_1), ...]`` up to ``length`` links."""
        if x not in self._chains:
            zero = PeriodProfile.zero(self.shape.columns[x].cover)
            self._chains[x] = [op_I(zero)]
            self._profiles[x] = op_D(zero)
        chain = self._chains[x]
        while len(chain) < length + 1:
            i = len(chain) - 1
            moved = phi_star(self._profiles[x], self.shape.horizontal(x + i))
            chain.append(op_I(moved))
            self._profiles[x] = op_D(moved)
        return chain

    def chain_value(self, x, y, r):
        return max(self._chain(x, r)[: r + 1])


class _VectorRecursion(_PageRecursion):
    def __init__(self, shape: ResolutionShape):
        super().__init__(shape)
        self._inner = {}

    def _inner_finals(self, x, y):
        key = (x, y)
        if key not in self._inner:
            self._inner[key] = _ScalarRecursion(self.shape.column_resolution(x)).finals(y)
        return self._inner[key]

    def base_m(self, x, y):
        column = self.shape.columns[x]
        zeros = _zero_profiles(column)
        return max(
            self._inner_finals(x, y)[0],
            vector_I(column, y - 1, vector_D(column, y, zeros)),
            vector_I(column, y, zeros),
        )

    def base_sd(self, x, y):
        return self._inner_finals(x, y)[1]

    def chain_value(self, x, y, r):
        column = self.shape.columns[x]
        zeros = _zero_profiles(column)
        values = [vector_I(column, y, zeros)]
        profiles = vector_D(column, y, zeros)
        for i in range(r):
            target = self.shape.columns[x + i + 1]
            moved = []
            for u, row in enumerate(target.rows):
                wiring = self.shape.horizontal(x + i, u)
                if u < len(profiles) and wiring is not None:
                    moved.append(phi_star(profiles[u], wiring))
                else:
                    moved.append(PeriodProfile.zero(row))
            values.append(vector_I(target, y - i - 1, moved))
            profiles = vector_D(target, y - i - 1, moved)
        return max(values)


def _zero_profiles(column: ColumnShape) -> List[PeriodProfile]:
    return [PeriodProfile.zero(row) for row in column.rows]


def _row_profile(column: ColumnShape, profiles: Sequence[PeriodProfile], u: int) -> PeriodProfile:
    if u < len(profiles):
        return profiles[u]
    return PeriodProfile.zero(column.rows[u])


def vector_I(column: ColumnShape, t: int, profiles: Sequence[PeriodProfile]) -> int:
    """``max{I(Q^0), max_u I(gcd(phi^u Q^{t,u}, Q^{u+1}))}`` over rows ``u <= t``."""
    first = _row_profile(column, profiles, 0)
    values = [op_I(first)]
    current = op_D(first)
    for u in range(t + 1):
        if u + 1 >= len(column.rows):
            break
        combined = gcd_profiles(phi_star(current, column.inner_wiring(u)), _row_profile(column, profiles, u + 1))
        values.append(op_I(combined))
        current = op_D(combined)
    return max(values)


def vector_D(column: ColumnShape, t: int, profiles: Sequence[PeriodProfile]) -> Tuple[PeriodProfile, ...]:
    """``(Q^{t,u})_{u <= t}`` with ``Q^{t,0} = D(Q^0)`` and ``Q^{t,u+1} = D(gcd(phi^u Q^{t,u}, Q^{u+1}))``."""
    if t < 0:
        return ()
    current = op_D(_row_profile(column, profiles, 0))
    result = [current]
    for u in range(t):
        if u + 1 >= len(column.rows):
            break
        combined = gcd_profiles(phi_star(current, column.inner_wiring(u)), _row_profile(column, profiles, u + 1))
        current = op_D(combined)
        result.append(current)
    return tuple(result)


@dataclasses.dataclass(frozen=True)
class RecursionResult:
    """Page tables over cells ``0 <= x <= N``, ``0 <= y <= t`` and the finals for ``H^t``."""

    t: int
    M: Dict[int, Dict[Tuple[int, int], int]]
    SD: Dict[int, Dict[Tuple[int, int], int]]
    N: Dict[int, Dict[Tuple[int, int], int]]
    M_inf: int
    SD_inf: int
    onset: Optional[int]

    @property
    def stable_range(self) -> Optional[int]:
        """``max(SD_inf, max C_x)``; ``None`` while an onset is unknown."""
        if self.onset is None:
            return None
        return max(self.SD_inf, self.onset)

    def to_dict(self) -> dict:
        def table(pages):
            return {
                str(r): {f"{x},{y}": value for (x, y), value in sorted(cells.items())}
                for r, cells in sorted(pages.items())
            }

        return {
            "t": self.t,
            "M_inf": self.M_inf,
            "SD_inf": self.SD_inf,
            "onset": self.onset,
            "stable_range": self.stable_range,
            "caveat": None if self.onset is not None else "stable range is SD_inf plus max C_x",
            "pages": {"M": table(self.M), "SD": table(self.SD), "N": table(self.N)},
        }


def _tabulate(recursion: _PageRecursion, t: int, r_max: Optional[int]) -> RecursionResult:
    if t < 0:
        raise ValueError(f"Degree must be nonnegative, got {t}")
    pages = t + 2 if r_max is None else r_max
    if pages < 1:
        raise ValueError(f"Need at least one page, got {pages}")
    shape = recursion.shape
    cells = [(x, y) for x in range(shape.N + 1) for y in range(t + 1)]
    m_tables, sd_tables, n_tables = {}, {}, {}
    for r in range(1, pages + 1):
        m_tables[r] = {cell: recursion.m(*cell, r) for cell in cells}
        sd_tables[r] = {cell: recursion.sd(*cell, r) for cell in cells}
        n_tables[r] = {cell: value for cell in cells if (value := recursion.n(*cell, r)) is not None}
    m_inf, sd_inf = recursion.finals(t)
    return RecursionResult(t, m_tables, sd_tables, n_tables, m_inf, sd_inf, shape.onset)


def resolution_recursion(shape: ResolutionShape, t: int, r_max: Optional[int] = None) -> RecursionResult:
    """Scalar recursion on row 0 of every column; finals bound ``H^t``."""
    return _tabulate(_ScalarRecursion(shape), t, r_max)


class VectorCell(NamedTuple):
    M: Tuple[int, ...]
    SD: Tuple[int, ...]


def vector_recursion(shape: ResolutionShape, x: int, y: int, r_max: int) -> VectorCell:
    """Vector values ``M[x, y, r]`` and ``SD[x, y, r]`` for ``r = 1..r_max``."""
    if not shape.in_range(x, y):
        raise ValueError(f"Cell ({x}, {y}) is outside the shape")
    if r_max < 1:
        raise ValueError(f"Need at least one page, got {r_max}")
    recursion = _VectorRecursion(shape)
    pages = range(1, r_max + 1)
    return VectorCell(tuple(recursion.m(x, y, r) for r in pages), tuple(recursion.sd(x, y, r) for r in pages))


def vector_resolution_recursion(shape: ResolutionShape, t: int, r_max: Optional[int] = None) -> RecursionResult:
    """Tables and finals of the vector recursion over multi-row columns."""
    return _tabulate(_VectorRecursion(shape), t, r_max)


class MainBounds(NamedTuple):
    M: int
    SD: int


def bound_main(shape: ResolutionShape, t: int) -> MainBounds:
    """Closed-form ceilings ``min{(t+3)D, max{2D, D(D+1)/2}}`` and ``2(t + max d_x - 1) + D``.

    ``D`` is the largest of the column generation degrees and cover degrees.
    """
    big_d = max(max(column.D, column.cover.D) for column in shape.columns)
    max_d = max(column.d for column in shape.columns)
    return MainBounds(
        min((t + 3) * big_d, max(2 * big_d, big_d * (big_d + 1) // 2)),
        2 * (t + max_d - 1) + big_d,
    )


def bound_general(x: int, y: int, big_d: int) -> int:
    """``(x + y + 3) D``, the ceiling of the vector recursion at cell ``(x, y)``."""
    return (x + y + 3) * big_d


def config_bound(t: int) -> int:
    """``(t + 3)(2t + 2)``: period exponent ceiling for configuration spaces of a surface."""
    if t < 0:
        raise ValueError(f"Degree must be nonnegative, got {t}")
    return (t + 3) * (2 * t + 2)
