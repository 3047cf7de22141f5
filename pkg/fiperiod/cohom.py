"""Cohomology of ``S_n`` with coefficients in a level ``V_n``.

``H^0`` is the space of common fixed vectors of the Coxeter generators.
``H^1`` is computed in the Coxeter cocycle model: a cocycle is determined by
its values on ``s_1..s_{n-1}``, subject to one linear condition per relation
word, and coboundaries have dimension ``dim V - dim V^{S_n}``.
"""

from __future__ import annotations

import dataclasses
import json
from collections import deque
from typing import Callable, Dict, Iterable, Tuple

import numpy as np

from fiperiod import fimod, symcore
from fiperiod.errors import InfeasibleSizeError, MissingTableEntryError, SpecError
from fiperiod.fimod import FIPresentation, LevelData, QuotientLevel
from fiperiod.gfla import GFMatrix, RowEchelon
from fiperiod.series import DimensionSeries

# Entries per dense block of constraint rows.
ROW_BATCH_ENTRIES: int = 4_000_000

# Largest table of linear forms the forest solver may allocate.
FOREST_FORM_ENTRIES: int = 300_000_000


def invariants_dim(level: LevelData, method: str = "auto") -> int:
    """``dim H^0(S_n, V_n)``.

    :param level:  Evaluated level.
    :param method: ``dense`` stacks ``A_i - I`` for all generators and
        eliminates; ``forest`` works on the permutation action of the free
        cover and only applies to presented modules; ``auto`` picks
        ``forest`` whenever it applies.

    Usage::

        >>> from fiperiod.fimod import evaluate, free_presentation
        >>> invariants_dim(evaluate(free_presentation(2, (1,)), 5))
        1

    """
    if method not in ("auto", "dense", "forest"):
        raise ValueError(f"Unknown method {method!r}")
    if level.n < 2 or level.dim == 0:
        return level.dim

    forest = isinstance(level, QuotientLevel) and _forest_fits(level)
    if method == "forest" and not isinstance(level, QuotientLevel):
        raise ValueError("The forest solver needs a presented module")
    if method == "forest" or (method == "auto" and forest):
        return _forest_invariants_dim(level)
    return _dense_invariants_dim(level)


def _dense_invariants_dim(level: LevelData) -> int:
    identity = GFMatrix.identity(level.p, level.dim)
    echelon = RowEchelon(level.p, level.dim)
    for action in level.generator_actions:
        echelon.extend(action - identity)
        if echelon.rank == level.dim:
            break
    return level.dim - echelon.rank


def _forest_fits(level: QuotientLevel) -> bool:
    ambient = level.reduction.dim_ambient
    boundary = level.reduction.rank * len(level.permutations) + level.reduction.rank
    return level.reduction.rank * ambient <= FOREST_FORM_ENTRIES and ambient * boundary <= FOREST_FORM_ENTRIES


def _forest_invariants_dim(level: QuotientLevel) -> int:
    """Invariants of ``F / R`` for a permutation module ``F``.

    ``v + R`` is fixed iff ``g v - v`` lies in ``R`` for every generator.
    With ``R`` in reduced echelon form this reads, for every non-pivot
    coordinate ``c``, ``v[g^-1 c] - v[c] = sum_j E[j, c] (v[g^-1 piv_j] - v[piv_j])``.
    Each condition is an edge between two coordinates labelled by a linear
    form in the boundary values ``v[piv_j]``, ``v[g^-1 piv_j]``. Along a
    spanning forest every coordinate becomes a form in the component roots
    and the boundary values; the remaining edges and the boundary values
    themselves give the constraints.
    """
    projector = level.reduction
    p = level.p
    ambient = projector.dim_ambient
    relation_rank = projector.rank
    pivots = np.asarray(projector.pivots, dtype=np.int64)
    relations = projector.echelon.basis().to_array()
    inverses = [np.argsort(permutation) for permutation in level.permutations]

    boundary = np.unique(np.concatenate([pivots] + [inverse[pivots] for inverse in inverses]))
    slot = np.full(ambient, -1, dtype=np.int64)
    slot[boundary] = np.arange(boundary.size)
    pivot_slots = slot[pivots]
    head_slots = [slot[inverse[pivots]] for inverse in inverses]
    labels = []
    for heads in head_slots:
        label = np.zeros((relation_rank, boundary.size), dtype=np.int64)
        rows = np.arange(relation_rank)
        np.add.at(label, (rows, heads), 1)
        np.add.at(label, (rows, pivot_slots), -1)
        labels.append(label % p)

    is_pivot = np.zeros(ambient, dtype=bool)
    is_pivot[pivots] = True
    non_pivot = np.flatnonzero(~is_pivot).tolist()

    parent = list(range(ambient))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    # tree[x] holds (y, generator, c, sign) with form(y) = form(x) + sign * label(generator, c)
    tree = [[] for _ in range(ambient)]
    loose = [[] for _ in inverses]
    for g, inverse in enumerate(inverses):
        for c in non_pivot:
            a = int(inverse[c])
            root_a, root_c = find(a), find(c)
            if root_a == root_c:
                loose[g].append(c)
                continue
            parent[root_a] = root_c
            tree[a].append((c, g, c, -1))
            tree[c].append((a, g, c, 1))

    components = sum(1 for x in range(ambient) if find(x) == x)
    width = components + boundary.size
    storage = np.uint8 if p < 256 else np.int64
    forms = np.zeros((ambient, width), dtype=storage)

    def edge_label(g, c):
        column = relations[:, c]
        support = np.flatnonzero(column)
        label = np.zeros(boundary.size, dtype=np.int64)
        np.add.at(label, head_slots[g][support], column[support])
        np.subtract.at(label, pivot_slots[support], column[support])
        return label

    visited = np.zeros(ambient, dtype=bool)
    root_count = 0
    for start in range(ambient):
        if visited[start]:
            continue
        forms[start, root_count] = 1
        root_count += 1
        visited[start] = True
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y, g, c, sign in tree[x]:
                if visited[y]:
                    continue
                row = forms[x].astype(np.int64)
                row[components:] += sign * edge_label(g, c)
                forms[y] = row % p
                visited[y] = True
                queue.append(y)

    echelon = RowEchelon(p, width)
    batch = max(1, ROW_BATCH_ENTRIES // max(width, 1))
    for g, columns in enumerate(loose):
        columns = np.asarray(columns, dtype=np.int64)
        for start in range(0, columns.size, batch):
            chunk = columns[start : start + batch]
            heads = inverses[g][chunk]
            label = np.rint(relations[:, chunk].T.astype(np.float64) @ labels[g].astype(np.float64))
            rows = forms[heads].astype(np.int64) - forms[chunk].astype(np.int64)
            rows[:, components:] -= label.astype(np.int64)
            echelon.extend(GFMatrix.from_array(rows % p, p))

    ties = forms[boundary].astype(np.int64)
    ties[np.arange(boundary.size), components + np.arange(boundary.size)] -= 1
    if boundary.size:
        echelon.extend(GFMatrix.from_array(ties % p, p))

    return width - echelon.rank - relation_rank


def _unit_rows(p: int, rows: np.ndarray, dim: int) -> GFMatrix:
    units = np.zeros((rows.size, dim), dtype=np.int64)
    units[np.arange(rows.size), rows] = 1
    return GFMatrix.from_array(units, p)


def h1_dim(level: LevelData) -> int:
    """``dim H^1(S_n, V_n) = dim Z^1 - (dim V_n - dim V_n^{S_n})``.

    Relation words are expanded a block of ``V_n`` coordinates at a time, so
    at most ``ROW_BATCH_ENTRIES`` constraint entries are dense at once.

    Usage::

        >>> from fiperiod.fimod import evaluate, trivial_presentation
        >>> h1_dim(evaluate(trivial_presentation(2), 4))
        1

    """
    n, p, dim = level.n, level.p, level.dim
    if n < 2 or dim == 0:
        return 0
    actions = level.generator_actions
    width = (n - 1) * dim
    echelon = RowEchelon(p, width)
    batch = max(1, ROW_BATCH_ENTRIES // width)
    for word in symcore.coxeter_presentation(n).relations:
        for start in range(0, dim, batch):
            prefix = _unit_rows(p, np.arange(start, min(start + batch, dim)), dim)
            block = np.zeros((prefix.rows, width), dtype=np.int64)
            for index in word:
                block[:, (index - 1) * dim : index * dim] += prefix.to_array()
                prefix = prefix @ actions[index - 1]
            echelon.extend(GFMatrix.from_array(block % p, p))
        if echelon.rank == width:
            break
    cocycles = width - echelon.rank
    coboundaries = dim - invariants_dim(level)
    return cocycles - coboundaries


def h1_cost(module: FIPresentation, n: int) -> int:
    """Upper bound on the cocycle constraint entries ``h1_dim`` touches at level ``n``."""
    if n < 2:
        return 0
    return (n - 1) * fimod.ambient_dim(module, n) ** 2


def check_h1_feasible(module: FIPresentation, n_range: Iterable[int], cap: int) -> None:
    """Raises :class:`InfeasibleSizeError` at the first level whose :func:`h1_cost` exceeds ``cap``."""
    for n in n_range:
        cost = h1_cost(module, n)
        if cost > cap:
            raise InfeasibleSizeError(n, cost, cap, quantity="H^1 constraint size")


@dataclasses.dataclass(frozen=True)
class CohomologyTable:
    """``dim H^t(S_m, W)`` for one coefficient module ``W``, keyed by ``(m, t)``."""

    module: str
    entries: Dict[Tuple[int, int], int] = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        for (m, t), value in self.entries.items():
            if m < 0 or t < 0 or value < 0:
                raise ValueError(f"Invalid table entry ({m}, {t}) -> {value}")

    @property
    def t_max(self) -> int:
        return max((t for _, t in self.entries), default=-1)

    def dim(self, m: int, t: int) -> int:
        try:
            return self.entries[(m, t)]
        except KeyError:
            raise MissingTableEntryError(f"{self.module}: no entry for m={m}, t={t}") from None

    @classmethod
    def from_dict(cls, data) -> "CohomologyTable":
        if not isinstance(data, dict) or not isinstance(data.get("entries"), list):
            raise SpecError("expected an object with an entries list", "entries")
        entries = {}
        for i, item in enumerate(data["entries"]):
            try:
                entries[(int(item["m"]), int(item["t"]))] = int(item["dim"])
            except (KeyError, TypeError, ValueError) as error:
                raise SpecError(f"malformed entry: {error}", f"entries[{i}]") from error
        return cls(str(data.get("module", "")), entries)

    @classmethod
    def from_json(cls, text: str) -> "CohomologyTable":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as error:
            raise SpecError(error.msg, f"line {error.lineno} column {error.colno}") from error
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "module": self.module,
            "entries": [{"m": m, "t": t, "dim": v} for (m, t), v in sorted(self.entries.items())],
        }


def cohomology_table(module: FIPresentation, levels: Iterable[int], t_max: int = 1, label: str = "") -> CohomologyTable:
    """Table of ``H^0`` and ``H^1`` dims of ``module`` at the given levels."""
    if t_max not in (0, 1):
        raise ValueError(f"Only degrees 0 and 1 are computed, got t_max={t_max}")
    entries = {}
    for m in levels:
        level = fimod.evaluate(module, m)
        entries[(m, 0)] = invariants_dim(level)
        if t_max == 1:
            entries[(m, 1)] = h1_dim(level)
    return CohomologyTable(label, entries)


def induced_cohomology_dims(
    w_table: CohomologyTable, triv_table: CohomologyTable, m: int, n: int, t: int
) -> int:
    """``dim H^t(S_n, M(W)_n) = sum_{a+b=t} dim H^a(S_m, W) dim H^b(S_{n-m}, k)``."""
    if not 0 <= m <= n:
        raise ValueError(f"Need 0 <= m <= n, got m={m}, n={n}")
    return sum(w_table.dim(m, a) * triv_table.dim(n - m, t - a) for a in range(t + 1))


def nakaoka_window(t: int) -> Callable[[int], bool]:
    """Levels ``n > 2t``, where ``H^t(S_n, k) = H^t(S_{n-1}, k)``."""
    if t < 0:
        raise ValueError(f"Degree must be nonnegative, got {t}")

    def inside(n: int) -> bool:
        return n > 2 * t

    return inside


def cohomology_series(module: FIPresentation, n_range: Iterable[int], degree: int) -> DimensionSeries:
    """``dim H^degree(S_n, V_n)`` over a contiguous range, for degree 0 or 1."""
    if degree not in (0, 1):
        raise ValueError(f"Only degrees 0 and 1 are computed, got {degree}")
    levels = list(n_range)
    if not levels:
        raise ValueError("Empty level range")
    compute = invariants_dim if degree == 0 else h1_dim
    return DimensionSeries(levels[0], tuple(compute(fimod.evaluate(module, n)) for n in levels))
