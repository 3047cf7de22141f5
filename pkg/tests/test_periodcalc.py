import json
import random

import pytest

from fiperiod import periodcalc
from fiperiod.errors import CoverMismatchError, IncompleteShapeError, SpecError
from fiperiod.periodcalc import (
    ColumnShape,
    CoverShape,
    HorizontalWiring,
    PeriodProfile,
    ResolutionShape,
    SequentialWiring,
)

TWO_COLUMNS = {
    "p": 2,
    "columns": [{"rows": [{"degrees": [0, 3]}], "C": 2}, {"rows": [{"degrees": [3]}], "C": 4}],
    "wiring": [{"pairs": [[2, 1]]}],
}


def random_cover(rng, p, max_degree=6, max_length=3):
    return CoverShape(p, tuple(rng.randrange(0, max_degree + 1) for _ in range(rng.randrange(1, max_length + 1))))


def random_wiring(rng, source, target):
    unused = list(range(1, source.d + 1))
    pairs = []
    for t, degree in enumerate(target.degrees, start=1):
        matches = [s for s in unused if source.degrees[s - 1] == degree]
        if matches and rng.random() < 0.8:
            s = rng.choice(matches)
            unused.remove(s)
            pairs.append((s, t))
    return SequentialWiring(source, target, tuple(pairs))


def random_shape(rng, rows=1):
    p = rng.choice([2, 3])
    columns = []
    for _ in range(rng.randrange(1, 4)):
        covers = tuple(random_cover(rng, p) for _ in range(rng.randrange(1, rows + 1)))
        inner = tuple(random_wiring(rng, a, b) for a, b in zip(covers, covers[1:]))
        columns.append(ColumnShape(covers, inner))
    wiring = []
    for left, right in zip(columns, columns[1:]):
        count = min(len(left.rows), len(right.rows))
        wiring.append(HorizontalWiring(tuple(random_wiring(rng, left.rows[u], right.rows[u]) for u in range(count))))
    return ResolutionShape(p, tuple(columns), tuple(wiring))


def global_degree(shape):
    return max(max(max(row.D for row in column.rows), column.D) for column in shape.columns)


@pytest.mark.parametrize("b1, b2, p, expected", [(5, 0, 2, 4), (0, 5, 2, 0), (3, 3, 3, 0), (6, 0, 3, 3), (4, 1, 3, 2)])
def test_delta_h(b1, b2, p, expected):
    assert periodcalc.delta_h(b1, b2, p) == expected


@pytest.mark.parametrize("m, p", [(3, 2), (5, 2), (6, 3), (9, 3)])
def test_operators_on_zero_profile(m, p):
    cover = CoverShape(p, (0, m))
    zero = PeriodProfile.zero(cover)
    expected = periodcalc.delta_h(m, 0, p)
    assert periodcalc.op_D(zero).exponents == (expected, 0)
    assert periodcalc.op_I(zero) == expected


def test_refinement_skips_lower_degrees():
    cover = CoverShape(2, (5, 0))
    zero = PeriodProfile.zero(cover)
    assert periodcalc.op_D(zero).exponents == (0, 0)
    assert periodcalc.op_I(zero) == 4


def test_refine_profile_triangle():
    q = PeriodProfile(CoverShape(2, (0, 2, 4)), (1, 0, 2))
    triangle = periodcalc.refine_profile(q)
    assert triangle[(1, 3)] == 1 and triangle[(2, 3)] == 0 and triangle[(3, 3)] == 2
    assert triangle[(1, 2)] == max(1, 2 + periodcalc.delta_h(4, 0, 2))
    assert triangle[(2, 2)] == max(0, 2 + periodcalc.delta_h(4, 2, 2))
    assert periodcalc.op_Dr(q, 2).exponents == (triangle[(1, 2)], triangle[(2, 2)])
    assert periodcalc.op_Dr(q, 2).cover.degrees == (0, 2)
    with pytest.raises(ValueError):
        periodcalc.op_Dr(q, 4)


def test_phi_star_moves_exponents():
    source, target = CoverShape(3, (1, 2, 2)), CoverShape(3, (2, 5))
    wiring = SequentialWiring(source, target, ((3, 1),))
    moved = periodcalc.phi_star(PeriodProfile(source, (4, 5, 6)), wiring)
    assert moved == PeriodProfile(target, (6, 0))
    with pytest.raises(CoverMismatchError):
        periodcalc.phi_star(PeriodProfile(target, (1, 1)), wiring)


def test_wiring_must_preserve_degrees():
    with pytest.raises(ValueError):
        SequentialWiring(CoverShape(2, (1,)), CoverShape(2, (2,)), ((1, 1),))
    with pytest.raises(ValueError):
        SequentialWiring(CoverShape(2, (1, 1)), CoverShape(2, (1,)), ((1, 1), (2, 1)))


def test_gcd_profiles():
    cover = CoverShape(2, (0, 1))
    assert periodcalc.gcd_profiles(PeriodProfile(cover, (1, 3)), PeriodProfile(cover, (2, 0))).exponents == (2, 3)
    with pytest.raises(CoverMismatchError):
        periodcalc.gcd_profiles(PeriodProfile(cover, (1, 3)), PeriodProfile(CoverShape(2, (1, 0)), (1, 3)))


def test_filtered_bounds():
    assert periodcalc.filtered_bounds(CoverShape(2, (0, 5)), 0) == (4, 7)
    for t in range(4):
        assert periodcalc.filtered_bounds(CoverShape(3, (0,)), t).exponent == 0


def test_filtered_exponent_below_twice_the_degree():
    rng = random.Random(0)
    for _ in range(500):
        cover = random_cover(rng, rng.choice([2, 3, 5]), max_length=5)
        assert periodcalc.filtered_bounds(cover, 0).exponent <= 2 * cover.D


@pytest.mark.parametrize("p", [2, 3, 5])
def test_boundonM_inequalities(p):
    rng = random.Random(p)
    for _ in range(1000):
        cover = random_cover(rng, p, max_degree=8, max_length=5)
        q = PeriodProfile(cover, tuple(rng.randrange(0, 7) for _ in range(cover.d)))
        assert periodcalc.bound_boundonM(q).satisfied


def test_single_column_shape():
    shape = ResolutionShape.from_dict({"p": 2, "columns": [{"rows": [{"degrees": [3]}], "C": None}], "wiring": []})
    result = periodcalc.resolution_recursion(shape, 1)
    assert result.M_inf == 6
    assert result.stable_range is None
    assert result.to_dict()["caveat"]


def test_two_column_shape():
    shape = ResolutionShape.from_dict(TWO_COLUMNS)
    result = periodcalc.resolution_recursion(shape, 0)
    assert result.M[1] == {(0, 0): 6, (1, 0): 6}
    assert result.N[1] == {(0, 0): 2}
    assert result.SD[1] == {(0, 0): 5, (1, 0): 3}
    assert (result.M_inf, result.SD_inf) == (6, 5)
    assert result.stable_range == 5
    assert periodcalc.bound_main(shape, 0) == (6, 5)


def test_missing_wiring_is_incomplete():
    shape = ResolutionShape(2, (ColumnShape((CoverShape(2, (1,)),)), ColumnShape((CoverShape(2, (1,)),))))
    with pytest.raises(IncompleteShapeError):
        periodcalc.resolution_recursion(shape, 1)


def test_recursion_respects_closed_form_bounds():
    rng = random.Random(42)
    for _ in range(150):
        shape = random_shape(rng)
        t = rng.randrange(0, 5)
        result = periodcalc.resolution_recursion(shape, t)
        ceilings = periodcalc.bound_main(shape, t)
        assert result.M_inf <= ceilings.M
        assert result.SD_inf <= ceilings.SD


def test_pages_are_monotone():
    rng = random.Random(9)
    for _ in range(30):
        shape = random_shape(rng)
        result = periodcalc.resolution_recursion(shape, 2)
        for r in range(2, 5):
            for cell, value in result.M[r].items():
                assert value >= result.M[r - 1][cell]


def test_vector_recursion_agrees_on_single_rows():
    rng = random.Random(17)
    for _ in range(40):
        shape = random_shape(rng)
        t = rng.randrange(0, 4)
        scalar = periodcalc.resolution_recursion(shape, t)
        for x in range(shape.N + 1):
            for y in range(t + 1):
                cell = periodcalc.vector_recursion(shape, x, y, t + 2)
                assert cell.M == tuple(scalar.M[r][(x, y)] for r in range(1, t + 3))
                assert cell.SD == tuple(scalar.SD[r][(x, y)] for r in range(1, t + 3))


def test_vector_recursion_respects_general_bound():
    rng = random.Random(23)
    for _ in range(60):
        shape = random_shape(rng, rows=3)
        big_d = global_degree(shape)
        for x in range(shape.N + 1):
            for y in range(3):
                cell = periodcalc.vector_recursion(shape, x, y, 3)
                assert max(cell.M) <= periodcalc.bound_general(x, y, big_d)


def test_vector_resolution_tables():
    shape = ResolutionShape.from_dict(
        {
            "p": 2,
            "columns": [
                {"rows": [{"degrees": [0, 2]}, {"degrees": [2]}], "inner": [{"pairs": [[2, 1]]}]},
                {"rows": [{"degrees": [2]}, {"degrees": [2]}], "inner": [{"pairs": [[1, 1]]}]},
            ],
            "wiring": [{"rows": [{"pairs": [[2, 1]]}, {"pairs": [[1, 1]]}]}],
        }
    )
    result = periodcalc.vector_resolution_recursion(shape, 1)
    assert result.M_inf <= periodcalc.bound_general(0, 1, 2)
    assert set(result.M) == {1, 2, 3}


def test_config_and_general_bounds():
    assert periodcalc.config_bound(1) == 16
    assert periodcalc.config_bound(0) == 6
    assert periodcalc.bound_general(1, 2, 4) == 24


def test_shape_json_errors():
    with pytest.raises(SpecError) as error:
        ResolutionShape.from_json('{"p": 2, "columns": [')
    assert error.value.location.startswith("line 1")

    bad = json.loads(json.dumps(TWO_COLUMNS))
    bad["wiring"][0]["pairs"] = [[1, 1]]
    with pytest.raises(SpecError) as error:
        ResolutionShape.from_dict(bad)
    assert error.value.location == "wiring[0].pairs"

    bad = json.loads(json.dumps(TWO_COLUMNS))
    bad["p"] = 4
    with pytest.raises(SpecError) as error:
        ResolutionShape.from_dict(bad)
    assert error.value.location == "p"


def test_cover_parse():
    assert CoverShape.parse("0, 5", 2).degrees == (0, 5)
    with pytest.raises(ValueError):
        CoverShape.parse("0,x", 2)
    with pytest.raises(ValueError):
        CoverShape.parse("", 2)


def test_column_degrees_bounded_by_module_degree():
    shape = ResolutionShape.from_dict(dict(TWO_COLUMNS, D=4))
    assert shape.module_degree == 4

    for data, location in [
        (dict(TWO_COLUMNS, D=3), "columns[1].rows[0].degrees"),
        ({"p": 2, "D": 4, "columns": [{"degrees": [0, 3]}, {"degrees": [5]}]}, "columns[1].degrees"),
        ({"p": 2, "D": 4, "columns": [{"degrees": [0, 3], "Dx": 5}]}, "columns[0].Dx"),
        ({"p": 2, "D": -1, "columns": [{"degrees": [0]}]}, "D"),
    ]:
        with pytest.raises(SpecError) as error:
            ResolutionShape.from_dict(data)
        assert error.value.location == location

    with pytest.raises(ValueError):
        ResolutionShape(2, (ColumnShape((CoverShape(2, (4,)),)),), module_degree=3)
