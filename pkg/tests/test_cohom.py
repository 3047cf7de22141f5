import json

import pytest

from fiperiod import cohom, fimod, oracles
from fiperiod.cohom import CohomologyTable
from fiperiod.errors import InfeasibleSizeError, MissingTableEntryError, SpecError


@pytest.fixture(scope="module")
def intro_kernel():
    return oracles.intro_kernel_presentation()


def test_invariants_of_intro_kernel(intro_kernel):
    for n in range(2, 13):
        assert cohom.invariants_dim(fimod.evaluate(intro_kernel, n)) == oracles.intro_kernel_h0(n)


def test_invariants_of_example1_match_closed_form():
    module = oracles.example1_presentation(3)
    for n in range(3, 13):
        assert cohom.invariants_dim(fimod.evaluate(module, n)) == oracles.example1_dim(3, n)


@pytest.mark.slow
def test_invariants_of_example1_degree_five():
    module = oracles.example1_presentation(5)
    for n in range(5, 11):
        assert cohom.invariants_dim(fimod.evaluate(module, n)) == oracles.example1_dim(5, n)


@pytest.mark.parametrize(
    "module, levels",
    [
        (oracles.example1_presentation(3), range(3, 8)),
        (oracles.example1_presentation(4), range(4, 7)),
        (fimod.induced_presentation(3, 2, "sign"), range(2, 7)),
        (fimod.induced_presentation(2, 3, "trivial"), range(3, 7)),
        (fimod.shift(oracles.example1_presentation(3), 1), range(2, 7)),
        (fimod.free_presentation(5, (0, 1, 2)), range(0, 6)),
    ],
)
def test_forest_and_dense_invariants_agree(module, levels):
    for n in levels:
        level = fimod.evaluate(module, n)
        assert cohom.invariants_dim(level, method="forest") == cohom.invariants_dim(level, method="dense")


def test_forest_needs_presented_module(intro_kernel):
    with pytest.raises(ValueError):
        cohom.invariants_dim(fimod.evaluate(intro_kernel, 4), method="forest")
    with pytest.raises(ValueError):
        cohom.invariants_dim(fimod.evaluate(intro_kernel, 4), method="sparse")


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_invariants_of_induced_modules(p, m):
    for kind in ("trivial", "sign"):
        module = fimod.induced_presentation(p, m, kind)
        expected = 1 if kind == "trivial" or p == 2 or m < 2 else 0
        for n in range(max(m, 3), 10):
            assert cohom.invariants_dim(fimod.evaluate(module, n)) == expected, (kind, n)


@pytest.mark.parametrize("p, expected", [(2, 1), (3, 0), (5, 0)])
def test_h1_of_trivial_module_is_stable(p, expected):
    module = fimod.trivial_presentation(p)
    values = [cohom.h1_dim(fimod.evaluate(module, n)) for n in range(3, 8)]
    assert values == [expected] * 5
    assert values == [oracles.trivial_h1(p, n) for n in range(3, 8)]


def test_h1_vanishes_below_two():
    module = fimod.trivial_presentation(2)
    assert cohom.h1_dim(fimod.evaluate(module, 0)) == 0
    assert cohom.h1_dim(fimod.evaluate(module, 1)) == 0


@pytest.mark.parametrize("p", [2, 3])
def test_h1_of_free_module_matches_kunneth(p):
    trivial = fimod.trivial_presentation(p)
    w_table = cohom.cohomology_table(trivial, [1], t_max=1, label="k")
    triv_table = cohom.cohomology_table(trivial, range(0, 8), t_max=1, label="k")
    module = fimod.free_presentation(p, (1,))
    for n in range(3, 9):
        assembled = cohom.induced_cohomology_dims(w_table, triv_table, 1, n, 1)
        assert cohom.h1_dim(fimod.evaluate(module, n)) == assembled


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("kind", ["trivial", "sign"])
def test_h1_of_induced_module_matches_kunneth(p, kind):
    module = fimod.induced_presentation(p, 2, kind)
    w_table = cohom.cohomology_table(module, [2], t_max=1, label=kind)
    triv_table = cohom.cohomology_table(fimod.trivial_presentation(p), range(0, 7), t_max=1, label="k")
    for n in range(3, 9):
        assembled = cohom.induced_cohomology_dims(w_table, triv_table, 2, n, 1)
        assert cohom.h1_dim(fimod.evaluate(module, n)) == assembled, n


def test_h1_in_single_row_batches(monkeypatch):
    modules = [
        fimod.free_presentation(3, (1,)),
        fimod.induced_presentation(2, 2, "sign"),
        oracles.intro_kernel_presentation(),
    ]
    expected = [[cohom.h1_dim(fimod.evaluate(module, n)) for n in range(2, 6)] for module in modules]
    monkeypatch.setattr(cohom, "ROW_BATCH_ENTRIES", 1)
    assert [[cohom.h1_dim(fimod.evaluate(module, n)) for n in range(2, 6)] for module in modules] == expected


def test_h1_cost_guard():
    module = fimod.free_presentation(2, (1,))
    assert [cohom.h1_cost(module, n) for n in range(0, 5)] == [0, 0, 4, 18, 48]
    cohom.check_h1_feasible(module, range(0, 4), 18)
    with pytest.raises(InfeasibleSizeError) as error:
        cohom.check_h1_feasible(module, range(0, 6), 18)
    assert (error.value.level, error.value.dimension, error.value.quantity) == (4, 48, "H^1 constraint size")


def test_table_lookup_and_json():
    table = cohom.cohomology_table(fimod.trivial_presentation(2), range(0, 4), label="k")
    assert table.dim(3, 1) == 1
    assert table.dim(1, 1) == 0
    assert table.t_max == 1
    with pytest.raises(MissingTableEntryError):
        table.dim(9, 0)

    restored = CohomologyTable.from_json(json.dumps(table.to_dict()))
    assert restored == table


def test_table_rejects_malformed_entries():
    with pytest.raises(SpecError):
        CohomologyTable.from_dict({"module": "k", "entries": [{"m": 1, "t": 0}]})
    with pytest.raises(SpecError):
        CohomologyTable.from_json("{")


def test_induced_cohomology_needs_both_tables():
    w_table = CohomologyTable("w", {(1, 0): 1})
    triv_table = CohomologyTable("k", {(3, 0): 1})
    assert cohom.induced_cohomology_dims(w_table, triv_table, 1, 4, 0) == 1
    with pytest.raises(MissingTableEntryError):
        cohom.induced_cohomology_dims(w_table, triv_table, 1, 4, 1)


def test_nakaoka_window():
    inside = cohom.nakaoka_window(1)
    assert not inside(2)
    assert inside(3)


def test_cohomology_series(intro_kernel):
    series = cohom.cohomology_series(intro_kernel, range(2, 8), 0)
    assert series.values == (1, 0, 1, 0, 1, 0)
    with pytest.raises(ValueError):
        cohom.cohomology_series(intro_kernel, range(2, 8), 2)
