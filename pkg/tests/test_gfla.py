import random

import numpy as np
import pytest

from fiperiod import gfla
from fiperiod.gfla import GFMatrix, RowEchelon


primes = [2, 3, 5]


def random_matrix(rng, rows, cols, p, density=0.5):
    return [[rng.randrange(1, p) if rng.random() < density else 0 for _ in range(cols)] for _ in range(rows)]


def brute_force_rank(values, p):
    """Plain Gaussian elimination on Python integers."""
    rows = [list(row) for row in values]
    rank, cols = 0, len(rows[0]) if rows else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] % p), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inverse = pow(rows[rank][col], p - 2, p)
        rows[rank] = [x * inverse % p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % p:
                factor = rows[r][col]
                rows[r] = [(x - factor * y) % p for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def test_check_prime_rejects_composites():
    assert gfla.check_prime(7) == 7
    for value in (0, 1, 4, 9, True, 2.0):
        with pytest.raises(ValueError):
            gfla.check_prime(value)


@pytest.mark.parametrize("cols", [1, 63, 64, 65, 130])
def test_pack_bits_keeps_every_column(cols):
    rng = np.random.default_rng(cols)
    bits = rng.integers(0, 2, size=(5, cols))
    words = gfla.pack_bits(bits)
    assert words.shape == (5, gfla.word_count(cols))
    assert np.array_equal(gfla.unpack_bits(words, cols), bits)


def test_rank_of_small_binary_matrix():
    m = GFMatrix.from_array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], p=2)
    assert gfla.rank(m) == 2


def test_rank_depends_on_the_field():
    m = GFMatrix.from_array([[1, 1], [1, -1]], p=2)
    assert gfla.rank(m) == 1
    assert gfla.rank(GFMatrix.from_array([[1, 1], [1, -1]], p=3)) == 2


@pytest.mark.parametrize("p", primes)
def test_rank_matches_plain_elimination(p):
    rng = random.Random(1000 + p)
    for _ in range(20):
        rows, cols = rng.randrange(1, 12), rng.randrange(1, 90)
        values = random_matrix(rng, rows, cols, p)
        assert gfla.rank(GFMatrix.from_array(values, p)) == brute_force_rank(values, p)


@pytest.mark.parametrize("p", primes)
def test_kernel_basis_is_a_kernel(p):
    rng = random.Random(p)
    for _ in range(20):
        rows, cols = rng.randrange(1, 10), rng.randrange(1, 70)
        m = GFMatrix.from_array(random_matrix(rng, rows, cols, p), p)
        kernel = gfla.kernel_basis(m)

        assert kernel.rows + gfla.rank(m) == cols
        assert (m @ kernel.transpose()).is_zero()
        assert gfla.rank(kernel) == kernel.rows


def test_kernel_of_zero_matrix_is_everything():
    kernel = gfla.kernel_basis(GFMatrix.zeros(3, 2, 4))
    assert kernel == GFMatrix.identity(3, 4)


def test_row_echelon_contains_and_reduces():
    echelon = RowEchelon(2, 4)
    assert echelon.extend(GFMatrix.from_array([[1, 1, 0, 0], [0, 1, 1, 0]], p=2)) == 2
    assert echelon.extend(GFMatrix.from_array([[1, 0, 1, 0]], p=2)) == 0
    assert echelon.pivots == (0, 1)
    assert echelon.contains(GFMatrix.from_array([[1, 0, 1, 0]], p=2))
    assert not echelon.contains(GFMatrix.from_array([[0, 0, 0, 1]], p=2))

    remainder = echelon.reduce(GFMatrix.from_array([[1, 1, 1, 1]], p=2)).to_array()
    assert remainder[0, 0] == remainder[0, 1] == 0


@pytest.mark.parametrize("p", primes)
def test_row_echelon_basis_is_reduced(p):
    rng = random.Random(7 * p)
    echelon = RowEchelon(p, 40)
    for _ in range(5):
        echelon.extend(GFMatrix.from_array(random_matrix(rng, 3, 40, p, density=0.2), p))
    basis = echelon.basis().to_array()
    assert list(echelon.pivots) == sorted(echelon.pivots)
    for row, pivot in enumerate(echelon.pivots):
        assert basis[row, pivot] == 1
        assert np.count_nonzero(basis[:, pivot]) == 1


@pytest.mark.parametrize("p", [2, 3])
def test_transpose_and_product(p):
    rng = random.Random(p)
    values = np.array(random_matrix(rng, 70, 1100, p))
    m = GFMatrix.from_array(values, p)
    assert np.array_equal(m.transpose().to_array(), values.T)
    assert np.array_equal((m @ m.T).to_array(), (values @ values.T) % p)


def test_sum_and_difference():
    a = GFMatrix.from_array([[1, 2], [0, 4]], p=5)
    b = GFMatrix.from_array([[4, 4], [1, 1]], p=5)
    assert (a + b).to_array().tolist() == [[0, 1], [1, 0]]
    assert (a - b) + b == a


def test_matrices_are_immutable():
    m = GFMatrix.from_array([[1, 0]], p=3)
    copy = m.raw()
    copy[0, 0] = 2
    assert m.to_array().tolist() == [[1, 0]]
    with pytest.raises(ValueError):
        m._data[0, 0] = 2


@pytest.mark.parametrize("p", primes)
def test_quotient_projector_reduce_units(p):
    rng = random.Random(11 * p)
    relations = GFMatrix.from_array(random_matrix(rng, 4, 12, p), p)
    projector = gfla.quotient_projector(relations, 12)

    assert projector.dim + projector.rank == 12
    units = projector.reduce_units(range(12))
    assert units == projector.reduce(GFMatrix.identity(p, 12))
    for i, column in enumerate(projector.complement):
        assert projector.position(column) == i
