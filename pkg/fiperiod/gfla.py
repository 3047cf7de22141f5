"""Dense linear algebra over prime fields F_p.

Matrices over F_2 are stored bit packed, 64 entries per ``uint64`` word, and
eliminated with word level XOR. Other primes are stored as ``int64`` residue
arrays. All matrices are immutable once built.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from sympy import isprime

WORD_BITS: int = 64

# Row blocks used when transposing packed matrices (multiple of WORD_BITS).
TRANSPOSE_BLOCK_ROWS: int = 1024

# Rows handed to the echelon accumulator at once by rank().
RANK_BATCH_ROWS: int = 4096

# Dot products of residues below this bound are exact in float64.
_EXACT_FLOAT = 2**53


@lru_cache(maxsize=None)
def check_prime(p) -> int:
    """Returns ``p`` as an ``int`` or raises ``ValueError`` if it is not prime."""
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
        raise ValueError(f"Field characteristic must be an integer, got {p!r}")
    if not isprime(int(p)):
        raise ValueError(f"Field characteristic {p} is not a prime")
    return int(p)


def word_count(cols: int) -> int:
    return (cols + WORD_BITS - 1) // WORD_BITS


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Packs a ``rows x cols`` 0/1 array into ``rows x word_count(cols)`` words."""
    bits = np.asarray(bits)
    rows, cols = bits.shape
    words = word_count(cols)
    if words == 0:
        return np.zeros((rows, 0), dtype=np.uint64)
    packed = np.packbits(bits.astype(np.uint8, copy=False), axis=1, bitorder="little")
    padded = np.zeros((rows, words * 8), dtype=np.uint8)
    padded[:, : packed.shape[1]] = packed
    return padded.view("<u8").astype(np.uint64, copy=False)


def unpack_bits(words: np.ndarray, cols: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`, returns a ``uint8`` array."""
    rows = words.shape[0]
    if cols == 0 or rows == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words.astype("<u8", copy=False)).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, count=cols, bitorder="little")


def _bit_column(words: np.ndarray, col: int) -> np.ndarray:
    shift = np.uint64(col % WORD_BITS)
    return ((words[:, col // WORD_BITS] >> shift) & np.uint64(1)).astype(bool)


class GFMatrix(object):
    """Immutable dense matrix over the prime field F_p.

    :param p:    Prime modulus.
    :param rows: Number of rows.
    :param cols: Number of columns.
    :param data: Backing array, packed words for ``p = 2`` and residues
        otherwise. Use the ``from_*`` constructors instead of passing it.

    Usage::

        >>> from fiperiod.gfla import GFMatrix, rank
        >>> m = GFMatrix.from_array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], p=2)
        >>> rank(m)
        2

    """

    __slots__ = ("p", "rows", "cols", "_data")

    def __init__(self, p, rows, cols, data):
        self.p = check_prime(p)
        self.rows = int(rows)
        self.cols = int(cols)
        self._data = data
        self._data.flags.writeable = False

    @classmethod
    def from_array(cls, array, p) -> "GFMatrix":
        p = check_prime(p)
        values = np.asarray(array, dtype=np.int64)
        if values.ndim == 1:
            values = values.reshape(1, -1)
        if values.ndim != 2:
            raise ValueError(f"Expected a 2-dimensional array, got shape {values.shape}")
        values = np.mod(values, p)
        rows, cols = values.shape
        if p == 2:
            return cls(p, rows, cols, pack_bits(values))
        return cls(p, rows, cols, np.ascontiguousarray(values))

    @classmethod
    def from_words(cls, words, cols) -> "GFMatrix":
        """Wraps packed F_2 words, ``rows x word_count(cols)``."""
        words = np.array(words, dtype=np.uint64, copy=True)
        if words.ndim != 2 or words.shape[1] != word_count(cols):
            raise ValueError(f"Packed words of shape {words.shape} do not hold {cols} columns")
        tail = cols % WORD_BITS
        if tail and words.shape[0]:
            words[:, -1] &= np.uint64((1 << tail) - 1)
        return cls(2, words.shape[0], cols, words)

    @classmethod
    def zeros(cls, p, rows, cols) -> "GFMatrix":
        p = check_prime(p)
        if p == 2:
            return cls(p, rows, cols, np.zeros((rows, word_count(cols)), dtype=np.uint64))
        return cls(p, rows, cols, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p, n) -> "GFMatrix":
        return cls.from_array(np.eye(n, dtype=np.int64), p)

    @classmethod
    def vstack(cls, matrices) -> "GFMatrix":
        matrices = list(matrices)
        if not matrices:
            raise ValueError("Nothing to stack")
        p, cols = matrices[0].p, matrices[0].cols
        for matrix in matrices:
            if matrix.p != p or matrix.cols != cols:
                raise ValueError("Stacked matrices must share field and column count")
        data = np.concatenate([matrix._data for matrix in matrices], axis=0)
        return cls(p, data.shape[0], cols, data)

    @property
    def shape(self):
        return self.rows, self.cols

    @property
    def packed(self) -> bool:
        return self.p == 2

    def to_array(self) -> np.ndarray:
        """Dense ``int64`` residues."""
        if self.packed:
            return unpack_bits(self._data, self.cols).astype(np.int64)
        return self._data.copy()

    def raw(self) -> np.ndarray:
        """Writable copy of the backing array."""
        return self._data.copy()

    def transpose(self) -> "GFMatrix":
        if not self.packed:
            return GFMatrix(self.p, self.cols, self.rows, np.ascontiguousarray(self._data.T))

        out = np.zeros((self.cols, word_count(self.rows)), dtype=np.uint64)
        for start in range(0, self.rows, TRANSPOSE_BLOCK_ROWS):
            stop = min(start + TRANSPOSE_BLOCK_ROWS, self.rows)
            block = unpack_bits(self._data[start:stop], self.cols)
            packed = pack_bits(np.ascontiguousarray(block.T))
            first = start // WORD_BITS
            out[:, first : first + packed.shape[1]] = packed
        return GFMatrix(2, self.cols, self.rows, out)

    @property
    def T(self) -> "GFMatrix":
        return self.transpose()

    def select_columns(self, columns) -> "GFMatrix":
        columns = np.asarray(columns, dtype=np.int64)
        return GFMatrix.from_array(self.to_array()[:, columns], self.p)

    def select_rows(self, rows) -> "GFMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        data = self._data[rows]
        return GFMatrix(self.p, len(rows), self.cols, data)

    def is_zero(self) -> bool:
        return not np.any(self._data)

    def _check_compatible(self, other):
        if not isinstance(other, GFMatrix):
            return NotImplemented
        if other.p != self.p:
            raise ValueError(f"Field mismatch: F_{self.p} and F_{other.p}")
        return None

    def __matmul__(self, other: "GFMatrix") -> "GFMatrix":
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"Cannot multiply {self.shape} by {other.shape}")
        left, right = self.to_array(), other.to_array()
        if self.cols * (self.p - 1) ** 2 < _EXACT_FLOAT:
            product = np.rint(left.astype(np.float64) @ right.astype(np.float64))
            return GFMatrix.from_array(product.astype(np.int64), self.p)
        return GFMatrix.from_array((left @ right) % self.p, self.p)

    def __add__(self, other: "GFMatrix") -> "GFMatrix":
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"Cannot add {self.shape} and {other.shape}")
        if self.packed:
            return GFMatrix(2, self.rows, self.cols, self._data ^ other._data)
        return GFMatrix(self.p, self.rows, self.cols, (self._data + other._data) % self.p)

    def __neg__(self) -> "GFMatrix":
        if self.packed:
            return self
        return GFMatrix(self.p, self.rows, self.cols, (-self._data) % self.p)

    def __sub__(self, other: "GFMatrix") -> "GFMatrix":
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GFMatrix):
            return NotImplemented
        return (
            self.p == other.p
            and self.shape == other.shape
            and np.array_equal(self._data, other._data)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"GFMatrix(p={self.p}, rows={self.rows}, cols={self.cols})"


def _reduce_binary(block, basis, pivots):
    for row, col in zip(basis, pivots):
        mask = _bit_column(block, col)
        if mask.any():
            block[mask] ^= row
    return block


def _reduce_prime(block, basis, pivots, p):
    for row, col in zip(basis, pivots):
        coefficients = block[:, col]
        mask = coefficients != 0
        if mask.any():
            block[mask] = (block[mask] - coefficients[mask, None] * row) % p
    return block


def _rref_binary(words, cols):
    rows = words.shape[0]
    pivots = []
    lead = 0
    for col in range(cols):
        if lead == rows:
            break
        candidates = np.flatnonzero(_bit_column(words[lead:], col))
        if candidates.size == 0:
            continue
        found = lead + candidates[0]
        if found != lead:
            words[[lead, found]] = words[[found, lead]]
        first_word = col // WORD_BITS
        mask = _bit_column(words, col)
        mask[lead] = False
        if mask.any():
            words[mask, first_word:] ^= words[lead, first_word:]
        pivots.append(col)
        lead += 1
    return words[:lead], pivots


def _rref_prime(values, cols, p):
    rows = values.shape[0]
    pivots = []
    lead = 0
    for col in range(cols):
        if lead == rows:
            break
        candidates = np.flatnonzero(values[lead:, col])
        if candidates.size == 0:
            continue
        found = lead + candidates[0]
        if found != lead:
            values[[lead, found]] = values[[found, lead]]
        inverse = pow(int(values[lead, col]), -1, p)
        values[lead] = (values[lead] * inverse) % p
        coefficients = values[:, col].copy()
        coefficients[lead] = 0
        mask = coefficients != 0
        if mask.any():
            values[mask] = (values[mask] - coefficients[mask, None] * values[lead]) % p
        pivots.append(col)
        lead += 1
    return values[:lead], pivots


class RowEchelon(object):
    """Streaming reduced row echelon form of a growing row space.

    Pivoting is leftmost nonzero, first row wins. The stored basis is always
    fully reduced, so its pivot columns are unit columns.

    :param p:    Prime modulus.
    :param cols: Width of the rows.

    Usage::

        >>> from fiperiod.gfla import GFMatrix, RowEchelon
        >>> echelon = RowEchelon(2, 3)
        >>> echelon.extend(GFMatrix.from_array([[1, 1, 0]], p=2))
        1
        >>> echelon.pivots
        (0,)

    """

    def __init__(self, p, cols):
        self.p = check_prime(p)
        self.cols = int(cols)
        empty = GFMatrix.zeros(self.p, 0, self.cols)
        self._rows = empty.raw()
        self._pivots = []

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def pivots(self):
        return tuple(self._pivots)

    def _check(self, block: GFMatrix):
        if block.p != self.p or block.cols != self.cols:
            raise ValueError(
                f"Expected rows over F_{self.p} of width {self.cols}, "
                f"got {block.shape} over F_{block.p}"
            )

    def _reduce_raw(self, data):
        if self.p == 2:
            return _reduce_binary(data, self._rows, self._pivots)
        return _reduce_prime(data, self._rows, self._pivots, self.p)

    def reduce(self, block: GFMatrix) -> GFMatrix:
        """Returns the remainders of ``block`` modulo the row space.

        Remainders vanish on every pivot column; a row reduces to zero iff it
        lies in the row space.
        """
        self._check(block)
        data = self._reduce_raw(block.raw())
        return GFMatrix(self.p, block.rows, self.cols, data)

    def contains(self, vector: GFMatrix) -> bool:
        return self.reduce(vector).is_zero()

    def extend(self, block: GFMatrix) -> int:
        """Adds the rows of ``block`` and returns the rank gained."""
        self._check(block)
        if block.rows == 0:
            return 0
        data = self._reduce_raw(block.raw())
        if self.p == 2:
            fresh, new_pivots = _rref_binary(data, self.cols)
        else:
            fresh, new_pivots = _rref_prime(data, self.cols, self.p)
        if not new_pivots:
            return 0

        old = self._rows
        if old.shape[0]:
            if self.p == 2:
                _reduce_binary(old, fresh, new_pivots)
            else:
                _reduce_prime(old, fresh, new_pivots, self.p)
        pivots = self._pivots + new_pivots
        order = np.argsort(pivots, kind="stable")
        self._rows = np.ascontiguousarray(np.concatenate([old, fresh], axis=0)[order])
        self._pivots = [pivots[i] for i in order]
        return len(new_pivots)

    def basis(self) -> GFMatrix:
        return GFMatrix(self.p, self.rank, self.cols, self._rows.copy())


def rank(matrix: GFMatrix) -> int:
    """Rank of ``matrix`` over its field.

    Usage::

        >>> from fiperiod.gfla import GFMatrix, rank
        >>> rank(GFMatrix.identity(2, 3))
        3

    """
    echelon = RowEchelon(matrix.p, matrix.cols)
    for start in range(0, matrix.rows, RANK_BATCH_ROWS):
        stop = min(start + RANK_BATCH_ROWS, matrix.rows)
        echelon.extend(matrix.select_rows(range(start, stop)))
    return echelon.rank


def echelon_of(matrix: GFMatrix) -> RowEchelon:
    echelon = RowEchelon(matrix.p, matrix.cols)
    echelon.extend(matrix)
    return echelon


def kernel_basis(matrix: GFMatrix) -> GFMatrix:
    """Basis of ``{x : matrix @ x = 0}``, one basis vector per row.

    The vector attached to a free column ``f`` has entry 1 at ``f``, 0 at the
    other free columns and ``-R[j, f]`` at pivot ``j``, where ``R`` is the
    reduced row echelon form of ``matrix``.
    """
    return kernel_coordinates(matrix)[0]


def kernel_coordinates(matrix: GFMatrix):
    """Kernel basis together with its free columns.

    A kernel vector ``x`` equals ``sum_j x[free[j]] * basis[j]``, so the
    entries at the free columns are its coordinates.
    """
    echelon = echelon_of(matrix)
    pivots = list(echelon.pivots)
    free = np.setdiff1d(np.arange(matrix.cols), np.asarray(pivots, dtype=np.int64))
    vectors = np.zeros((free.size, matrix.cols), dtype=np.int64)
    vectors[np.arange(free.size), free] = 1
    if pivots and free.size:
        reduced = echelon.basis().to_array()
        vectors[:, pivots] = (-reduced[:, free].T) % matrix.p
    return GFMatrix.from_array(vectors, matrix.p), free


class QuotientProjector(object):
    """Coordinates on ``ambient / rowspace(R)``.

    The complement coordinates are the non-pivot columns of the reduced row
    echelon form of ``R``; :meth:`reduce` rewrites ambient vectors in them.

    :param echelon:     Reduced row echelon form of the subspace.

    """

    def __init__(self, echelon: RowEchelon):
        self.p = echelon.p
        self.dim_ambient = echelon.cols
        self.echelon = echelon
        self.pivots = echelon.pivots
        mask = np.ones(self.dim_ambient, dtype=bool)
        mask[list(self.pivots)] = False
        self.complement = np.flatnonzero(mask)
        self._position = np.full(self.dim_ambient, -1, dtype=np.int64)
        self._position[self.complement] = np.arange(self.complement.size)
        self._pivot_row = np.full(self.dim_ambient, -1, dtype=np.int64)
        self._pivot_row[list(self.pivots)] = np.arange(len(self.pivots))
        self._relations_on_complement = None

    @property
    def dim(self) -> int:
        return int(self.complement.size)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def position(self, index: int) -> int:
        """Complement position of an ambient index, -1 for pivot columns."""
        return int(self._position[index])

    def reduce(self, vectors: GFMatrix) -> GFMatrix:
        if vectors.cols != self.dim_ambient:
            raise ValueError(f"Expected ambient width {self.dim_ambient}, got {vectors.cols}")
        remainder = self.echelon.reduce(vectors)
        return remainder.select_columns(self.complement)

    def _complement_relations(self) -> GFMatrix:
        if self._relations_on_complement is None:
            basis = self.echelon.basis()
            self._relations_on_complement = basis.select_columns(self.complement)
        return self._relations_on_complement

    def reduce_units(self, indices) -> GFMatrix:
        """Reduced images of the ambient unit vectors ``e_i``, one row each."""
        indices = np.asarray(indices, dtype=np.int64)
        count = indices.size
        positions = self._position[indices]
        units = np.flatnonzero(positions >= 0)
        pivoted = np.flatnonzero(positions < 0)

        if self.p == 2:
            words = np.zeros((count, word_count(self.dim)), dtype=np.uint64)
            cols = positions[units]
            bits = np.left_shift(np.uint64(1), (cols % WORD_BITS).astype(np.uint64))
            np.bitwise_or.at(words, (units, cols // WORD_BITS), bits)
            if pivoted.size:
                relations = self._complement_relations()._data
                words[pivoted] = relations[self._pivot_row[indices[pivoted]]]
            return GFMatrix(2, count, self.dim, words)

        values = np.zeros((count, self.dim), dtype=np.int64)
        values[units, positions[units]] = 1
        if pivoted.size:
            relations = self._complement_relations()._data
            values[pivoted] = (-relations[self._pivot_row[indices[pivoted]]]) % self.p
        return GFMatrix(self.p, count, self.dim, values)


def quotient_projector(relations: GFMatrix, dim_ambient: int) -> QuotientProjector:
    """Projector onto ``F_p^dim_ambient / rowspace(relations)``."""
    if relations.cols != dim_ambient:
        raise ValueError(f"Relations of width {relations.cols} in ambient {dim_ambient}")
    return QuotientProjector(echelon_of(relations))
