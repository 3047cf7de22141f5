"""Symmetric group combinatorics.

Ordered coset representatives ``gamma``, the ``trace`` and ``beta`` maps,
collision classes of ordered subsets and the Coxeter presentation of S_n.
Everything is 1-based: a permutation of ``[n]`` is the tuple of images of
``1..n`` and an injection ``[m] -> [n]`` is the tuple of images of ``1..m``.
"""

from __future__ import annotations

import dataclasses
import itertools
from functools import lru_cache
from math import perm
from typing import Dict, List, NamedTuple, Tuple

import numpy as np
from sympy import binomial
from sympy.ntheory.factor_ import multiplicity_in_factorial


@dataclasses.dataclass(frozen=True)
class Permutation:
    """A bijection of ``{1..n}``, composed right to left.

    Usage::

        >>> s = Permutation((2, 1, 3))
        >>> t = Permutation((1, 3, 2))
        >>> (s * t).images
        (2, 3, 1)

    """

    images: Tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"{images} is not a permutation of 1..{len(images)}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        images = list(range(1, n + 1))
        images[i - 1], images[j - 1] = j, i
        return cls(tuple(images))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.n != self.n:
            raise ValueError(f"Cannot compose permutations of {self.n} and {other.n}")
        return Permutation(tuple(self.images[j - 1] for j in other.images))

    def inverse(self) -> "Permutation":
        inverse = [0] * self.n
        for position, image in enumerate(self.images, start=1):
            inverse[image - 1] = position
        return Permutation(tuple(inverse))

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.n + 1))


@dataclasses.dataclass(frozen=True)
class OrderedSubset:
    """An element ``f`` of ``D_{m,n}``: ``f(1) < ... < f(m)`` inside ``[n]``."""

    n: int
    elements: Tuple[int, ...]

    def __post_init__(self):
        elements = tuple(int(x) for x in self.elements)
        if any(x < 1 or x > self.n for x in elements):
            raise ValueError(f"{elements} is not inside [1, {self.n}]")
        if any(a >= b for a, b in zip(elements, elements[1:])):
            raise ValueError(f"{elements} is not strictly increasing")
        object.__setattr__(self, "elements", elements)

    @property
    def m(self) -> int:
        return len(self.elements)


@dataclasses.dataclass(frozen=True)
class EquivClassKey:
    """Collision class of ``D_{m,n}`` under agreement below ``n - a`` and residues mod ``u``."""

    m: int
    n: int
    a: int
    u: int
    fixed_part: Tuple[int, ...]
    residues: Tuple[int, ...]

    @property
    def b(self) -> int:
        return len(self.residues)


class CoxeterPresentation(NamedTuple):
    generators: Tuple[Permutation, ...]
    relations: Tuple[Tuple[int, ...], ...]


def gamma(f: OrderedSubset) -> Permutation:
    """The shuffle ``gamma_f``: ``[m]`` onto ``f`` and the rest onto the complement, both in order."""
    chosen = set(f.elements)
    rest = tuple(x for x in range(1, f.n + 1) if x not in chosen)
    return Permutation(f.elements + rest)


def beta(m: int, sigma: Permutation) -> OrderedSubset:
    """``sigma^-1([m])`` in increasing order."""
    if m > sigma.n:
        raise ValueError(f"m={m} exceeds the degree {sigma.n}")
    inverse = sigma.inverse()
    return OrderedSubset(sigma.n, tuple(sorted(inverse(i) for i in range(1, m + 1))))


def trace(m: int, sigma: Permutation) -> Tuple[Permutation, Permutation]:
    """Splits ``sigma = h * gamma(beta(m, sigma))^-1`` and returns ``h`` in ``S_m x S_{n-m}``."""
    h = sigma * gamma(beta(m, sigma))
    head = h.images[:m]
    tail = tuple(x - m for x in h.images[m:])
    return Permutation(head), Permutation(tail)


def embed_pair(first: Permutation, second: Permutation) -> Permutation:
    """The image of ``(first, second)`` under ``S_m x S_k -> S_{m+k}``."""
    shift = first.n
    return Permutation(first.images + tuple(x + shift for x in second.images))


def ordered_subsets(m: int, n: int) -> List[OrderedSubset]:
    """``D_{m,n}`` in lexicographic order."""
    return [OrderedSubset(n, c) for c in itertools.combinations(range(1, n + 1), m)]


@lru_cache(maxsize=64)
def injection_array(m: int, n: int) -> np.ndarray:
    """All injections ``[m] -> [n]`` as rows, in lexicographic order of images."""
    if m > n:
        array = np.zeros((0, m), dtype=np.int64)
    elif m == 0:
        array = np.zeros((1, 0), dtype=np.int64)
    else:
        array = np.array(list(itertools.permutations(range(1, n + 1), m)), dtype=np.int64)
    array.flags.writeable = False
    return array


def injection_rank(injections: np.ndarray, n: int) -> np.ndarray:
    """Positions of injections (rows) in the order of :func:`injection_array`."""
    injections = np.asarray(injections, dtype=np.int64)
    count, m = injections.shape
    ranks = np.zeros(count, dtype=np.int64)
    for j in range(m):
        column = injections[:, j]
        smaller_before = np.zeros(count, dtype=np.int64)
        for earlier in range(j):
            smaller_before += injections[:, earlier] < column
        ranks += (column - 1 - smaller_before) * perm(n - j - 1, m - j - 1)
    return ranks


def equiv_key(f: OrderedSubset, a: int, u: int) -> EquivClassKey:
    cut = f.n - a
    return EquivClassKey(
        m=f.m,
        n=f.n,
        a=a,
        u=u,
        fixed_part=tuple(x for x in f.elements if x <= cut),
        residues=tuple(x % u for x in f.elements if x > cut),
    )


def equiv_classes(m: int, n: int, a: int, u: int) -> Dict[EquivClassKey, List[OrderedSubset]]:
    """Partitions ``D_{m,n}`` into collision classes.

    Classes are listed in the lexicographic order of their least members and
    each class lists its members lexicographically.

    Usage::

        >>> classes = equiv_classes(1, 4, 2, 1)
        >>> [len(members) for members in classes.values()]
        [1, 1, 2]

    """
    if not 0 <= m <= n:
        raise ValueError(f"Need 0 <= m <= n, got m={m}, n={n}")
    if not 0 <= a <= n:
        raise ValueError(f"Need 0 <= a <= n, got a={a}, n={n}")
    if u < 1:
        raise ValueError(f"Residue modulus must be positive, got {u}")

    classes: Dict[EquivClassKey, List[OrderedSubset]] = {}
    for f in ordered_subsets(m, n):
        classes.setdefault(equiv_key(f, a, u), []).append(f)
    return classes


def least_member_maximum(key: EquivClassKey) -> int:
    """``o``: the largest element of the lexicographically least member of the class."""
    value = key.n - key.a
    for residue in key.residues:
        start = value + 1
        value = start + (residue - start) % key.u
    return value


def class_size(m: int, n: int, a: int, u: int, key: EquivClassKey) -> Tuple[int, int, int]:
    """Closed form size of a collision class, with its witnesses ``b`` and ``s``.

    ``b`` counts the members' elements above ``n - a``. With ``t = a mod u``
    and ``o`` from :func:`least_member_maximum`, ``s`` is the integer with
    ``(s - 1) u + t < o - (n - a) <= s u + t``, and the size is
    ``C(a // u - s + b, b)``. Classes inside ``[n - a]`` have size 1.
    """
    if (key.m, key.n, key.a, key.u) != (m, n, a, u):
        raise ValueError(f"Key {key} does not belong to (m={m}, n={n}, a={a}, u={u})")
    b = key.b
    if b == 0:
        return 1, 0, 0

    o = least_member_maximum(key)
    if o > n:
        raise ValueError(f"Class {key} has no members")
    t = a % u
    s = (o - (n - a) - t + u - 1) // u
    return int(binomial(a // u - s + b, b)), b, s


def collision_modulus(b: int, u: int, p: int) -> int:
    """``u * p^(v_p(b!) + 1)``; when it divides ``a`` the class size vanishes mod ``p``."""
    return u * p ** (int(multiplicity_in_factorial(p, b)) + 1)


def coxeter_presentation(n: int) -> CoxeterPresentation:
    """Adjacent transpositions ``s_1..s_{n-1}`` with the Coxeter relation words.

    Words list generator indices. Squares come first, then the braid words
    ``(s_i s_{i+1})^3``, then ``(s_i s_j)^2`` for ``j >= i + 2``.
    """
    if n < 1:
        raise ValueError(f"Degree must be positive, got {n}")
    generators = tuple(Permutation.transposition(n, i, i + 1) for i in range(1, n))
    squares = [(i, i) for i in range(1, n)]
    braids = [(i, i + 1) * 3 for i in range(1, n - 1)]
    commuting = [(i, j) * 2 for i in range(1, n) for j in range(i + 2, n)]
    return CoxeterPresentation(generators, tuple(squares + braids + commuting))


def evaluate_word(word, generators) -> Permutation:
    """Product ``g_{w_1} g_{w_2} ...`` of 1-based generator indices."""
    if not generators:
        raise ValueError("No generators to evaluate a word with")
    result = Permutation.identity(generators[0].n)
    for index in word:
        result = result * generators[index - 1]
    return result


def coxeter_word(sigma: Permutation) -> Tuple[int, ...]:
    """A reduced word ``(i_1, ..., i_k)`` with ``sigma = s_{i_1} ... s_{i_k}``."""
    images = list(sigma.images)
    collected = []
    descent = True
    while descent:
        descent = False
        for i in range(len(images) - 1):
            if images[i] > images[i + 1]:
                images[i], images[i + 1] = images[i + 1], images[i]
                collected.append(i + 1)
                descent = True
    return tuple(reversed(collected))


def injections(m: int, n: int) -> List[Tuple[int, ...]]:
    """All injections ``[m] -> [n]`` in lexicographic order."""
    return [tuple(int(x) for x in row) for row in injection_array(m, n)]


class CollisionCheck(NamedTuple):
    applies: bool
    residue: int


def collision_vanishes(m: int, n: int, a: int, u: int, key: EquivClassKey, p: int) -> CollisionCheck:
    """Whether ``u p^(v_p(b!) + 1)`` divides ``a``, with the class size mod ``p``.

    Usage::

        >>> key = equiv_key(OrderedSubset(6, (5,)), 4, 1)
        >>> collision_vanishes(1, 6, 4, 1, key, 2)
        CollisionCheck(applies=True, residue=0)

    """
    size, b, _ = class_size(m, n, a, u, key)
    applies = b >= 1 and a % collision_modulus(b, u, p) == 0
    return CollisionCheck(applies, size % p)
