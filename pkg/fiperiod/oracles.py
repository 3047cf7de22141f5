"""Closed forms for the invariant dimensions of a few worked examples.

They serve as ground truth for the direct computations in small degrees and
as long series for period detection, where direct computation stops being
feasible (free modules of dimension around 10^5 and up).
"""

from __future__ import annotations

import dataclasses
from math import comb
from typing import Dict, Iterable, Optional

from sympy.ntheory import digits

from fiperiod import gfla
from fiperiod.fimod import ALL_INJECTIONS, Element, FIMorphism, FIPresentation, FreeShape, free_presentation
from fiperiod.series import DimensionSeries

ORACLES = ("example1", "intro_kernel", "sphere_h1", "trivial_h1")


@dataclasses.dataclass(frozen=True)
class OracleSeries:
    """A named closed form with its parameters.

    :param name:   One of :data:`ORACLES`.
    :param p:      Prime of the coefficients.
    :param params: Extra parameters, ``{"d": d}`` for ``example1``.

    """

    name: str
    p: int
    params: Dict[str, int] = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.name not in ORACLES:
            raise ValueError(f"Unknown oracle {self.name!r}, expected one of {ORACLES}")
        object.__setattr__(self, "p", gfla.check_prime(self.p))
        if self.name in ("example1", "intro_kernel") and self.p != 2:
            raise ValueError(f"Oracle {self.name} is stated over F_2, got p={self.p}")
        if self.name == "example1" and "d" not in self.params:
            raise ValueError("Oracle example1 needs the generator degree d")

    @property
    def first_level(self) -> int:
        """Smallest level the closed form is stated for."""
        if self.name == "example1":
            return self.params["d"]
        if self.name == "sphere_h1":
            return 1
        return 0

    def __call__(self, n: int) -> int:
        if self.name == "example1":
            return example1_dim(self.params["d"], n)
        if self.name == "intro_kernel":
            return intro_kernel_h0(n)
        if self.name == "sphere_h1":
            return sphere_h1(self.p, n)
        return trivial_h1(self.p, n)


def binom_mod_p(n: int, k: int, p: int) -> int:
    """``C(n, k) mod p`` as the product of the digitwise binomials in base ``p``.

    Usage::

        >>> binom_mod_p(5, 2, 2)
        0

    """
    if n < 0 or k < 0:
        raise ValueError(f"Need nonnegative arguments, got n={n}, k={k}")
    p = gfla.check_prime(p)
    if k > n:
        return 0
    # digits() puts the base first, most significant digit next.
    n_digits = digits(n, p)[1:][::-1]
    k_digits = digits(k, p)[1:][::-1]
    result = 1
    for i, top in enumerate(n_digits):
        bottom = k_digits[i] if i < len(k_digits) else 0
        if bottom > top:
            return 0
        result = result * comb(top, bottom) % p
    return result


def example1_dim(d: int, n: int) -> int:
    """Invariants of ``(M(0) + M(d)) / <(1, sum of all f: [d] -> [d])>`` at level ``n`` over F_2.

    2 when ``C(n-2, d-2)`` is even, and for even ``d`` also ``C(n-1, d-1)``;
    1 otherwise.
    """
    if d < 3:
        raise ValueError(f"Need d >= 3, got {d}")
    if n < d:
        raise ValueError(f"Need n >= d, got n={n}, d={d}")
    even = binom_mod_p(n - 2, d - 2, 2) == 0
    if d % 2 == 0:
        even = even and binom_mod_p(n - 1, d - 1, 2) == 0
    return 2 if even else 1


def example1_presentation(d: int) -> FIPresentation:
    """``M(0) + M(d)`` modulo the degree ``d`` element ``(1, sum over S_d)``."""
    if d < 3:
        raise ValueError(f"Need d >= 3, got {d}")
    shape = FreeShape(2, (0, d))
    relation = Element.from_terms(shape, d, [(0, (), 1), (1, ALL_INJECTIONS, 1)])
    return FIPresentation(shape=shape, relations=(relation,))


def intro_kernel_h0(n: int) -> int:
    """Invariants of the kernel of ``F_2^n -> F_2``, ``a -> sum a_i``."""
    if n < 0:
        raise ValueError(f"Level must be nonnegative, got {n}")
    return 1 if n >= 2 and n % 2 == 0 else 0


def intro_kernel_presentation() -> FIPresentation:
    """Kernel of the sum map ``M(1) -> M(0)`` over F_2."""
    source, target = free_presentation(2, (1,)), free_presentation(2, (0,))
    image = Element.from_terms(target.shape, 1, [(0, (), 1)])
    return FIPresentation(kernel_of=FIMorphism(source, target, (image,)))


def sphere_h1(p: int, n: int) -> int:
    """``H^1`` of the unordered configuration space of ``n`` points on the 2-sphere."""
    p = gfla.check_prime(p)
    if n < 1:
        raise ValueError(f"Need n >= 1, got {n}")
    return 1 if (2 * n - 2) % p == 0 else 0


def trivial_h1(p: int, n: int) -> int:
    """``H^1(S_n, F_p) = Hom(S_n, F_p)``: one dimension for ``p = 2`` and ``n >= 2``."""
    p = gfla.check_prime(p)
    if n < 0:
        raise ValueError(f"Level must be nonnegative, got {n}")
    return 1 if p == 2 and n >= 2 else 0


def oracle_series(name: str, p: int, n_range: Iterable[int], d: Optional[int] = None) -> DimensionSeries:
    """The closed form ``name`` over a contiguous range of levels.

    Usage::

        >>> oracle_series("sphere_h1", 3, range(1, 7)).values
        (1, 0, 0, 1, 0, 0)

    """
    oracle = OracleSeries(name, p, {} if d is None else {"d": d})
    levels = list(n_range)
    if not levels:
        raise ValueError("Empty level range")
    if levels != list(range(levels[0], levels[0] + len(levels))):
        raise ValueError("Level range must be contiguous")
    if levels[0] < oracle.first_level:
        raise ValueError(f"Oracle {name} starts at n={oracle.first_level}, got {levels[0]}")
    return DimensionSeries(levels[0], tuple(oracle(n) for n in levels), label="oracle")
