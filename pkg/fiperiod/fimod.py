"""Finitely generated FI-modules over F_p and their evaluation at levels n.

A module is either presented, ``M(m_1) + ... + M(m_d)`` modulo the sub
FI-module generated by finitely many relation elements, or the kernel of a
morphism between two presented modules. Either form may be shifted.

Bases are deterministic: free basis indices are sorted by generator and then
by the lexicographic order of the injection's image sequence, and the basis
of a quotient is the set of non-pivot free indices of the reduced relation
span.
"""

from __future__ import annotations

import dataclasses
import json
from functools import lru_cache
from math import perm
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from fiperiod import gfla, symcore
from fiperiod.errors import DegreeMismatchError, IllDefinedMorphismError, InfeasibleSizeError, SpecError
from fiperiod.gfla import GFMatrix, QuotientProjector, RowEchelon
from fiperiod.series import DimensionSeries
from fiperiod.symcore import Permutation

ALL_INJECTIONS: str = "*"

# Entries per dense block of pushed forward rows.
ROW_BATCH_ENTRIES: int = 4_000_000


@dataclasses.dataclass(frozen=True)
class FreeShape:
    """Ordered generator degrees of ``M(m_1) + ... + M(m_d)`` over F_p."""

    p: int
    degrees: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", gfla.check_prime(self.p))
        degrees = tuple(int(m) for m in self.degrees)
        if not degrees:
            raise ValueError("A free shape needs at least one generator")
        if any(m < 0 for m in degrees):
            raise ValueError(f"Generator degrees must be nonnegative, got {degrees}")
        object.__setattr__(self, "degrees", degrees)

    @property
    def d(self) -> int:
        return len(self.degrees)

    @property
    def D(self) -> int:
        return max(self.degrees)

    def block_sizes(self, n: int) -> List[int]:
        return [perm(n, m) for m in self.degrees]

    def offsets(self, n: int) -> List[int]:
        sizes = self.block_sizes(n)
        return [sum(sizes[:g]) for g in range(self.d)]


class FreeBasisIndex(NamedTuple):
    gen: int
    inj: Tuple[int, ...]


def free_dim(shape: FreeShape, n: int) -> int:
    """``sum_i n! / (n - m_i)!``, counting only generators with ``m_i <= n``."""
    return sum(shape.block_sizes(n))


def basis_position(shape: FreeShape, n: int, index: FreeBasisIndex) -> int:
    rank = symcore.injection_rank(np.asarray([index.inj], dtype=np.int64).reshape(1, -1), n)
    return shape.offsets(n)[index.gen] + int(rank[0])


def free_basis(shape: FreeShape, n: int) -> List[FreeBasisIndex]:
    basis = []
    for gen, m in enumerate(shape.degrees):
        for inj in symcore.injection_array(m, n):
            basis.append(FreeBasisIndex(gen, tuple(int(x) for x in inj)))
    return basis


def _check_injection(inj, k: int, n: int, what: str):
    if len(inj) != k:
        raise DegreeMismatchError(f"{what} has length {len(inj)}, expected {k}")
    if len(set(inj)) != len(inj) or any(x < 1 or x > n for x in inj):
        raise DegreeMismatchError(f"{what} {tuple(inj)} is not an injection into [{n}]")


@dataclasses.dataclass(frozen=True)
class Element:
    """A finitely supported vector of ``(M(m_1) + ... + M(m_d))_degree``.

    Coefficients are stored as a sorted tuple of ``(FreeBasisIndex, c)``
    pairs with ``0 < c < p``; use :meth:`from_terms` to build one.
    """

    shape: FreeShape
    degree: int
    coeffs: Tuple[Tuple[FreeBasisIndex, int], ...] = ()

    @classmethod
    def from_terms(cls, shape: FreeShape, degree: int, terms: Iterable) -> "Element":
        """Builds an element from ``(gen, inj, c)`` triples.

        ``inj`` is a sequence of images or ``"*"`` for the sum over all
        injections ``[m_gen] -> [degree]``.
        """
        if degree < 0:
            raise DegreeMismatchError(f"Element degree must be nonnegative, got {degree}")
        accumulated: Dict[FreeBasisIndex, int] = {}
        for gen, inj, c in terms:
            if not 0 <= gen < shape.d:
                raise ValueError(f"Generator {gen} outside 0..{shape.d - 1}")
            m = shape.degrees[gen]
            if isinstance(inj, str):
                if inj != ALL_INJECTIONS:
                    raise ValueError(f"Unknown injection macro {inj!r}")
                injections = [tuple(int(x) for x in row) for row in symcore.injection_array(m, degree)]
            else:
                _check_injection(inj, m, degree, "Injection")
                injections = [tuple(int(x) for x in inj)]
            for image in injections:
                key = FreeBasisIndex(gen, image)
                accumulated[key] = (accumulated.get(key, 0) + int(c)) % shape.p
        coeffs = tuple(sorted((key, c) for key, c in accumulated.items() if c))
        return cls(shape, degree, coeffs)

    @classmethod
    def generator(cls, shape: FreeShape, gen: int) -> "Element":
        """The generator of ``M(m_gen)`` at its own degree."""
        m = shape.degrees[gen]
        return cls.from_terms(shape, m, [(gen, tuple(range(1, m + 1)), 1)])

    def terms(self) -> Dict[FreeBasisIndex, int]:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def vector(self) -> np.ndarray:
        """Dense coordinates in the free basis at ``self.degree``."""
        values = np.zeros(free_dim(self.shape, self.degree), dtype=np.int64)
        for key, c in self.coeffs:
            values[basis_position(self.shape, self.degree, key)] += c
        return values % self.shape.p

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "terms": [{"gen": key.gen, "inj": list(key.inj), "c": c} for key, c in self.coeffs],
        }


def pushforward(e: Element, f, n: int) -> Element:
    """``f_*(e)`` for an injection ``f: [degree(e)] -> [n]`` given by its images."""
    f = tuple(int(x) for x in f)
    _check_injection(f, e.degree, n, "Pushforward map")
    terms = [(key.gen, tuple(f[x - 1] for x in key.inj), c) for key, c in e.coeffs]
    return Element.from_terms(e.shape, n, terms)


def _pushforward_blocks(e: Element, n: int, batch: int):
    """Dense blocks of ``f_*(e)`` for all injections ``f`` in lexicographic order."""
    shape = e.shape
    ambient = free_dim(shape, n)
    offsets = shape.offsets(n)
    injections = symcore.injection_array(e.degree, n)
    terms = [(key.gen, np.asarray(key.inj, dtype=np.int64) - 1, c) for key, c in e.coeffs]
    for start in range(0, injections.shape[0], batch):
        chunk = injections[start : start + batch]
        rows = np.arange(chunk.shape[0])
        block = np.zeros((chunk.shape[0], ambient), dtype=np.int64)
        for gen, columns, c in terms:
            composed = chunk[:, columns]
            positions = offsets[gen] + symcore.injection_rank(composed, n)
            np.add.at(block, (rows, positions), c)
        yield block % shape.p


def _row_batch(width: int) -> int:
    return max(1, ROW_BATCH_ENTRIES // max(width, 1))


def _ambient_map(shape: FreeShape, source_level: int, target_level: int, iota) -> np.ndarray:
    """Free index ``(gen, g)`` at ``source_level`` to ``(gen, iota o g)`` at ``target_level``."""
    iota = np.asarray(iota, dtype=np.int64)
    source_offsets = shape.offsets(source_level)
    target_offsets = shape.offsets(target_level)
    out = np.empty(free_dim(shape, source_level), dtype=np.int64)
    for gen, m in enumerate(shape.degrees):
        injections = symcore.injection_array(m, source_level)
        count = injections.shape[0]
        if count == 0:
            continue
        composed = iota[injections - 1]
        start = source_offsets[gen]
        out[start : start + count] = target_offsets[gen] + symcore.injection_rank(composed, target_level)
    return out


def _swap(level: int, i: int) -> np.ndarray:
    images = np.arange(1, level + 1, dtype=np.int64)
    images[[i - 1, i]] = images[[i, i - 1]]
    return images


@lru_cache(maxsize=32)
def _relation_projector(shape: FreeShape, relations: Tuple[Element, ...], level: int) -> QuotientProjector:
    ambient = free_dim(shape, level)
    echelon = RowEchelon(shape.p, ambient)
    if ambient:
        batch = _row_batch(ambient)
        for relation in relations:
            if relation.degree > level or relation.is_zero():
                continue
            for block in _pushforward_blocks(relation, level, batch):
                block = block[block.any(axis=1)]
                if block.shape[0]:
                    echelon.extend(GFMatrix.from_array(np.unique(block, axis=0), shape.p))
    return QuotientProjector(echelon)


class LevelData(object):
    """The ``S_n``-representation ``V_n``.

    Generator actions are matrices of ``s_1..s_{n-1}`` in column convention
    (column ``j`` holds the image of basis vector ``j``) and are built on
    first use.
    """

    def __init__(self, n: int, p: int, dim: int):
        self.n = n
        self.p = p
        self.dim = dim
        self._actions = None

    @property
    def generator_actions(self) -> Tuple[GFMatrix, ...]:
        if self._actions is None:
            self._actions = tuple(self._build_actions())
        return self._actions

    def _build_actions(self):
        raise NotImplementedError

    def act(self, sigma: Permutation) -> GFMatrix:
        """Action matrix of an arbitrary ``sigma`` in ``S_n``."""
        if sigma.n != self.n:
            raise ValueError(f"Permutation of degree {sigma.n} does not act on level {self.n}")
        result = GFMatrix.identity(self.p, self.dim)
        for i in symcore.coxeter_word(sigma):
            result = result @ self.generator_actions[i - 1]
        return result

    def satisfies_coxeter_relations(self) -> bool:
        if self.n < 2:
            return True
        identity = GFMatrix.identity(self.p, self.dim)
        for word in symcore.coxeter_presentation(self.n).relations:
            product = identity
            for i in word:
                product = product @ self.generator_actions[i - 1]
            if product != identity:
                return False
        return True


class QuotientLevel(LevelData):
    """Level of a presented module.

    :param n:            Level.
    :param shape:        Free cover.
    :param base_level:   Level of the unshifted module, ``n + shift``.
    :param reduction:    Projector onto the quotient by the relation span.
    :param permutations: For each ``s_i``, the permutation of free indices it induces.

    """

    def __init__(self, n, shape, base_level, reduction: QuotientProjector, permutations):
        super().__init__(n, shape.p, reduction.dim)
        self.shape = shape
        self.base_level = base_level
        self.reduction = reduction
        self.permutations = tuple(permutations)

    @property
    def dim_ambient(self) -> int:
        return self.reduction.dim_ambient

    def _build_actions(self):
        complement = self.reduction.complement
        for permutation in self.permutations:
            yield self.reduction.reduce_units(permutation[complement]).transpose()

    def basis_labels(self) -> List[FreeBasisIndex]:
        basis = free_basis(self.shape, self.base_level)
        return [basis[i] for i in self.reduction.complement]


class KernelLevel(LevelData):
    """Level of a kernel module, a subspace of the source module's level.

    :param n:            Level.
    :param source:       Level of the morphism's source.
    :param kernel:       Kernel basis, one row per vector, in source coordinates.
    :param coordinates:  Source columns read off as kernel coordinates.

    """

    def __init__(self, n, source: QuotientLevel, kernel: GFMatrix, coordinates):
        super().__init__(n, source.p, kernel.rows)
        self.source = source
        self.kernel = kernel
        self.coordinates = np.asarray(coordinates, dtype=np.int64)

    def _build_actions(self):
        transposed = self.kernel.transpose()
        for action in self.source.generator_actions:
            yield (action @ transposed).select_rows(self.coordinates)


@dataclasses.dataclass(frozen=True)
class FIPresentation:
    """A finitely presented FI-module, a kernel of a morphism, or a shift of either.

    Usage::

        >>> from fiperiod.fimod import FIPresentation, dim_series
        >>> module = FIPresentation.from_dict({"p": 2, "generators": [2], "relations": []})
        >>> dim_series(module, range(0, 5)).values
        (0, 0, 2, 6, 12)

    """

    shape: Optional[FreeShape] = None
    relations: Tuple[Element, ...] = ()
    kernel_of: Optional["FIMorphism"] = None
    shift: int = 0

    def __post_init__(self):
        if (self.shape is None) == (self.kernel_of is None):
            raise ValueError("A presentation is either presented by a shape or a kernel, not both")
        if self.shift < 0:
            raise ValueError(f"Shift must be nonnegative, got {self.shift}")
        relations = tuple(self.relations)
        if self.kernel_of is not None and relations:
            raise ValueError("Kernel presentations carry no relations")
        for relation in relations:
            if relation.shape != self.shape:
                raise ValueError("Relation lives in a different free module")
        object.__setattr__(self, "relations", relations)

    @property
    def p(self) -> int:
        if self.kernel_of is not None:
            return self.kernel_of.source.p
        return self.shape.p

    @property
    def is_kernel(self) -> bool:
        return self.kernel_of is not None

    @classmethod
    def from_json(cls, text: str) -> "FIPresentation":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as error:
            raise SpecError(error.msg, f"line {error.lineno} column {error.colno}") from error
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data, path: str = "") -> "FIPresentation":
        if not isinstance(data, dict):
            raise SpecError("expected an object", path or "<root>")
        shift = _int_field(data, "shift", path, default=0)

        if "kernel_of" in data:
            morphism = _morphism_from_dict(data["kernel_of"], _join(path, "kernel_of"))
            if "p" in data and data["p"] != morphism.source.p:
                raise SpecError("prime differs from the kernel's modules", _join(path, "p"))
            return cls(kernel_of=morphism, shift=shift)

        p = _int_field(data, "p", path)
        degrees = data.get("generators")
        if not isinstance(degrees, list) or not degrees or not all(isinstance(m, int) for m in degrees):
            raise SpecError("expected a nonempty list of integer degrees", _join(path, "generators"))
        try:
            shape = FreeShape(p, tuple(degrees))
        except ValueError as error:
            raise SpecError(str(error), path or "<root>") from error

        relations = data.get("relations", [])
        if not isinstance(relations, list):
            raise SpecError("expected a list", _join(path, "relations"))
        parsed = tuple(
            _element_from_dict(shape, item, f"{_join(path, 'relations')}[{i}]")
            for i, item in enumerate(relations)
        )
        return cls(shape=shape, relations=parsed, shift=shift)

    def to_dict(self) -> dict:
        if self.kernel_of is not None:
            morphism = self.kernel_of
            body = {
                "kernel_of": {
                    "source": morphism.source.to_dict(),
                    "target": morphism.target.to_dict(),
                    "images": [image.to_dict() for image in morphism.images],
                }
            }
        else:
            body = {
                "p": self.shape.p,
                "generators": list(self.shape.degrees),
                "relations": [relation.to_dict() for relation in self.relations],
            }
        if self.shift:
            body["shift"] = self.shift
        return body


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _int_field(data: dict, key: str, path: str, default=None) -> int:
    if key not in data:
        if default is None:
            raise SpecError("missing field", _join(path, key))
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(f"expected an integer, got {value!r}", _join(path, key))
    return value


def _element_from_dict(shape: FreeShape, data, path: str, degree: Optional[int] = None) -> Element:
    if not isinstance(data, dict):
        raise SpecError("expected an object", path)
    if "degree" in data or degree is None:
        degree_value = _int_field(data, "degree", path)
        if degree is not None and degree_value != degree:
            raise SpecError(f"expected degree {degree}, got {degree_value}", _join(path, "degree"))
        degree = degree_value
    terms = data.get("terms", [])
    if not isinstance(terms, list):
        raise SpecError("expected a list", _join(path, "terms"))

    triples = []
    for i, term in enumerate(terms):
        term_path = f"{_join(path, 'terms')}[{i}]"
        if not isinstance(term, dict):
            raise SpecError("expected an object", term_path)
        gen = _int_field(term, "gen", term_path)
        c = _int_field(term, "c", term_path, default=1)
        inj = term.get("inj")
        if not (inj == ALL_INJECTIONS or (isinstance(inj, list) and all(isinstance(x, int) for x in inj))):
            raise SpecError('expected a list of images or "*"', _join(term_path, "inj"))
        try:
            triples.append((gen, inj, c))
            Element.from_terms(shape, degree, [(gen, inj, c)])
        except ValueError as error:
            raise SpecError(str(error), term_path) from error
    return Element.from_terms(shape, degree, triples)


def _morphism_from_dict(data, path: str) -> "FIMorphism":
    if not isinstance(data, dict):
        raise SpecError("expected an object", path)
    source = FIPresentation.from_dict(data.get("source"), _join(path, "source"))
    target = FIPresentation.from_dict(data.get("target"), _join(path, "target"))
    if source.is_kernel or target.is_kernel or source.shift or target.shift:
        raise SpecError("source and target must be unshifted presented modules", path)
    if source.p != target.p:
        raise SpecError(f"source over F_{source.p}, target over F_{target.p}", path)
    images = data.get("images")
    if not isinstance(images, list) or len(images) != source.shape.d:
        raise SpecError(f"expected {source.shape.d} images", _join(path, "images"))
    parsed = tuple(
        _element_from_dict(target.shape, item, f"{_join(path, 'images')}[{i}]", degree=m)
        for i, (item, m) in enumerate(zip(images, source.shape.degrees))
    )
    try:
        return FIMorphism(source, target, parsed)
    except IllDefinedMorphismError as error:
        raise SpecError(str(error), path) from error


def apply_morphism(phi: "FIMorphism", e: Element) -> Element:
    """``phi(e)``, sending ``(i, g)`` to ``g_*(image_i)``."""
    terms = []
    for key, c in e.coeffs:
        image = pushforward(phi.images[key.gen], key.inj, e.degree)
        terms.extend((k.gen, k.inj, c * coefficient) for k, coefficient in image.coeffs)
    return Element.from_terms(phi.target.shape, e.degree, terms)


@dataclasses.dataclass(frozen=True)
class FIMorphism:
    """A morphism of presented modules given by the images of the source generators.

    Construction checks that every source relation lands in the target's
    relation span at the relation's own degree.
    """

    source: FIPresentation
    target: FIPresentation
    images: Tuple[Element, ...]

    def __post_init__(self):
        for module in (self.source, self.target):
            if module.is_kernel or module.shift:
                raise ValueError("Morphisms connect unshifted presented modules")
        if self.source.p != self.target.p:
            raise ValueError(f"Prime mismatch: F_{self.source.p} and F_{self.target.p}")
        images = tuple(self.images)
        if len(images) != self.source.shape.d:
            raise ValueError(f"Expected {self.source.shape.d} images, got {len(images)}")
        for image, m in zip(images, self.source.shape.degrees):
            if image.shape != self.target.shape or image.degree != m:
                raise DegreeMismatchError(f"Image must be a target element of degree {m}")
        object.__setattr__(self, "images", images)

        target = self.target
        for index, relation in enumerate(self.source.relations):
            image = apply_morphism(self, relation)
            projector = _relation_projector(target.shape, target.relations, relation.degree)
            vector = GFMatrix.from_array(image.vector().reshape(1, -1), target.p)
            if vector.cols and not projector.echelon.contains(vector):
                raise IllDefinedMorphismError(
                    f"Source relation {index} does not map into the target relations"
                )


def free_presentation(p: int, degrees) -> FIPresentation:
    return FIPresentation(shape=FreeShape(p, tuple(degrees)))


def trivial_presentation(p: int) -> FIPresentation:
    """``M(0)``, the constant module with trivial actions."""
    return free_presentation(p, (0,))


def induced_presentation(p: int, m: int, kind: str = "trivial") -> FIPresentation:
    """``M(W)`` for ``W`` the trivial or sign representation of ``S_m``.

    Presented as ``M(m)`` modulo ``e_id - e_{s_i}`` (trivial) or
    ``e_id + e_{s_i}`` (sign), all of degree ``m``.
    """
    if kind not in ("trivial", "sign"):
        raise ValueError(f"Unknown coefficient representation {kind!r}")
    shape = FreeShape(p, (m,))
    identity = tuple(range(1, m + 1))
    sign = -1 if kind == "trivial" else 1
    relations = tuple(
        Element.from_terms(shape, m, [(0, identity, 1), (0, _swap(m, i).tolist(), sign)])
        for i in range(1, m)
    )
    return FIPresentation(shape=shape, relations=relations)


def identity_morphism(module: FIPresentation) -> FIMorphism:
    images = tuple(Element.generator(module.shape, gen) for gen in range(module.shape.d))
    return FIMorphism(module, module, images)


def zero_morphism(source: FIPresentation, target: FIPresentation) -> FIMorphism:
    images = tuple(Element(target.shape, m) for m in source.shape.degrees)
    return FIMorphism(source, target, images)


def _quotient_level(module: FIPresentation, n: int, base_level: int) -> QuotientLevel:
    shape = module.shape
    projector = _relation_projector(shape, module.relations, base_level)
    permutations = [_ambient_map(shape, base_level, base_level, _swap(base_level, i)) for i in range(1, n)]
    return QuotientLevel(n, shape, base_level, projector, permutations)


def _morphism_rows(phi: FIMorphism, level: int) -> GFMatrix:
    """Images of the source basis at ``level``, one row each, in target coordinates."""
    source = _relation_projector(phi.source.shape, phi.source.relations, level)
    target = _relation_projector(phi.target.shape, phi.target.relations, level)
    ambient = free_dim(phi.target.shape, level)
    blocks = [np.zeros((0, ambient), dtype=np.int64)]
    for image in phi.images:
        blocks.extend(_pushforward_blocks(image, level, _row_batch(ambient)))
    full = np.concatenate(blocks, axis=0)
    return target.reduce(GFMatrix.from_array(full[source.complement], phi.source.p))


def morphism_matrix(phi: FIMorphism, n: int) -> GFMatrix:
    """The map ``V_n -> W_n`` in column convention."""
    return _morphism_rows(phi, n).transpose()


@lru_cache(maxsize=32)
def _kernel_at(phi: FIMorphism, level: int) -> Tuple[GFMatrix, np.ndarray]:
    return gfla.kernel_coordinates(morphism_matrix(phi, level))


def evaluate(module: FIPresentation, n: int) -> LevelData:
    """``V_n`` with its ``S_n``-action.

    Usage::

        >>> from fiperiod.fimod import evaluate, free_presentation
        >>> evaluate(free_presentation(2, (1, 3)), 3).dim
        9

    """
    if n < 0:
        raise ValueError(f"Level must be nonnegative, got {n}")
    base_level = n + module.shift
    if module.kernel_of is None:
        return _quotient_level(module, n, base_level)
    phi = module.kernel_of
    source = _quotient_level(phi.source, n, base_level)
    kernel, coordinates = _kernel_at(phi, base_level)
    return KernelLevel(n, source, kernel, coordinates)


def ambient_dim(module: FIPresentation, n: int) -> int:
    """Width of the free modules an evaluation at ``n`` works in."""
    base_level = n + module.shift
    if module.kernel_of is None:
        return free_dim(module.shape, base_level)
    phi = module.kernel_of
    return free_dim(phi.source.shape, base_level) + free_dim(phi.target.shape, base_level)


def check_feasible(module: FIPresentation, n_range: Iterable[int], cap: int) -> None:
    """Raises :class:`InfeasibleSizeError` at the first level whose ambient dimension exceeds ``cap``."""
    for n in n_range:
        dimension = ambient_dim(module, n)
        if dimension > cap:
            raise InfeasibleSizeError(n, dimension, cap)


def shift(module: FIPresentation, a: int) -> FIPresentation:
    """``S_{+a} V``: level ``n`` is level ``n + a`` restricted to ``S_n``.

    The extra ``a`` points are the last ones, so ``S_n`` acts through
    ``s_1..s_{n-1}``.
    """
    if a < 1:
        raise ValueError(f"Shift amount must be positive, got {a}")
    return dataclasses.replace(module, shift=module.shift + a)


def _base_map_rows(module: FIPresentation, source_level: int, target_level: int, iota) -> GFMatrix:
    """Images of the basis at ``source_level`` under ``iota_*``, rows in target coordinates.

    Levels are those of the unshifted module.
    """
    if module.kernel_of is None:
        source = _relation_projector(module.shape, module.relations, source_level)
        target = _relation_projector(module.shape, module.relations, target_level)
        mapped = _ambient_map(module.shape, source_level, target_level, iota)
        return target.reduce_units(mapped[source.complement])

    phi = module.kernel_of
    rows = _base_map_rows(phi.source, source_level, target_level, iota)
    kernel, _ = _kernel_at(phi, source_level)
    _, coordinates = _kernel_at(phi, target_level)
    return (kernel @ rows).select_columns(coordinates)


def natural_map_matrix(module: FIPresentation, a: int, n: int) -> GFMatrix:
    """``X_a: V_n -> (S_{+a} V)_n = V_{n+a}`` in column convention."""
    if a < 1:
        raise ValueError(f"Shift amount must be positive, got {a}")
    s = module.shift
    iota = list(range(1, n + 1)) + list(range(n + a + 1, n + a + s + 1))
    return _base_map_rows(_unshifted(module), n + s, n + a + s, iota).transpose()


def torsion_kernel_dim(module: FIPresentation, a: int, n: int) -> int:
    """Dimension of the kernel of ``X_a`` at level ``n``."""
    matrix = natural_map_matrix(module, a, n)
    return matrix.cols - gfla.rank(matrix)


def transfer_matrix(module: FIPresentation, m: int, n: int) -> GFMatrix:
    """``T: M(V_m)_n -> V_n``, ``(f, v) -> f_* v`` over ``f`` in ``D_{m,n}``.

    Source coordinates are ordered by ``f`` lexicographically, then by the
    basis of ``V_m``.
    """
    if not 0 <= m <= n:
        raise ValueError(f"Need 0 <= m <= n, got m={m}, n={n}")
    s = module.shift
    core = _unshifted(module)
    tail = tuple(range(n + 1, n + s + 1))
    blocks = [
        _base_map_rows(core, m + s, n + s, f.elements + tail) for f in symcore.ordered_subsets(m, n)
    ]
    return GFMatrix.vstack(blocks).transpose()


def induced_action(module: FIPresentation, m: int, n: int, i: int) -> GFMatrix:
    """Action of ``s_i`` on ``M(V_m)_n``, in the coordinates of :func:`transfer_matrix`.

    ``s_i o f = g o tau`` with ``g`` order preserving, so ``(f, v)`` goes to
    ``(g, tau v)``.
    """
    level = evaluate(module, m)
    subsets = symcore.ordered_subsets(m, n)
    position = {f.elements: index for index, f in enumerate(subsets)}
    swap = Permutation.transposition(n, i, i + 1)
    size = level.dim
    matrix = np.zeros((len(subsets) * size, len(subsets) * size), dtype=np.int64)
    for column, f in enumerate(subsets):
        moved = tuple(swap(x) for x in f.elements)
        g = tuple(sorted(moved))
        tau = Permutation(tuple(g.index(x) + 1 for x in moved))
        row = position[g]
        block = level.act(tau).to_array()
        matrix[row * size : (row + 1) * size, column * size : (column + 1) * size] = block
    return GFMatrix.from_array(matrix, module.p)


def _unshifted(module: FIPresentation) -> FIPresentation:
    if module.shift == 0:
        return module
    return dataclasses.replace(module, shift=0)


def dim_series(module: FIPresentation, n_range: Iterable[int]) -> DimensionSeries:
    levels = list(n_range)
    if not levels:
        raise ValueError("Empty level range")
    if levels != list(range(levels[0], levels[0] + len(levels))):
        raise ValueError("Level range must be contiguous")
    return DimensionSeries(levels[0], tuple(evaluate(module, n).dim for n in levels))


def permutation_action(level: LevelData, sigma: Permutation) -> GFMatrix:
    """Matrix of ``sigma`` on ``V_n``, built from a reduced Coxeter word."""
    return level.act(sigma)
