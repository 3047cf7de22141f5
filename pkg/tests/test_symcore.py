import itertools
import random

import pytest
from sympy.ntheory.factor_ import multiplicity_in_factorial

from fiperiod import symcore
from fiperiod.symcore import OrderedSubset, Permutation


def random_permutation(rng, n):
    images = list(range(1, n + 1))
    rng.shuffle(images)
    return Permutation(tuple(images))


def test_permutation_rejects_non_bijections():
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))


def test_composition_is_right_to_left():
    s, t = Permutation((2, 1, 3)), Permutation((1, 3, 2))
    assert (s * t)(2) == s(t(2))
    assert (s * t).images == (2, 3, 1)
    assert (s * s.inverse()).is_identity()


@pytest.mark.parametrize(
    "n, elements, images",
    [
        (3, (1,), (1, 2, 3)),
        (3, (2,), (2, 1, 3)),
        (4, (2, 4), (2, 4, 1, 3)),
    ],
)
def test_gamma(n, elements, images):
    assert symcore.gamma(OrderedSubset(n, elements)).images == images


def test_beta_examples():
    assert symcore.beta(1, Permutation((2, 1, 3))).elements == (2,)
    assert symcore.beta(2, Permutation((2, 3, 1))).elements == (1, 3)
    assert symcore.beta(2, Permutation.identity(4)).elements == (1, 2)


def test_trace_examples():
    head, tail = symcore.trace(1, Permutation((2, 1, 3)))
    assert head.is_identity() and tail.is_identity()

    sigma = symcore.embed_pair(Permutation((2, 1)), Permutation((3, 1, 2)))
    assert symcore.trace(2, sigma) == (Permutation((2, 1)), Permutation((3, 1, 2)))


def test_trace_beta_identities():
    rng = random.Random(2024)
    for _ in range(10_000):
        n = rng.randrange(1, 9)
        m = rng.randrange(0, n + 1)
        a, b = random_permutation(rng, n), random_permutation(rng, n)

        g = symcore.beta(m, a)
        h = symcore.embed_pair(*symcore.trace(m, a))
        assert a == h * symcore.gamma(g).inverse()

        shuffle_inverse = symcore.gamma(g).inverse()
        left = symcore.embed_pair(*symcore.trace(m, a * b))
        right = h * symcore.embed_pair(*symcore.trace(m, shuffle_inverse * b))
        assert left == right

        expected = tuple(sorted(b.inverse()(x) for x in g.elements))
        assert symcore.beta(m, a * b).elements == expected
        assert symcore.beta(m, shuffle_inverse * b).elements == expected


def test_equal_traces_give_order_preserving_transition():
    rng = random.Random(7)
    n, m = 6, 3
    by_trace = {}
    for images in itertools.permutations(range(1, n + 1)):
        sigma = Permutation(images)
        by_trace.setdefault(symcore.trace(m, sigma), []).append(sigma)
    for group in by_trace.values():
        first = group[0]
        for other in rng.sample(group, min(5, len(group))):
            transition = other.inverse() * first
            source = symcore.beta(m, first).elements
            mapped = [transition(x) for x in source]
            assert mapped == sorted(mapped)
            assert tuple(mapped) == symcore.beta(m, other).elements


@pytest.mark.parametrize(
    "m, n, a, u, sizes",
    [
        (1, 3, 2, 1, [1, 2]),
        (1, 4, 2, 1, [1, 1, 2]),
        (2, 4, 0, 1, [1] * 6),
    ],
)
def test_equiv_classes(m, n, a, u, sizes):
    classes = symcore.equiv_classes(m, n, a, u)
    assert [len(members) for members in classes.values()] == sizes


def test_class_size_example():
    key = symcore.equiv_key(OrderedSubset(4, (3,)), 2, 1)
    assert symcore.class_size(1, 4, 2, 1, key) == (2, 1, 1)


def test_class_size_inside_cut_is_one():
    key = symcore.equiv_key(OrderedSubset(5, (1, 2)), 3, 2)
    assert symcore.class_size(2, 5, 3, 2, key) == (1, 0, 0)


def test_class_size_rejects_foreign_key():
    key = symcore.equiv_key(OrderedSubset(4, (3,)), 2, 1)
    with pytest.raises(ValueError):
        symcore.class_size(1, 5, 2, 1, key)


def test_class_size_matches_enumeration():
    for m in range(0, 5):
        for n in range(m, 13):
            for a in range(0, n + 1):
                for u in range(1, 5):
                    classes = symcore.equiv_classes(m, n, a, u)
                    total = 0
                    for key, members in classes.items():
                        size, b, _ = symcore.class_size(m, n, a, u, key)
                        assert size == len(members), (m, n, a, u, key)
                        assert b == key.b
                        total += size
                    assert total == len(symcore.ordered_subsets(m, n))


@pytest.mark.parametrize("p", [2, 3])
def test_collision_classes_vanish_mod_p(p):
    checked = 0
    for m in range(1, 5):
        for n in range(m, 13):
            for a in range(1, n + 1):
                for u in range(1, 5):
                    for key in symcore.equiv_classes(m, n, a, u):
                        check = symcore.collision_vanishes(m, n, a, u, key, p)
                        if check.applies:
                            assert check.residue == 0, (m, n, a, u, key)
                            checked += 1
    assert checked > 0


def test_collision_modulus():
    assert symcore.collision_modulus(3, 1, 2) == 2 ** (int(multiplicity_in_factorial(2, 3)) + 1)
    assert symcore.collision_modulus(1, 3, 3) == 9


@pytest.mark.parametrize("n, generators, relations", [(1, 0, 0), (2, 1, 1), (4, 3, 6), (5, 4, 10)])
def test_coxeter_presentation_counts(n, generators, relations):
    presentation = symcore.coxeter_presentation(n)
    assert len(presentation.generators) == generators
    assert len(presentation.relations) == relations


def test_coxeter_relations_evaluate_to_identity():
    for n in range(2, 7):
        presentation = symcore.coxeter_presentation(n)
        for word in presentation.relations:
            assert symcore.evaluate_word(word, presentation.generators).is_identity()


def test_coxeter_word_recovers_permutation():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randrange(2, 8)
        sigma = random_permutation(rng, n)
        generators = symcore.coxeter_presentation(n).generators
        word = symcore.coxeter_word(sigma)
        assert symcore.evaluate_word(word, generators) == sigma


def test_injections_are_lexicographic():
    assert symcore.injections(2, 3) == [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]
    assert symcore.injections(0, 2) == [()]
    assert symcore.injections(3, 2) == []


def test_injection_rank_inverts_enumeration():
    array = symcore.injection_array(3, 6)
    assert symcore.injection_rank(array, 6).tolist() == list(range(len(array)))
