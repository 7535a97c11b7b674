import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from mirror3d.errors import BoundExceeded, ChartMismatch, RankMismatch, UndefinedMap
from mirror3d.gluing import (
    ChartMap,
    EmptyCorrespondence,
    affine_chart_pullback,
    all_charts,
    all_triples,
    build_phi,
    compose,
    evaluate_point,
    generators,
    glued_components,
    inverse,
    pullback,
    random_matter,
    sign_twist,
    verify_cocycle,
)
from mirror3d.laurent import FracElem, LaurentElem

SQED1 = [[1]]


def test_sqed1_map_is_multiplication_by_h():
    phi = build_phi(SQED1, {0}, ())
    assert isinstance(phi, ChartMap)
    z, h = LaurentElem.z((1,)), LaurentElem.h(1, 0)
    assert pullback(phi, z).as_laurent() == z * h
    assert evaluate_point(phi, (2,), (3,)) == ((6,), (3,))


def test_identity_and_empty():
    phi = build_phi([[1, 2], [0, 1]], {0}, {0})
    assert phi.is_identity
    empty = build_phi([[0]], {0}, ())
    assert isinstance(empty, EmptyCorrespondence) and empty.witness == 0


def test_affine_chart_sign_convention():
    z, h = LaurentElem.z((1,)), LaurentElem.h(1, 0)
    out = affine_chart_pullback(SQED1, {0}, FracElem.of(z))
    assert out.as_laurent() == -(z * h)
    # differs from the gluing map by the 2-torsion translation z -> -z
    phi = build_phi(SQED1, {0}, ())
    assert sign_twist(SQED1, {0}, pullback(phi, z)) == out


def test_pullback_fixes_h_and_one():
    rng = random.Random(3)
    m = random_matter(rng, 2, 3, nonzero=True)
    for i, j in product(all_charts(3), repeat=2):
        phi = build_phi(m, i, j)
        for k in range(2):
            assert pullback(phi, LaurentElem.h(2, k)).as_laurent() == LaurentElem.h(2, k)
        assert pullback(phi, LaurentElem.const(2)).as_laurent() == LaurentElem.const(2)


def test_pullback_rank_mismatch():
    with pytest.raises(RankMismatch):
        pullback(build_phi(SQED1, {0}, ()), LaurentElem.z((1, 0)))


small_f = st.dictionaries(
    st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(0, 2), st.integers(0, 2), st.just(0)),
    st.integers(-3, 3),
    max_size=3,
).map(lambda t: LaurentElem(LaurentElem.zero_of(2).vars, t))


@given(small_f, small_f, st.integers(0, 10 ** 6))
def test_pullback_is_a_ring_homomorphism(f, g, seed):
    rng = random.Random(seed)
    m = random_matter(rng, 2, 3, nonzero=True)
    labels = all_charts(3)
    phi = build_phi(m, rng.choice(labels), rng.choice(labels))
    assert pullback(phi, f * g) == pullback(phi, f) * pullback(phi, g)
    assert pullback(phi, f + g) == pullback(phi, f) + pullback(phi, g)


def test_compose_inverse_pair():
    m = [[1, 0], [1, 2], [-1, 1]]
    for i, j in product(all_charts(3), repeat=2):
        phi = build_phi(m, i, j)
        back = build_phi(m, j, i)
        assert back == inverse(phi)
        assert compose(back, phi).is_identity


def test_compose_chart_mismatch():
    m = [[1], [2]]
    with pytest.raises(ChartMismatch):
        compose(build_phi(m, {1}, {0}), build_phi(m, (), {0}))


def test_compose_cancels_trivial_character():
    # rho_2 = 0 sits in (K ∩ I) \ J, so it enters once with each sign and cancels
    m = [[1], [0]]
    i, j, k = frozenset({1}), frozenset(), frozenset({1})
    phi_ji = ChartMap.formal(m, i, j)
    phi_kj = ChartMap.formal(m, j, k)
    assert isinstance(build_phi(m, i, j), EmptyCorrespondence)
    composite = compose(phi_kj, phi_ji)
    assert composite == build_phi(m, i, k)
    z = LaurentElem.z((1,))
    assert pullback(composite, z) == FracElem.of(z)


def test_cocycle_random_3x2():
    rng = random.Random(11)
    m = random_matter(rng, 2, 3, nonzero=True)
    triples = list(all_triples(3))
    for tr in rng.sample(triples, 100):
        assert verify_cocycle(m, *tr, expanded=True)


def test_cocycle_k_equals_j():
    m = [[1, 1], [2, -1]]
    for i, j in product(all_charts(2), repeat=2):
        assert verify_cocycle(m, i, j, j)


def test_cocycle_undefined():
    with pytest.raises(UndefinedMap):
        verify_cocycle([[0]], {0}, (), ())


def test_cocycle_detects_a_wrong_map():
    # the factored normal form must tell apart maps whose exponents differ
    m = [[1], [1]]
    good = build_phi(m, {0, 1}, ())
    bad = ChartMap(good.matter, good.source, good.target, (1, 0))
    z = LaurentElem.z((1,))
    assert pullback(good, z) != pullback(bad, z)


def test_evaluate_point_pole_and_identity():
    phi = build_phi(SQED1, (), {0})
    assert evaluate_point(phi, (2,), (0,)) is None
    ident = build_phi([[1, 1]], {0}, {0})
    assert evaluate_point(ident, (Fraction(2), Fraction(5)), (1, 1)) == ((2, 5), (1, 1))


@given(small_f, st.integers(0, 10 ** 6))
def test_evaluate_point_commutes_with_pullback(f, seed):
    rng = random.Random(seed)
    m = random_matter(rng, 2, 3, nonzero=True)
    labels = all_charts(3)
    phi = build_phi(m, rng.choice(labels), rng.choice(labels))
    g = tuple(Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3)) for _ in range(2))
    h = tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(2))
    image = evaluate_point(phi, g, h)
    lhs = pullback(phi, f).evaluate_at(g, h)
    if image is None or lhs is None:
        return
    assert lhs == f.evaluate_at(*image)


def test_components():
    assert glued_components(SQED1) == [[frozenset(), frozenset({0})]]
    trivial = glued_components([[0], [0], [0]])
    assert len(trivial) == 8 and all(len(c) == 1 for c in trivial)
    full = glued_components([[1, 0], [0, 1], [1, -1]])
    assert len(full) == 1 and len(full[0]) == 8


def test_components_bound():
    with pytest.raises(BoundExceeded):
        glued_components([[1]] * 5, bound=4)


def test_generators_pin_down_maps():
    assert len(generators(2)) == 4
