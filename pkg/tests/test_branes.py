import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mirror3d.branes import (
    AffineBlowupAlgebra,
    FormalMonomial,
    FormalScalar,
    ToricBraneData,
    act_on_torus,
    apply_phi,
    apply_psi,
    blowup_membership,
    c_lagrangian,
    equivariance_weight,
    graph_over_h,
    hori_vafa,
    image_vector,
    invert_g,
    lagrangian_residual,
    matter_c_lagrangian,
    matter_lagrangian,
    negate_lagrangian,
    phi_param,
    psi_param,
    ray_characters,
    rescale_coordinates,
    restrict,
    restricted_generator,
    same_lagrangian,
    shift_kahler,
    shift_moment,
    star_m,
    unit_lagrangian,
)
from mirror3d.errors import DegenerateFibration, RankMismatch, UnsupportedBrane, UnsupportedRank, ValidationError
from mirror3d.laurent import CharLinearForm, FracElem, LaurentElem, MPoly, RatFunc

E = FormalScalar.exp


def line_brane(**kw):
    return ToricBraneData.build([[1], [-1]], [[1]], kahler=(1, 1), **kw)


def cotangent_projective(n, q="q"):
    rays = [[int(i == j) for j in range(n - 1)] for i in range(n - 1)] + [[-1] * (n - 1)]
    return ToricBraneData.build(rays, [[] for _ in range(n - 1)], ambient_rank=n - 1, torus_rank=0, kahler=[1] * (n - 1) + [q])


def test_formal_scalars():
    a = FormalScalar.symbol("q", 2) * E(Fraction(1, 2))
    assert a / a == FormalScalar()
    assert FormalScalar.parse(a.pretty()) == a
    assert (E(1) * E(-1)).pretty() == "1"


def test_diagonal_circle_on_affine_space():
    n = 3
    brane = ToricBraneData.build([[int(i == j) for j in range(n)] for i in range(n)], [[1]] * n, kahler=[1] * n)
    F = hori_vafa(brane)
    assert [c.pretty() for c in F.components] == ["x1", "x2", "x3"]
    assert F.teleman[0].pretty() == "x1*x2*x3"
    assert F.check_weights(brane.rho)


def test_point_brane():
    brane = ToricBraneData.build([], [], ambient_rank=0, torus_rank=1, moment=(Fraction(5, 2),))
    F = hori_vafa(brane)
    assert F.components == ()
    assert F.teleman == (FormalMonomial(E(Fraction(-5, 2)), ()),)


def test_projective_line():
    F = hori_vafa(line_brane())
    assert [c.exponents for c in F.components] == [(1,), (-1,)]
    assert F.teleman[0] == FormalMonomial(FormalScalar(), (1,))


def test_unsupported_branes():
    with pytest.raises(UnsupportedBrane):
        hori_vafa(line_brane(w0="W0"))
    with pytest.raises(UnsupportedBrane):
        hori_vafa(line_brane(disc_counts=(2, 1)))
    with pytest.raises(ValidationError):
        ToricBraneData.build([[1, 0]], [[1]])


def test_equivariance_weights():
    g = (Fraction(2), Fraction(3))
    brane = ToricBraneData.build([[1, 0], [0, 1], [-1, -1]], [[1], [1]])
    u = ray_characters(brane, g)
    assert equivariance_weight((1, 0, 0), u) == u[0]
    assert equivariance_weight((0, 0, 0), u) == 1
    assert equivariance_weight((1, 1, 0), u) == u[0] * u[1]
    F = hori_vafa(brane)
    moved = act_on_torus(F, g)
    for j, comp in enumerate(moved.components):
        assert comp == F.components[j].scale(FormalScalar.of(equivariance_weight(F.disc_classes[j], u)))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_cotangent_projective_multipotential(n):
    F = hori_vafa(cotangent_projective(n))
    names = [c.pretty() for c in F.components]
    assert names[:-1] == [f"x{i + 1}" for i in range(n - 1)]
    assert F.components[-1] == FormalMonomial(FormalScalar.symbol("q"), (-1,) * (n - 1))
    assert F.teleman == ()


def test_phi_zero_class_and_kahler_rescaling():
    brane = cotangent_projective(3)
    F = hori_vafa(brane)
    zero = phi_param(brane, [0, 0, 0], [])
    assert zero.is_zero() and apply_phi(F, zero) == F
    cls = phi_param(brane, [0, 0, Fraction(3)], [])
    moved = apply_phi(F, cls)
    assert moved.components[-1].scalar == FormalScalar.symbol("q") * E(-3)
    assert moved == hori_vafa(shift_kahler(brane, [0, 0, 3]))


@given(st.lists(st.fractions(-3, 3, max_denominator=3), min_size=3, max_size=3),
       st.lists(st.fractions(-3, 3, max_denominator=3), min_size=2, max_size=2))
def test_phi_is_additive_and_representative_free(a, b):
    brane = cotangent_projective(3)
    F = hori_vafa(brane)
    ca, cb = phi_param(brane, a, []), phi_param(brane, b + [0], [])
    assert apply_phi(apply_phi(F, ca), cb) == apply_phi(F, ca + cb)
    shift = image_vector(brane, b)
    assert shift.is_zero()
    assert ca + shift == ca
    assert apply_phi(F, ca + shift) == rescale_coordinates(apply_phi(F, ca), [-x for x in b])


def test_psi_shifts():
    brane = ToricBraneData.build([], [], ambient_rank=0, torus_rank=1, moment=(Fraction(1),))
    F = hori_vafa(brane)
    assert apply_psi(F, psi_param([0])) == F
    xi = psi_param([Fraction(2)])
    shifted = apply_psi(F, xi)
    assert shifted.teleman[0].scalar == E(-1) * E(-2)
    assert shifted == hori_vafa(shift_moment(brane, [2]))
    x1, x2 = psi_param([Fraction(1, 3)]), psi_param([-4])
    assert apply_psi(apply_psi(F, x1), x2) == apply_psi(F, x1 + x2)
    assert (x1 + x2).xi == (Fraction(-11, 3),)


def test_phi_moment_part_matches_moment_shift():
    brane = line_brane(moment=(Fraction(1, 2),))
    F = hori_vafa(brane)
    cls = phi_param(brane, [0, 0], [Fraction(3)])
    assert apply_phi(F, cls) == hori_vafa(shift_moment(brane, [-3]))


W_LINE = MPoly.parse("w + w^-1", ("w",))


def test_c_lagrangian_graph_of_dw():
    C = c_lagrangian(W_LINE, [[1]])
    assert C.g[0] == RatFunc.var(("w",), "w")
    assert C.h[0] == RatFunc(MPoly.parse("w - w^-1", ("w",)))


def test_c_lagrangian_square_map():
    C = c_lagrangian(W_LINE, [[2]])
    assert C.g[0] == RatFunc(MPoly.parse("w^2", ("w",)))
    assert C.h[0] == RatFunc(MPoly.parse("1/2*w - 1/2*w^-1", ("w",)))


def test_c_lagrangian_linear_potential():
    C = c_lagrangian(MPoly.parse("x", ("x",)), [[1]])
    assert graph_over_h(C) == (RatFunc.var(("h1",), "h1"),)


def test_c_lagrangian_degenerate():
    with pytest.raises(DegenerateFibration):
        c_lagrangian(MPoly.parse("x + y", ("x", "y")), [[1, 2], [2, 4]])


@given(st.integers(0, 10 ** 6))
def test_c_lagrangian_soundness(seed):
    rng = random.Random(seed)
    vars_ = ("x", "y", "u")
    W = MPoly(vars_, {tuple(rng.randint(-2, 2) for _ in vars_): rng.randint(1, 3) for _ in range(3)})
    P = [[rng.randint(-2, 2) for _ in range(2)] for _ in vars_]
    try:
        C = c_lagrangian(W, P)
    except DegenerateFibration:
        return
    residual = lagrangian_residual(C, W, P)
    assert all(r.is_zero() or any(r == c for c in C.constraints) for r in residual)
    assert sum(1 for r in residual if r.is_zero()) >= 2


def chars(r, bound=2):
    from itertools import product
    return [c for c in product(range(-bound, bound + 1), repeat=r) if any(c)]


def test_product_of_matter_and_unit():
    V = matter_lagrangian([[1, -1], [2, 1]])
    assert same_lagrangian(star_m(V, unit_lagrangian(2)), V)
    assert same_lagrangian(star_m(unit_lagrangian(2), V), V)
    assert same_lagrangian(star_m(V, invert_g(V)), unit_lagrangian(2))


def test_direct_sum_rule_sample():
    rng = random.Random(5)
    for _ in range(30):
        r = rng.randint(1, 2)
        pool = chars(r)
        a = [rng.choice(pool) for _ in range(rng.randint(1, 2))]
        b = [rng.choice(pool) for _ in range(rng.randint(1, 2))]
        assert same_lagrangian(star_m(matter_lagrangian(a), matter_lagrangian(b)), matter_lagrangian(a + b))


def test_dual_rule_and_critical_locus_agree():
    for rows in ([[1]], [[2]], [[1, 0], [1, 2]], [[1, 1], [2, -1], [0, 1]]):
        V = matter_lagrangian(rows)
        dual = matter_lagrangian([[-x for x in row] for row in rows], [-1] * len(rows))
        assert same_lagrangian(dual, invert_g(V))
        assert same_lagrangian(matter_c_lagrangian(rows), V)


def test_rank_one_dual_sign_matches_gluing():
    # C for the dual with eps = -1 gives g = h^{-1}, the J \ I factor of the gluing maps
    dual = matter_lagrangian([[-1]], [-1])
    assert graph_over_h(dual) == (RatFunc.var(("h1",), "h1").inverse(),)


def test_star_associative():
    rng = random.Random(9)
    for _ in range(10):
        Cs = [matter_lagrangian([[rng.choice([-2, -1, 1, 2])]]) for _ in range(3)]
        left = star_m(star_m(Cs[0], Cs[1]), Cs[2])
        right = star_m(Cs[0], star_m(Cs[1], Cs[2]))
        assert same_lagrangian(left, right)


def test_star_rank_mismatch():
    with pytest.raises(RankMismatch):
        star_m(unit_lagrangian(1), unit_lagrangian(2))


def test_negate():
    C = matter_lagrangian([[1]])
    assert negate_lagrangian(negate_lagrangian(C)).h == C.h
    neg = negate_lagrangian(C)
    # {g = h} becomes {g = -h}
    assert graph_over_h(neg) == (-RatFunc.var(("h1",), "h1"),)


def test_trivial_character_is_rejected():
    with pytest.raises(ValidationError):
        matter_lagrangian([[0]])


PSU2 = AffineBlowupAlgebra(1, [(2,)])
SU2 = AffineBlowupAlgebra(1, [(1,)])


def test_blowup_lifts():
    C_psu = c_lagrangian(W_LINE, [[1]])
    C_su = c_lagrangian(W_LINE, [[2]])
    assert blowup_membership(PSU2.generators()[0], PSU2, C_psu)
    assert restricted_generator(PSU2, C_psu) == RatFunc.var(("w",), "w")
    assert blowup_membership(SU2.generators()[0], SU2, C_su)
    assert restricted_generator(SU2, C_su) == RatFunc.var(("w",), "w") * 2


def test_blowup_failure_and_graph_case():
    C_psu = c_lagrangian(W_LINE, [[1]])
    # (z - 1)/h restricts to w/(w + 1): a genuine pole
    expr = FracElem(LaurentElem.z((1,)) - 1, [CharLinearForm((1,))])
    assert not blowup_membership(expr, SU2, C_psu)
    w = RatFunc.var(("w",), "w")
    assert restrict(expr, C_psu) == w / (w + 1)
    # on {g = h} the coordinate h is a unit, so (h^2 - 1)/h is regular there
    C_graph = c_lagrangian(MPoly.parse("x", ("x",)), [[1]])
    assert blowup_membership(PSU2.generators()[0], PSU2, C_graph)


def test_blowup_rank_two_unsupported():
    alg = AffineBlowupAlgebra(2, [(1, -1)], [CharLinearForm((1, -1))])
    with pytest.raises(UnsupportedRank):
        blowup_membership(alg.generators()[0], alg, unit_lagrangian(2))
