"""The ten acceptance criteria, one test each.

Every test appends a ``criterion N: PASS|FAIL ...`` line that is printed
immediately and again in the terminal summary.
"""

import random
import time
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product

from mirror3d.branes import (
    AffineBlowupAlgebra,
    FormalMonomial,
    FormalScalar,
    ToricBraneData,
    apply_phi,
    apply_psi,
    blowup_membership,
    c_lagrangian,
    hori_vafa,
    image_vector,
    invert_g,
    matter_lagrangian,
    phi_param,
    psi_param,
    rescale_coordinates,
    restricted_generator,
    same_lagrangian,
    shift_kahler,
    shift_moment,
    star_m,
    unit_lagrangian,
)
from mirror3d.coulomb import (
    compare_deformed_quotient,
    d_function,
    from_laurent,
    two_chart_hypothesis,
    membership_all_charts,
    membership_two_charts,
    pos,
    z_generator,
    z_mult,
)
from mirror3d.gluing import (
    ChartMap,
    all_charts,
    all_triples,
    build_phi,
    evaluate_point,
    glued_components,
    pullback,
    random_matter,
    verify_cocycle,
)
from mirror3d.hypertoric import (
    compare_with_gluing,
    displayed_transition,
    pullback_symplectic,
    standard_form,
    transition,
)
from mirror3d.lattice import IntMatrix, is_faithful
from mirror3d.laurent import LaurentElem, MPoly, RatFunc, laurent_vars


def record(log, number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    log.append(line)
    print(line)
    assert ok, line


def test_criterion_1_cocycle_suite(acceptance_log):
    rng = random.Random(20240601)
    start = time.perf_counter()
    matrices = 0
    triples = failures = 0
    for k in range(200):
        rank = 1 + k % 2
        n = 4 if k % 3 else rng.randint(1, 3)
        matter = random_matter(rng, rank, n, nonzero=True)
        matrices += 1
        for i, j, l in all_triples(n):
            triples += 1
            if not verify_cocycle(matter, i, j, l, expanded=(k % 20 == 0)):
                failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 60
    record(acceptance_log, 1, ok, f"{matrices} matrices, {triples} triples, {failures} failures, {elapsed:.1f}s")


def test_criterion_2_sqed1_end_to_end(acceptance_log):
    matter = [[1]]
    z, h = LaurentElem.z((1,)), LaurentElem.h(1, 0)
    phi = build_phi(matter, {0}, ())
    map_ok = (
        isinstance(phi, ChartMap)
        and pullback(phi, z).as_laurent() == h * z
        and pullback(phi, h).as_laurent() == h
        and evaluate_point(phi, (Fraction(2, 3),), (5,)) == ((Fraction(10, 3),), (5,))
    )
    comps = glued_components(matter)
    comps_ok = len(comps) == 1 and len(comps[0]) == 2
    zp, zm = z_generator(matter, (1,)), z_generator(matter, (-1,))
    gens_ok = zp == z * h and zm == z ** -1
    prod = z_mult(matter, (1,), (-1,))
    prod_ok = prod.to_laurent() == zp * zm == h and prod.pretty() == "h1 * Z^0"
    ok = map_ok and comps_ok and gens_ok and prod_ok
    record(acceptance_log, 2, ok, f"map={map_ok} components={comps_ok} generators={gens_ok} product={prod_ok}")


def nonzero_matrices(rank, n, bound):
    chars = [c for c in product(range(-bound, bound + 1), repeat=rank) if any(c)]
    return product(chars, repeat=n)


def test_criterion_3_product_rule(acceptance_log):
    start = time.perf_counter()
    checked = bad = 0
    for rank in (1, 2):
        lams = list(product(range(-3, 4), repeat=rank))
        mats = [[(1,)], [(1,), (1,)], [(1,), (-2,)], [(2,), (-1,), (1,)], [(1,), (1,), (1,)]] if rank == 1 else \
            [[(1, 0)], [(1, 0), (0, 1)], [(1, 1), (1, -1)], [(1, 0), (0, 1), (-1, -1)], [(2, -1), (0, 1), (1, 2)]]
        for matter in mats:
            gens = {lam: z_generator(matter, lam) for lam in lams}
            for lam, mu in product(lams, repeat=2):
                checked += 1
                if z_mult(matter, lam, mu).to_laurent() != gens[lam] * gens[mu]:
                    bad += 1
    d_bad = sum(
        d_function(a, b) != pos(a) + pos(b) - pos(a + b)
        for a in range(-20, 21) for b in range(-20, 21)
    )
    elapsed = time.perf_counter() - start
    ok = bad == 0 and d_bad == 0 and elapsed < 30
    record(acceptance_log, 3, ok, f"{checked} products, {bad} mismatches, d identity mismatches {d_bad}, {elapsed:.1f}s")


RANK1_MATTER = [[[1]], [[-2]], [[1], [1]], [[1], [2]], [[1], [-1]], [[2], [-1]], [[1], [1], [1]], [[1], [-1], [2]], [[2], [1], [-1]], [[1], [2], [2]]]


def _random_laurent(rng, terms):
    data = {}
    for _ in range(terms):
        key = (rng.randint(-3, 3), rng.randint(0, 3), 0)
        data[key] = data.get(key, 0) + rng.choice([-2, -1, 1, 2, Fraction(1, 2)])
    return LaurentElem(laurent_vars(1), data)


def _bounded(f):
    return all(abs(e[0]) <= 3 and e[1] <= 3 for e in f.terms)


def membership_pool(seed=7, size=500):
    """Members, perturbed members and unstructured elements, paired with their matter."""
    rng = random.Random(seed)
    pool = []
    while len(pool) < size:
        matter = rng.choice(RANK1_MATTER)
        kind = len(pool) % 3
        if kind == 2:
            f = _random_laurent(rng, rng.randint(1, 3))
        else:
            f = LaurentElem.zero_of(1)
            for _ in range(rng.randint(1, 3)):
                lam = (rng.randint(-3, 3),)
                g = z_generator(matter, lam) * LaurentElem.h(1, 0) ** rng.randint(0, 1) * rng.randint(-2, 2)
                if _bounded(g):
                    f = f + g
            if kind == 1:
                f = f + _random_laurent(rng, 1)
        if _bounded(f):
            pool.append((matter, f))
    return pool


def test_criterion_4_membership_oracle(acceptance_log):
    pool = membership_pool()
    disagree = members = 0
    for matter, f in pool:
        charts = membership_all_charts(f, matter)
        members += charts
        if charts != (from_laurent(f, matter) is not None):
            disagree += 1
    ok = disagree == 0 and 0 < members < len(pool)
    record(acceptance_log, 4, ok, f"{len(pool)} samples, {members} members, {disagree} disagreements")


def test_criterion_5_two_chart_lemma(acceptance_log):
    pool = membership_pool()
    compared = disagree = 0
    for matter, f in pool:
        two, hypothesis = membership_two_charts(f, matter)
        if hypothesis:
            compared += 1
            disagree += two != membership_all_charts(f, matter)
    planted = [[[1], [-1]], [[2], [-1]], [[1, 2], [-1, -2]], [[1, 0], [2, 1], [-2, -1]]]
    flags_off = all(not two_chart_hypothesis(m) for m in planted)
    ok = disagree == 0 and compared > 0 and flags_off
    record(acceptance_log, 5, ok, f"{compared} hypothesis cases, {disagree} disagreements, planted inverse flagged={flags_off}")


def test_criterion_6_deformed_quotient(acceptance_log):
    start = time.perf_counter()
    reports = {name: compare_deformed_quotient(m, z_bound=3, degree=4) for name, m in (("SQED1", [[1]]), ("SQED2", [[1], [1]]))}
    elapsed = time.perf_counter() - start
    slices = sum(len(r["slices"]) for r in reports.values())
    ok = all(r["passed"] for r in reports.values()) and elapsed < 60
    record(acceptance_log, 6, ok, f"{slices} slices compared, {elapsed:.1f}s")


def _faithful_rank2(bound):
    for n in range(1, 4):
        for rows in product(product(range(-bound, bound + 1), repeat=2), repeat=n):
            m = IntMatrix.of(rows, 2)
            if is_faithful(m):
                yield m


def test_criterion_7_hypertoric_atlas(acceptance_log):
    forms_bad = trans_bad = 0
    for n in range(1, 5):
        target = standard_form(n)
        charts = all_charts(n)
        forms_bad += sum(pullback_symplectic(c, n) != target for c in charts)
        trans_bad += sum(transition(a, b, n) != displayed_transition(a, b, n) for a, b in product(charts, repeat=2))
    mats = list(_faithful_rank2(1))
    mats += [IntMatrix.of(rows, 1) for n in range(1, 4) for rows in product([(x,) for x in range(-2, 3)], repeat=n)
             if is_faithful(IntMatrix.of(rows, 1))]
    rng = random.Random(11)
    extra = 0
    while extra < 200:
        m = random_matter(rng, 2, rng.randint(1, 3))
        if is_faithful(m):
            mats.append(m)
            extra += 1
    pairs = compare_bad = 0
    for m in mats:
        charts = all_charts(m.nrows)
        for a, b in product(charts, repeat=2):
            pairs += 1
            compare_bad += not compare_with_gluing(m, a, b)
    ok = forms_bad == 0 and trans_bad == 0 and compare_bad == 0
    record(acceptance_log, 7, ok,
           f"symplectic failures {forms_bad}, transition failures {trans_bad}, {len(mats)} matrices / {pairs} chart pairs with {compare_bad} mismatches")


def test_criterion_8_rank_one_lagrangians(acceptance_log):
    w = RatFunc.var(("w",), "w")
    W = MPoly.parse("w + w^-1", ("w",))
    C1 = c_lagrangian(W, [[1]])
    C2 = c_lagrangian(W, [[2]])
    first = C1.g[0] == w and C1.h[0] == w - w.inverse()
    second = C2.g[0] == w * w and C2.h[0] == (w - w.inverse()) * Fraction(1, 2)
    psu = AffineBlowupAlgebra(1, [(2,)])
    su = AffineBlowupAlgebra(1, [(1,)])
    lift1 = blowup_membership(psu.generators()[0], psu, C1) and restricted_generator(psu, C1) == w
    lift2 = blowup_membership(su.generators()[0], su, C2) and restricted_generator(su, C2) == w * 2
    ok = first and second and lift1 and lift2
    record(acceptance_log, 8, ok, f"h=w-1/w {first}, (w^2,(w-1/w)/2) {second}, (z^2-1)/h->w {lift1}, (z-1)/h->2w {lift2}")


def cotangent_projective(n):
    rays = [[int(i == j) for j in range(n - 1)] for i in range(n - 1)] + [[-1] * (n - 1)]
    return ToricBraneData.build(rays, [[] for _ in range(n - 1)], ambient_rank=n - 1, torus_rank=0,
                                kahler=[1] * (n - 1) + ["q"])


def test_criterion_9_parameter_exchange(acceptance_log):
    rng = random.Random(3)
    checks = bad = 0
    for n in (2, 3, 4):
        brane = cotangent_projective(n)
        F = hori_vafa(brane)
        expected = [FormalMonomial(FormalScalar(), tuple(int(i == j) for j in range(n - 1))) for i in range(n - 1)]
        expected.append(FormalMonomial(FormalScalar.symbol("q"), (-1,) * (n - 1)))
        bad += list(F.components) != expected
        for _ in range(20):
            a = [Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(n)]
            c = [Fraction(rng.randint(-4, 4), rng.randint(1, 2)) for _ in range(n - 1)]
            cls = phi_param(brane, a, [])
            moved = apply_phi(F, cls)
            direct = [comp.scale(FormalScalar.exp(-x)) for comp, x in zip(F.components, a)]
            checks += 1
            bad += list(moved.components) != direct
            bad += moved != hori_vafa(shift_kahler(brane, a))
            bad += apply_phi(F, cls + image_vector(brane, c)) != rescale_coordinates(moved, [-x for x in c])
    point = ToricBraneData.build([[1], [-1]], [[1]], kahler=(1, 1), moment=(Fraction(1, 2),))
    G = hori_vafa(point)
    for _ in range(20):
        x1, x2 = Fraction(rng.randint(-5, 5), 3), Fraction(rng.randint(-5, 5), 2)
        p1, p2 = psi_param([x1]), psi_param([x2])
        checks += 1
        bad += apply_psi(apply_psi(G, p1), p2) != apply_psi(G, p1 + p2)
        bad += apply_psi(G, p1 + p2) != hori_vafa(shift_moment(point, [x1 + x2]))
    record(acceptance_log, 9, bad == 0, f"{checks} parameter checks, {bad} failures")


def test_criterion_10_star_calculus(acceptance_log):
    start = time.perf_counter()
    sums = duals = laws = bad = 0
    for rank in (1, 2):
        chars = [c for c in product(range(-2, 3), repeat=rank) if any(c)]
        cache = {}

        def lag(rows):
            key = tuple(sorted(rows))
            if key not in cache:
                cache[key] = matter_lagrangian([list(r) for r in key])
            return cache[key]

        unit = unit_lagrangian(rank)
        for n in range(1, 4):
            for rows in combinations_with_replacement(chars, n):
                V = lag(rows)
                for k in range(1, n):
                    for left in set(combinations(rows, k)):
                        rest = list(rows)
                        for x in left:
                            rest.remove(x)
                        sums += 1
                        bad += not same_lagrangian(star_m(lag(left), lag(rest)), V)
                dual = matter_lagrangian([[-x for x in r] for r in rows], [-1] * n)
                duals += 1
                bad += not same_lagrangian(dual, invert_g(V))
                laws += 1
                bad += not same_lagrangian(star_m(V, unit), V)
                bad += not same_lagrangian(star_m(unit, V), V)
                bad += not same_lagrangian(star_m(V, invert_g(V)), unit)
    elapsed = time.perf_counter() - start
    record(acceptance_log, 10, bad == 0,
           f"{sums} direct sums, {duals} dual rules, {laws} unit/inverse checks, {bad} failures, {elapsed:.1f}s")
