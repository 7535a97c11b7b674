"""The Abelian Coulomb branch algebra ``A_{T,V}`` and its t-deformation.

``A_{T,V}`` is the set of functions on ``T*Ť`` that stay regular on every
affine chart.  It is a free ``Q[h]``-module on the monopole operators

    Z^lam = z^lam * prod_{<rho_i, lam> > 0} h_{rho_i} ** <rho_i, lam>,

multiplied by ``Z^lam Z^mu = prod_i h_{rho_i} ** d(<rho_i,lam>, <rho_i,mu>) Z^{lam+mu}``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import BoundExceeded, ParseError, RankMismatch
from .gluing import DEFAULT_CHART_CAP, affine_chart_pullback, all_charts, as_matter
from .lattice import IntMatrix, pairing, rank_over_q, nullspace_q
from .laurent import (
    CharLinearForm,
    FracElem,
    HPoly,
    LaurentElem,
    _form_power,
    h_vars,
)


def pos(x: int) -> int:
    return max(x, 0)


@dataclass(frozen=True)
class DValue:
    m: int
    n: int
    value: int


def d_function(m: int, n: int) -> int:
    """``min(|m|, |n|)`` when ``m`` and ``n`` have opposite signs, else 0."""
    if m * n < 0:
        return min(abs(m), abs(n))
    return 0


def d_value(m: int, n: int) -> DValue:
    return DValue(m, n, d_function(m, n))


def _weights(matter: IntMatrix, lam: Sequence[int]) -> list[int]:
    if len(lam) != matter.ncols:
        raise RankMismatch(f"cocharacter {tuple(lam)} has the wrong length for rank {matter.ncols}")
    return [pairing(row, lam) for row in matter.rows]


def _h_product(matter: IntMatrix, powers: Sequence[int]) -> HPoly:
    out = HPoly.const(matter.ncols)
    for row, k in zip(matter.rows, powers):
        if k:
            out = out * _form_power(CharLinearForm(row), k)
    return out


def generator_coefficient(matter, lam: Sequence[int]) -> HPoly:
    """``prod_{<rho_i, lam> > 0} h_{rho_i} ** <rho_i, lam>``."""
    matter = as_matter(matter)
    return _h_product(matter, [pos(a) for a in _weights(matter, lam)])


def z_generator(matter, lam: Sequence[int]) -> LaurentElem:
    """The Laurent representative of ``Z^lam``."""
    return LaurentElem.z(tuple(lam), generator_coefficient(matter, lam))


class CoulombElem:
    """``sum_lam p_lam(h) Z^lam`` for fixed matter."""

    __slots__ = ("matter", "terms")

    def __init__(self, matter, terms: Mapping[Sequence[int], HPoly] | None = None):
        self.matter = as_matter(matter)
        clean = {}
        for lam, p in (terms or {}).items():
            lam = tuple(lam)
            if len(lam) != self.matter.ncols:
                raise RankMismatch(f"cocharacter {lam} has the wrong length")
            if not p.is_zero():
                clean[lam] = p
        self.terms = clean

    @property
    def rank(self) -> int:
        return self.matter.ncols

    @classmethod
    def generator(cls, matter, lam: Sequence[int], coeff: HPoly | int | Fraction = 1) -> "CoulombElem":
        matter = as_matter(matter)
        if not isinstance(coeff, HPoly):
            coeff = HPoly.const(matter.ncols, coeff)
        return cls(matter, {tuple(lam): coeff})

    def _check(self, other: "CoulombElem") -> None:
        if other.matter != self.matter:
            raise RankMismatch("Coulomb elements for different matter")

    def __add__(self, other: "CoulombElem") -> "CoulombElem":
        self._check(other)
        out = dict(self.terms)
        for lam, p in other.terms.items():
            out[lam] = out[lam] + p if lam in out else p
        return CoulombElem(self.matter, out)

    def __neg__(self) -> "CoulombElem":
        return CoulombElem(self.matter, {lam: -p for lam, p in self.terms.items()})

    def __sub__(self, other: "CoulombElem") -> "CoulombElem":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, HPoly)):
            return CoulombElem(self.matter, {lam: p * other for lam, p in self.terms.items()})
        return mult(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, CoulombElem):
            return NotImplemented
        return self.matter == other.matter and self.terms == other.terms

    def __hash__(self):
        return hash((self.matter, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def to_laurent(self) -> LaurentElem:
        out = LaurentElem.zero_of(self.rank)
        for lam, p in self.terms.items():
            out = out + z_generator(self.matter, lam) * LaurentElem.from_hpoly(p)
        return out

    def to_text(self) -> str:
        """One ``λ=(..) p=..`` line per term, ordered by ``λ``."""
        return "\n".join(
            f"λ=({','.join(map(str, lam))}) p={self.terms[lam].to_text()}" for lam in sorted(self.terms)
        )

    @classmethod
    def parse(cls, text: str, matter) -> "CoulombElem":
        matter = as_matter(matter)
        terms = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            try:
                lam_part, p_part = line.split(" p=", 1)
                if not lam_part.startswith("λ=(") or not lam_part.endswith(")"):
                    raise ValueError
                inner = lam_part[3:-1]
                lam = tuple(int(x) for x in inner.split(",")) if inner else ()
            except ValueError:
                raise ParseError(f"malformed Coulomb term {line!r}", lineno, 1) from None
            terms[lam] = HPoly.parse_rank(p_part, matter.ncols)
        return cls(matter, terms)

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for lam in sorted(self.terms):
            p = self.terms[lam]
            label = f"Z^{lam[0]}" if len(lam) == 1 else f"Z^({','.join(map(str, lam))})"
            if p == 1:
                parts.append(label)
            elif p == -1:
                parts.append("-" + label)
            elif p.is_monomial():
                parts.append(f"{p.pretty()} * {label}")
            else:
                parts.append(f"({p.pretty()}) * {label}")
        return " + ".join(parts)

    __str__ = pretty

    def __repr__(self):
        return f"CoulombElem({self.pretty()!r})"


def z_mult(matter, lam: Sequence[int], mu: Sequence[int]) -> CoulombElem:
    matter = as_matter(matter)
    a, b = _weights(matter, lam), _weights(matter, mu)
    coeff = _h_product(matter, [d_function(x, y) for x, y in zip(a, b)])
    return CoulombElem(matter, {tuple(x + y for x, y in zip(lam, mu)): coeff})


def mult(a: CoulombElem, b: CoulombElem) -> CoulombElem:
    a._check(b)
    out: dict[tuple[int, ...], HPoly] = {}
    for lam, p in a.terms.items():
        for mu, q in b.terms.items():
            (key, c), = z_mult(a.matter, lam, mu).terms.items()
            term = p * q * c
            out[key] = out[key] + term if key in out else term
    return CoulombElem(a.matter, out)


def to_laurent(a: CoulombElem, matter=None) -> LaurentElem:
    return a.to_laurent()


def from_laurent(f: LaurentElem, matter) -> CoulombElem | None:
    """Express ``f`` in the ``Z^lam`` basis, or None if ``f`` is not in the algebra."""
    matter = as_matter(matter, f.rank)
    f.require_polynomial_coefficients()
    terms = {}
    for lam, p in f.items():
        q, r = p.divmod(generator_coefficient(matter, lam))
        if not r.is_zero():
            return None
        terms[lam] = q
    return CoulombElem(matter, terms)


def chart_inverse_image(matter, label: Iterable[int], f: LaurentElem) -> FracElem:
    """``(phi_I^*)^{-1} f`` for the affine chart ``I = label``."""
    return affine_chart_pullback(matter, label, f, inverse=True)


def _regular_on(args) -> bool:
    matter, label, f = args
    return chart_inverse_image(matter, label, f).is_regular()


def membership_all_charts(f: LaurentElem, matter, bound: int = DEFAULT_CHART_CAP, workers: int = 1) -> bool:
    """True when ``f`` is regular on all ``2^n`` affine charts."""
    matter = as_matter(matter, f.rank)
    f.require_polynomial_coefficients()
    n = matter.nrows
    if n > bound:
        raise BoundExceeded(f"{1 << n} charts exceed the cap of {1 << bound}")
    jobs = [(matter, label, f) for label in all_charts(n)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return all(pool.map(_regular_on, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return all(_regular_on(job) for job in jobs)


def _negatively_proportional(a: Sequence[int], b: Sequence[int]) -> bool:
    if not any(a) or not any(b):
        return False
    minors_vanish = all(a[i] * b[j] == a[j] * b[i] for i in range(len(a)) for j in range(i + 1, len(a)))
    return minors_vanish and pairing(a, b) < 0


def two_chart_hypothesis(matter) -> bool:
    """No nontrivial ``rho_i`` is a negative rational multiple of another ``rho_j``.

    This is the condition under which the two extreme charts already detect
    membership: it rules out cancellation between ``h_{rho_i}`` factors in
    the numerator and denominator of the full-chart pullback.
    """
    rows = as_matter(matter).rows
    return not any(
        _negatively_proportional(rows[i], rows[j])
        for i in range(len(rows))
        for j in range(i + 1, len(rows))
    )


def membership_two_charts(f: LaurentElem, matter) -> tuple[bool, bool]:
    """Regularity on the charts ``∅`` and ``{all}``, plus whether that suffices."""
    matter = as_matter(matter, f.rank)
    f.require_polynomial_coefficients()
    full = range(matter.nrows)
    ok = chart_inverse_image(matter, (), f).is_regular() and chart_inverse_image(matter, full, f).is_regular()
    return ok, two_chart_hypothesis(matter)


def deformed_substitution(f: LaurentElem, matter) -> FracElem:
    """``f(z prod_i (t + h_{rho_i}) ** -<rho_i, lam>, h, t)``."""
    matter = as_matter(matter, f.rank)
    total = FracElem.of(LaurentElem.zero_of(f.rank))
    for lam, p in f.items():
        num = LaurentElem.z(lam, p)
        den = {}
        for row, a in zip(matter.rows, _weights(matter, lam)):
            form = CharLinearForm(row, 1, True)
            if a < 0:
                num = num * LaurentElem.from_hpoly(_form_power(form, -a))
            elif a > 0:
                den[form] = den.get(form, 0) + a
        total = total + FracElem(num, den)
    return total


def deformed_membership(f: LaurentElem, matter) -> bool:
    """Membership in the t-deformed algebra ``A^t``."""
    f.require_polynomial_coefficients()
    return deformed_substitution(f, matter).is_regular()


def quotient_t0(a: LaurentElem, matter) -> CoulombElem | None:
    """Image of ``a`` in ``A^t / t A^t``, identified with ``A_{T,V}``."""
    return from_laurent(a.set_t_zero(), matter)


# --- vector-space slices ------------------------------------------------------


def monomial_exponents(rank: int, degree: int, with_t: bool) -> list[tuple[int, ...]]:
    """Exponents of ``h`` (and ``t``) monomials of total degree at most ``degree``."""
    nvars = rank + 1 if with_t else rank
    out = [e for e in product(range(degree + 1), repeat=nvars) if sum(e) <= degree]
    if not with_t:
        out = [e + (0,) for e in out]
    return sorted(out, key=lambda e: (sum(e), e))


def _vector(p: HPoly, index: dict) -> dict:
    return {index.setdefault(e, len(index)): c for e, c in p.terms.items()}


def _kernel(matter: IntMatrix, basis: list[tuple[int, ...]], conditions: list[tuple[HPoly, HPoly]]) -> list[HPoly]:
    """Polynomials in the span of ``basis`` with ``d | f * m`` for each ``(m, d)``."""
    hv = h_vars(matter.ncols)
    rows: dict[tuple[int, object], dict[int, Fraction]] = {}
    for col, e in enumerate(basis):
        mono = HPoly(hv, {e: 1})
        for ci, (mult_by, divisor) in enumerate(conditions):
            _, rem = (mono * mult_by).divmod(divisor)
            for re, c in rem.terms.items():
                rows.setdefault((ci, re), {})[col] = c
    matrix = [[row.get(c, 0) for c in range(len(basis))] for _, row in sorted(rows.items(), key=lambda kv: (kv[0][0], kv[0][1]))]
    return [
        HPoly(hv, {basis[c]: x for c, x in enumerate(vec) if x})
        for vec in nullspace_q(matrix, len(basis))
    ]


def chart_slice(matter, lam: Sequence[int], degree: int) -> list[HPoly]:
    """Basis of ``{p : deg p <= degree, p z^lam regular on every affine chart}``.

    Each chart imposes a linear divisibility condition; this is computed by
    linear algebra, without using the ``Z^lam`` description.
    """
    matter = as_matter(matter)
    weights = _weights(matter, lam)
    conditions = []
    for label in all_charts(matter.nrows):
        num = [a if i in label and a < 0 else 0 for i, a in enumerate(weights)]
        den = [a if i in label and a > 0 else 0 for i, a in enumerate(weights)]
        conditions.append((_h_product(matter, [-x for x in num]), _h_product(matter, den)))
    return _kernel(matter, monomial_exponents(matter.ncols, degree, False), conditions)


def deformed_slice(matter, lam: Sequence[int], degree: int) -> list[HPoly]:
    """Basis of ``{p(h, t) : deg p <= degree, p z^lam in A^t}``."""
    matter = as_matter(matter)
    weights = _weights(matter, lam)
    num = HPoly.const(matter.ncols)
    den = HPoly.const(matter.ncols)
    for row, a in zip(matter.rows, weights):
        form = CharLinearForm(row, 1, True)
        if a < 0:
            num = num * _form_power(form, -a)
        elif a > 0:
            den = den * _form_power(form, a)
    return _kernel(matter, monomial_exponents(matter.ncols, degree, True), [(num, den)])


def _rank(polys: list[HPoly]) -> int:
    index: dict = {}
    vecs = [_vector(p, index) for p in polys]
    return rank_over_q([[v.get(c, 0) for c in range(len(index))] for v in vecs]) if index else 0


def _cocharacters(rank: int, bound: int) -> list[tuple[int, ...]]:
    return list(product(range(-bound, bound + 1), repeat=rank))


def compare_deformed_quotient(matter, z_bound: int = 3, degree: int = 4) -> dict:
    """Check ``A^t / t A^t ≅ A`` slice by slice.

    For every ``lam`` with ``|lam_k| <= z_bound``: setting ``t = 0`` maps the
    degree-``<= degree`` slice of ``A^t`` onto that of ``A``, and the kernel has
    the dimension of the degree-``< degree`` slice of ``A^t`` (multiples of t).
    """
    matter = as_matter(matter)
    slices = []
    ok = True
    for lam in _cocharacters(matter.ncols, z_bound):
        deformed = deformed_slice(matter, lam, degree)
        lower = deformed_slice(matter, lam, degree - 1) if degree > 0 else []
        base = chart_slice(matter, lam, degree)
        image = [p.set_t_zero() for p in deformed]
        image_rank = _rank(image)
        spans_equal = image_rank == len(base) == _rank(image + base)
        dims_add = len(deformed) == len(base) + len(lower)
        ok = ok and spans_equal and dims_add
        slices.append({
            "lambda": list(lam),
            "dim_deformed": len(deformed),
            "dim_deformed_lower": len(lower),
            "dim_base": len(base),
            "dim_image": image_rank,
            "ok": spans_equal and dims_add,
        })
    return {"passed": ok, "slices": slices}


def verify_presentation(matter, degree_bound: int, h_degree: int | None = None, bound: int = DEFAULT_CHART_CAP) -> dict:
    """Compare the ``Z^lam`` presentation with the chart-intersection definition.

    For ``|lam_k|, |mu_k| <= degree_bound``: each product ``Z^lam Z^mu`` from the
    multiplication rule equals the Laurent product and lies in every chart.
    For each ``lam``, the chart-regular polynomials ``p`` of degree at most
    ``h_degree`` with ``p z^lam`` regular are exactly the multiples of the
    ``Z^lam`` coefficient.
    """
    matter = as_matter(matter)
    if matter.nrows > bound:
        raise BoundExceeded(f"{1 << matter.nrows} charts exceed the cap of {1 << bound}")
    r = matter.ncols
    h_degree = degree_bound if h_degree is None else h_degree
    lams = _cocharacters(r, degree_bound)
    rep = {lam: z_generator(matter, lam) for lam in lams}
    problems = []
    for lam in lams:
        for mu in lams:
            prod_rule = z_mult(matter, lam, mu)
            if prod_rule.to_laurent() != rep[lam] * rep[mu]:
                problems.append(f"product rule fails for {lam} * {mu}")
            elif not membership_all_charts(prod_rule.to_laurent(), matter, bound):
                problems.append(f"Z^{lam} Z^{mu} leaves the chart intersection")
    slice_dims = {}
    for lam in lams:
        basis = chart_slice(matter, lam, h_degree)
        generator_degree = generator_coefficient(matter, lam).total_degree()
        expected = len(monomial_exponents(r, h_degree - generator_degree, False)) if generator_degree <= h_degree else 0
        slice_dims[lam] = len(basis)
        if len(basis) != expected:
            problems.append(f"slice at {lam} has dimension {len(basis)}, expected {expected}")
        for p in basis:
            if from_laurent(LaurentElem.z(lam, p), matter) is None:
                problems.append(f"chart-regular {p.pretty()} z^{lam} is not a Z-combination")
    relations = []
    for k in range(r):
        e = tuple(int(j == k) for j in range(r))
        minus = tuple(-x for x in e)
        relations.append({
            "lhs": f"Z^{_label(e)} * Z^{_label(minus)}",
            "rhs": z_mult(matter, e, minus).pretty(),
        })
    full = all(
        membership_all_charts(LaurentElem.z(lam), matter, bound) for lam in lams
    )
    return {
        "passed": not problems,
        "problems": problems,
        "products_checked": len(lams) ** 2,
        "slices_checked": len(lams),
        "generators": [_label(lam) for lam in lams],
        "relations": relations,
        "full_laurent_ring": full,
    }


def _label(lam: Sequence[int]) -> str:
    return str(lam[0]) if len(lam) == 1 else "(" + ",".join(map(str, lam)) + ")"


def find_two_chart_counterexample(matter, z_bound: int = 2, h_degree: int = 2) -> LaurentElem | None:
    """A monomial ``h^m z^lam`` passing the two-chart test but not the full test."""
    matter = as_matter(matter)
    for lam in _cocharacters(matter.ncols, z_bound):
        for e in monomial_exponents(matter.ncols, h_degree, False):
            f = LaurentElem.z(lam, HPoly(h_vars(matter.ncols), {e: 1}))
            two, _ = membership_two_charts(f, matter)
            if two and not membership_all_charts(f, matter):
                return f
    return None
