"""Birational gluing maps between charts of ``T*Ť`` indexed by subsets of matter.

The chart ``I`` corresponds to the Lagrangian splitting of ``T*V`` that uses
the cotangent direction for the summands in ``I``.  The map from chart ``I``
to chart ``J`` is ``(g, h) -> (f(h) g, h)`` where, on a character ``z^lam``
of ``Ť``,

    z^lam(f(h)) = prod_{i in I△J} (eps_i * h_{sigma_i}) ** <sigma_i, lam>

with ``eps_i = +1, sigma_i = rho_i`` on ``I \\ J`` and ``eps_i = -1,
sigma_i = -rho_i`` on ``J \\ I``.  The two signs cancel, so the factor for
``i`` in ``J \\ I`` is ``h_{rho_i} ** -<rho_i, lam>``.

Chart labels are frozensets of 0-based matter indices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from .errors import BoundExceeded, ChartMismatch, RankMismatch, UndefinedMap, ValidationError
from .lattice import IntMatrix, pairing
from .laurent import CharLinearForm, FracElem, LaurentElem, _form_power

DEFAULT_CHART_CAP = 12


def as_matter(matter: IntMatrix | Sequence[Sequence[int]], rank: int | None = None) -> IntMatrix:
    """Matter matrix with one row per character ``rho_i``."""
    if isinstance(matter, IntMatrix):
        if rank is not None and matter.ncols != rank:
            raise ValidationError(f"matter has rank {matter.ncols}, expected {rank}")
        return matter
    rows = [tuple(int(x) for x in row) for row in matter]
    if rank is None:
        if not rows:
            raise ValidationError("rank is required for empty matter")
        rank = len(rows[0])
    return IntMatrix.of(rows, rank)


def chart(indices: Iterable[int] = ()) -> frozenset[int]:
    return frozenset(indices)


def all_charts(n: int) -> list[frozenset[int]]:
    """All subsets of ``range(n)``, ordered by size and then lexicographically."""
    subsets = [frozenset(i for i in range(n) if mask >> i & 1) for mask in range(1 << n)]
    return sorted(subsets, key=lambda s: (len(s), sorted(s)))


def _check_chart(matter: IntMatrix, label: frozenset[int]) -> None:
    if any(i < 0 or i >= matter.nrows for i in label):
        raise ValidationError(f"chart {sorted(label)} is not a subset of range({matter.nrows})")


@dataclass(frozen=True)
class EmptyCorrespondence:
    """The gluing correspondence is empty because ``rho_witness`` is trivial."""

    witness: int
    source: frozenset[int]
    target: frozenset[int]


@dataclass(frozen=True)
class ChartMap:
    """Gluing map from chart ``source`` to chart ``target``.

    ``exponents[i]`` is the sign ``eps_i`` on the symmetric difference and 0
    elsewhere.  Maps built with ``formal`` may involve trivial characters;
    their pullback formula is still meaningful since ``<0, lam> = 0``.
    """

    matter: IntMatrix
    source: frozenset[int]
    target: frozenset[int]
    exponents: tuple[int, ...]

    @classmethod
    def formal(cls, matter, source: Iterable[int], target: Iterable[int]) -> "ChartMap":
        matter = as_matter(matter)
        source, target = frozenset(source), frozenset(target)
        _check_chart(matter, source)
        _check_chart(matter, target)
        exps = tuple(
            1 if i in source and i not in target else -1 if i in target and i not in source else 0
            for i in range(matter.nrows)
        )
        return cls(matter, source, target, exps)

    @property
    def rank(self) -> int:
        return self.matter.ncols

    @property
    def epsilon(self) -> dict[int, int]:
        return {i: e for i, e in enumerate(self.exponents) if e}

    def factors(self, lam: Sequence[int]) -> list[tuple[CharLinearForm, int]]:
        """The linear forms ``eps_i h_{sigma_i}`` and their powers on ``z^lam``."""
        out = []
        for i, eps in self.epsilon.items():
            sigma = tuple(eps * x for x in self.matter.rows[i])
            power = pairing(sigma, lam)
            if power:
                out.append((CharLinearForm(sigma, eps), power))
        return out

    def is_identity(self) -> bool:
        return not any(self.exponents)


def build_phi(matter, source: Iterable[int], target: Iterable[int]) -> ChartMap | EmptyCorrespondence:
    """The gluing map from chart ``source`` to chart ``target``.

    Returns ``EmptyCorrespondence`` when a trivial character sits in the
    symmetric difference.
    """
    return _build_phi(as_matter(matter), frozenset(source), frozenset(target))


@lru_cache(maxsize=65536)
def _build_phi(matter: IntMatrix, source: frozenset[int], target: frozenset[int]):
    phi = ChartMap.formal(matter, source, target)
    for i in sorted(phi.epsilon):
        if not any(phi.matter.rows[i]):
            return EmptyCorrespondence(i, phi.source, phi.target)
    return phi


@lru_cache(maxsize=65536)
def _twist(phi: ChartMap, lam: tuple[int, ...]) -> FracElem:
    num = LaurentElem.z(lam)
    den: dict[CharLinearForm, int] = {}
    for form, power in phi.factors(lam):
        if power > 0:
            num = num * LaurentElem.from_hpoly(_form_power(form, power))
        else:
            den[form] = den.get(form, 0) - power
    return FracElem(num, den)


def pullback(phi: ChartMap, f: LaurentElem | FracElem) -> FracElem:
    """Pull a function back along ``phi``; ``h`` and ``t`` are fixed."""
    if isinstance(f, FracElem):
        inner, den = f.numerator, f.denominator
    else:
        inner, den = f, ()
    if inner.rank != phi.rank:
        raise RankMismatch("function and chart map have different rank")
    total = FracElem.of(LaurentElem.zero_of(phi.rank))
    for lam, coeff in inner.items():
        total = total + _twist(phi, lam) * LaurentElem.from_hpoly(coeff)
    return total * FracElem(LaurentElem.const(phi.rank), dict(den)) if den else total


def compose(phi2: ChartMap, phi1: ChartMap) -> ChartMap | EmptyCorrespondence:
    """``phi2 ∘ phi1``; the exponents add, so opposite signs cancel."""
    if phi1.matter != phi2.matter:
        raise ChartMismatch("maps glue different matter")
    if phi1.target != phi2.source:
        raise ChartMismatch(
            f"cannot compose: {sorted(phi1.target)} is not {sorted(phi2.source)}"
        )
    exps = tuple(a + b for a, b in zip(phi1.exponents, phi2.exponents))
    for i, e in enumerate(exps):
        if e and not any(phi1.matter.rows[i]):
            return EmptyCorrespondence(i, phi1.source, phi2.target)
    return ChartMap(phi1.matter, phi1.source, phi2.target, exps)


def inverse(phi: ChartMap) -> ChartMap:
    return ChartMap(phi.matter, phi.target, phi.source, tuple(-e for e in phi.exponents))


def generators(rank: int) -> list[LaurentElem]:
    """``z_k`` and ``h_k`` for every ``k``: enough to pin down a pullback map."""
    out = []
    for k in range(rank):
        lam = [0] * rank
        lam[k] = 1
        out.append(LaurentElem.z(tuple(lam)))
        out.append(LaurentElem.h(rank, k))
    return out


def _require(phi, what: str) -> ChartMap:
    if isinstance(phi, EmptyCorrespondence):
        raise UndefinedMap(
            f"{what} is undefined: rho_{phi.witness} is trivial", witness=phi.witness
        )
    return phi


@lru_cache(maxsize=65536)
def factored_twist(phi: ChartMap, lam: tuple[int, ...]) -> tuple[Fraction, tuple[tuple[CharLinearForm, int], ...]]:
    """``pullback(phi, z^lam) / z^lam`` as ``scalar * prod(form ** k)``.

    Forms are canonical, hence pairwise non-associate irreducibles, so this
    factored expression is a normal form: two twists agree as rational
    functions exactly when the tuples are equal.
    """
    scalar = Fraction(1)
    counts: dict[CharLinearForm, int] = {}
    for form, power in phi.factors(lam):
        s, canon = form.canonical()
        scalar *= s ** power
        counts[canon] = counts.get(canon, 0) + power
    return scalar, tuple(sorted((f, k) for f, k in counts.items() if k))


def _multiply_factored(a, b):
    counts = dict(a[1])
    for f, k in b[1]:
        counts[f] = counts.get(f, 0) + k
    return a[0] * b[0], tuple(sorted((f, k) for f, k in counts.items() if k))


def verify_cocycle(matter, i_chart, j_chart, k_chart, expanded: bool = False) -> bool:
    """Check ``phi_{K,J} ∘ phi_{J,I} = phi_{K,I}``.

    Three routes: the combinatorial ``compose``; pullbacks of every basis
    character in factored normal form; and, with ``expanded``, full
    ``FracElem`` pullbacks of the generators ``z_k, h_k``.
    """
    matter = as_matter(matter)
    phi_ji = _require(build_phi(matter, i_chart, j_chart), "phi from I to J")
    phi_kj = _require(build_phi(matter, j_chart, k_chart), "phi from J to K")
    phi_ki = _require(build_phi(matter, i_chart, k_chart), "phi from I to K")
    if compose(phi_kj, phi_ji) != phi_ki:
        return False
    r = matter.ncols
    for k in range(r):
        lam = tuple(int(j == k) for j in range(r))
        # (phi_kj ∘ phi_ji)^* = phi_ji^* ∘ phi_kj^*, and h is fixed
        composite = _multiply_factored(factored_twist(phi_kj, lam), factored_twist(phi_ji, lam))
        if composite != factored_twist(phi_ki, lam):
            return False
    if expanded:
        for x in generators(r):
            if pullback(phi_ji, pullback(phi_kj, x)) != pullback(phi_ki, x):
                return False
    return True


def evaluate_point(phi: ChartMap, g: Sequence, h: Sequence) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]] | None:
    """Image of ``(g, h)``, or None when it leaves the torus.

    ``g`` lists the values ``z_k(g)``.  None signals a pole: a factor
    ``h_rho(h)`` vanishes with nonzero exponent.
    """
    r = phi.rank
    if len(g) != r or len(h) != r:
        raise ValidationError("point has the wrong number of coordinates")
    g = [Fraction(x) for x in g]
    h = tuple(Fraction(x) for x in h)
    if any(x == 0 for x in g):
        raise ValidationError("g must lie in the torus")
    out = list(g)
    for k in range(r):
        lam = tuple(int(j == k) for j in range(r))
        for form, power in phi.factors(lam):
            value = form.evaluate(h)
            if value == 0:
                return None
            out[k] *= value ** power
    return tuple(out), h


def glued_components(matter, bound: int = DEFAULT_CHART_CAP) -> list[list[frozenset[int]]]:
    """Connected components of the chart graph (edge when the map exists)."""
    matter = as_matter(matter)
    n = matter.nrows
    if n > bound:
        raise BoundExceeded(f"{1 << n} charts exceed the cap of {1 << bound}")
    seen: set[frozenset[int]] = set()
    components = []
    for start in all_charts(n):
        if start in seen:
            continue
        seen.add(start)
        comp = [start]
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            # flipping one index at a time reaches every J with a defined map
            for i in range(n):
                nxt = cur ^ {i}
                if nxt not in seen and isinstance(build_phi(matter, cur, nxt), ChartMap):
                    seen.add(nxt)
                    comp.append(nxt)
                    queue.append(nxt)
        components.append(sorted(comp, key=lambda s: (len(s), sorted(s))))
    return components


def affine_chart_pullback(matter, label: Iterable[int], f: LaurentElem | FracElem, inverse: bool = False) -> FracElem:
    """``z^lam -> z^lam prod_{i in label} (-h_{rho_i}) ** <rho_i, lam>``, ``h`` fixed.

    With ``inverse`` the exponents are negated, giving the inverse map.
    This differs from ``pullback(build_phi(matter, label, ()), ...)`` only
    by the sign ``(-1) ** <sum_{i in label} rho_i, lam>``, i.e. translation by a
    2-torsion point of ``Ť``.
    """
    matter = as_matter(matter)
    label = frozenset(label)
    _check_chart(matter, label)
    sign = -1 if inverse else 1
    exps = tuple(sign if i in label else 0 for i in range(matter.nrows))
    phi = ChartMap(matter, label, frozenset(), exps)
    out = pullback(phi, f)
    return sign_twist(matter, label, out)


def sign_twist(matter, label: Iterable[int], f: FracElem) -> FracElem:
    """Multiply each ``z^lam`` term by ``(-1) ** <sum_{i in label} rho_i, lam>``."""
    matter = as_matter(matter)
    weight = [sum(matter.rows[i][k] for i in label) for k in range(matter.ncols)]
    num = f.numerator
    flipped = num._make({
        e: (-c if pairing(weight, e[: num.rank]) % 2 else c) for e, c in num.terms.items()
    })
    return FracElem._canonical(flipped, f.denominator)


def random_matter(rng, rank: int, n: int, low: int = -2, high: int = 2, nonzero: bool = False) -> IntMatrix:
    """Random matter matrix with entries in ``[low, high]``."""
    rows = []
    while len(rows) < n:
        row = tuple(rng.randint(low, high) for _ in range(rank))
        if nonzero and not any(row):
            continue
        rows.append(row)
    return IntMatrix.of(rows, rank)


def all_triples(n: int):
    charts = all_charts(n)
    return product(charts, repeat=3)
