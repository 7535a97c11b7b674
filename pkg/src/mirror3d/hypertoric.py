"""Coordinate charts on ``T*C^n`` adapted to the hypertoric reduction.

On ``T*C^n`` with coordinates ``(a_i, b_i)``, the chart ``I`` uses

    a_i = z_i,  b_i = zeta_i / z_i      for i in I,
    b_i = 1/z_i, a_i = zeta_i z_i       for i not in I,

so ``zeta_i = a_i b_i`` is the moment coordinate and ``z_i`` lives in
``C^×``.  Reducing by the torus identifies the charts with copies of ``T*Ť``
and the transitions with the gluing maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import NotFaithful, ValidationError
from .gluing import ChartMap, as_matter, pullback
from .lattice import IntMatrix, is_faithful, pairing
from .laurent import CharLinearForm, FracElem, LaurentElem, MPoly, _form_power

Substitution = dict[str, MPoly]

# The torus coordinate of a reduced chart is read off the ``b`` side, which
# inverts characters relative to the ``z_i``.  Transitions are compared with
# the gluing maps after conjugating by this inversion.
ORIENTATION = "inverted"


@dataclass(frozen=True)
class CoordSystem:
    """Variable names for the chart ``label`` of ``T*C^n``."""

    n: int
    label: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "label", frozenset(self.label))
        if any(i < 0 or i >= self.n for i in self.label):
            raise ValidationError(f"chart {sorted(self.label)} is not a subset of range({self.n})")

    @property
    def chart_vars(self) -> tuple[str, ...]:
        return chart_vars(self.n)

    @property
    def linear_vars(self) -> tuple[str, ...]:
        return linear_vars(self.n)


@lru_cache(maxsize=None)
def chart_vars(n: int) -> tuple[str, ...]:
    return tuple(f"z{i + 1}" for i in range(n)) + tuple(f"zeta{i + 1}" for i in range(n))


@lru_cache(maxsize=None)
def linear_vars(n: int) -> tuple[str, ...]:
    return tuple(f"a{i + 1}" for i in range(n)) + tuple(f"b{i + 1}" for i in range(n))


def kappa_map(label: Iterable[int], n: int) -> Substitution:
    """``a_i`` and ``b_i`` as Laurent monomials in the chart coordinates."""
    label = CoordSystem(n, frozenset(label)).label
    cv = chart_vars(n)
    out = {}
    for i in range(n):
        z = MPoly.variable(cv, f"z{i + 1}")
        zeta = MPoly.variable(cv, f"zeta{i + 1}")
        if i in label:
            out[f"a{i + 1}"] = z
            out[f"b{i + 1}"] = zeta * z ** -1
        else:
            out[f"a{i + 1}"] = zeta * z
            out[f"b{i + 1}"] = z ** -1
    return out


def kappa_inverse(label: Iterable[int], n: int) -> Substitution:
    """Chart coordinates as Laurent monomials in ``a, b``."""
    label = CoordSystem(n, frozenset(label)).label
    lv = linear_vars(n)
    out = {}
    for i in range(n):
        a = MPoly.variable(lv, f"a{i + 1}")
        b = MPoly.variable(lv, f"b{i + 1}")
        out[f"z{i + 1}"] = a if i in label else b ** -1
        out[f"zeta{i + 1}"] = a * b
    return out


def substitute(outer: Substitution, inner: Substitution, vars: Sequence[str]) -> Substitution:
    """``outer ∘ inner``: plug ``inner`` into every value of ``outer``."""
    zero = MPoly(vars)
    return {name: value.substitute(inner, zero) for name, value in outer.items()}


def identity_substitution(vars: Sequence[str]) -> Substitution:
    return {v: MPoly.variable(vars, v) for v in vars}


class TwoForm:
    """``sum_{u < v} c_uv du ∧ dv`` with Laurent polynomial coefficients."""

    __slots__ = ("vars", "coeffs")

    def __init__(self, vars: Sequence[str], coeffs: Mapping[tuple[int, int], MPoly] | None = None):
        self.vars = tuple(vars)
        clean: dict[tuple[int, int], MPoly] = {}
        for (u, v), c in (coeffs or {}).items():
            if u == v or c.is_zero():
                continue
            if u > v:
                u, v, c = v, u, -c
            total = clean[(u, v)] + c if (u, v) in clean else c
            if total.is_zero():
                clean.pop((u, v), None)
            else:
                clean[(u, v)] = total
        self.coeffs = clean

    @classmethod
    def wedge(cls, f: MPoly, g: MPoly) -> "TwoForm":
        """``df ∧ dg``."""
        df = [f.derivative(v) for v in f.vars]
        dg = [g.derivative(v) for v in g.vars]
        form = cls(f.vars)
        for u, a in enumerate(df):
            if a.is_zero():
                continue
            for v, b in enumerate(dg):
                if u != v and not b.is_zero():
                    form = form + cls(f.vars, {(u, v): a * b})
        return form

    def __add__(self, other: "TwoForm") -> "TwoForm":
        if other.vars != self.vars:
            raise ValidationError("two-forms over different coordinates")
        merged = dict(self.coeffs)
        for key, c in other.coeffs.items():
            merged[key] = merged[key] + c if key in merged else c
        return TwoForm(self.vars, merged)

    def __eq__(self, other):
        if not isinstance(other, TwoForm):
            return NotImplemented
        return self.vars == other.vars and self.coeffs == other.coeffs

    __hash__ = None

    def pretty(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(
            f"({c.pretty()}) d{self.vars[u]}^d{self.vars[v]}" for (u, v), c in sorted(self.coeffs.items())
        )

    def __repr__(self):
        return f"TwoForm({self.pretty()!r})"


def pullback_symplectic(label: Iterable[int], n: int) -> TwoForm:
    """``kappa_I^*(sum_i da_i ∧ db_i)`` computed symbolically."""
    sub = kappa_map(label, n)
    form = TwoForm(chart_vars(n))
    for i in range(n):
        form = form + TwoForm.wedge(sub[f"a{i + 1}"], sub[f"b{i + 1}"])
    return form


def standard_form(n: int) -> TwoForm:
    """``sum_i dz_i / z_i ∧ dzeta_i``."""
    cv = chart_vars(n)
    return TwoForm(cv, {(i, n + i): MPoly.variable(cv, f"z{i + 1}", -1) for i in range(n)})


def transition(source: Iterable[int], target: Iterable[int], n: int) -> Substitution:
    """Chart-``target`` coordinates in terms of chart-``source`` ones.

    Computed as ``kappa_target^{-1} ∘ kappa_source``.
    """
    return dict(_transition(frozenset(source), frozenset(target), n))


@lru_cache(maxsize=4096)
def _transition(source: frozenset[int], target: frozenset[int], n: int) -> tuple[tuple[str, MPoly], ...]:
    return tuple(substitute(kappa_inverse(target, n), kappa_map(source, n), chart_vars(n)).items())


def displayed_transition(source: Iterable[int], target: Iterable[int], n: int) -> Substitution:
    """Case list: ``zeta`` fixed, ``z_i`` scaled by ``zeta_i^{-1}`` on ``I \\ J``, ``zeta_i`` on ``J \\ I``."""
    source, target = frozenset(source), frozenset(target)
    cv = chart_vars(n)
    out = {}
    for i in range(n):
        z = MPoly.variable(cv, f"z{i + 1}")
        zeta = MPoly.variable(cv, f"zeta{i + 1}")
        if i in source and i not in target:
            out[f"z{i + 1}"] = zeta ** -1 * z
        elif i in target and i not in source:
            out[f"z{i + 1}"] = zeta * z
        else:
            out[f"z{i + 1}"] = z
        out[f"zeta{i + 1}"] = zeta
    return out


def _zeta_monomial_to_frac(mono: MPoly, matter: IntMatrix, lam: Sequence[int]) -> FracElem:
    """``z^lam * mono`` with ``zeta_i`` replaced by ``h_{rho_i}``."""
    (e, c), = mono.terms.items()
    n = matter.nrows
    if any(e[:n]):
        raise ValidationError("transition ratio still depends on z")
    num = LaurentElem.z(tuple(lam)) * c
    den: dict[CharLinearForm, int] = {}
    for i, k in enumerate(e[n:]):
        if not k:
            continue
        form = CharLinearForm(matter.rows[i])
        if form.is_zero():
            raise ValidationError(f"zeta_{i + 1} vanishes identically on the moment level")
        if k > 0:
            num = num * LaurentElem.from_hpoly(_form_power(form, k))
        else:
            den[form] = den.get(form, 0) - k
    return FracElem(num, den)


def quotient_transition(matter, source: Iterable[int], target: Iterable[int]) -> list[FracElem]:
    """Transition on the reduced chart, on the basis characters of ``Ť``.

    The character ``z^lam`` of ``Ť`` pulls back to ``prod_i z_i ** <rho_i, lam>``
    on ``(C^×)^n``; the chart transition is applied to that monomial and the
    moment coordinates are set to ``zeta = drho(h)``, i.e. ``zeta_i = h_{rho_i}``.
    """
    matter = as_matter(matter)
    n, r = matter.nrows, matter.ncols
    cv = chart_vars(n)
    sub = transition(source, target, n)
    out = []
    for k in range(r):
        lam = tuple(int(j == k) for j in range(r))
        weights = [pairing(row, lam) for row in matter.rows]
        mono = MPoly.monomial(cv, weights + [0] * n)
        moved = mono.substitute(sub, MPoly(cv))
        ratio = moved * mono ** -1
        out.append(_zeta_monomial_to_frac(ratio, matter, lam))
    return out


def _invert(fr: FracElem) -> FracElem:
    return FracElem._canonical(fr.numerator.invert_torus(), fr.denominator)


def gluing_on_basis(matter, source: Iterable[int], target: Iterable[int], orientation: str = ORIENTATION) -> list[FracElem]:
    """Pullbacks of the basis characters along the gluing map, in the given orientation."""
    matter = as_matter(matter)
    phi = ChartMap.formal(matter, source, target)
    r = matter.ncols
    out = []
    for k in range(r):
        lam = tuple(int(j == k) for j in range(r))
        if orientation == "inverted":
            out.append(_invert(pullback(phi, LaurentElem.z(tuple(-x for x in lam)))))
        else:
            out.append(pullback(phi, LaurentElem.z(lam)))
    return out


def _faithful(matter) -> IntMatrix:
    matter = as_matter(matter)
    if not is_faithful(matter):
        raise NotFaithful("the torus does not act faithfully")
    return matter


def comparison_report(matter, source: Iterable[int], target: Iterable[int]) -> dict:
    matter = _faithful(matter)
    quotient = quotient_transition(matter, source, target)
    inverted = quotient == gluing_on_basis(matter, source, target, "inverted")
    direct = quotient == gluing_on_basis(matter, source, target, "direct")
    source, target = frozenset(source), frozenset(target)
    empty = any(not any(matter.rows[i]) for i in source ^ target)
    return {
        "source": sorted(source),
        "target": sorted(target),
        "orientation": ORIENTATION,
        "matches": inverted,
        "matches_without_inversion": direct,
        "empty_correspondence": empty,
    }


def compare_with_gluing(matter, source: Iterable[int], target: Iterable[int]) -> bool:
    """Does the reduced chart transition agree with the gluing map?

    The comparison conjugates the gluing map by ``g -> g^{-1}`` on ``Ť``
    (see ``ORIENTATION``); without it, the two differ by inversion of the
    factor ``f(h)`` whenever the charts differ.
    """
    matter = _faithful(matter)
    return quotient_transition(matter, source, target) == gluing_on_basis(matter, source, target)
