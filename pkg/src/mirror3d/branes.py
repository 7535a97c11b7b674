"""Toric brane mirrors, complex Lagrangians in ``T*Ť`` and their products.

Exponential prefactors such as ``e^{-lambda}`` and Kähler parameters ``q_j``
are kept as formal symbols (:class:`FormalScalar`), so every identity checked
here is an exact identity in a free abelian group tensored with ``Q``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import reduce
from operator import mul
from typing import Sequence

from .errors import (
    DegenerateFibration,
    RankMismatch,
    UnsupportedBrane,
    UnsupportedRank,
    ValidationError,
)
from .lattice import IntMatrix, pairing, rref, solve_q
from .laurent import CharLinearForm, FracElem, LaurentElem, MPoly, RatFunc, format_coeff

EXP = "e"


# ---------------------------------------------------------------------------
# formal scalars and monomials


def _frac_text(x: Fraction) -> str:
    return format_coeff(x) if x.denominator == 1 else f"({format_coeff(x)})"


@dataclass(frozen=True)
class FormalScalar:
    """``coeff * prod symbol^exponent``; ``e^x`` is the symbol ``"e"`` to the power ``x``."""

    coeff: Fraction = Fraction(1)
    powers: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        merged: dict[str, Fraction] = {}
        for name, x in self.powers:
            merged[name] = merged.get(name, Fraction(0)) + Fraction(x)
        object.__setattr__(self, "powers", tuple(sorted((k, v) for k, v in merged.items() if v)))
        if not self.coeff:
            raise ValidationError("formal scalars are units; zero is not allowed")

    @classmethod
    def of(cls, value: "FormalScalar | Fraction | int | str") -> "FormalScalar":
        if isinstance(value, FormalScalar):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        return cls(Fraction(value))

    @classmethod
    def symbol(cls, name: str, power: Fraction | int = 1) -> "FormalScalar":
        return cls(Fraction(1), ((name, Fraction(power)),))

    @classmethod
    def exp(cls, x: Fraction | int) -> "FormalScalar":
        return cls.symbol(EXP, x)

    def __mul__(self, other):
        other = FormalScalar.of(other)
        return FormalScalar(self.coeff * other.coeff, self.powers + other.powers)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0 and self.coeff == 0:
            raise ZeroDivisionError
        return FormalScalar(self.coeff ** k, tuple((n, x * k) for n, x in self.powers))

    def inverse(self) -> "FormalScalar":
        return self ** -1

    def __truediv__(self, other):
        return self * FormalScalar.of(other).inverse()

    def exponent(self, name: str) -> Fraction:
        return dict(self.powers).get(name, Fraction(0))

    def pretty(self) -> str:
        parts = [] if self.coeff == 1 and self.powers else [_frac_text(self.coeff)]
        for name, x in self.powers:
            parts.append(name if x == 1 else f"{name}^{_frac_text(x)}")
        return "*".join(parts)

    __str__ = pretty

    @classmethod
    def parse(cls, text: str) -> "FormalScalar":
        """Inverse of :meth:`pretty`: ``*``-separated factors ``c``, ``name`` or ``name^x``."""
        out = cls()
        for factor in text.replace(" ", "").split("*"):
            if not factor:
                raise ValidationError(f"empty factor in {text!r}")
            name, _, power = factor.partition("^")
            power = power.strip("()")
            if name[0].isdigit() or name[0] in "-(":
                out = out * Fraction(name.strip("()"))
            elif not name.isidentifier():
                raise ValidationError(f"bad symbol {name!r}")
            else:
                out = out * cls.symbol(name, Fraction(power) if power else 1)
        return out


ONE = FormalScalar()


@dataclass(frozen=True)
class FormalMonomial:
    """``scalar * x^exponents`` on the mirror torus ``(C^×)^n``."""

    scalar: FormalScalar
    exponents: tuple[int, ...]

    def __mul__(self, other: "FormalMonomial | FormalScalar"):
        if isinstance(other, FormalMonomial):
            if len(other.exponents) != len(self.exponents):
                raise RankMismatch("monomials on different tori")
            return FormalMonomial(self.scalar * other.scalar, tuple(a + b for a, b in zip(self.exponents, other.exponents)))
        return FormalMonomial(self.scalar * other, self.exponents)

    def scale(self, s: FormalScalar) -> "FormalMonomial":
        return FormalMonomial(self.scalar * s, self.exponents)

    def evaluate_on(self, g: Sequence) -> object:
        """The torus character ``x^exponents`` evaluated at ``g`` (times nothing)."""
        return reduce(mul, (gi ** k for gi, k in zip(g, self.exponents)), 1)

    def pretty(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{i + 1}" for i in range(len(self.exponents))]
        xs = [n if k == 1 else f"{n}^{k}" for n, k in zip(names, self.exponents) if k]
        head = self.scalar.pretty()
        if not xs:
            return head
        return "*".join(xs) if head == "1" else "*".join([head] + xs)


# ---------------------------------------------------------------------------
# brane data and multipotentials


def _scalars(values, count: int, prefix: str) -> tuple[FormalScalar, ...]:
    if values is None:
        return tuple(FormalScalar.symbol(f"{prefix}{j + 1}") for j in range(count))
    values = tuple(FormalScalar.of(v) for v in values)
    if len(values) != count:
        raise ValidationError(f"expected {count} Kähler parameters, got {len(values)}")
    return values


@dataclass(frozen=True)
class ToricBraneData:
    """Fan rays ``u_j`` in ``Z^n``, ``rho: T -> T^n`` (``n x r``) and parameters.

    ``kahler`` defaults to symbols ``q1 .. ql``; ``moment`` is ``mu(L)`` on the
    reference fibre.  ``disc_counts`` and ``w0`` describe the disc classes;
    only counts of one and no extra term ``W_0`` are in the computed regime.
    """

    rays: IntMatrix
    rho: IntMatrix
    kahler: tuple[FormalScalar, ...] | None = None
    moment: tuple[Fraction, ...] | None = None
    disc_counts: tuple[int, ...] | None = None
    w0: str | None = None

    def __post_init__(self):
        if not isinstance(self.rays, IntMatrix) or not isinstance(self.rho, IntMatrix):
            raise ValidationError("rays and rho must be IntMatrix values")
        n = self.rho.nrows
        if self.rays.nrows and self.rays.ncols != n:
            raise ValidationError(f"rays live in Z^{self.rays.ncols} but rho maps into a rank {n} torus")
        l, r = self.rays.nrows, self.rho.ncols
        object.__setattr__(self, "kahler", _scalars(self.kahler, l, "q"))
        moment = tuple(Fraction(x) for x in (self.moment or (0,) * r))
        if len(moment) != r:
            raise ValidationError(f"moment value must have {r} entries")
        object.__setattr__(self, "moment", moment)
        counts = tuple(self.disc_counts or (1,) * l)
        if len(counts) != l:
            raise ValidationError(f"expected {l} disc counts")
        object.__setattr__(self, "disc_counts", counts)

    @property
    def ambient_rank(self) -> int:
        return self.rho.nrows

    @property
    def torus_rank(self) -> int:
        return self.rho.ncols

    @classmethod
    def build(cls, rays, rho, ambient_rank=None, **kw) -> "ToricBraneData":
        rays = list(rays)
        rho = list(rho)
        n = ambient_rank if ambient_rank is not None else (len(rays[0]) if rays else len(rho))
        torus_rank = kw.pop("torus_rank", None)
        if torus_rank is None:
            torus_rank = len(rho[0]) if rho else 0
        rho_m = IntMatrix.of(rho, ncols=torus_rank)
        if rho_m.nrows != n:
            raise ValidationError(f"rho must have {n} rows")
        return cls(IntMatrix.of(rays, ncols=n), rho_m, **kw)


def shift_kahler(brane: ToricBraneData, integrals: Sequence) -> ToricBraneData:
    """Change the symplectic form by a class with disc integrals ``a_j``: ``q_j -> e^{-a_j} q_j``."""
    if len(integrals) != brane.rays.nrows:
        raise ValidationError("one integral per ray is required")
    return replace(brane, kahler=tuple(q * FormalScalar.exp(-Fraction(a)) for q, a in zip(brane.kahler, integrals)))


def shift_moment(brane: ToricBraneData, xi: Sequence) -> ToricBraneData:
    if len(xi) != brane.torus_rank:
        raise ValidationError("shift must have one entry per torus coordinate")
    return replace(brane, moment=tuple(m + Fraction(x) for m, x in zip(brane.moment, xi)))


@dataclass(frozen=True)
class MultiPotential:
    """``F = (W_1, .., W_l, pi^∨)`` with declared weights and disc classes."""

    components: tuple[FormalMonomial, ...]
    weights: tuple[tuple[int, ...], ...]
    disc_classes: tuple[tuple[int, ...], ...]
    teleman: tuple[FormalMonomial, ...]
    w0: str | None = None

    @property
    def ambient_rank(self) -> int:
        return len(self.weights[0]) if self.weights else (len(self.teleman[0].exponents) if self.teleman else 0)

    def superpotential(self) -> tuple[FormalMonomial, ...]:
        return self.components

    def check_weights(self, rho: IntMatrix) -> bool:
        """Stored weights agree with the monomials; the Teleman exponents are the columns of ``rho``."""
        if any(c.exponents != w for c, w in zip(self.components, self.weights)):
            return False
        return all(t.exponents == rho.column(k) for k, t in enumerate(self.teleman))

    def pretty(self) -> dict:
        return {
            "W": [c.pretty() for c in self.components] or ["0"],
            "W0": self.w0,
            "teleman": [t.pretty() for t in self.teleman],
        }


def hori_vafa(brane: ToricBraneData) -> MultiPotential:
    """``W_j = q_j x^{u_j}`` and ``pi^∨_k = e^{-lambda_k} x^{rho column k}``."""
    if brane.w0 is not None:
        raise UnsupportedBrane("a quantum-corrected term W_0 cannot be computed")
    if any(c != 1 for c in brane.disc_counts):
        raise UnsupportedBrane("only unit disc counts on basic classes are supported")
    if any(not any(u) for u in brane.rays.rows):
        raise UnsupportedBrane("zero ray")
    l = brane.rays.nrows
    components = tuple(FormalMonomial(q, u) for q, u in zip(brane.kahler, brane.rays.rows))
    classes = tuple(tuple(int(i == j) for i in range(l)) for j in range(l))
    teleman = tuple(
        FormalMonomial(FormalScalar.exp(-lam), brane.rho.column(k)) for k, lam in enumerate(brane.moment)
    )
    return MultiPotential(components, tuple(brane.rays.rows), classes, teleman)


def equivariance_weight(intersections: Sequence[int], character_values: Sequence) -> object:
    """``prod_j u_j(g)^{n_j}``: how a disc class with intersection numbers ``n_j`` scales."""
    if len(intersections) != len(character_values):
        raise ValidationError("one character value per intersection number")
    return reduce(mul, (v ** k for v, k in zip(character_values, intersections) if k), 1)


def ray_characters(brane: ToricBraneData, g: Sequence) -> list:
    """``u_j(g)`` for ``g`` in ``Ť^n``."""
    return [reduce(mul, (gi ** k for gi, k in zip(g, u)), 1) for u in brane.rays.rows]


def act_on_torus(F: MultiPotential, g: Sequence) -> MultiPotential:
    """Pull back along ``x -> g x``; each component scales by its character at ``g``."""
    def move(m):
        value = m.evaluate_on(g)
        return m.scale(FormalScalar.of(value))
    return replace(F, components=tuple(move(c) for c in F.components), teleman=tuple(move(t) for t in F.teleman))


def rescale_coordinates(F: MultiPotential, c: Sequence) -> MultiPotential:
    """Substitute ``x_i -> e^{c_i} x_i``."""
    def move(m):
        return m.scale(FormalScalar.exp(sum(Fraction(a) * Fraction(b) for a, b in zip(m.exponents, c))))
    return replace(F, components=tuple(move(m) for m in F.components), teleman=tuple(move(t) for t in F.teleman))


# ---------------------------------------------------------------------------
# parameter exchange


def _image_basis(brane: ToricBraneData) -> list[list[Fraction]]:
    """Row-reduced basis of the image of ``c -> (<u_j, c>, rho^T c)``."""
    n = brane.ambient_rank
    vectors = []
    for i in range(n):
        e = [int(k == i) for k in range(n)]
        vectors.append([pairing(u, e) for u in brane.rays.rows] + [brane.rho[i, k] for k in range(brane.torus_rank)])
    reduced, _ = rref(vectors) if vectors and vectors[0] else ([], [])
    return reduced


@dataclass(frozen=True)
class KahlerClass:
    """A vector in ``Q^l + Q^r`` together with its class modulo the torus image."""

    vector: tuple[Fraction, ...]
    basis: tuple[tuple[Fraction, ...], ...] = field(default=(), compare=False)

    @property
    def canonical(self) -> tuple[Fraction, ...]:
        x = list(self.vector)
        for row in self.basis:
            p = next(i for i, v in enumerate(row) if v)
            if x[p]:
                f = x[p]
                x = [a - f * b for a, b in zip(x, row)]
        return tuple(x)

    def __eq__(self, other):
        if not isinstance(other, KahlerClass):
            return NotImplemented
        return self.canonical == other.canonical

    def __hash__(self):
        return hash(self.canonical)

    def __add__(self, other: "KahlerClass") -> "KahlerClass":
        if len(other.vector) != len(self.vector):
            raise RankMismatch("classes of different length")
        return KahlerClass(tuple(a + b for a, b in zip(self.vector, other.vector)), self.basis or other.basis)

    def is_zero(self) -> bool:
        return not any(self.canonical)


def phi_param(brane: ToricBraneData, alpha2_integrals: Sequence, alpha0_at_p: Sequence) -> KahlerClass:
    """The class of ``(int_{beta_1} alpha_2, .., int_{beta_l} alpha_2, -alpha_0(p))``."""
    if len(alpha2_integrals) != brane.rays.nrows or len(alpha0_at_p) != brane.torus_rank:
        raise ValidationError("need one integral per ray and one moment shift per torus coordinate")
    vec = tuple(Fraction(a) for a in alpha2_integrals) + tuple(-Fraction(a) for a in alpha0_at_p)
    return KahlerClass(vec, tuple(tuple(row) for row in _image_basis(brane)))


def image_vector(brane: ToricBraneData, c: Sequence) -> KahlerClass:
    """The class of a coordinate rescaling ``c``; it is always zero."""
    vec = tuple(Fraction(pairing(u, c)) for u in brane.rays.rows)
    vec += tuple(Fraction(sum(brane.rho[i, k] * Fraction(c[i]) for i in range(brane.ambient_rank))) for k in range(brane.torus_rank))
    return KahlerClass(vec, tuple(tuple(row) for row in _image_basis(brane)))


def apply_phi(F: MultiPotential, cls: KahlerClass) -> MultiPotential:
    """``exp(-Phi) F`` componentwise, so ``W_j -> e^{-a_j} W_j`` and ``pi^∨ -> e^{alpha_0} pi^∨``."""
    l = len(F.components)
    if len(cls.vector) != l + len(F.teleman):
        raise RankMismatch("class and multipotential have different shapes")
    v = cls.vector
    return replace(
        F,
        components=tuple(c.scale(FormalScalar.exp(-v[j])) for j, c in enumerate(F.components)),
        teleman=tuple(t.scale(FormalScalar.exp(-v[l + k])) for k, t in enumerate(F.teleman)),
    )


@dataclass(frozen=True)
class EquivariantShift:
    """A constant equivariant class ``xi``; shifts add."""

    xi: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "xi", tuple(Fraction(x) for x in self.xi))

    def __add__(self, other: "EquivariantShift") -> "EquivariantShift":
        if len(other.xi) != len(self.xi):
            raise RankMismatch("shifts of different rank")
        return EquivariantShift(tuple(a + b for a, b in zip(self.xi, other.xi)))

    def is_zero(self) -> bool:
        return not any(self.xi)


def psi_param(xi: Sequence) -> EquivariantShift:
    return EquivariantShift(tuple(xi))


def apply_psi(F: MultiPotential, shift: EquivariantShift) -> MultiPotential:
    """Moment map ``mu -> mu + xi``; with unit period this multiplies ``pi^∨`` by ``e^{-xi}``."""
    if len(shift.xi) != len(F.teleman):
        raise RankMismatch("shift rank differs from the torus rank")
    return replace(F, teleman=tuple(t.scale(FormalScalar.exp(-x)) for t, x in zip(F.teleman, shift.xi)))


# ---------------------------------------------------------------------------
# complex Lagrangians in T*Ť


def _rat(p: MPoly) -> RatFunc:
    return RatFunc(MPoly(p.vars, p.terms))


@dataclass(frozen=True)
class ParamLagrangian:
    """``{(g(p), h(p)) : constraints(p) = 0}`` over a parameter space."""

    params: tuple[str, ...]
    g: tuple[RatFunc, ...]
    h: tuple[RatFunc, ...]
    constraints: tuple[RatFunc, ...] = ()

    def __post_init__(self):
        if len(self.g) != len(self.h):
            raise RankMismatch("g and h must have the same number of components")
        for f in self.g + self.h + self.constraints:
            if f.vars != self.params:
                raise ValidationError("component is not a function of the parameters")

    __hash__ = None

    @property
    def rank(self) -> int:
        return len(self.g)

    def pretty(self) -> dict:
        return {
            "params": list(self.params),
            "g": [f.pretty() for f in self.g],
            "h": [f.pretty() for f in self.h],
            "constraints": [f.pretty() for f in self.constraints],
        }


def c_lagrangian(W: MPoly, exponents: Sequence[Sequence[int]]) -> ParamLagrangian:
    """Solve ``dW = sum_k h_k dlog pi_k`` with ``pi_k = prod_j x_j^{P_jk}``.

    ``exponents`` is the ``m x r`` matrix ``P`` (one row per variable of ``W``).
    The equations read ``x_j dW/dx_j = (P h)_j``; ``r`` independent rows fix
    ``h`` and the others are kept as constraints.
    """
    params = W.vars
    P = [list(row) for row in exponents]
    if len(P) != len(params):
        raise ValidationError(f"exponent matrix needs one row per parameter ({len(params)})")
    r = len(P[0]) if P else 0
    if any(len(row) != r for row in P):
        raise ValidationError("ragged exponent matrix")
    theta = [W.euler(v) for v in params]
    _, rows = rref([list(col) for col in zip(*P)]) if r else ([], [])
    if len(rows) < r:
        raise DegenerateFibration(f"exponent matrix has rank {len(rows)} < {r}")
    square = [P[j] for j in rows]
    inv = []
    for k in range(r):
        e = [int(i == k) for i in range(r)]
        inv.append(solve_q(square, e))
    inv = [list(col) for col in zip(*inv)]  # columns of solve -> rows of the inverse
    zero = MPoly(params)
    h = []
    for k in range(r):
        total = zero
        for i, j in enumerate(rows):
            if inv[k][i]:
                total = total + theta[j] * inv[k][i]
        h.append(total)
    constraints = []
    for j in range(len(params)):
        if j in rows:
            continue
        res = theta[j]
        for k in range(r):
            if P[j][k]:
                res = res - h[k] * P[j][k]
        if not res.is_zero():
            constraints.append(_rat(res))
    g = tuple(RatFunc(MPoly.monomial(params, [P[j][k] for j in range(len(params))])) for k in range(r))
    return ParamLagrangian(params, g, tuple(_rat(x) for x in h), tuple(constraints))


def lagrangian_residual(C: ParamLagrangian, W: MPoly, exponents: Sequence[Sequence[int]]) -> list[RatFunc]:
    """``x_j dW/dx_j - (P h)_j`` on the parametrization; zero rows or constraints only."""
    out = []
    for j, v in enumerate(C.params):
        res = _rat(W.euler(v))
        for k in range(C.rank):
            if exponents[j][k]:
                res = res - C.h[k] * exponents[j][k]
        out.append(res)
    return out


def _hnames(r: int) -> tuple[str, ...]:
    return tuple(f"h{k + 1}" for k in range(r))


def matter_lagrangian(rho, signs: Sequence[int] | None = None) -> ParamLagrangian:
    """``C_V`` for ``V = sum C_{rho_i}`` with potential ``sum eps_i x_i``, as a graph over ``h``.

    On it ``g = prod_i rho_i^∨(eps_i <rho_i, h>)``.  A trivial character makes
    the Lagrangian empty, which is reported as a ValidationError.
    """
    rho = rho if isinstance(rho, IntMatrix) else IntMatrix.of(rho)
    r = rho.ncols
    signs = tuple(signs or (1,) * rho.nrows)
    if len(signs) != rho.nrows or any(s not in (1, -1) for s in signs):
        raise ValidationError("one sign in {1, -1} per character")
    if any(not any(row) for row in rho.rows):
        raise ValidationError("a trivial character gives an empty Lagrangian")
    hv = _hnames(r)
    hs = [MPoly.variable(hv, v) for v in hv]
    g = []
    for k in range(r):
        total = RatFunc.const(hv, 1)
        for row, s in zip(rho.rows, signs):
            if row[k]:
                form = reduce(lambda a, b: a + b, (hs[j] * (s * row[j]) for j in range(r) if row[j]))
                total = total * RatFunc(form) ** row[k]
        g.append(total)
    return ParamLagrangian(hv, tuple(g), tuple(RatFunc(x) for x in hs))


def matter_c_lagrangian(rho, signs: Sequence[int] | None = None) -> ParamLagrangian:
    """``C_V`` from the critical-locus construction on ``(C^×)^n`` (needs rank ``rho = r``)."""
    rho = rho if isinstance(rho, IntMatrix) else IntMatrix.of(rho)
    signs = tuple(signs or (1,) * rho.nrows)
    xv = tuple(f"x{i + 1}" for i in range(rho.nrows))
    W = reduce(lambda a, b: a + b, (MPoly.variable(xv, v) * s for v, s in zip(xv, signs)), MPoly(xv))
    return c_lagrangian(W, rho.rows)


def unit_lagrangian(rank: int) -> ParamLagrangian:
    """``{1} x t``: the identity bisection of the groupoid."""
    hv = _hnames(rank)
    return ParamLagrangian(hv, tuple(RatFunc.const(hv, 1) for _ in hv), tuple(RatFunc.var(hv, v) for v in hv))


def _relabel(f: RatFunc, names: Sequence[str], ambient: Sequence[str]) -> RatFunc:
    return RatFunc(f.num.rename(names).embed(ambient), f.den.rename(names).embed(ambient))


def star_m(C1: ParamLagrangian, C2: ParamLagrangian) -> ParamLagrangian:
    """Fibrewise product: ``{(g1 g2, h) : (g1, h) in C1, (g2, h) in C2}``."""
    if C1.rank != C2.rank:
        raise RankMismatch(f"ranks {C1.rank} and {C2.rank} differ")
    left = tuple(f"{p}_L" for p in C1.params)
    right = tuple(f"{p}_R" for p in C2.params)
    params = left + right
    a = lambda f: _relabel(f, left, params)
    b = lambda f: _relabel(f, right, params)
    g = tuple(a(x) * b(y) for x, y in zip(C1.g, C2.g))
    h = tuple(a(x) for x in C1.h)
    constraints = tuple(a(c) for c in C1.constraints) + tuple(b(c) for c in C2.constraints)
    constraints += tuple(a(x) - b(y) for x, y in zip(C1.h, C2.h) if not (a(x) - b(y)).is_zero())
    return ParamLagrangian(params, g, h, constraints)


def negate_lagrangian(C: ParamLagrangian) -> ParamLagrangian:
    """Image under ``(g, h) -> (g, -h)``."""
    return replace(C, h=tuple(-x for x in C.h))


def invert_g(C: ParamLagrangian) -> ParamLagrangian:
    """Image under ``(g, h) -> (g^{-1}, h)``, the groupoid inverse."""
    return replace(C, g=tuple(x.inverse() for x in C.g))


def _affine_row(f: RatFunc, params: Sequence[str]) -> tuple[list[Fraction], Fraction] | None:
    if not f.den.is_constant():
        return None
    p = f.num * (Fraction(1) / f.den.constant_term())
    if not p.is_polynomial() or p.total_degree() > 1:
        return None
    row = [Fraction(0)] * len(params)
    const = Fraction(0)
    for e, c in p.terms.items():
        if any(e):
            row[e.index(1)] = Fraction(c)
        else:
            const = Fraction(c)
    return row, const


def graph_over_h(C: ParamLagrangian) -> tuple[RatFunc, ...]:
    """``g`` as a function of ``h`` when ``h`` and the constraints are affine in the parameters."""
    m, r = len(C.params), C.rank
    hv = _hnames(r)
    eqs: list[tuple[list[Fraction], MPoly]] = []
    for k, f in enumerate(C.h):
        parsed = _affine_row(f, C.params)
        if parsed is None:
            raise ValidationError("h is not affine in the parameters")
        row, const = parsed
        eqs.append((row, MPoly.variable(hv, hv[k]) - const))
    for c in C.constraints:
        parsed = _affine_row(c, C.params)
        if parsed is None:
            raise ValidationError("a constraint is not affine in the parameters")
        row, const = parsed
        eqs.append((row, MPoly.constant(hv, -const)))
    # Gauss-Jordan with polynomial right-hand sides
    pivots: list[int] = []
    rank = 0
    for col in range(m):
        p = next((i for i in range(rank, len(eqs)) if eqs[i][0][col]), None)
        if p is None:
            continue
        eqs[rank], eqs[p] = eqs[p], eqs[rank]
        row, rhs = eqs[rank]
        lead = row[col]
        row, rhs = [x / lead for x in row], rhs * (Fraction(1) / lead)
        eqs[rank] = (row, rhs)
        for i in range(len(eqs)):
            if i != rank and eqs[i][0][col]:
                f = eqs[i][0][col]
                eqs[i] = ([x - f * y for x, y in zip(eqs[i][0], row)], eqs[i][1] - rhs * f)
        pivots.append(col)
        rank += 1
    if rank < m:
        raise ValidationError("the parameters are not determined by h")
    if any(not rhs.is_zero() for _, rhs in eqs[rank:]):
        raise ValidationError("the Lagrangian does not project onto all of t")
    solution = {C.params[col]: RatFunc(eqs[i][1]) for i, col in enumerate(pivots)}
    return tuple(f.substitute(solution, hv) for f in C.g)


def same_lagrangian(C1: ParamLagrangian, C2: ParamLagrangian) -> bool:
    """Compare two Lagrangians that are graphs over ``t``."""
    if C1.rank != C2.rank:
        return False
    return all(a == b for a, b in zip(graph_over_h(C1), graph_over_h(C2)))


# ---------------------------------------------------------------------------
# affine blowup algebra


@dataclass(frozen=True)
class AffineBlowupAlgebra:
    """``C[T*Ť]`` with ``(z^alpha - 1)/h_{alpha^∨}`` adjoined for each root."""

    rank: int
    roots: tuple[tuple[int, ...], ...]
    coroots: tuple[CharLinearForm, ...] = ()

    def __post_init__(self):
        roots = tuple(tuple(int(x) for x in a) for a in self.roots)
        object.__setattr__(self, "roots", roots)
        coroots = tuple(self.coroots) or tuple(CharLinearForm(tuple(int(j == 0) for j in range(self.rank))) for _ in roots)
        if len(coroots) != len(roots):
            raise ValidationError("one coroot form per root")
        if any(len(a) != self.rank for a in roots) or any(c.rank != self.rank for c in coroots):
            raise RankMismatch("root data of the wrong rank")
        object.__setattr__(self, "coroots", coroots)

    def generators(self) -> list[FracElem]:
        return [FracElem(LaurentElem.z(a) - 1, [c]) for a, c in zip(self.roots, self.coroots)]


def restrict(expr: FracElem, C: ParamLagrangian) -> RatFunc:
    """Pull a function on ``T*Ť`` (with ``t = 0``) back to the parameters of ``C``."""
    if expr.rank != C.rank:
        raise RankMismatch("function and Lagrangian have different rank")
    if C.constraints:
        raise ValidationError("restriction needs a constraint-free parametrization")
    r = C.rank
    mapping: dict[str, RatFunc] = {"t": RatFunc.const(C.params, 0)}
    for k in range(r):
        mapping[f"z{k + 1}"] = C.g[k]
        mapping[f"h{k + 1}"] = C.h[k]
    num = expr.numerator.substitute(mapping, RatFunc(MPoly(C.params)))
    den = RatFunc.const(C.params, 1)
    for form, mult in expr.denominator:
        den = den * form.poly().substitute(mapping, RatFunc(MPoly(C.params))) ** mult
    return num / den


def blowup_membership(expr: FracElem, algebra: AffineBlowupAlgebra, C: ParamLagrangian) -> bool:
    """Does ``expr`` restrict to a regular function on ``C``?

    The parameters of ``C`` are torus coordinates, so regular means Laurent.
    """
    if algebra.rank != 1 or len(algebra.roots) != 1:
        raise UnsupportedRank("only a single root of a rank-one torus is supported")
    return restrict(expr, C).is_laurent()


def restricted_generator(algebra: AffineBlowupAlgebra, C: ParamLagrangian) -> RatFunc | None:
    """The generator's restriction as a Laurent polynomial, or None if it has a pole."""
    if algebra.rank != 1 or len(algebra.roots) != 1:
        raise UnsupportedRank("only a single root of a rank-one torus is supported")
    q = restrict(algebra.generators()[0], C).as_laurent()
    return None if q is None else RatFunc(q)
