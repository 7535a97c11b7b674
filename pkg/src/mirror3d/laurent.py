"""Exact Laurent polynomials and the localisations produced by chart pullbacks.

``MPoly`` is a sparse Laurent polynomial over named variables with rational
coefficients.  Two specialisations model the ring of functions on ``T*Ť``:

* ``HPoly``: polynomials in ``h1..hr`` and the deformation variable ``t``;
* ``LaurentElem``: Laurent in ``z1..zr``, polynomial in ``h1..hr, t``.

``FracElem`` divides a ``LaurentElem`` by a product of linear forms
``±h_rho`` or ``±(t + h_rho)``, which is exactly the shape of chart
pullbacks, and ``RatFunc`` is a general quotient of two ``MPoly``.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ParseError, RankMismatch, ValidationError

Coeff = int | Fraction
Exp = tuple[int, ...]


def _norm(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _div(a: Coeff, b: Coeff) -> Coeff:
    if isinstance(a, int) and isinstance(b, int) and a % b == 0:
        return a // b
    return _norm(Fraction(a) / b)


def format_coeff(c: Coeff) -> str:
    return str(Fraction(c))


class MPoly:
    """Sparse Laurent polynomial with exact rational coefficients.

    Immutable.  ``terms`` maps exponent tuples (aligned with ``vars``) to
    nonzero coefficients.  Subclasses keep their type through arithmetic.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Sequence[str], terms: Mapping[Exp, Coeff] | None = None):
        self.vars = tuple(vars)
        n = len(self.vars)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise RankMismatch(f"exponent {e} does not match variables {self.vars}")
            if c:
                clean[e] = _norm(c)
        self.terms = clean
        self._hash = None

    def _make(self, terms: dict[Exp, Coeff]) -> "MPoly":
        obj = object.__new__(type(self))
        obj.vars = self.vars
        obj.terms = terms
        obj._hash = None
        return obj

    # constructors -------------------------------------------------------

    @classmethod
    def constant(cls, vars: Sequence[str], c: Coeff = 1) -> "MPoly":
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def variable(cls, vars: Sequence[str], name: str, power: int = 1) -> "MPoly":
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = power
        return cls(vars, {tuple(e): 1})

    @classmethod
    def monomial(cls, vars: Sequence[str], exps: Sequence[int], c: Coeff = 1) -> "MPoly":
        return cls(vars, {tuple(exps): c})

    def zero(self) -> "MPoly":
        return self._make({})

    def one(self) -> "MPoly":
        return self._make({(0,) * len(self.vars): 1})

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "MPoly | None":
        if isinstance(other, MPoly):
            if other.vars != self.vars:
                raise RankMismatch(f"variables {self.vars} and {other.vars} differ")
            return other
        if isinstance(other, (int, Fraction)):
            return self._make({(0,) * len(self.vars): _norm(other)} if other else {})
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = _norm(s)
            else:
                out.pop(e, None)
        return self._make(out)

    __radd__ = __add__

    def __neg__(self):
        return self._make({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self._make({})
            return self._make({e: _norm(c * other) for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict[Exp, Coeff] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return self._make({e: _norm(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return self._make({tuple(x * k for x in e): _norm(Fraction(1) / c ** -k)})
        result = self.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_text()!r})"

    def __str__(self):
        return self.pretty()

    # inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {(0,) * len(self.vars)}

    def constant_term(self) -> Coeff:
        return self.terms.get((0,) * len(self.vars), 0)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        k = self.vars.index(name)
        return max((e[k] for e in self.terms), default=0)

    def is_polynomial(self) -> bool:
        return all(x >= 0 for e in self.terms for x in e)

    def sorted_terms(self) -> list[tuple[Exp, Coeff]]:
        return sorted(self.terms.items())

    # calculus -----------------------------------------------------------

    def derivative(self, name: str) -> "MPoly":
        k = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                f = list(e)
                f[k] -= 1
                out[tuple(f)] = c * e[k]
        return self._make(out)

    def euler(self, name: str) -> "MPoly":
        """``x * d/dx`` for the variable ``x = name``; preserves Laurent monomials."""
        k = self.vars.index(name)
        return self._make({e: c * e[k] for e, c in self.terms.items() if e[k]})

    # substitution -------------------------------------------------------

    def substitute(self, mapping: Mapping[str, object], zero):
        """Replace every variable by a value of some ring and expand.

        ``zero`` is the additive identity of the target ring; it is returned
        for the zero polynomial and seeds the sum otherwise.
        """
        powers: dict[tuple[int, int], object] = {}
        values = [mapping[v] for v in self.vars]
        total = zero
        for e, c in self.sorted_terms():
            term = None
            for k, x in enumerate(e):
                if not x:
                    continue
                key = (k, x)
                if key not in powers:
                    powers[key] = values[k] ** x
                term = powers[key] if term is None else term * powers[key]
            total = total + (c if term is None else term * c)
        return total

    def evaluate(self, point: Mapping[str, Coeff]) -> Fraction:
        """Exact value at a rational point; ZeroDivisionError at a pole."""
        vals = [Fraction(point[v]) for v in self.vars]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = Fraction(c)
            for x, p in zip(vals, e):
                if p:
                    term *= x ** p
            total += term
        return total

    def rename(self, vars: Sequence[str]) -> "MPoly":
        """Same exponents, new variable names."""
        if len(vars) != len(self.vars):
            raise RankMismatch("rename must keep the number of variables")
        return MPoly(vars, self.terms)

    def embed(self, vars: Sequence[str], cls=None) -> "MPoly":
        """View as a polynomial in a larger ordered set of variables."""
        vars = tuple(vars)
        idx = [vars.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            f = [0] * len(vars)
            for k, x in zip(idx, e):
                f[k] = x
            out[tuple(f)] = c
        return (cls or MPoly)(vars, out)

    # division -----------------------------------------------------------

    def divmod(self, divisor: "MPoly") -> tuple["MPoly", "MPoly"]:
        """Division with remainder under lex order of ``vars``.

        ``divisor`` must be a polynomial.  The remainder has no term divisible
        by the divisor's leading monomial, so it is zero exactly when the
        divisor divides ``self`` (a single polynomial is a Groebner basis of
        the ideal it generates).  Variables not occurring in the divisor's
        leading monomial may carry negative exponents in ``self``.
        """
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead_e = max(divisor.terms)
        lead_c = divisor.terms[lead_e]
        support = [k for k, x in enumerate(lead_e) if x]
        rest = [(e, c) for e, c in divisor.terms.items() if e != lead_e]
        p = dict(self.terms)
        q: dict[Exp, Coeff] = {}
        r: dict[Exp, Coeff] = {}
        while p:
            e = max(p)
            c = p.pop(e)
            if all(e[k] >= lead_e[k] for k in support):
                qe = tuple(a - b for a, b in zip(e, lead_e))
                qc = _div(c, lead_c)
                q[qe] = _norm(q.get(qe, 0) + qc)
                for de, dc in rest:
                    key = tuple(a + b for a, b in zip(qe, de))
                    s = p.get(key, 0) - qc * dc
                    if s:
                        p[key] = _norm(s)
                    else:
                        p.pop(key, None)
            else:
                r[e] = c
        return self._make({e: c for e, c in q.items() if c}), self._make(r)

    def exact_div(self, divisor: "MPoly") -> "MPoly | None":
        """Quotient in the Laurent ring, or None when it does not exist."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return self
        n = len(self.vars)
        dmin = tuple(min(e[k] for e in divisor.terms) for k in range(n))
        fmin = tuple(min(e[k] for e in self.terms) for k in range(n))
        d0 = divisor._make({tuple(a - b for a, b in zip(e, dmin)): c for e, c in divisor.terms.items()})
        f0 = self._make({tuple(a - b for a, b in zip(e, fmin)): c for e, c in self.terms.items()})
        q, r = f0.divmod(d0)
        if not r.is_zero():
            return None
        shift = tuple(a - b for a, b in zip(fmin, dmin))
        return self._make({tuple(a + b for a, b in zip(e, shift)): c for e, c in q.terms.items()})

    # text ---------------------------------------------------------------

    def _factors(self, e: Exp, always: Sequence[str] = ()) -> list[str]:
        out = []
        for name, x in zip(self.vars, e):
            if name in always:
                out.append(f"{name}^{x}")
            elif x == 1:
                out.append(name)
            elif x:
                out.append(f"{name}^{x}")
        return out

    def to_text(self) -> str:
        """Canonical text: coefficient first, terms in ascending lex order."""
        if not self.terms:
            return "0"
        return " + ".join(
            "*".join([format_coeff(c)] + self._factors(e)) for e, c in self.sorted_terms()
        )

    def pretty(self) -> str:
        """Human-oriented text that omits unit coefficients."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            factors = self._factors(e)
            if not factors:
                parts.append(format_coeff(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append("*".join([format_coeff(c)] + factors))
        return " + ".join(parts).replace("+ -", "- ")

    @classmethod
    def parse(cls, text: str, vars: Sequence[str]) -> "MPoly":
        return cls(vars, parse_terms(text, vars))


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\^\s*-?\s*\d+)|([*+\-()]))")


def parse_terms(text: str, vars: Sequence[str]) -> dict[Exp, Coeff]:
    """Parse sums of products like ``3/2*z1^2*z2^-1*h1 - t``.

    Accepted grammar: terms separated by ``+``/``-``; each term a ``*``
    product of rationals and ``name`` or ``name^k`` with integer ``k``.
    """
    vars = tuple(vars)
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", 1, pos + 1)
        tokens.append((m.lastindex, m.group(m.lastindex).replace(" ", ""), pos + 1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if not tokens:
        raise ParseError("empty polynomial text", 1, 1)

    terms: dict[Exp, Coeff] = {}
    i = 0
    sign = 1
    while i < len(tokens):
        while i < len(tokens) and tokens[i][1] in "+-" and tokens[i][0] == 4:
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        coeff: Coeff = sign
        e = [0] * len(vars)
        expect_factor = True
        while i < len(tokens):
            kind, tok, col = tokens[i]
            if expect_factor:
                if kind == 1:
                    coeff = _norm(coeff * Fraction(tok))
                elif kind == 2:
                    if tok not in vars:
                        raise ParseError(f"unknown variable {tok!r}", 1, col)
                    power = 1
                    if i + 1 < len(tokens) and tokens[i + 1][0] == 3:
                        power = int(tokens[i + 1][1][1:])
                        i += 1
                    e[vars.index(tok)] += power
                else:
                    raise ParseError(f"expected a factor, got {tok!r}", 1, col)
                expect_factor = False
                i += 1
            elif kind == 4 and tok == "*":
                expect_factor = True
                i += 1
            elif kind == 4 and tok in "+-":
                break
            else:
                raise ParseError(f"unexpected token {tok!r}", 1, col)
        if expect_factor:
            raise ParseError("dangling operator", 1, len(text))
        key = tuple(e)
        terms[key] = _norm(terms.get(key, 0) + coeff)
        sign = 1
    return {e: c for e, c in terms.items() if c}


# ----------------------------------------------------------------------------
# the function ring of T*Ť


@lru_cache(maxsize=None)
def h_vars(rank: int) -> tuple[str, ...]:
    return tuple(f"h{k + 1}" for k in range(rank)) + ("t",)


@lru_cache(maxsize=None)
def laurent_vars(rank: int) -> tuple[str, ...]:
    return tuple(f"z{k + 1}" for k in range(rank)) + h_vars(rank)


class HPoly(MPoly):
    """Polynomial in ``h1..hr`` and ``t`` (the last variable)."""

    __slots__ = ()

    @property
    def rank(self) -> int:
        return len(self.vars) - 1

    @classmethod
    def zero_of(cls, rank: int) -> "HPoly":
        return cls(h_vars(rank))

    @classmethod
    def const(cls, rank: int, c: Coeff = 1) -> "HPoly":
        return cls.constant(h_vars(rank), c)

    @classmethod
    def h(cls, rank: int, k: int) -> "HPoly":
        """The coordinate ``h_{k+1}`` (0-based ``k``)."""
        return cls.variable(h_vars(rank), f"h{k + 1}")

    @classmethod
    def t(cls, rank: int) -> "HPoly":
        return cls.variable(h_vars(rank), "t")

    def set_t_zero(self) -> "HPoly":
        return self._make({e: c for e, c in self.terms.items() if e[-1] == 0})

    def h_degree(self) -> int:
        return max((sum(e[:-1]) for e in self.terms), default=0)

    @classmethod
    def parse_rank(cls, text: str, rank: int) -> "HPoly":
        return cls(h_vars(rank), parse_terms(text, h_vars(rank)))


class LaurentElem(MPoly):
    """Element of ``Q[z^±1, h][t]``: Laurent in ``z``, polynomial in ``h`` and ``t``.

    Thought of as a finitely supported map from z-exponents to ``HPoly``.
    """

    __slots__ = ()

    @property
    def rank(self) -> int:
        return (len(self.vars) - 1) // 2

    def _coerce(self, other):
        if isinstance(other, HPoly) and other.vars == h_vars(self.rank):
            return LaurentElem.from_hpoly(other)
        return super()._coerce(other)

    @classmethod
    def zero_of(cls, rank: int) -> "LaurentElem":
        return cls(laurent_vars(rank))

    @classmethod
    def const(cls, rank: int, c: Coeff = 1) -> "LaurentElem":
        return cls.constant(laurent_vars(rank), c)

    @classmethod
    def z(cls, lam: Sequence[int], coeff: "HPoly | Coeff" = 1) -> "LaurentElem":
        """``coeff * z^lam``."""
        rank = len(lam)
        if isinstance(coeff, HPoly):
            if coeff.rank != rank:
                raise RankMismatch("coefficient rank differs from exponent length")
            return cls(laurent_vars(rank), {tuple(lam) + e: c for e, c in coeff.terms.items()})
        return cls(laurent_vars(rank), {tuple(lam) + (0,) * (rank + 1): coeff})

    @classmethod
    def h(cls, rank: int, k: int) -> "LaurentElem":
        return cls.variable(laurent_vars(rank), f"h{k + 1}")

    @classmethod
    def t(cls, rank: int) -> "LaurentElem":
        return cls.variable(laurent_vars(rank), "t")

    @classmethod
    def from_hpoly(cls, p: HPoly) -> "LaurentElem":
        return cls.z((0,) * p.rank, p)

    @classmethod
    def from_coefficients(cls, rank: int, coeffs: Mapping[Sequence[int], HPoly]) -> "LaurentElem":
        out: dict[Exp, Coeff] = {}
        for lam, p in coeffs.items():
            for e, c in p.terms.items():
                out[tuple(lam) + e] = c
        return cls(laurent_vars(rank), out)

    def items(self) -> Iterator[tuple[Exp, HPoly]]:
        """``(lambda, p_lambda)`` pairs in ascending order of ``lambda``."""
        r = self.rank
        groups: dict[Exp, dict[Exp, Coeff]] = {}
        for e, c in self.terms.items():
            groups.setdefault(e[:r], {})[e[r:]] = c
        hv = h_vars(r)
        for lam in sorted(groups):
            yield lam, HPoly._raw(hv, groups[lam])

    def coefficient(self, lam: Sequence[int]) -> HPoly:
        lam = tuple(lam)
        r = self.rank
        return HPoly._raw(h_vars(r), {e[r:]: c for e, c in self.terms.items() if e[:r] == lam})

    def z_support(self) -> list[Exp]:
        r = self.rank
        return sorted({e[:r] for e in self.terms})

    def z_degree(self) -> int:
        r = self.rank
        return max((max(map(abs, e[:r]), default=0) for e in self.terms), default=0)

    def h_degree(self) -> int:
        r = self.rank
        return max((sum(e[r:2 * r]) for e in self.terms), default=0)

    def set_t_zero(self) -> "LaurentElem":
        return self._make({e: c for e, c in self.terms.items() if e[-1] == 0})

    def invert_torus(self) -> "LaurentElem":
        """Pullback along ``g -> g^{-1}`` on ``Ť``: ``z^lam -> z^-lam``."""
        r = self.rank
        return self._make({tuple(-x for x in e[:r]) + e[r:]: c for e, c in self.terms.items()})

    def evaluate_at(self, g: Sequence[Coeff], h: Sequence[Coeff], t: Coeff = 0) -> Fraction:
        r = self.rank
        if len(g) != r or len(h) != r:
            raise RankMismatch("point has the wrong number of coordinates")
        return self.evaluate(dict(zip(self.vars, list(g) + list(h) + [t])))

    def to_text(self) -> str:
        """Canonical serialisation, e.g. ``3/2*z1^2*z2^-1*h1*t^0``."""
        if not self.terms:
            return "0"
        r = self.rank
        order = sorted(self.terms.items(), key=lambda ec: (ec[0][:r], ec[0][r:]))
        return " + ".join(
            "*".join([format_coeff(c)] + self._factors(e, always=("t",))) for e, c in order
        )

    def has_polynomial_coefficients(self) -> bool:
        """No negative powers of ``h`` or ``t``, as the ring requires."""
        r = self.rank
        return all(x >= 0 for e in self.terms for x in e[r:])

    def require_polynomial_coefficients(self) -> "LaurentElem":
        if not self.has_polynomial_coefficients():
            raise ValidationError("h and t may only appear with nonnegative exponents")
        return self

    @classmethod
    def parse_rank(cls, text: str, rank: int) -> "LaurentElem":
        text = text.strip()
        if text == "0":
            return cls.zero_of(rank)
        out = cls(laurent_vars(rank), parse_terms(text, laurent_vars(rank)))
        if not out.has_polynomial_coefficients():
            raise ParseError(f"negative power of h or t in {text!r}")
        return out


def _raw(cls, vars, terms):
    obj = object.__new__(cls)
    obj.vars = vars
    obj.terms = terms
    obj._hash = None
    return obj


MPoly._raw = classmethod(_raw)


# ----------------------------------------------------------------------------
# linear forms and localisation


@dataclass(frozen=True, order=True)
class CharLinearForm:
    """The linear form ``sign * h_rho`` or, with ``shift_t``, ``sign * (t + h_rho)``.

    Here ``h_rho = sum_k rho[k] * h_k``.
    """

    character: tuple[int, ...]
    sign: int = 1
    shift_t: bool = False

    def __post_init__(self):
        object.__setattr__(self, "character", tuple(int(x) for x in self.character))
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def rank(self) -> int:
        return len(self.character)

    def is_zero(self) -> bool:
        return not self.shift_t and not any(self.character)

    def poly(self) -> HPoly:
        return _form_power(self, 1)

    def evaluate(self, h: Sequence[Coeff], t: Coeff = 0) -> Fraction:
        value = Fraction(sum(Fraction(a) * b for a, b in zip(h, self.character)))
        if self.shift_t:
            value += t
        return self.sign * value

    def canonical(self) -> tuple[Fraction, "CharLinearForm"]:
        """Split as ``scalar * form`` with a normalised representative.

        Unshifted forms are scaled to a primitive character whose first
        nonzero entry is positive; shifted forms only lose their sign.  Two
        canonical forms are proportional only if they are equal.
        """
        if self.shift_t:
            return Fraction(self.sign), CharLinearForm(self.character, 1, True)
        if self.is_zero():
            raise ValueError("the zero form has no canonical representative")
        g = 0
        for x in self.character:
            g = gcd(g, x)
        lead = next(x for x in self.character if x)
        s = 1 if lead > 0 else -1
        return (
            Fraction(self.sign * s * g),
            CharLinearForm(tuple(s * x // g for x in self.character), 1, False),
        )


@lru_cache(maxsize=4096)
def _form_power(form: CharLinearForm, k: int) -> HPoly:
    r = form.rank
    terms: dict[Exp, Coeff] = {}
    for j, x in enumerate(form.character):
        if x:
            e = [0] * (r + 1)
            e[j] = 1
            terms[tuple(e)] = form.sign * x
    if form.shift_t:
        terms[(0,) * r + (1,)] = form.sign
    return HPoly(h_vars(r), terms) ** k


def char_form(rho_i: Sequence[int]) -> HPoly:
    """``h_rho = sum_k rho[k] h_k`` as a polynomial."""
    return CharLinearForm(tuple(rho_i)).poly()


def divide_exact(f: LaurentElem, d: CharLinearForm) -> LaurentElem | None:
    """``f / d`` when the linear form divides every coefficient, else None."""
    if d.is_zero():
        raise ZeroDivisionError("division by the zero form")
    q, r = f.divmod(LaurentElem.from_hpoly(d.poly()))
    return q if r.is_zero() else None


class FracElem:
    """``numerator / prod(forms^mult)`` with ``forms`` canonical linear forms.

    The constructor moves scalars out of the denominator, so two FracElems
    are equal exactly when their normalised parts coincide.
    """

    __slots__ = ("numerator", "denominator", "_normal")

    def __init__(self, numerator: LaurentElem, denominator: Iterable[CharLinearForm] | Mapping[CharLinearForm, int] = ()):
        counts: Counter = Counter()
        items = denominator.items() if isinstance(denominator, Mapping) else ((f, 1) for f in denominator)
        scale = Fraction(1)
        for form, mult in items:
            if mult < 0:
                raise ValueError("denominator multiplicities must be nonnegative")
            if not mult:
                continue
            if form.rank != numerator.rank:
                raise RankMismatch("denominator form rank differs from numerator rank")
            s, canon = form.canonical()
            scale *= s ** mult
            counts[canon] += mult
        self.numerator = numerator if scale == 1 else numerator * (1 / scale)
        self.denominator = tuple(sorted(counts.items()))
        self._normal = None

    @classmethod
    def _canonical(cls, numerator: LaurentElem, denominator: tuple) -> "FracElem":
        obj = object.__new__(cls)
        obj.numerator = numerator
        obj.denominator = denominator
        obj._normal = None
        return obj

    @classmethod
    def of(cls, f: LaurentElem) -> "FracElem":
        return cls._canonical(f, ())

    @property
    def rank(self) -> int:
        return self.numerator.rank

    def denominator_poly(self) -> HPoly:
        out = HPoly.const(self.rank)
        for form, mult in self.denominator:
            out = out * _form_power(form, mult)
        return out

    def _lift(self, other) -> "FracElem":
        if isinstance(other, FracElem):
            if other.rank != self.rank:
                raise RankMismatch("fractions over tori of different rank")
            return other
        if isinstance(other, (int, Fraction)):
            return FracElem.of(LaurentElem.const(self.rank, other))
        if isinstance(other, (LaurentElem, HPoly)):
            return FracElem.of(LaurentElem.zero_of(self.rank) + other)
        return NotImplemented

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        counts = Counter(dict(self.denominator))
        counts.update(dict(other.denominator))
        return FracElem._canonical(self.numerator * other.numerator, tuple(sorted(counts.items())))

    __rmul__ = __mul__

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        mine, theirs = dict(self.denominator), dict(other.denominator)
        common = {f: max(mine.get(f, 0), theirs.get(f, 0)) for f in set(mine) | set(theirs)}
        a = self.numerator
        b = other.numerator
        for f, m in common.items():
            if m > mine.get(f, 0):
                a = a * LaurentElem.from_hpoly(_form_power(f, m - mine.get(f, 0)))
            if m > theirs.get(f, 0):
                b = b * LaurentElem.from_hpoly(_form_power(f, m - theirs.get(f, 0)))
        return FracElem._canonical(a + b, tuple(sorted(common.items())))

    __radd__ = __add__

    def __neg__(self):
        return FracElem._canonical(-self.numerator, self.denominator)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def divide_by(self, form: CharLinearForm, mult: int = 1) -> "FracElem":
        return self * FracElem(LaurentElem.const(self.rank), {form: mult})

    def normalize(self) -> "FracElem":
        """Cancel every denominator form that divides the numerator.

        Canonical linear forms are pairwise non-associate irreducibles, so the
        result is in lowest terms.
        """
        if self._normal is None:
            num = self.numerator
            den = []
            for form, mult in self.denominator:
                while mult:
                    q = divide_exact(num, form)
                    if q is None:
                        break
                    num, mult = q, mult - 1
                if mult:
                    den.append((form, mult))
            self._normal = FracElem._canonical(num, tuple(den))
            self._normal._normal = self._normal
        return self._normal

    def is_regular(self) -> bool:
        n = self.normalize()
        return not n.denominator or n.numerator.is_zero()

    def as_laurent(self) -> LaurentElem | None:
        n = self.normalize()
        if n.numerator.is_zero():
            return n.numerator
        return None if n.denominator else n.numerator

    def set_t_zero(self) -> "FracElem":
        if any(f.shift_t for f, _ in self.denominator):
            raise ValueError("t-shifted denominators do not survive t = 0")
        return FracElem._canonical(self.numerator.set_t_zero(), self.denominator)

    def evaluate_at(self, g: Sequence[Coeff], h: Sequence[Coeff], t: Coeff = 0) -> Fraction | None:
        """Value at a point, or None when a denominator form vanishes there."""
        den = Fraction(1)
        for form, mult in self.denominator:
            den *= form.evaluate(h, t) ** mult
        if den == 0:
            return None
        return self.numerator.evaluate_at(g, h, t) / den

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.normalize(), other.normalize()
        if a.numerator.is_zero() or b.numerator.is_zero():
            return a.numerator.is_zero() and b.numerator.is_zero()
        return a.numerator == b.numerator and a.denominator == b.denominator

    def __hash__(self):
        n = self.normalize()
        return hash((n.numerator, n.denominator))

    def __repr__(self):
        den = "*".join(
            f"({f.poly().pretty()})" + (f"^{m}" if m > 1 else "") for f, m in self.denominator
        )
        return f"FracElem({self.numerator.pretty()}" + (f" / {den})" if den else ")")


def normalize(fr: FracElem) -> FracElem:
    return fr.normalize()


def is_regular(fr: FracElem) -> bool:
    return fr.is_regular()


# ----------------------------------------------------------------------------
# general rational functions


class RatFunc:
    """Quotient ``num / den`` of two Laurent polynomials over the same variables.

    Equality is by cross multiplication, so no gcd computation is needed.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly | None = None):
        if den is None:
            den = num.one()
        if den.vars != num.vars:
            raise RankMismatch("numerator and denominator variables differ")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if den.is_monomial():
            # monomials are units: fold them into the numerator
            num, den = num * den ** -1, den.one()
        self.num = MPoly(num.vars, num.terms) if type(num) is not MPoly else num
        self.den = MPoly(den.vars, den.terms) if type(den) is not MPoly else den

    @property
    def vars(self) -> tuple[str, ...]:
        return self.num.vars

    @classmethod
    def const(cls, vars: Sequence[str], c: Coeff) -> "RatFunc":
        return cls(MPoly.constant(vars, c))

    @classmethod
    def var(cls, vars: Sequence[str], name: str) -> "RatFunc":
        return cls(MPoly.variable(vars, name))

    def _lift(self, other):
        if isinstance(other, RatFunc):
            if other.vars != self.vars:
                raise RankMismatch(f"variables {self.vars} and {other.vars} differ")
            return other
        if isinstance(other, MPoly):
            return RatFunc(other)
        if isinstance(other, (int, Fraction)):
            return RatFunc.const(self.vars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** -k
        return RatFunc(self.num ** k, self.den ** k)

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.num * other.den == other.num * self.den

    __hash__ = None  # equality is by cross multiplication

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def as_laurent(self) -> MPoly | None:
        """The Laurent polynomial this equals, or None if it has a genuine pole."""
        return self.num.exact_div(self.den)

    def is_laurent(self) -> bool:
        return self.as_laurent() is not None

    def reduced(self) -> "RatFunc":
        q = self.as_laurent()
        return RatFunc(q) if q is not None else self

    def substitute(self, mapping: Mapping[str, object], vars: Sequence[str]) -> "RatFunc":
        zero = RatFunc(MPoly(vars))
        return self.num.substitute(mapping, zero) / self.den.substitute(mapping, zero)

    def evaluate(self, point: Mapping[str, Coeff]) -> Fraction:
        return self.num.evaluate(point) / self.den.evaluate(point)

    def pretty(self) -> str:
        if self.den.is_constant():
            return (self.num * (Fraction(1) / self.den.constant_term())).pretty()
        return f"({self.num.pretty()})/({self.den.pretty()})"

    __str__ = pretty

    def __repr__(self):
        return f"RatFunc({self.pretty()!r})"
