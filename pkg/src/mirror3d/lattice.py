"""Integer lattices and homomorphisms of tori.

A homomorphism of tori ``T^a -> T^b`` is recorded by the integer matrix of
its action on cocharacters (``b x a``); dualising a map of tori is the
transpose.  Everything here is exact: Python integers and ``Fraction``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import LengthMismatch, NotExact, ValidationError

IntVector = tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix that remembers its shape even when empty."""

    rows: tuple[IntVector, ...]
    ncols: int

    def __post_init__(self):
        for row in self.rows:
            if len(row) != self.ncols:
                raise ValidationError(
                    f"row {row} has length {len(row)}, expected {self.ncols}"
                )

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]], ncols: int | None = None) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        if ncols is None:
            if not rows:
                raise ValidationError("ncols is required for a matrix with no rows")
            ncols = len(rows[0])
        return cls(rows, ncols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(tuple((0,) * ncols for _ in range(nrows)), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(
            tuple(tuple(row[j] for row in self.rows) for j in range(self.ncols)),
            self.nrows,
        )

    def column(self, j: int) -> IntVector:
        return tuple(row[j] for row in self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise LengthMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = [other.column(j) for j in range(other.ncols)]
        return IntMatrix(
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.rows),
            other.ncols,
        )

    def apply(self, vec: Sequence[int]) -> IntVector:
        if len(vec) != self.ncols:
            raise LengthMismatch(f"vector of length {len(vec)} for matrix {self.shape}")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.rows)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.rows]

    def diagonal(self) -> IntVector:
        return tuple(self.rows[i][i] for i in range(min(self.shape)))


def pairing(chi: Sequence[int], lam: Sequence[int]) -> int:
    """Pair a character with a cocharacter."""
    if len(chi) != len(lam):
        raise LengthMismatch(f"cannot pair vectors of lengths {len(chi)} and {len(lam)}")
    return sum(a * b for a, b in zip(chi, lam))


def dual_hom(m: IntMatrix) -> IntMatrix:
    """Matrix of the dual torus homomorphism."""
    return m.T


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form ``U @ M @ V == D``.

    Parameters
    ----------
    m : IntMatrix
        Any integer matrix, possibly with zero rows or columns.

    Returns
    -------
    U, D, V : IntMatrix
        ``U`` and ``V`` are unimodular; ``D`` is diagonal with nonnegative
        entries satisfying ``d_1 | d_2 | ...``.
    """
    nr, nc = m.shape
    a = [list(row) for row in m.rows]
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in v:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    for t in range(min(nr, nc)):
        while True:
            entries = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
            if not entries:
                break
            _, pi, pj = min(entries)
            swap_rows(t, pi)
            swap_cols(t, pj)
            clean = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    return IntMatrix.of(u, nr), IntMatrix.of(a, nc), IntMatrix.of(v, nc)


def elementary_divisors(m: IntMatrix) -> IntVector:
    """Nonzero diagonal entries of the Smith normal form."""
    return tuple(d for d in smith_normal_form(m)[1].diagonal() if d)


def integer_rank(m: IntMatrix) -> int:
    return len(elementary_divisors(m))


def is_faithful(rho: IntMatrix) -> bool:
    """True when ``rho: T -> T^n`` is injective, i.e. has trivial kernel.

    Injectivity on tori needs full rank and unit elementary divisors, since a
    divisor ``d > 1`` contributes a ``Z/d`` subgroup to the kernel.
    """
    divisors = elementary_divisors(rho)
    return len(divisors) == rho.ncols and all(d == 1 for d in divisors)


def _is_surjective(m: IntMatrix) -> bool:
    divisors = elementary_divisors(m)
    return len(divisors) == m.nrows and all(d == 1 for d in divisors)


def dual_exact_sequence(rho: IntMatrix, eta: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Dualise ``0 -> Z^r --rho--> Z^n --eta--> Z^n' -> 0``.

    Returns ``(eta_dual, rho_dual)`` for ``0 -> Z^n' -> Z^n -> Z^r -> 0``.
    Raises ``NotExact`` unless the input sequence is exact over the integers.
    """
    if eta.ncols != rho.nrows:
        raise NotExact(f"incompatible shapes {rho.shape} and {eta.shape}")
    if not (eta @ rho).is_zero():
        raise NotExact("composite map is nonzero")
    if not is_faithful(rho):
        raise NotExact("first map is not injective with saturated image")
    if not _is_surjective(eta):
        raise NotExact("second map is not surjective")
    if rho.ncols + eta.nrows != rho.nrows:
        raise NotExact("ranks do not add up")
    return dual_hom(eta), dual_hom(rho)


def exact_completion(rho: IntMatrix) -> IntMatrix:
    """Cokernel map ``eta`` making ``0 -> Z^r -> Z^n -> Z^{n-r} -> 0`` exact."""
    if not is_faithful(rho):
        raise NotExact("map is not injective with saturated image")
    u, _, _ = smith_normal_form(rho)
    return IntMatrix(u.rows[rho.ncols:], u.ncols)


def random_unimodular(n: int, rng: random.Random, steps: int = 12) -> IntMatrix:
    """Product of random elementary matrices."""
    a = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        q = rng.choice((-2, -1, 1, 2))
        a[i] = [x + q * y for x, y in zip(a[i], a[j])]
    return IntMatrix.of(a, n)


def rank_over_q(rows: Sequence[Sequence[Fraction | int]]) -> int:
    return len(rref(rows)[1])


def rref(rows: Sequence[Sequence[Fraction | int]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (matrix, pivot columns)."""
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return a, []
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        lead = a[r][c]
        a[r] = [x / lead for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def nullspace_q(rows: Sequence[Sequence[Fraction | int]], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}`` over the rationals."""
    reduced, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


def solve_q(a: Sequence[Sequence[Fraction | int]], b: Sequence[Fraction | int]) -> list[Fraction] | None:
    """One rational solution of ``A x = b``, or None when inconsistent."""
    if not a:
        return [] if all(x == 0 for x in b) else None
    ncols = len(a[0])
    reduced, pivots = rref([list(row) + [y] for row, y in zip(a, b)])
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(reduced, pivots):
        x[p] = row[ncols]
    return x


@dataclass(frozen=True)
class ToricStackData:
    """Rays of a fan in ``Z^n`` together with ``rho: T -> T^n``.

    ``rho`` has one row per coordinate of ``T^n``: row ``i`` is the
    character ``rho_i`` of ``T``.
    """

    torus_rank: int
    ambient_rank: int
    rays: tuple[IntVector, ...]
    rho: IntMatrix

    def __post_init__(self):
        if self.rho.shape != (self.ambient_rank, self.torus_rank):
            raise ValidationError(
                f"rho has shape {self.rho.shape}, expected {(self.ambient_rank, self.torus_rank)}"
            )
        for u in self.rays:
            if len(u) != self.ambient_rank:
                raise ValidationError(f"ray {u} does not lie in Z^{self.ambient_rank}")


@dataclass(frozen=True)
class GaleDualData:
    """The dual action of ``Ť^n`` on ``C^l × Ť``.

    ``matter_action`` (l x n) has the rays as rows; ``residual_action``
    (r x n) is the dual map ``Ť^n -> Ť``.
    """

    matter_action: IntMatrix
    residual_action: IntMatrix

    @property
    def dimension(self) -> int:
        """Expected dimension ``l + r - n`` of the dual quotient."""
        return self.matter_action.nrows + self.residual_action.nrows - self.matter_action.ncols


def gale_dual(c: ToricStackData) -> GaleDualData:
    return GaleDualData(
        matter_action=IntMatrix.of(c.rays, c.ambient_rank),
        residual_action=dual_hom(c.rho),
    )


def toric_sequence(rays: Sequence[Sequence[int]], ambient_rank: int) -> tuple[IntMatrix, IntMatrix]:
    """Exact sequence ``0 -> K -> Z^l -> Z^n -> 0`` sending ``e_j`` to the ``j``-th ray.

    Returns ``(kernel_inclusion, ray_map)``.  Raises ``NotExact`` when the
    rays do not span ``Z^n``.
    """
    ray_map = IntMatrix.of(rays, ambient_rank).T
    if not _is_surjective(ray_map):
        raise NotExact("rays do not generate the lattice")
    _, _, v = smith_normal_form(ray_map)
    kernel = IntMatrix(tuple(row[ray_map.nrows:] for row in v.rows), v.ncols - ray_map.nrows)
    return kernel, ray_map
