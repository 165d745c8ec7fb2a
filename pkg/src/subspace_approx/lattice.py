"""Rational subspaces of R^n as saturated integer lattices.

A :class:`RationalSubspace` keeps the generators it was built from, a
Z-basis of ``span ∩ Z^n`` in Hermite normal form, an integer basis of the
orthogonal lattice, and the exact squared height.  Every vector is a tuple
of Python ints; a "matrix" is a sequence of such vectors (its columns in the
usual n x e picture).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from .exterior import integer_rank, norm_sq, wedge
from .numeric_core import BigFloat, as_fraction

Vector = tuple[int, ...]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _echelon(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[list[int]]]:
    """Unimodular row reduction on the first ``ncols`` columns.

    Returns ``(pivot_rows, rest)``: pivot rows in HNF order (positive pivots,
    entries above each pivot reduced into ``[0, pivot)``), and the remaining
    rows, whose first ``ncols`` entries are all zero.
    """
    rows = [list(r) for r in rows]
    top = 0
    pivots: list[int] = []
    for c in range(ncols):
        nz = [r for r in range(top, len(rows)) if rows[r][c]]
        if not nz:
            continue
        i = nz[0]
        rows[top], rows[i] = rows[i], rows[top]
        piv = rows[top]
        for r in range(top + 1, len(rows)):
            b = rows[r][c]
            if not b:
                continue
            a = piv[c]
            if b % a == 0:
                q = b // a
                rows[r] = [y - q * x for x, y in zip(piv, rows[r])]
                continue
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            other = rows[r]
            piv, rows[r] = (
                [x * p + y * o for p, o in zip(piv, other)],
                [-bg * p + ag * o for p, o in zip(piv, other)],
            )
        if piv[c] < 0:
            piv = [-v for v in piv]
        rows[top] = piv
        for r in range(top):
            q = rows[r][c] // piv[c]
            if q:
                rows[r] = [y - q * x for x, y in zip(piv, rows[r])]
        pivots.append(c)
        top += 1
    return rows[:top], rows[top:]


def hnf(vectors: Sequence[Sequence[int]]) -> tuple[Vector, ...]:
    """Hermite normal form basis of the lattice generated by ``vectors``.

    Canonical: two generating sets give the same output iff they generate
    the same lattice.
    """
    vectors = [list(map(int, v)) for v in vectors]
    if not vectors:
        return ()
    n = len(vectors[0])
    piv, _ = _echelon(vectors, n)
    return tuple(tuple(r) for r in piv)


def integer_kernel(rows: Sequence[Sequence[int]], n: int | None = None) -> tuple[Vector, ...]:
    """Z-basis (in HNF) of ``{x in Z^n : r . x = 0 for every row r}``."""
    rows = [list(map(int, r)) for r in rows]
    if n is None:
        if not rows:
            raise ValueError("need n when the row list is empty")
        n = len(rows[0])
    m = len(rows)
    aug = [[rows[i][j] for i in range(m)] + [int(k == j) for k in range(n)] for j in range(n)]
    _, rest = _echelon(aug, m)
    return hnf([r[m:] for r in rest])


def integral_vector(v: Sequence) -> Vector:
    fr = [as_fraction(x) for x in v]
    den = math.lcm(*(x.denominator for x in fr)) if fr else 1
    return tuple(int(x * den) for x in fr)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class RationalSubspace:
    """Immutable rational subspace; all cached fields are computed eagerly."""

    n: int
    dim: int
    span: tuple[Vector, ...]
    zbasis: tuple[Vector, ...]
    complement: tuple[Vector, ...] = field(repr=False)
    height_sq: int = 1

    @classmethod
    def from_span(cls, vectors: Sequence[Sequence]) -> "RationalSubspace":
        """Build from a full-rank spanning set (rational entries are scaled to integers)."""
        span = tuple(integral_vector(v) for v in vectors)
        if not span:
            raise ValueError("empty spanning set; use from_generators for the zero subspace")
        n = len(span[0])
        if any(len(v) != n for v in span):
            raise ValueError("ambient dimension mismatch in spanning set")
        if integer_rank(span) != len(span):
            raise ValueError("spanning set is rank deficient")
        return cls._build(n, span)

    @classmethod
    def from_generators(cls, vectors: Sequence[Sequence], n: int | None = None) -> "RationalSubspace":
        """Build from any generating set, dependent or empty."""
        gens = [integral_vector(v) for v in vectors]
        if n is None:
            if not gens:
                raise ValueError("need n for an empty generating set")
            n = len(gens[0])
        return cls._build(n, hnf(gens))

    @classmethod
    def _build(cls, n: int, span: tuple[Vector, ...]) -> "RationalSubspace":
        e = len(span)
        if e == 0:
            comp = tuple(tuple(int(i == j) for i in range(n)) for j in range(n))
            return cls(n, 0, (), (), comp, 1)
        if e == n:
            ident = tuple(tuple(int(i == j) for i in range(n)) for j in range(n))
            return cls(n, n, span, ident, (), 1)
        comp = integer_kernel(span, n)
        zb = integer_kernel(comp, n)
        return cls(n, e, span, zb, comp, norm_sq(wedge(zb)))

    # -- queries ---------------------------------------------------------

    def member(self, v: Sequence) -> bool:
        if len(v) != self.n:
            raise ValueError("ambient dimension mismatch")
        return all(dot(w, v) == 0 for w in self.complement)

    def contains(self, other: "RationalSubspace") -> bool:
        _check_ambient(self, other)
        return all(self.member(v) for v in other.zbasis)

    def same_space(self, other: "RationalSubspace") -> bool:
        return self.n == other.n and self.zbasis == other.zbasis

    def height(self, bits: int = 64) -> tuple[int, BigFloat]:
        return height(self, bits)

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "dim": self.dim,
                "zbasis": [[str(x) for x in v] for v in self.zbasis],
                "height_sq": str(self.height_sq),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "RationalSubspace":
        obj = json.loads(text)
        vecs = [[int(x) for x in v] for v in obj["zbasis"]]
        if not vecs:
            return cls.from_generators([], n=obj["n"])
        out = cls.from_span(vecs)
        if out.height_sq != int(obj["height_sq"]) or out.dim != obj["dim"]:
            raise ValueError("serialized height or dimension disagrees with the Z-basis")
        return out


def _check_ambient(a: RationalSubspace, b: RationalSubspace) -> None:
    if a.n != b.n:
        raise ValueError(f"ambient mismatch: {a.n} vs {b.n}")


def z_basis(span: Sequence[Sequence[int]]) -> tuple[Vector, ...]:
    """HNF Z-basis of ``span_R(span) ∩ Z^n``; the input must have full rank."""
    return RationalSubspace.from_span(span).zbasis


def height(S: RationalSubspace, bits: int = 64) -> tuple[int, BigFloat]:
    """Exact squared height and its square root at ``bits`` of precision."""
    return S.height_sq, BigFloat.sqrt_rational(S.height_sq, bits)


def ideal_norm(given_basis: Sequence[Sequence[int]], S: RationalSubspace) -> int:
    """Index of the lattice spanned by ``given_basis`` in ``S ∩ Z^n``.

    Equals ``|wedge(given_basis)| / H(S)``.
    """
    basis = [tuple(map(int, v)) for v in given_basis]
    if len(basis) != S.dim or integer_rank(basis) != S.dim:
        raise ValueError("given basis does not have the subspace's dimension")
    if not all(S.member(v) for v in basis):
        raise ValueError("given basis does not span the subspace")
    num = norm_sq(wedge(basis))
    q, r = divmod(num, S.height_sq)
    assert r == 0, "wedge norm not an integer multiple of the height"
    k = math.isqrt(q)
    assert k * k == q, "ideal norm is not an integer"
    return k


def sum_spaces(S1: RationalSubspace, S2: RationalSubspace) -> RationalSubspace:
    _check_ambient(S1, S2)
    return RationalSubspace.from_generators(S1.zbasis + S2.zbasis, n=S1.n)


def intersect(S1: RationalSubspace, S2: RationalSubspace) -> RationalSubspace:
    """Exact intersection via the integer kernel of ``[Z1 | -Z2]``."""
    _check_ambient(S1, S2)
    cols = list(S1.zbasis) + [tuple(-x for x in v) for v in S2.zbasis]
    if not cols:
        return RationalSubspace.from_generators([], n=S1.n)
    rows = [[c[i] for c in cols] for i in range(S1.n)]
    ker = integer_kernel(rows, len(cols))
    e1 = len(S1.zbasis)
    gens = [[sum(k[j] * S1.zbasis[j][i] for j in range(e1)) for i in range(S1.n)] for k in ker]
    return RationalSubspace.from_generators(gens, n=S1.n)


def contains(S1: RationalSubspace, S2: RationalSubspace) -> bool:
    return S1.contains(S2)


def member(v: Sequence, S: RationalSubspace) -> bool:
    return S.member(v)


def orthogonal_complement(S: RationalSubspace) -> RationalSubspace:
    if not S.complement:
        return RationalSubspace.from_generators([], n=S.n)
    return RationalSubspace.from_span(S.complement)
