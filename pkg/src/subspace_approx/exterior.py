"""Exact exterior algebra on rational vectors.

Coordinates of a grade-g multivector in R^n are indexed by the g-subsets of
{0, ..., n-1} in lexicographic order (``itertools.combinations`` order).  The
JSON form uses 1-based subsets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .numeric_core import as_fraction, format_rational


@dataclass(frozen=True)
class Multivector:
    n: int
    grade: int
    coords: tuple  # Fraction or int, one per subset in lexicographic order

    def __post_init__(self):
        if len(self.coords) != math.comb(self.n, self.grade):
            raise ValueError("wrong number of coordinate slots")

    @property
    def subsets(self) -> list[tuple[int, ...]]:
        return list(combinations(range(self.n), self.grade))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __getitem__(self, subset: Sequence[int]):
        return self.coords[self.subsets.index(tuple(subset))]

    def __neg__(self) -> "Multivector":
        return Multivector(self.n, self.grade, tuple(-c for c in self.coords))

    def scale(self, s) -> "Multivector":
        return Multivector(self.n, self.grade, tuple(c * s for c in self.coords))

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "grade": self.grade,
                "coords": [
                    [[i + 1 for i in sub], format_rational(c)] for sub, c in zip(self.subsets, self.coords)
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Multivector":
        obj = json.loads(text)
        n, g = obj["n"], obj["grade"]
        lookup = {tuple(i - 1 for i in sub): as_fraction(c) for sub, c in obj["coords"]}
        coords = tuple(_demote(lookup.get(sub, Fraction(0))) for sub in combinations(range(n), g))
        return cls(n, g, coords)


def _demote(x: Fraction):
    return x.numerator if x.denominator == 1 else x


def bareiss_det(rows: list[list[int]]) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    m = [list(r) for r in rows]
    k = len(m)
    if k == 0:
        return 1
    sign, prev = 1, 1
    for i in range(k - 1):
        if m[i][i] == 0:
            for r in range(i + 1, k):
                if m[r][i]:
                    m[i], m[r] = m[r], m[i]
                    sign = -sign
                    break
            else:
                return 0
        piv = m[i][i]
        for r in range(i + 1, k):
            mr, mi = m[r], m[i]
            f = mr[i]
            for c in range(i + 1, k):
                mr[c] = (piv * mr[c] - f * mi[c]) // prev
            mr[i] = 0
        prev = piv
    return sign * m[k - 1][k - 1]


def integer_rank(vectors: Sequence[Sequence[int]]) -> int:
    """Exact rank of a list of integer (or rational) vectors."""
    m = [_integral_row(v) for v in vectors]
    if not m:
        return 0
    ncols = len(m[0])
    rank, prev = 0, 1
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][c]
        for r in range(rank + 1, len(m)):
            f = m[r][c]
            m[r] = [(p * a - f * b) // prev for a, b in zip(m[r], m[rank])]
        prev = p
        rank += 1
        if rank == len(m):
            break
    return rank


def _integral_row(v: Sequence) -> list[int]:
    fr = [as_fraction(x) for x in v]
    den = math.lcm(*(x.denominator for x in fr)) if fr else 1
    return [int(x * den) for x in fr]


def _clear_denominators(vectors: Sequence[Sequence]) -> tuple[list[list[int]], Fraction]:
    """Scale each vector to integers; return the integer vectors and the
    product of inverse scalings (so wedge(orig) = factor * wedge(scaled))."""
    scaled, factor = [], Fraction(1)
    for v in vectors:
        fr = [as_fraction(x) for x in v]
        den = math.lcm(*(x.denominator for x in fr)) if fr else 1
        scaled.append([int(x * den) for x in fr])
        factor /= den
    return scaled, factor


def wedge(vectors: Sequence[Sequence]) -> Multivector:
    """Grassmann coordinates of ``v1 ^ ... ^ vg``: the g x g minors of the
    n x g column matrix, rows taken in lexicographic subset order."""
    vectors = [list(v) for v in vectors]
    if not vectors:
        raise ValueError("wedge of an empty list has no ambient dimension")
    n = len(vectors[0])
    if any(len(v) != n for v in vectors):
        raise ValueError("dimension mismatch among wedge factors")
    g = len(vectors)
    if g > n:
        raise ValueError(f"cannot wedge {g} vectors in dimension {n}")
    ints, factor = _clear_denominators(vectors)
    rows = list(zip(*ints))  # n rows of length g
    coords = []
    for sub in combinations(range(n), g):
        minor = bareiss_det([list(rows[i]) for i in sub])
        coords.append(_demote(factor * minor) if factor != 1 else minor)
    return Multivector(n, g, tuple(coords))


def norm_sq(m: Multivector):
    """Exact squared Euclidean norm of the coordinate vector."""
    s = sum(Fraction(c) * c if isinstance(c, Fraction) else c * c for c in m.coords)
    return _demote(s) if isinstance(s, Fraction) else s


def gram_det(vectors: Sequence[Sequence]):
    """det(V^T V), computed independently of the minors (Cauchy-Binet oracle)."""
    ints, factor = _clear_denominators(vectors)
    g = len(ints)
    gram = [[sum(a * b for a, b in zip(ints[i], ints[j])) for j in range(g)] for i in range(g)]
    det = bareiss_det(gram)
    out = factor * factor * det
    return _demote(out)


def primitive_normalize(m: Multivector) -> Multivector:
    """Divide an integral multivector by the gcd of its coordinates.

    The first nonzero coordinate of the result is positive.
    """
    ints = []
    for c in m.coords:
        c = as_fraction(c)
        if c.denominator != 1:
            raise ValueError("primitive_normalize needs integral coordinates")
        ints.append(c.numerator)
    g = math.gcd(*ints)
    if g == 0:
        raise ValueError("zero multivector has no primitive representative")
    lead = next(c for c in ints if c)
    if lead < 0:
        g = -g
    return Multivector(m.n, m.grade, tuple(c // g for c in ints))

