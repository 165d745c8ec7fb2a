"""Angles between subspaces: the proximity omega and the sine profile psi.

``psi_j(A, B)`` is the sine of the j-th principal angle, sorted
nondecreasing.  With ``X`` the smaller frame (t vectors) and ``Y`` the
other, put ``G_X = X^T X``, ``G_Y = Y^T Y``, ``K = X^T Y`` and

    S = G_X - K G_Y^{-1} K^T = X^T (I - P_Y) X.

The squared sines are the eigenvalues of the pencil ``S x = lambda G_X x``.
``S`` is assembled exactly, so the cancellation that makes the sines tiny
happens in integer arithmetic and only the t x t eigenproblem is rounded.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import mpmath
import numpy as np

from . import _kernels
from .construction import ConstructionParams, TruncatedA, tail_angle_bound
from .exterior import bareiss_det, integer_rank, norm_sq, wedge
from .lattice import RationalSubspace, integral_vector, dot
from .numeric_core import (
    BigFloat,
    InfeasiblePrecision,
    PrecisionError,
    certified,
    floor_pow,
    format_rational,
    hex_mpf,
    precision_bits,
)

Subspace = Union[RationalSubspace, TruncatedA]


@dataclass(frozen=True)
class AngleReport:
    t: int
    psi: tuple[BigFloat, ...]
    error_bound: BigFloat
    precision_bits: int

    def __post_init__(self):
        if len(self.psi) != self.t:
            raise ValueError("psi length must equal t")

    @property
    def last(self) -> BigFloat:
        return self.psi[-1]

    def to_json(self) -> str:
        return json.dumps(
            {
                "t": self.t,
                "psi": [p.hex() for p in self.psi],
                "error_bound": self.error_bound.hex(),
                "precision_bits": self.precision_bits,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "AngleReport":
        obj = json.loads(text)
        bits = obj["precision_bits"]
        return cls(
            obj["t"],
            tuple(BigFloat(hex_mpf(h), bits) for h in obj["psi"]),
            BigFloat(hex_mpf(obj["error_bound"]), bits),
            bits,
        )


# --------------------------------------------------------------------------
# exact building blocks


def omega(X: Sequence, Y: Sequence, bits: int = 64) -> tuple[Fraction, BigFloat]:
    """Sine of the angle between two nonzero rational vectors: exact square and certified root."""
    nx, ny = norm_sq(wedge([X])), norm_sq(wedge([Y]))
    if nx == 0 or ny == 0:
        raise ValueError("omega is undefined for a zero vector")
    w2 = Fraction(norm_sq(wedge([X, Y]))) / (Fraction(nx) * ny)
    return w2, BigFloat.sqrt_rational(w2, bits)


def _frame(S) -> list[tuple[int, ...]]:
    """Integer spanning frame of a subspace; a raw list of vectors is taken as its own frame."""
    if isinstance(S, TruncatedA):
        return list(S.subspace.span)
    if isinstance(S, RationalSubspace):
        return list(S.span)
    vecs = [integral_vector(v) for v in S]
    if not vecs or integer_rank(vecs) != len(vecs):
        raise ValueError("frame must be a nonempty list of independent vectors")
    return vecs


def _gram(U, V) -> list[list[int]]:
    return [[dot(u, v) for v in V] for u in U]


def _solve_fraction(G: list[list[int]], rhs: list[list[int]]) -> list[list[Fraction]]:
    """Solve ``G Z = rhs`` exactly (G square nonsingular, rhs given as columns)."""
    k = len(G)
    m = [[Fraction(x) for x in row] + [Fraction(c[i]) for c in rhs] for i, row in enumerate(G)]
    for c in range(k):
        p = next(r for r in range(c, k) if m[r][c] != 0)
        m[c], m[p] = m[p], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(k):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return [[m[i][k + j] for i in range(k)] for j in range(len(rhs))]


@dataclass(frozen=True)
class Pencil:
    """Integer pencil ``(P, Q)`` whose eigenvalues are the squared sines, plus cosine data."""

    P: tuple[tuple[int, ...], ...]
    Q: tuple[tuple[int, ...], ...]
    G_small: tuple[tuple[int, ...], ...]
    G_big: tuple[tuple[int, ...], ...]
    K: tuple[tuple[int, ...], ...]
    rank: int

    @property
    def t(self) -> int:
        return len(self.P)


def pencil(A: Subspace, B: Subspace) -> Pencil:
    X, Y = _frame(A), _frame(B)
    if len(X[0]) != len(Y[0]):
        raise ValueError(f"ambient mismatch: {len(X[0])} vs {len(Y[0])}")
    if len(X) > len(Y):
        X, Y = Y, X
    GX, GY, K = _gram(X, X), _gram(Y, Y), _gram(X, Y)
    # Z = G_Y^{-1} K^T, columns indexed by the small frame
    Z = _solve_fraction(GY, [list(row) for row in K])
    S = [[GX[a][b] - sum(K[a][c] * Z[b][c] for c in range(len(Y))) for b in range(len(X))] for a in range(len(X))]
    den = math.lcm(*(x.denominator for row in S for x in row))
    P = tuple(tuple(int(x * den) for x in row) for row in S)
    Q = tuple(tuple(x * den for x in row) for row in GX)
    as_t = lambda M: tuple(tuple(r) for r in M)  # noqa: E731
    return Pencil(P, Q, as_t(GX), as_t(GY), as_t(K), integer_rank(P))


def psi_line_exact(x: Sequence, B: Subspace) -> Fraction:
    """Exact squared sine between the line through ``x`` and ``B``."""
    pen = pencil([x], B)
    return Fraction(pen.P[0][0], pen.Q[0][0])


# --------------------------------------------------------------------------
# certified numeric route


def _auto_bits(pen: Pencil) -> int:
    L = max(abs(x).bit_length() for M in (pen.P, pen.Q) for row in M for x in row)
    return 128 + (pen.t + 1) * L


def _profile_at(pen: Pencil, prec: int) -> list:
    t = pen.t
    zeros = t - pen.rank
    with mpmath.workprec(prec):
        mp = mpmath.mp
        if t == 1:
            lam = [mpmath.mpf(pen.P[0][0]) / pen.Q[0][0]]
        else:
            L = mp.cholesky(mp.matrix([list(r) for r in pen.Q]))
            Li = mp.inverse(L)
            C = Li * mp.matrix([list(r) for r in pen.P]) * Li.T
            C = (C + C.T) / 2
            lam = sorted(mp.eigsy(C, eigvals_only=True))
        top = max(abs(v) for v in lam) if lam else mpmath.mpf(0)
        resolvable = top * mpmath.ldexp(1, -prec + 32)
        sines = []
        for j, v in enumerate(lam):
            if j < zeros:
                sines.append(mpmath.mpf(0))
                continue
            if v <= resolvable:
                raise PrecisionError(
                    f"{prec} bits cannot resolve a nonzero squared sine next to {mpmath.nstr(top, 5)}"
                )
            sines.append(mpmath.sqrt(min(v, mpmath.mpf(1))))
        # cosine route for well-separated angles
        if zeros < t:
            LX = mp.cholesky(mp.matrix([list(r) for r in pen.G_small]))
            LY = mp.cholesky(mp.matrix([list(r) for r in pen.G_big]))
            W = mp.inverse(LX) * mp.matrix([list(r) for r in pen.K]) * mp.inverse(LY).T
            cos = sorted((abs(c) for c in mp.svd_r(W, compute_uv=False)), reverse=True)[:t]
            cutoff = 1 - mpmath.ldexp(1, -(prec // 4))
            for j, c in enumerate(cos):
                if j >= zeros and c <= cutoff:
                    sines[j] = mpmath.sqrt((1 - c) * (1 + c))
        return sines


def psi_profile(A: Subspace, B: Subspace, bits: int | None = None) -> AngleReport:
    """Certified sines of the principal angles between A and B, nondecreasing."""
    pen = pencil(A, B)
    extra = Fraction(0)
    if isinstance(A, TruncatedA):
        extra += A.error_bound
    if isinstance(B, TruncatedA):
        extra += B.error_bound
    if bits is None:
        bits = _auto_bits(pen)
        for S in (A, B):
            if isinstance(S, TruncatedA):
                bits = max(bits, precision_bits(S.params.alpha, S.params.theta, S.M))
    values, err = certified(lambda p: _profile_at(pen, p), bits)
    # keep the result monotone after mixing the two routes
    for j in range(1, len(values)):
        if values[j] < values[j - 1]:
            values[j] = values[j - 1]
    with mpmath.workprec(max(bits, 64)):
        total = err + BigFloat.from_rational(extra, bits, "up").value if extra else err
        err_bf = BigFloat(mpmath.mpf(total), bits, "up")
    return AngleReport(pen.t, tuple(BigFloat(v, bits) for v in values), err_bf, bits)


# --------------------------------------------------------------------------
# exact oracle: characteristic polynomial + Sturm isolation

Poly = list  # coefficients low -> high, Fractions


def _trim(p: Poly) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _peval(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _pderiv(p: Poly) -> Poly:
    return _trim([i * c for i, c in enumerate(p)][1:])


def _pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    while len(r) >= len(b) and r:
        f = r[-1] / b[-1]
        s = len(r) - len(b)
        q[s] = f
        for i, c in enumerate(b):
            r[s + i] -= f * c
        r = _trim(r)
    return _trim(q), r


def _monic(p: Poly) -> Poly:
    p = _trim(p)
    return [c / p[-1] for c in p]


def _pgcd(a: Poly, b: Poly) -> Poly:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return _monic(a)


def _psub(a: Poly, b: Poly) -> Poly:
    m = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (m - len(a))
    b = list(b) + [Fraction(0)] * (m - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def squarefree_factors(f: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``f = lead * prod g_i^i`` with each g_i squarefree and coprime."""
    f = _monic(f)
    out = []
    df = _pderiv(f)
    a = _pgcd(f, df)
    b = _pdivmod(f, a)[0]
    c = _pdivmod(df, a)[0]
    d = _psub(c, _pderiv(b))
    i = 1
    while len(b) > 1:
        a = _pgcd(b, d) if d else _monic(b)
        if len(a) > 1:
            out.append((a, i))
        b = _pdivmod(b, a)[0]
        c = _pdivmod(d, a)[0] if d else []
        d = _psub(c, _pderiv(b))
        i += 1
    return out


def _sturm(p: Poly) -> list[Poly]:
    seq = [_trim(p), _pderiv(p)]
    while seq[-1]:
        r = _pdivmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _variations(seq: list[Poly], x: Fraction) -> int:
    signs = [s for s in (_peval(p, x) for p in seq) if s != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if (u < 0) != (v < 0))


def _isolate(g: Poly, lo: Fraction, hi: Fraction, rel_bits: int) -> list[Fraction]:
    """Roots of squarefree g in (lo, hi], each refined to relative width 2**-rel_bits."""
    seq = _sturm(g)
    stack, boxes = [(lo, hi)], []
    while stack:
        a, b = stack.pop()
        k = _variations(seq, a) - _variations(seq, b)
        if k == 0:
            continue
        if k == 1:
            boxes.append((a, b))
            continue
        stack.extend(_halves(a, b))
    roots = []
    for a, b in boxes:
        if _peval(g, b) == 0:
            roots.append(b)
            continue
        sa = _peval(g, a) > 0
        tol = Fraction(1, 2**rel_bits)
        while b - a > a * tol:
            m = _split(a, b)
            v = _peval(g, m)
            if v == 0:
                a = b = m
            elif (v > 0) == sa:
                a = m
            else:
                b = m
        roots.append((a + b) / 2)
    return sorted(roots)


def _split(a: Fraction, b: Fraction) -> Fraction:
    # geometric split when the bracket spans more than a factor of 4
    if a > 0 and b > 4 * a:
        e = (b.numerator * a.denominator).bit_length() - (b.denominator * a.numerator).bit_length()
        return a * Fraction(2) ** max(e // 2, 1)
    return (a + b) / 2


def _halves(a: Fraction, b: Fraction):
    m = _split(a, b)
    return [(a, m), (m, b)]


def char_poly_pencil(P, Q) -> Poly:
    """Coefficients of ``det(P - lambda Q)`` by exact interpolation at 0..t."""
    t = len(P)
    xs = list(range(t + 1))
    ys = [bareiss_det([[P[i][j] - x * Q[i][j] for j in range(t)] for i in range(t)]) for x in xs]
    coeffs = [Fraction(0)] * (t + 1)
    for i, xi in enumerate(xs):
        basis = [Fraction(1)]
        denom = 1
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k in range(t + 1):
            coeffs[k] += ys[i] * basis[k] / denom
    return _trim(coeffs)


def psi_profile_exact_oracle(A: Subspace, B: Subspace, rel_bits: int = 160) -> list[Fraction]:
    """Squared sines from the exact characteristic polynomial of the pencil.

    Each value is a rational inside an isolating interval of relative width
    ``2**-rel_bits``; exact zeros and exact rational roots are returned exactly.
    """
    X, Y = _frame(A), _frame(B)
    t, n = min(len(X), len(Y)), len(X[0])
    if t > 3 or n > 6:
        raise ValueError("exact oracle is limited to t <= 3 and n <= 6")
    pen = pencil(A, B)
    f = char_poly_pencil(pen.P, pen.Q)
    roots: list[Fraction] = []
    for g, mult in squarefree_factors(f):
        while g[0] == 0:
            roots.extend([Fraction(0)] * mult)
            g = g[1:]
        if len(g) <= 1:
            continue
        g0 = abs(g[0])
        lb = g0 / (g0 + max(abs(c) for c in g[1:]))
        found = _isolate(g, lb / 2, Fraction(1), rel_bits)
        if len(found) != len(g) - 1:  # pragma: no cover - pencil roots are real in [0, 1]
            raise ArithmeticError("root isolation lost a root")
        for r in found:
            roots.extend([r] * mult)
    if len(roots) != t:  # pragma: no cover
        raise ArithmeticError("oracle root count mismatch")
    return sorted(roots)


# --------------------------------------------------------------------------
# brute-force grid oracle for psi_1

_COARSE = 72
_FINE = 41
_STARTS = 8


def _orthonormal(S: Subspace) -> np.ndarray:
    F = np.array([[float(x) for x in v] for v in _frame(S)]).T
    q, _ = np.linalg.qr(F)
    return q


def _sphere_points(angles: np.ndarray, dim: int) -> np.ndarray:
    """Map angle tuples (shape (m, dim-1)) to unit vectors in R^dim."""
    m = angles.shape[0]
    out = np.ones((m, dim))
    s = np.ones(m)
    for k in range(dim - 1):
        out[:, k] = s * np.cos(angles[:, k])
        s = s * np.sin(angles[:, k])
    out[:, dim - 1] = s
    return out


def psi_min_bruteforce(A: Subspace, B: Subspace, grid_depth: int = 5) -> BigFloat:
    """Upper bound on psi_1 by grid search of omega over the two unit spheres.

    A coarse grid is followed by ``grid_depth`` zoom levels, each shrinking
    the search box tenfold around the current best points.
    """
    QA, QB = _orthonormal(A), _orthonormal(B)
    a, b = QA.shape[1], QB.shape[1]
    if a + b > 4:
        raise ValueError("brute force limited to dim A + dim B <= 4")
    ka, kb = a - 1, b - 1
    k = ka + kb

    def evaluate(ang: np.ndarray) -> np.ndarray:
        xa = _sphere_points(ang[:, :ka], a) @ QA.T
        xb = _sphere_points(ang[:, ka:], b) @ QB.T
        return _kernels.omega_rows(np.ascontiguousarray(xa), np.ascontiguousarray(xb))

    if k == 0:
        best = float(evaluate(np.zeros((1, 0)))[0])
        return BigFloat(mpmath.mpf(best), 53)
    axes = [np.linspace(0.0, math.pi, _COARSE, endpoint=False)] * k
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
    vals = evaluate(grid)
    order = np.argsort(vals, kind="stable")[:_STARTS]
    starts = [(grid[i], float(vals[i])) for i in order]
    step = math.pi / _COARSE
    offsets = np.linspace(-1.0, 1.0, _FINE)
    for _ in range(grid_depth):
        nxt = []
        local = np.stack(np.meshgrid(*([offsets] * k), indexing="ij"), axis=-1).reshape(-1, k)
        for centre, _v in starts:
            pts = centre + step * local
            v = evaluate(pts)
            i = int(np.argmin(v))
            nxt.append((pts[i], float(v[i])))
        starts = sorted(nxt, key=lambda s: s[1])
        step /= 10
    return BigFloat(mpmath.mpf(starts[0][1]), 53)


# --------------------------------------------------------------------------
# truncation of A


def truncation_error_bound(params: ConstructionParams, M: int, target_N: int) -> BigFloat:
    """Outward-rounded bound on how much truncating A at order M moves any sine.

    Raises when the bound is not at least 32 bits below the smallest angle
    measured at level ``target_N`` (scale ``theta^-alpha^(target_N+q+1)``).
    """
    if target_N < 0:
        raise ValueError("target_N must be nonnegative")
    if M < target_N + params.q + 1:
        raise InfeasiblePrecision(f"M={M} is below target_N + q + 1 = {target_N + params.q + 1}")
    bound = tail_angle_bound(params, M)
    scale = Fraction(1, params.theta ** (floor_pow(params.alpha, target_N + params.q + 1) + 1))
    if bound * 2**32 >= scale:
        raise InfeasiblePrecision(
            f"truncation bound {format_rational(bound)} not below the measured scale at N={target_N}"
        )
    bits = max(64, 2 * bound.denominator.bit_length())
    return BigFloat.from_rational(bound, bits, "up")
