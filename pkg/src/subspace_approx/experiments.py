"""Exponent measurements, construction checks and small enumeration oracles."""

from __future__ import annotations

import itertools
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import _kernels
from .angles import psi_line_exact, psi_profile, truncation_error_bound
from .construction import (
    B_claimed_basis,
    B_subspace,
    C_claimed_basis,
    C_subspace,
    ConstructionParams,
    D_claimed_basis,
    D_subspace,
    DigitTable,
    U_vec,
    X_vec,
    Z_vec,
    A_truncated,
    digit_support,
    euclid,
    family_subspace,
    sigma_trunc,
)
from .exterior import bareiss_det
from .lattice import RationalSubspace, hnf, ideal_norm
from .numeric_core import (
    BigFloat,
    InfeasiblePrecision,
    as_fraction,
    floor_pow,
    format_rational,
    mpf_hex,
    required_precision,
)

REPORT_DIGITS = 12
CSV_COLUMNS = ("d", "q", "theta", "alpha", "e", "N", "height_sq", "psi_hex", "ratio", "target", "rel_gap", "family")
PSI_HEX_BITS = 128


class HeightTooSmall(ValueError):
    """The height is too small for the N-selection sandwich to produce N >= 0."""


# --------------------------------------------------------------------------
# target exponents


def theorem_mu(d: int, e: int, alpha, q: int | None = None) -> Fraction:
    """Exponent of the last angle for e-dimensional approximations."""
    a = as_fraction(alpha)
    if e < 1 or (q is not None and e > q * d):
        raise ValueError(f"e={e} out of range")
    if e < d:
        return a / e
    qe, re = euclid(e, d)
    return a ** (qe + 1) / (re + (d - re) * a)


def families_for(e: int, params: ConstructionParams) -> list[str]:
    """Families that realize the exponent for this e: D for e <= d, C for e >= d."""
    out = []
    if params.d <= e <= params.q * params.d:
        out.append("C")
    if 1 <= e <= params.d:
        out.append("D")
    return out


# --------------------------------------------------------------------------
# exponent rows


def _nstr(x) -> str:
    return mpmath.nstr(x, REPORT_DIGITS, min_fixed=-4, max_fixed=8)


@dataclass(frozen=True)
class ExponentRow:
    family: str
    e: int
    N: int
    height_sq: int
    psi: BigFloat
    psi_error: BigFloat
    ratio: mpmath.mpf
    log_height: mpmath.mpf
    neg_log_psi: mpmath.mpf

    def ratio_str(self) -> str:
        return _nstr(self.ratio)


@dataclass(frozen=True)
class ExponentEstimate:
    family: str
    e: int
    rows: tuple[ExponentRow, ...]
    target: Fraction
    last_ratio: mpmath.mpf
    lsq_slope: mpmath.mpf | None
    relative_gap: mpmath.mpf

    @property
    def correction(self) -> list:
        """``|ratio - target| * log H`` per row; stays bounded when the ratio converges like 1/log H."""
        with mpmath.workprec(128):
            tgt = _frac_mpf(self.target)
            return [abs(r.ratio - tgt) * r.log_height for r in self.rows]


def _measure_one(args) -> ExponentRow:
    params, family, e, N, bits = args
    A = A_truncated(params)
    S = family_subspace(family, N, e, params)
    report = psi_profile(A, S, bits)
    psi = report.last
    with mpmath.workprec(max(bits, 64)):
        if psi.value <= report.error_bound.value * 2**32:
            raise InfeasiblePrecision(f"truncation error not below the measured angle at N={N}, e={e}")
        log_h = mpmath.log(S.height_sq) / 2
        nlp = -mpmath.log(psi.value)
        ratio = nlp / log_h if log_h > 0 else mpmath.inf
    with mpmath.workprec(128):
        return ExponentRow(family, e, N, S.height_sq, psi, report.error_bound, +ratio, +log_h, +nlp)


def measure_family(
    params: ConstructionParams,
    family: str,
    e: int,
    N_range: Sequence[int],
    bits: int | None = None,
    threads: int = 1,
) -> list[ExponentRow]:
    """Height, last sine and exponent ratio of the family member at each N."""
    if family not in ("C", "D"):
        raise ValueError("family must be 'C' or 'D'")
    if family not in families_for(e, params):
        raise ValueError(f"family {family} is not defined for e={e}")
    Ns = sorted(set(N_range))
    if not Ns or Ns[0] < 0:
        raise ValueError("N_range must be a nonempty set of nonnegative integers")
    truncation_error_bound(params, params.M, Ns[-1])
    if bits is None:
        bits = required_precision(params, Ns[-1]).bits
    jobs = [(params, family, e, N, bits) for N in Ns]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            rows = list(pool.map(_measure_one, jobs))
    else:
        rows = [_measure_one(j) for j in jobs]
    return sorted(rows, key=lambda r: (r.e, r.N))


def estimate(params: ConstructionParams, family: str, e: int, rows: Sequence[ExponentRow]) -> ExponentEstimate:
    target = theorem_mu(params.d, e, params.alpha, params.q)
    with mpmath.workprec(128):
        tgt = mpmath.mpf(target.numerator) / target.denominator
        last = rows[-1].ratio
        slope = None
        if len(rows) >= 2:
            xs = [r.log_height for r in rows]
            ys = [r.neg_log_psi for r in rows]
            mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
            sxx = sum((x - mx) ** 2 for x in xs)
            slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx if sxx else None
        gap = abs(last - tgt) / tgt
    return ExponentEstimate(family, e, tuple(rows), target, last, slope, gap)


def estimate_to_dict(params: ConstructionParams, est: ExponentEstimate) -> dict:
    return {
        "family": est.family,
        "e": est.e,
        "target": format_rational(est.target),
        "last_ratio": _nstr(est.last_ratio),
        "lsq_slope": None if est.lsq_slope is None else _nstr(est.lsq_slope),
        "rel_gap": _nstr(est.relative_gap),
        "rows": [row_to_dict(params, r, est) for r in est.rows],
    }


def row_to_dict(params: ConstructionParams, r: ExponentRow, est: ExponentEstimate) -> dict:
    with mpmath.workprec(128):
        tgt = mpmath.mpf(est.target.numerator) / est.target.denominator
        gap = abs(r.ratio - tgt) / tgt
    return {
        "d": params.d,
        "q": params.q,
        "theta": params.theta,
        "alpha": format_rational(params.alpha),
        "e": r.e,
        "N": r.N,
        "height_sq": str(r.height_sq),
        "psi_hex": mpf_hex(r.psi.value, PSI_HEX_BITS),
        "ratio": _nstr(r.ratio),
        "target": format_rational(est.target),
        "rel_gap": _nstr(gap),
        "family": r.family,
    }


# --------------------------------------------------------------------------
# finite checks of the construction


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class LemmaReport:
    params: ConstructionParams
    N_range: tuple[int, ...]
    seed: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "N_range": list(self.N_range),
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _log_theta_power(theta: int, exponent: Fraction) -> mpmath.mpf:
    return mpmath.mpf(exponent.numerator) / exponent.denominator * mpmath.log(theta)


def _spread(values: list) -> mpmath.mpf:
    return max(values) / min(values)


def _random_W(params: ConstructionParams, N: int, r: int, rng: random.Random) -> RationalSubspace | None:
    """Random r-dimensional rational subspace of span(X_N^1..X_N^d), integer coefficients in [-3, 3]."""
    if r == 0:
        return None
    Xs = [X_vec(N, j, params) for j in range(1, params.d + 1)]
    while True:
        coeffs = [[rng.randint(-3, 3) for _ in Xs] for _ in range(r)]
        vecs = [tuple(sum(c * x[i] for c, x in zip(row, Xs)) for i in range(params.n)) for row in coeffs]
        try:
            return RationalSubspace.from_span(vecs)
        except ValueError:
            continue


def sum_space_ideal_norms(params: ConstructionParams, N: int, v: int, r: int, samples: int, seed: int):
    """Ideal norms of (claimed basis of B_{N+1,v}) + (Z-basis of a random W), plus the measured height constant."""
    rng = random.Random(f"{seed}/W/{N}/{v}/{r}")
    out = []
    for _ in range(samples if r > 0 else 1):
        W = _random_W(params, N, r, rng)
        basis = B_claimed_basis(N + 1, v, params) + (list(W.zbasis) if W else [])
        S = RationalSubspace.from_span(basis)
        out.append((ideal_norm(basis, S), S.height_sq))
    return out


def verify_lemmas(params: ConstructionParams, N_range: Sequence[int], seed: int = 0) -> LemmaReport:
    """Run every finite, checkable statement about the construction over ``N_range``."""
    Ns = tuple(sorted(set(N_range)))
    rep = LemmaReport(params, Ns, seed)
    d, q, theta, alpha = params.d, params.q, params.theta, params.alpha
    table = DigitTable(params)

    # digit support is unique and lands on a nonzero digit
    ok = True
    for N in range(0, 3 * q * d + 1):
        for i in range(q * d):
            hits = [(k, j) for k in range(q) for j in range(1, d + 1) if table.u(i, j, N + k) != 0]
            if hits != [digit_support(i, N, params)]:
                ok = False
    rep.add("digit_support", ok, f"i in [0,{q * d - 1}], N in [0,{3 * q * d}]")

    for N in Ns:
        for j in range(1, d + 1):
            lhs = X_vec(N + 1, j, params)
            step = theta ** (floor_pow(alpha, N + 1) - floor_pow(alpha, N))
            rhs = tuple(step * x + u for x, u in zip(X_vec(N, j, params), U_vec(N + 1, j, params)))
            rep.add(f"recurrence[N={N},j={j}]", lhs == rhs)

    with mpmath.workprec(256):
        for N in Ns:
            for v in range(1, q + 1):
                S = B_subspace(N, v, params)
                same = hnf(B_claimed_basis(N, v, params)) == S.zbasis
                rep.add(f"zbasis_B[N={N},v={v}]", same and S.dim == d * v, f"dim={S.dim}")
            for e in range(1, d + 1):
                S = D_subspace(N, e, params)
                rep.add(f"zbasis_D[N={N},e={e}]", hnf(D_claimed_basis(N, e, params)) == S.zbasis, f"dim={S.dim}")

        for e in range(d, q * d + 1):
            qe, re = euclid(e, d)
            consts = []
            lower_ok = True
            for N in Ns:
                C = C_subspace(N, e, params)
                same = hnf(C_claimed_basis(N, e, params)) == C.zbasis
                rep.add(f"zbasis_C[N={N},e={e}]", same and C.dim == e, f"dim={C.dim}")
                inner = C.contains(B_subspace(N + 1, qe, params))
                outer = B_subspace(N, qe + 1, params).contains(C)
                rep.add(f"inclusion_C[N={N},e={e}]", inner and outer, "B_{N+1,q_e} <= C_{N,e} <= B_{N,q_e+1}")
                floor_exp = re * floor_pow(alpha, N) + (d - re) * floor_pow(alpha, N + 1)
                lower_ok &= theta ** (2 * floor_exp) <= C.height_sq
                real_exp = re * alpha**N + (d - re) * alpha ** (N + 1)
                consts.append(mpmath.exp(mpmath.log(C.height_sq) / 2 - _log_theta_power(theta, real_exp)))
            rep.add(f"height_C_floor[e={e}]", lower_ok, "theta^(r floor(a^N) + (d-r) floor(a^(N+1))) <= H")
            spread = _spread(consts)
            window = min(consts) >= mpmath.mpf(theta) ** (-d) and spread <= 4
            rep.add(f"height_C_window[e={e}]", window, f"K={[_nstr(c) for c in consts]} spread={_nstr(spread)}")

        for e in range(1, d + 1):
            consts = []
            lower_ok = True
            for N in Ns:
                D = D_subspace(N, e, params)
                lower_ok &= theta ** (2 * e * floor_pow(alpha, N)) <= D.height_sq
                consts.append(mpmath.exp(mpmath.log(D.height_sq) / 2 - _log_theta_power(theta, e * alpha**N)))
            rep.add(f"height_D_floor[e={e}]", lower_ok, "theta^(e floor(a^N)) <= H")
            spread = _spread(consts)
            window = min(consts) >= mpmath.mpf(theta) ** (-e) and spread <= 4
            rep.add(f"height_D_window[e={e}]", window, f"K={[_nstr(c) for c in consts]} spread={_nstr(spread)}")

        # omega(Y_j, Z_N^j) * theta^(alpha^(N+1)), with Y_j replaced by its order-M truncation
        M = params.M
        for j in range(1, d + 1):
            consts = []
            for N in Ns:
                if N + 1 >= M:
                    continue
                Y = Z_vec(M, j, params)
                w2 = psi_line_exact(X_vec(N, j, params), [Y])
                logw = mpmath.log(w2.numerator) / 2 - mpmath.log(w2.denominator) / 2
                consts.append(mpmath.exp(logw + _log_theta_power(theta, alpha ** (N + 1))))
            if consts:
                spread = _spread(consts)
                rep.add(f"omega_Y_Z[j={j}]", spread <= 100, f"c3={[_nstr(c) for c in consts]} spread={_nstr(spread)}")

        # psi_1(span Y_1, C_{N,e}) * theta^(alpha^(N+q_e+1))
        for e in range(d, q * d + 1):
            qe, _ = euclid(e, d)
            consts = []
            for N in Ns:
                if N + qe + 1 > M:
                    continue
                s2 = psi_line_exact(X_vec(M, 1, params), C_subspace(N, e, params))
                logs = mpmath.log(s2.numerator) / 2 - mpmath.log(s2.denominator) / 2
                consts.append(mpmath.exp(logs + _log_theta_power(theta, alpha ** (N + qe + 1))))
            if consts:
                spread = _spread(consts)
                rep.add(f"psi1_Y1_C[e={e}]", spread <= 100, f"c={[_nstr(c) for c in consts]} spread={_nstr(spread)}")

        # ideal norm of B_{N+1,v} + W stays below 6^(2d)
        bound = 6 ** (2 * d)
        for N in Ns:
            for v in range(1, q):
                for r in range(0, d):
                    res = sum_space_ideal_norms(params, N, v, r, 10, seed)
                    worst = max(x for x, _ in res)
                    rep.add(f"ideal_norm_sum[N={N},v={v},r={r}]", worst <= bound, f"max N(I)={worst} <= {bound}")
    return rep


# --------------------------------------------------------------------------
# N selection


def _log_height(H) -> mpmath.mpf:
    if isinstance(H, BigFloat):
        return mpmath.log(H.value)
    if isinstance(H, int):
        return mpmath.log(H) / 2  # exact squared height
    raise TypeError("H must be a BigFloat height or an exact squared height (int)")


def _floor_log(x: mpmath.mpf, base: mpmath.mpf, prec: int) -> int:
    """floor(log_base x), with values within 2^-(prec/2) of an integer snapped to it."""
    y = mpmath.log(x) / mpmath.log(base)
    k = int(mpmath.nint(y))
    if abs(y - k) < mpmath.ldexp(1, -(prec // 2)):
        return k
    return int(mpmath.floor(y))


def select_N_large_e(H, eps, params: ConstructionParams, e: int, prec: int = 256) -> int:
    """Unique N with theta^(a^(N+q_e)) <= H^(mu + eps/2 - 1) < theta^(a^(N+q_e+1))."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    qe, _ = euclid(e, params.d)
    expo = theorem_mu(params.d, e, params.alpha, params.q) + eps / 2 - 1
    assert expo > 0, "exponent must be positive for admissible alpha"
    with mpmath.workprec(prec):
        lh = _log_height(H)
        if lh <= 0:
            raise HeightTooSmall("H must exceed 1")
        L = lh * _frac_mpf(expo) / mpmath.log(params.theta)
        if L <= 0:
            raise HeightTooSmall("H too small")
        N = _floor_log(L, _frac_mpf(params.alpha), prec) - qe
    if N < 0:
        raise HeightTooSmall(f"H too small: selection gives N={N}")
    return N


def select_N_small_e(H, eps, params: ConstructionParams, e: int, prec: int = 256) -> int:
    """Unique N with theta^(d a^N) <= H^((a-1)/e + eps/2) < theta^(d a^(N+1))."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not 1 <= e <= params.d:
        raise ValueError("e must lie in [1, d]")
    expo = (params.alpha - 1) / e + eps / 2
    with mpmath.workprec(prec):
        lh = _log_height(H)
        if lh <= 0:
            raise HeightTooSmall("H must exceed 1")
        L = lh * _frac_mpf(expo) / (params.d * mpmath.log(params.theta))
        N = _floor_log(L, _frac_mpf(params.alpha), prec)
    if N < 0:
        raise HeightTooSmall(f"H too small: selection gives N={N}")
    return N


def _frac_mpf(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


# --------------------------------------------------------------------------
# shortest vectors


@dataclass(frozen=True)
class ShortVector:
    vector: tuple  # ambient coordinates
    coords: tuple[int, ...]  # coefficients in the lattice basis
    norm_sq: Fraction | int


def _lattice_basis(S) -> list[tuple]:
    if isinstance(S, RationalSubspace):
        return list(S.zbasis)
    return [tuple(_demote(as_fraction(x)) for x in v) for v in S]


def shortest_vector_enum(S, radius_sq=None, max_points: int = 10**7) -> ShortVector | None:
    """Exact shortest nonzero vector of a lattice of rank <= 4 by box enumeration.

    ``S`` is a RationalSubspace (its saturated lattice) or a list of rational
    basis vectors.  Returns None when no nonzero vector has squared length
    ``<= radius_sq``; the default radius is the shortest basis vector.
    """
    basis = _lattice_basis(S)
    r = len(basis)
    if not 1 <= r <= 4:
        raise ValueError("lattice rank must be in [1, 4]")
    Gf = [[sum(as_fraction(a) * b for a, b in zip(u, v)) for v in basis] for u in basis]
    den = math.lcm(*(x.denominator for row in Gf for x in row))
    G = [[int(x * den) for x in row] for row in Gf]
    R2 = min(G[i][i] for i in range(r)) if radius_sq is None else as_fraction(radius_sq) * den
    Ginv = _inverse_fraction(G)
    bounds = [math.isqrt(int(R2 * Ginv[i][i]) + 1) for i in range(r)]
    volume = math.prod(2 * b + 1 for b in bounds)
    if volume > max_points:
        raise ValueError(f"enumeration box has {volume} points, above {max_points}")
    # int64 guard: |x^T G x| <= (sum b_i sqrt(G_ii))^2
    worst = sum(b * math.isqrt(G[i][i] + 1) + b for i, b in enumerate(bounds)) ** 2
    if worst < 2**62:
        best, hits = _kernels.box_min(np.array(G, dtype=np.int64), np.array(bounds, dtype=np.int64))
        cands = [tuple(int(x) for x in h) for h in hits] if best > 0 else []
    else:
        cands, best = _box_min_exact(G, bounds)
    if not cands or best > R2:
        return None
    # deterministic representative: lexicographically largest of each +/- pair
    x = max(cands)
    vec = tuple(sum(c * b[i] for c, b in zip(x, basis)) for i in range(len(basis[0])))
    return ShortVector(vec, x, _demote(Fraction(best, den)))


def _demote(x: Fraction):
    return x.numerator if x.denominator == 1 else x


def _inverse_fraction(G: list[list[int]]) -> list[list[Fraction]]:
    k = len(G)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(k)] for i, row in enumerate(G)]
    for c in range(k):
        p = next(r for r in range(c, k) if m[r][c] != 0)
        m[c], m[p] = m[p], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(k):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return [row[k:] for row in m]


def _box_min_exact(G, bounds):
    best, hits = None, []
    for x in itertools.product(*(range(-b, b + 1) for b in bounds)):
        v = sum(x[i] * G[i][j] * x[j] for i in range(len(x)) for j in range(len(x)))
        if v <= 0:
            continue
        if best is None or v < best:
            best, hits = v, [x]
        elif v == best:
            hits.append(x)
    return hits, best if best is not None else -1


def minkowski_bound_sq(S) -> mpmath.mpf:
    """Square of Minkowski's bound ``2 (det / vol B_r)^(1/r)`` on the shortest vector."""
    basis = _lattice_basis(S)
    r = len(basis)
    Gf = [[sum(as_fraction(a) * b for a, b in zip(u, v)) for v in basis] for u in basis]
    den = math.lcm(*(x.denominator for row in Gf for x in row))
    det_G = Fraction(bareiss_det([[int(x * den) for x in row] for row in Gf]), den**r)
    with mpmath.workprec(128):
        vol = mpmath.pi ** (mpmath.mpf(r) / 2) / mpmath.gamma(mpmath.mpf(r) / 2 + 1)
        covol = mpmath.sqrt(mpmath.mpf(det_G.numerator) / det_G.denominator)
        return 4 * (covol / vol) ** (mpmath.mpf(2) / r)


# --------------------------------------------------------------------------
# n = 2 best approximations


@dataclass(frozen=True)
class BestApproxTable:
    sigma_hat: Fraction
    Q_max: int
    records: tuple[tuple[int, int, Fraction], ...]  # (b, a, |sigma_hat - a/b|)
    errors: tuple[Fraction, ...]  # index b-1

    def error(self, b: int) -> Fraction:
        return self.errors[b - 1]

    def beats(self, exponent) -> list[int]:
        """Denominators b >= 2 with error < b^-exponent (exact for rational exponents via powers)."""
        x = as_fraction(exponent)
        out = []
        for b in range(2, self.Q_max + 1):
            err = self.errors[b - 1]
            # err < b^(-p/s)  <=>  err^s * b^p < 1
            if err == 0 or err**x.denominator * Fraction(b) ** x.numerator < 1:
                out.append(b)
        return out


def sigma_hat_n2(params: ConstructionParams, Q_max: int) -> tuple[Fraction, Fraction]:
    """Truncation of sigma_{0,1} accurate enough for enumeration up to Q_max, with its tail bound."""
    if params.d != 1 or params.q != 1:
        raise ValueError("n = 2 needs d = q = 1")
    need = Fraction(1, Q_max) ** (math.ceil(params.alpha) + 2)
    N = 0
    while True:
        tail = Fraction(3 * params.theta, (params.theta - 1) * params.theta ** floor_pow(params.alpha, N + 1))
        if tail < need:
            return sigma_trunc(0, 1, N, params), tail
        N += 1


def best_approx_enum_n2(sigma_hat, Q_max: int, *, tail_bound=None, alpha=None) -> BestApproxTable:
    """For every b <= Q_max the best numerator a and the error |sigma_hat - a/b|; running records.

    When ``tail_bound`` and ``alpha`` are given, checks that sigma_hat is within
    ``Q_max^(-alpha-2)`` of the true value.
    """
    s = as_fraction(sigma_hat)
    if not 1 <= Q_max <= 10**5:
        raise ValueError("Q_max must lie in [1, 1e5]")
    if tail_bound is not None:
        a = as_fraction(alpha)
        need = Fraction(1, Q_max) ** (math.ceil(a) + 2)
        if as_fraction(tail_bound) >= need:
            raise ValueError("sigma_hat not precise enough for this Q_max")
    errors, records = [], []
    best = None
    for b in range(1, Q_max + 1):
        num = s.numerator * b
        a, rem = divmod(num, s.denominator)
        if 2 * rem > s.denominator:
            a += 1
        err = abs(s - Fraction(a, b))
        errors.append(err)
        if best is None or err < best:
            best = err
            records.append((b, a, err))
    return BestApproxTable(s, Q_max, tuple(records), tuple(errors))
