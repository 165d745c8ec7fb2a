"""The explicit subspace A and its rational approximations.

Notation follows the usual one for this construction: ``n = (q+1)d``, a prime
``theta >= 5``, a rational ``alpha >= C_d(d, q)``, digit sequences supported
on ``phi_j(k) = (k + (j-1)q) mod qd``, and the integer vectors ``X_N^j``.
Indices ``j`` are 1-based (``1..d``); rows ``i`` of the tail block are
0-based (``0..qd-1``) and live at coordinate ``d + i`` of an n-vector.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .lattice import RationalSubspace, Vector
from .numeric_core import as_fraction, floor_pow, format_rational, is_prime

DIGIT_RULES = ("all_twos", "seeded")


# --------------------------------------------------------------------------
# admissibility of alpha


@dataclass(frozen=True)
class AlphaCheck:
    label: str  # "1", "2", "3", "4[e=..]", "5[e=..]"
    value: Fraction  # left-hand side; must be <= 0
    passed: bool


@dataclass(frozen=True)
class AlphaReport:
    d: int
    q: int
    alpha: Fraction
    checks: tuple[AlphaCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[str]:
        return [c.label for c in self.checks if not c.passed]


def euclid(e: int, d: int) -> tuple[int, int]:
    """``(q_e, r_e)`` with ``e = q_e*d + r_e``."""
    return divmod(e, d)


def validate_alpha(d: int, q: int, alpha) -> AlphaReport:
    """Evaluate the five admissibility inequalities exactly."""
    if d < 1 or q < 1:
        raise ValueError("d and q must be positive")
    a = as_fraction(alpha)
    if a <= 1:
        raise ValueError("alpha must exceed 1")
    checks = [
        AlphaCheck("1", -a * a + a * (2 * d + 2) - d, False),
        AlphaCheck("2", -a / 2 + d * (d - 1) + 1, False),
        AlphaCheck("3", -a * a + (1 + 2 * d) * a - d, False),
    ]
    for e in range(d, q * d + 1):
        qe, re = euclid(e, d)
        checks.append(AlphaCheck(f"4[e={e}]", d * re - (d - re) * a, False))
        lhs = a**qe / (d - re + Fraction(1, 2)) - a ** (qe + 1) / (re + (d - re) * a) + 1
        checks.append(AlphaCheck(f"5[e={e}]", lhs, False))
    checks = tuple(AlphaCheck(c.label, c.value, c.value <= 0) for c in checks)
    return AlphaReport(d, q, a, checks)


def compute_Cd(d: int, q: int, tol) -> Fraction:
    """Rational upper bound within ``tol`` of the admissibility threshold.

    Exact bisection on ``validate_alpha`` over ``[2, 3d(d+4)]``; the returned
    value passes.
    """
    tol = as_fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = Fraction(2), Fraction(3 * d * (d + 4))
    if not validate_alpha(d, q, hi).passed:  # pragma: no cover - known upper bound
        raise ArithmeticError("3d(d+4) is not admissible")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if validate_alpha(d, q, mid).passed:
            hi = mid
        else:
            lo = mid
    return hi


# --------------------------------------------------------------------------
# parameters and digits


@dataclass(frozen=True)
class ConstructionParams:
    d: int
    q: int
    theta: int
    alpha: Fraction
    M: int
    digit_rule: str = "all_twos"
    seed: int | None = None
    # test hook: ((j, k), value) pairs replacing the digit at the support of (j, k)
    digit_overrides: tuple[tuple[tuple[int, int], int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        if self.d < 1 or self.q < 1:
            raise ValueError("d and q must be positive integers")
        if self.theta < 5 or not is_prime(self.theta):
            raise ValueError(f"theta must be a prime >= 5, got {self.theta}")
        if self.M < 1:
            raise ValueError("truncation order M must be >= 1")
        if self.digit_rule not in DIGIT_RULES:
            raise ValueError(f"digit_rule must be one of {DIGIT_RULES}")
        if self.digit_rule == "seeded" and self.seed is None:
            raise ValueError("seeded digit rule needs a seed")
        report = validate_alpha(self.d, self.q, self.alpha)
        if not report.passed:
            raise ValueError(
                f"alpha={format_rational(self.alpha)} is not admissible for d={self.d}, q={self.q}: "
                f"fails {', '.join(report.failing())}"
            )

    @property
    def n(self) -> int:
        return (self.q + 1) * self.d

    def with_(self, **changes) -> "ConstructionParams":
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return ConstructionParams(**data)

    def to_dict(self) -> dict:
        out = {
            "d": self.d,
            "q": self.q,
            "theta": self.theta,
            "alpha": format_rational(self.alpha),
            "digit_rule": self.digit_rule,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        out["M"] = self.M
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, obj: dict) -> "ConstructionParams":
        known = {"d", "q", "theta", "alpha", "digit_rule", "seed", "M"}
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown params keys: {sorted(extra)}")
        return cls(
            d=int(obj["d"]),
            q=int(obj["q"]),
            theta=int(obj["theta"]),
            alpha=as_fraction(str(obj["alpha"])),
            M=int(obj["M"]),
            digit_rule=obj.get("digit_rule", "all_twos"),
            seed=obj.get("seed"),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ConstructionParams":
        return cls.from_dict(json.loads(Path(path).read_text()))


def phi(j: int, k: int, params: ConstructionParams) -> int:
    """Row index carrying the k-th digit of column j."""
    return (k + (j - 1) * params.q) % (params.q * params.d)


class DigitTable:
    """Accessor ``u(i, j, k)`` for the digit sequences of a parameter set."""

    def __init__(self, params: ConstructionParams):
        self.params = params
        self._overrides = dict(params.digit_overrides)

    def nonzero(self, j: int, k: int) -> int:
        """The digit at the support position of (j, k)."""
        if (j, k) in self._overrides:
            return self._overrides[(j, k)]
        if self.params.digit_rule == "all_twos":
            return 2
        return 2 + random.Random(f"{self.params.seed}/{j}/{k}").getrandbits(1)

    def u(self, i: int, j: int, k: int) -> int:
        p = self.params
        if not (0 <= i < p.q * p.d and 1 <= j <= p.d and k >= 0):
            raise ValueError("digit index out of range")
        return self.nonzero(j, k) if phi(j, k, p) == i else 0


def digit_support(i: int, N: int, params: ConstructionParams) -> tuple[int, int]:
    """The unique ``(k, j)`` with ``k in [0, q-1]`` and ``u(i, j, N+k) != 0``."""
    q, d = params.q, params.d
    if not 0 <= i < q * d:
        raise ValueError("row index out of range")
    u, v = divmod(i, q)
    u2, v2 = divmod(N, q)
    if v >= v2:
        return v - v2, (u - u2) % d + 1
    return v - v2 + q, (u - u2 - 1) % d + 1


def sigma_trunc(i: int, j: int, N: int, params: ConstructionParams) -> Fraction:
    """Exact truncated digit series of row ``i``, column ``j``, through index ``N``."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    table = DigitTable(params)
    s = Fraction(0)
    for k in range(N + 1):
        if phi(j, k, params) == i:
            s += Fraction(table.nonzero(j, k), params.theta ** floor_pow(params.alpha, k))
    return s


# --------------------------------------------------------------------------
# vectors


@lru_cache(maxsize=4096)
def X_vec(N: int, j: int, params: ConstructionParams) -> Vector:
    """Integer vector ``theta^floor(alpha^N) * (e_j, sigma_{., j, N})``."""
    _check_j(j, params)
    if N < 0:
        raise ValueError("N must be nonnegative")
    d, theta = params.d, params.theta
    table = DigitTable(params)
    top = floor_pow(params.alpha, N)
    out = [0] * params.n
    out[j - 1] = theta**top
    for k in range(N + 1):
        out[d + phi(j, k, params)] += table.nonzero(j, k) * theta ** (top - floor_pow(params.alpha, k))
    return tuple(out)


def U_vec(N: int, j: int, params: ConstructionParams) -> Vector:
    """The correction term in ``X_N = theta^(...) X_{N-1} + U_N``: one digit at row ``d + phi_j(N)``."""
    _check_j(j, params)
    out = [0] * params.n
    out[params.d + phi(j, N, params)] = DigitTable(params).nonzero(j, N)
    return tuple(out)


def V_vec(N: int, j: int, params: ConstructionParams) -> Vector:
    """Unit coordinate vector in the direction of ``U_N^j``."""
    _check_j(j, params)
    out = [0] * params.n
    out[params.d + phi(j, N, params)] = 1
    return tuple(out)


def Z_vec(N: int, j: int, params: ConstructionParams) -> tuple[Fraction, ...]:
    scale = params.theta ** floor_pow(params.alpha, N)
    return tuple(Fraction(x, scale) for x in X_vec(N, j, params))


def _check_j(j: int, params: ConstructionParams) -> None:
    if not 1 <= j <= params.d:
        raise ValueError(f"column index j={j} outside [1, {params.d}]")


# --------------------------------------------------------------------------
# subspace families


def B_generators(N: int, v: int, params: ConstructionParams) -> list[Vector]:
    """``X_N^j, ..., X_{N+v-1}^j`` for each j, grouped by j."""
    # v = q+1 is allowed: it is the upper end of the inclusion chain for C
    if not 1 <= v <= params.q + 1:
        raise ValueError(f"v={v} outside [1, {params.q + 1}]")
    return [X_vec(N + k, j, params) for j in range(1, params.d + 1) for k in range(v)]


def B_claimed_basis(N: int, v: int, params: ConstructionParams) -> list[Vector]:
    """Claimed Z-basis: ``X_N^j`` together with ``V_k^j`` for ``k in [N+1, N+v-1]``."""
    if not 1 <= v <= params.q:
        raise ValueError(f"v={v} outside [1, {params.q}]")
    out: list[Vector] = []
    for j in range(1, params.d + 1):
        out.append(X_vec(N, j, params))
        out.extend(V_vec(N + k, j, params) for k in range(1, v))
    return out


def B_subspace(N: int, v: int, params: ConstructionParams) -> RationalSubspace:
    return RationalSubspace.from_span(B_generators(N, v, params))


def _check_e_C(e: int, params: ConstructionParams) -> tuple[int, int]:
    if not params.d <= e <= params.q * params.d:
        raise ValueError(f"e={e} outside [{params.d}, {params.q * params.d}]")
    return euclid(e, params.d)


def C_generators(N: int, e: int, params: ConstructionParams) -> list[Vector]:
    """``B_{N+1, q_e}`` generators followed by ``X_N^1..X_N^{r_e}``."""
    qe, re = _check_e_C(e, params)
    return B_generators(N + 1, qe, params) + [X_vec(N, j, params) for j in range(1, re + 1)]


def C_claimed_basis(N: int, e: int, params: ConstructionParams) -> list[Vector]:
    """Z-basis claimed from rewriting the generators with the X/U recurrence."""
    qe, re = _check_e_C(e, params)
    out: list[Vector] = []
    for j in range(1, re + 1):
        out.append(X_vec(N, j, params))
        out.extend(V_vec(N + k, j, params) for k in range(1, qe + 1))
    for j in range(re + 1, params.d + 1):
        out.append(X_vec(N + 1, j, params))
        out.extend(V_vec(N + k, j, params) for k in range(2, qe + 1))
    return out


def C_subspace(N: int, e: int, params: ConstructionParams) -> RationalSubspace:
    return RationalSubspace.from_span(C_generators(N, e, params))


def D_generators(N: int, e: int, params: ConstructionParams) -> list[Vector]:
    if not 1 <= e <= params.d:
        raise ValueError(f"e={e} outside [1, {params.d}]")
    return [X_vec(N, j, params) for j in range(1, e + 1)]


D_claimed_basis = D_generators


def D_subspace(N: int, e: int, params: ConstructionParams) -> RationalSubspace:
    return RationalSubspace.from_span(D_generators(N, e, params))


def family_subspace(family: str, N: int, e: int, params: ConstructionParams) -> RationalSubspace:
    if family == "C":
        return C_subspace(N, e, params)
    if family == "D":
        return D_subspace(N, e, params)
    raise ValueError(f"unknown family {family!r}")


# --------------------------------------------------------------------------
# truncated model of A


def tail_angle_bound(params: ConstructionParams, M: int) -> Fraction:
    """Rigorous bound on how far any sine profile can move when A is replaced by its order-M truncation.

    Each tail ``Y_j - Z_M^j`` has norm at most ``3 * sum_{k>M} theta^-floor(alpha^k)``,
    which is below ``3 * theta/(theta-1) * theta^-floor(alpha^(M+1))`` because the
    exponents are strictly increasing integers.  ``|Y_j| >= 1`` and summing
    over the d columns gives the projector-gap bound; sines are 1-Lipschitz in it.
    """
    theta = params.theta
    return Fraction(4 * params.d * theta, (theta - 1) * theta ** floor_pow(params.alpha, M + 1))


@dataclass(frozen=True)
class TruncatedA:
    """A replaced by the span of ``Z_M^1..Z_M^d`` (equivalently of ``X_M^j``)."""

    params: ConstructionParams
    M: int
    subspace: RationalSubspace
    error_bound: Fraction

    @property
    def basis(self) -> list[tuple[Fraction, ...]]:
        return [Z_vec(self.M, j, self.params) for j in range(1, self.params.d + 1)]

    @property
    def n(self) -> int:
        return self.subspace.n

    @property
    def dim(self) -> int:
        return self.subspace.dim


def A_truncated(params: ConstructionParams, M: int | None = None) -> TruncatedA:
    M = params.M if M is None else M
    if M < 1:
        raise ValueError("M must be >= 1")
    # span(X_M^1..X_M^d) is exactly D_{M,d}; integer generators keep the Gram data exact
    return TruncatedA(params, M, D_subspace(M, params.d, params), tail_angle_bound(params, M))
