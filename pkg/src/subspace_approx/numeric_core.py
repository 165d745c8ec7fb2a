"""Exact integers/rationals and a precision-tagged multiprecision float layer.

Exact values are plain ``int`` and ``fractions.Fraction``.  Floating values
are :class:`BigFloat`, an mpmath ``mpf`` paired with the precision (in bits)
it was produced at.  Every multiprecision computation in the package goes
through :func:`certified`, which repeats the work at twice the precision and
refuses to return a result that moved by more than ``2**-32`` relatively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
from mpmath import libmp

MIN_BITS = 64
MAX_BITS = 2**31
AGREEMENT_BITS = 32


class PrecisionError(ArithmeticError):
    """A certified computation did not agree with its double-precision rerun."""


class InfeasiblePrecision(ValueError):
    """The precision a computation would need is beyond desk scale."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted where an exact rational is required")
    return Fraction(x)


def format_rational(x: Fraction | int) -> str:
    x = as_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def floor_pow(alpha, k: int) -> int:
    """Return ``floor(alpha**k)`` exactly for rational ``alpha > 1``."""
    alpha = as_fraction(alpha)
    if alpha <= 1:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    return alpha.numerator**k // alpha.denominator**k


def ceil_rational_log2(scale: Fraction, base: int) -> int:
    """Exact ``ceil(scale * log2(base))`` for a positive rational scale.

    ``base`` must not be a power of two, so the product is irrational and the
    ceiling is decided by working precision alone.
    """
    if base < 2 or base & (base - 1) == 0:
        raise ValueError("base must be >= 3 and not a power of two")
    prec = 96 + max(scale.numerator.bit_length(), scale.denominator.bit_length())
    with mpmath.workprec(prec):
        val = mpmath.mpf(scale.numerator) / scale.denominator * mpmath.log(base, 2)
        lo, hi = mpmath.floor(val), mpmath.ceil(val)
        if lo == hi:  # pragma: no cover - impossible for irrational products
            raise ArithmeticError("ceil_rational_log2 hit an exact integer")
        return int(hi)


# --------------------------------------------------------------------------
# BigFloat


@dataclass(frozen=True)
class BigFloat:
    """An mpmath float together with the precision it was computed at."""

    value: mpmath.mpf
    bits: int
    rounding: str = "nearest"

    @classmethod
    def from_rational(cls, x, bits: int, rounding: str = "nearest") -> "BigFloat":
        x = as_fraction(x)
        rnd = {"nearest": "n", "up": "u", "down": "d", "ceiling": "c", "floor": "f"}[rounding]
        raw = libmp.from_rational(x.numerator, x.denominator, bits, rnd)
        with mpmath.workprec(bits):  # mpf() rounds to the ambient precision
            return cls(mpmath.mpf(raw), bits, rounding)

    @classmethod
    def sqrt_rational(cls, x, bits: int) -> "BigFloat":
        """Correctly rounded square root of a nonnegative rational."""
        x = as_fraction(x)
        if x < 0:
            raise ValueError("square root of a negative rational")
        with mpmath.workprec(bits):
            if x == 0:
                return cls(mpmath.mpf(0), bits)
            num = libmp.from_man_exp(x.numerator, 0)
            den = libmp.from_man_exp(x.denominator, 0)
            # sqrt(p/q) = sqrt(p*q)/q keeps a single rounding in the sqrt
            root = libmp.mpf_sqrt(libmp.mpf_mul(num, den), bits + 8, "n")
            val = libmp.mpf_div(root, den, bits, "n")
            return cls(mpmath.mpf(val), bits)

    def __float__(self) -> float:
        return float(self.value)

    def log(self) -> mpmath.mpf:
        with mpmath.workprec(max(self.bits, 64)):
            return mpmath.log(self.value)

    def hex(self, mantissa_bits: int | None = None) -> str:
        return mpf_hex(self.value, mantissa_bits)

    @classmethod
    def fromhex(cls, text: str, bits: int) -> "BigFloat":
        return cls(hex_mpf(text), bits)


def mpf_hex(x: mpmath.mpf, mantissa_bits: int | None = None) -> str:
    """Serialize an mpf exactly as ``[-]0x<hexmantissa>p<exp>``."""
    raw = x._mpf_
    if mantissa_bits is not None:
        raw = libmp.normalize(*raw, mantissa_bits, "n") if raw[1] else raw
    sign, man, exp, _ = raw
    if not man:
        if raw not in (libmp.fzero,):
            raise ValueError("cannot serialize non-finite values")
        return "0x0p+0"
    return f"{'-' if sign else ''}0x{int(man):x}p{exp:+d}"


def hex_mpf(text: str) -> mpmath.mpf:
    text = text.strip()
    sign = text.startswith("-")
    body = text.lstrip("-")
    man_s, exp_s = body[2:].split("p")
    man, exp = int(man_s, 16), int(exp_s)
    with mpmath.workprec(max(man.bit_length(), 53)):
        val = mpmath.mpf(libmp.from_man_exp(man, exp))
        return -val if sign else val


# --------------------------------------------------------------------------
# Precision budgets


@dataclass(frozen=True)
class PrecisionBudget:
    bits: int
    note: str = ""

    def __post_init__(self):
        if self.bits < MIN_BITS:
            raise ValueError(f"precision budget below {MIN_BITS} bits")


def precision_bits(alpha, theta: int, M: int) -> int:
    """Working precision resolving squared quantities down to theta**-alpha**(M+1)."""
    alpha = as_fraction(alpha)
    bits = 16 + 2 * ceil_rational_log2(alpha ** (M + 1), theta)
    if bits > MAX_BITS:
        raise InfeasiblePrecision(f"parameters infeasible at desk scale ({bits} bits)")
    return max(MIN_BITS, bits)


def required_precision(params, N_max: int) -> PrecisionBudget:
    """Precision budget for measuring angles of the constructed families up to ``N_max``."""
    if N_max < 0:
        raise ValueError("N_max must be nonnegative")
    bits = precision_bits(params.alpha, params.theta, params.M)
    # smallest angle measured has size theta**-alpha**(N_max+q+1); its square
    # must sit at least 32 bits above the working precision floor
    need = 32 + 2 * ceil_rational_log2(as_fraction(params.alpha) ** (N_max + params.q + 1), params.theta)
    if bits < need:
        raise InfeasiblePrecision(
            f"truncation order M={params.M} too small for N_max={N_max}: "
            f"{bits} bits < {need} needed"
        )
    note = (
        f"dominant term alpha^{params.M + 1} * log2(theta) with alpha={format_rational(params.alpha)}, "
        f"theta={params.theta}, M={params.M}"
    )
    return PrecisionBudget(bits, note)


def certified(compute: Callable[[int], Sequence], bits: int, *, agreement_bits: int = AGREEMENT_BITS):
    """Run ``compute(bits)`` and ``compute(2*bits)`` and check they agree.

    ``compute`` returns a sequence of mpf values.  Returns ``(values, err)``
    where ``values`` come from the higher-precision run and ``err`` bounds
    the componentwise difference of the two runs.  Values below
    ``2**(-bits/2)`` in both runs are compared absolutely.
    """
    lo = list(compute(bits))
    hi = list(compute(2 * bits))
    if len(lo) != len(hi):
        raise PrecisionError("precision rerun changed the number of results")
    with mpmath.workprec(2 * bits):
        floor = mpmath.ldexp(1, -(bits // 2))
        rel = mpmath.ldexp(1, -agreement_bits)
        err = mpmath.mpf(0)
        for a, b in zip(lo, hi):
            diff = abs(a - b)
            scale = max(abs(a), abs(b))
            if diff > rel * scale and scale > floor:
                raise PrecisionError(
                    f"result moved by {mpmath.nstr(diff / scale, 5)} relatively at {bits} -> {2 * bits} bits"
                )
            err = max(err, diff)
        err = err + mpmath.ldexp(1, -bits)
    return hi, err


def mp_from_fraction(x: Fraction, bits: int) -> mpmath.mpf:
    with mpmath.workprec(bits):
        return mpmath.mpf(libmp.from_rational(x.numerator, x.denominator, bits, "n"))


def log_int(n: int) -> float:
    """Natural log of a positive (possibly huge) integer."""
    if n <= 0:
        raise ValueError("log of a nonpositive integer")
    return math.log(n)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True
