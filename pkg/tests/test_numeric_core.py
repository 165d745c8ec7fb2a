import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import params_for
from subspace_approx.numeric_core import (
    BigFloat,
    InfeasiblePrecision,
    PrecisionBudget,
    PrecisionError,
    as_fraction,
    ceil_rational_log2,
    certified,
    floor_pow,
    format_rational,
    hex_mpf,
    is_prime,
    mpf_hex,
    precision_bits,
    required_precision,
)


def test_as_fraction_accepts_exact_inputs_and_rejects_floats():
    assert as_fraction(3) == 3
    assert as_fraction("7/2") == Fraction(7, 2)
    assert as_fraction(Fraction(1, 3)) == Fraction(1, 3)
    with pytest.raises(TypeError):
        as_fraction(0.5)


def test_format_rational():
    assert format_rational(Fraction(4)) == "4"
    assert format_rational(Fraction(-7, 3)) == "-7/3"


@pytest.mark.parametrize("alpha,k,expected", [(4, 3, 64), (Fraction(9, 2), 2, 20), (Fraction(10, 3), 3, 37)])
def test_floor_pow(alpha, k, expected):
    assert floor_pow(alpha, k) == expected


@given(st.integers(1, 50), st.integers(1, 50), st.integers(0, 6))
def test_floor_pow_matches_integer_division(p, s, k):
    a = Fraction(p + s, s)  # alpha > 1
    p = p + s
    assert floor_pow(a, k) == (p**k) // (s**k)


@given(st.integers(1, 10**6), st.integers(1, 10**6), st.sampled_from([3, 5, 7, 11]))
def test_ceil_rational_log2_is_tight(p, s, base):
    x = Fraction(p, s)
    k = ceil_rational_log2(x, base)
    with mpmath.workprec(200):
        target = mpmath.mpf(p) / s * mpmath.log(base, 2)
        assert k - 1 < target <= k


def test_sqrt_rational_is_correctly_rounded():
    for x in [Fraction(2), Fraction(1, 3), Fraction(10**40 + 7, 3**50)]:
        r = BigFloat.sqrt_rational(x, 80)
        man, exp = mpmath.mpf(r.value).man_exp
        # the neighbours one ulp away must be farther from sqrt(x)
        with mpmath.workprec(400):
            true = mpmath.sqrt(mpmath.mpf(x.numerator) / x.denominator)
            here = abs(mpmath.mpf(man) * mpmath.ldexp(1, exp) - true)
            for delta in (-1, 1):
                assert here <= abs(mpmath.mpf(man + delta) * mpmath.ldexp(1, exp) - true)


@given(st.integers(-(10**30), 10**30), st.integers(1, 10**20))
@settings(max_examples=50)
def test_hex_round_trip(p, s):
    b = BigFloat.from_rational(Fraction(p, s), 120)
    assert hex_mpf(mpf_hex(b.value)) == b.value
    assert BigFloat.fromhex(b.hex(), 120).value == b.value


def test_from_rational_keeps_requested_precision():
    b = BigFloat.from_rational(Fraction(1, 3), 200)
    with mpmath.workprec(400):
        assert abs(b.value - mpmath.mpf(1) / 3) < mpmath.ldexp(1, -199)


def test_from_rational_directed_rounding():
    up = BigFloat.from_rational(Fraction(1, 3), 64, "up").value
    down = BigFloat.from_rational(Fraction(1, 3), 64, "down").value
    with mpmath.workprec(300):
        third = mpmath.mpf(1) / 3
        assert down < third < up


def test_precision_bits_for_shipped_configs():
    assert precision_bits(4, 5, 6) == 16 + 2 * math.ceil(4**7 * math.log2(5))
    assert precision_bits(10, 5, 4) == 16 + 2 * math.ceil(10**5 * math.log2(5))
    assert precision_bits(4, 5, 0) == 64


def test_precision_bits_refuses_absurd_budgets():
    with pytest.raises(InfeasiblePrecision):
        precision_bits(100, 5, 10)


def test_required_precision_needs_a_deep_enough_truncation():
    p = params_for(1, 2, 4, M=6)
    assert required_precision(p, 3).bits == precision_bits(4, 5, 6)
    with pytest.raises(InfeasiblePrecision):
        required_precision(p, 4)
    with pytest.raises(ValueError):
        PrecisionBudget(10)


def test_certified_detects_precision_dependent_results():
    vals, err = certified(lambda b: [mpmath.mpf(1) / 3], 100)
    assert err < mpmath.ldexp(1, -90)
    with pytest.raises(PrecisionError):
        certified(lambda b: [mpmath.mpf(b)], 100)


def test_is_prime():
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
