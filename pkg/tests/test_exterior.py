import random
from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from subspace_approx.exterior import (
    Multivector,
    bareiss_det,
    gram_det,
    integer_rank,
    norm_sq,
    primitive_normalize,
    wedge,
)


def frames(max_n=6, max_g=4):
    return st.integers(1, max_n).flatmap(
        lambda n: st.integers(1, min(n, max_g)).flatmap(
            lambda g: st.lists(
                st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=g, max_size=g
            )
        )
    )


def test_wedge_of_basis_vectors():
    w = wedge([[1, 0, 0], [0, 1, 0]])
    assert w.coords == (1, 0, 0)
    assert w[(0, 1)] == 1
    assert wedge([[0, 1, 0], [1, 0, 0]])[(0, 1)] == -1


def test_wedge_grade_one_is_the_vector():
    assert wedge([[3, -1, 4]]).coords == (3, -1, 4)


def test_wedge_top_grade_is_determinant():
    M = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]
    assert wedge(M).coords == (int(sympy.Matrix(M).det()),)


@given(frames())
@settings(max_examples=100)
def test_minors_match_sympy(V):
    n, g = len(V[0]), len(V)
    M = sympy.Matrix(V).T
    expected = tuple(int(M.extract(list(sub), list(range(g))).det()) for sub in combinations(range(n), g))
    assert wedge(V).coords == expected


@given(frames())
@settings(max_examples=100)
def test_cauchy_binet(V):
    assert norm_sq(wedge(V)) == gram_det(V) == int((sympy.Matrix(V) * sympy.Matrix(V).T).det())


def test_rational_entries_scale_multilinearly():
    V = [[Fraction(1, 2), 1, 0], [0, Fraction(2, 3), 5]]
    W = [[1, 2, 0], [0, 2, 15]]
    assert wedge(V) == wedge(W).scale(Fraction(1, 6))
    assert norm_sq(wedge(V)) == gram_det(V)


def test_wedge_rejects_bad_input():
    with pytest.raises(ValueError):
        wedge([])
    with pytest.raises(ValueError):
        wedge([[1, 2], [3]])
    with pytest.raises(ValueError):
        wedge([[1, 0], [0, 1], [1, 1]])


@given(st.integers(1, 6), st.randoms(use_true_random=False))
def test_bareiss_matches_sympy(k, rnd):
    M = [[rnd.randint(-50, 50) for _ in range(k)] for _ in range(k)]
    assert bareiss_det(M) == int(sympy.Matrix(M).det())


def test_bareiss_singular_and_pivoting():
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([[1, 2], [2, 4]]) == 0
    assert bareiss_det([]) == 1


@given(frames(max_n=5, max_g=5))
def test_integer_rank_matches_sympy(V):
    assert integer_rank(V) == sympy.Matrix(V).rank()


def test_primitive_normalize():
    m = Multivector(3, 2, (-4, 6, 0))
    p = primitive_normalize(m)
    assert p.coords == (2, -3, 0)
    with pytest.raises(ValueError):
        primitive_normalize(Multivector(2, 1, (0, 0)))
    with pytest.raises(ValueError):
        primitive_normalize(Multivector(2, 1, (Fraction(1, 2), 1)))


def test_multivector_json_round_trip():
    rng = random.Random(0)
    for _ in range(20):
        V = [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(5)] for _ in range(3)]
        w = wedge(V)
        assert Multivector.from_json(w.to_json()) == w


def test_multivector_slot_count_checked():
    with pytest.raises(ValueError):
        Multivector(3, 2, (1, 2))
