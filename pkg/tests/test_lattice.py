import math
import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_frame
from subspace_approx.exterior import integer_rank, norm_sq, primitive_normalize, wedge
from subspace_approx.lattice import (
    RationalSubspace,
    hnf,
    ideal_norm,
    integer_kernel,
    intersect,
    orthogonal_complement,
    sum_spaces,
    xgcd,
    z_basis,
)


@given(st.integers(-(10**12), 10**12), st.integers(-(10**12), 10**12))
def test_xgcd(a, b):
    g, x, y = xgcd(a, b)
    assert g == math.gcd(a, b)
    assert x * a + y * b == g


def _unimodular(rng, k):
    U = sympy.eye(k)
    for _ in range(4 * k):
        i, j = rng.sample(range(k), 2) if k > 1 else (0, 0)
        E = sympy.eye(k)
        if i != j:
            E[i, j] = rng.randint(-4, 4)
        U = E * U
    return U


def test_hnf_is_canonical_under_unimodular_change():
    rng = random.Random(3)
    for _ in range(50):
        n, g = rng.randint(2, 6), rng.randint(1, 4)
        g = min(g, n)
        V = random_frame(rng, n, g, -7, 7)
        U = _unimodular(rng, g)
        W = [[int(x) for x in row] for row in (U * sympy.Matrix(V)).tolist()]
        assert hnf(V) == hnf(W)


def test_hnf_shape():
    H = hnf([[4, 6, 2], [2, 4, 0], [6, 10, 2]])
    # rank 2, leading entries positive, entries above pivots reduced
    assert len(H) == 2
    pivots = [next(i for i, x in enumerate(r) if x) for r in H]
    assert pivots == sorted(pivots)
    for r, c in enumerate(pivots):
        assert H[r][c] > 0
        for above in range(r):
            assert 0 <= H[above][c] < H[r][c]


def test_hnf_detects_index():
    assert hnf([[2, 0], [0, 1]]) != hnf([[1, 0], [0, 1]])
    assert hnf([[2, 0], [0, 1], [1, 0]]) == ((1, 0), (0, 1))


def test_integer_kernel_matches_sympy_nullspace():
    rng = random.Random(5)
    for _ in range(40):
        n, m = rng.randint(2, 6), rng.randint(1, 4)
        rows = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(m)]
        K = integer_kernel(rows, n)
        null = sympy.Matrix(rows).nullspace()
        assert len(K) == len(null)
        for v in K:
            assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
        if K:
            # saturated: gcd of maximal minors is 1
            assert math.gcd(*wedge(K).coords) == 1


def test_saturation_contains_generators_with_index_from_minors():
    rng = random.Random(11)
    for _ in range(40):
        n, g = rng.randint(2, 6), rng.randint(1, 3)
        g = min(g, n - 1)
        V = random_frame(rng, n, g, -9, 9)
        S = RationalSubspace.from_span(V)
        assert math.gcd(*wedge(S.zbasis).coords) == 1
        assert all(S.member(v) for v in V)
        # H(S) is the norm of the primitive Plucker vector
        assert S.height_sq == norm_sq(primitive_normalize(wedge(V)))
        idx = ideal_norm(V, S)
        assert idx == math.gcd(*wedge(V).coords)


def test_height_of_coordinate_and_diagonal_lines():
    assert RationalSubspace.from_span([[0, 3, 0]]).height_sq == 1
    assert RationalSubspace.from_span([[2, 2]]).height_sq == 2
    assert RationalSubspace.from_span([[1, 2, 3]]).height(64)[0] == 14


def test_height_of_complement_matches():
    rng = random.Random(2)
    for _ in range(20):
        V = random_frame(rng, 5, 2, -6, 6)
        S = RationalSubspace.from_span(V)
        assert orthogonal_complement(S).height_sq == S.height_sq


def test_from_span_rejects_dependent_sets():
    with pytest.raises(ValueError):
        RationalSubspace.from_span([[1, 2], [2, 4]])
    with pytest.raises(ValueError):
        RationalSubspace.from_span([])
    S = RationalSubspace.from_generators([[1, 2], [2, 4]])
    assert S.dim == 1 and S.zbasis == ((1, 2),)
    assert RationalSubspace.from_generators([], n=3).dim == 0


def test_full_space_and_rational_entries():
    S = RationalSubspace.from_span([[1, 1], [1, -1]])
    assert S.dim == 2 and S.height_sq == 1 and S.complement == ()
    T = RationalSubspace.from_span([["1/2", "1/3", 0]])
    assert T.zbasis == ((3, 2, 0),)


def test_sum_and_intersection_dimension_formula():
    rng = random.Random(8)
    for _ in range(40):
        n = rng.randint(3, 6)
        shared = random_frame(rng, n, 1, -4, 4)
        A = RationalSubspace.from_generators(shared + random_frame(rng, n, rng.randint(1, n - 2), -4, 4))
        B = RationalSubspace.from_generators(shared + random_frame(rng, n, rng.randint(1, n - 2), -4, 4))
        I, S = intersect(A, B), sum_spaces(A, B)
        assert S.dim + I.dim == A.dim + B.dim
        assert I.dim >= 1
        assert A.contains(I) and B.contains(I) and S.contains(A) and S.contains(B)
        expected = sympy.Matrix(list(A.zbasis) + list(B.zbasis)).rank()
        assert S.dim == expected


def test_intersection_of_complementary_planes_is_zero():
    A = RationalSubspace.from_span([[1, 0, 0, 0], [0, 1, 0, 0]])
    B = RationalSubspace.from_span([[0, 0, 1, 0], [0, 0, 0, 1]])
    assert intersect(A, B).dim == 0
    assert sum_spaces(A, B).dim == 4


def test_same_space_ignores_generating_set():
    A = RationalSubspace.from_span([[1, 2, 3], [0, 1, 1]])
    B = RationalSubspace.from_span([[1, 3, 4], [2, 5, 7]])
    assert A.same_space(B)


def test_ideal_norm_rejects_foreign_basis():
    S = RationalSubspace.from_span([[1, 0, 0], [0, 1, 0]])
    with pytest.raises(ValueError):
        ideal_norm([[1, 0, 0], [0, 0, 1]], S)
    with pytest.raises(ValueError):
        ideal_norm([[1, 0, 0]], S)


def test_json_round_trip():
    S = RationalSubspace.from_span([[10**30, 3, 7], [1, 1, 0]])
    assert RationalSubspace.from_json(S.to_json()).same_space(S)
    Z = RationalSubspace.from_generators([], n=4)
    assert RationalSubspace.from_json(Z.to_json()).dim == 0


def test_z_basis_of_large_entries_is_exact():
    V = [[5**200, 2, 0], [0, 5**150, 2]]
    Z = z_basis(V)
    assert integer_rank(Z) == 2
    assert math.gcd(*wedge(Z).coords) == 1


@given(st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=1, max_size=3))
@settings(max_examples=60)
def test_member_agrees_with_rank(V):
    S = RationalSubspace.from_generators(V, n=4)
    probe = [1, -2, 3, 1]
    assert S.member(probe) == (sympy.Matrix(list(S.zbasis) + [probe]).rank() == S.dim)
