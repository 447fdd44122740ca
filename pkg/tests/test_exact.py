from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_rank, minors_gcd, random_unimodular
from torlat.errors import NotPositiveDefinite, SingularMatrix
from torlat.exact import (
    IntMatrix,
    RatMatrix,
    as_matrix,
    det,
    gram_reduce,
    hnf,
    identity,
    integer_kernel,
    invariant_factors,
    inverse_q,
    inverse_z,
    is_unimodular,
    mat_mul,
    mat_vec,
    matrix_from_json,
    matrix_to_json,
    rank,
    rational_kernel,
    short_vectors,
    snf,
    transpose,
)


def matrices(max_dim=4, lo=-9, hi=9):
    return st.integers(1, max_dim).flatmap(
        lambda m: st.integers(1, max_dim).flatmap(
            lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n),
                               min_size=m, max_size=m)))


def laplace_det(A):
    n = len(A)
    if n == 1:
        return Fraction(A[0][0])
    return sum((-1) ** j * Fraction(A[0][j]) * laplace_det([r[:j] + r[j + 1:] for r in A[1:]])
               for j in range(n) if A[0][j])


def check_hnf(A, H, U):
    assert is_unimodular(U)
    assert mat_mul(U, A) == tuple(tuple(r) for r in H)
    last = -1
    seen_zero = False
    for r in H:
        nz = [j for j, x in enumerate(r) if x]
        if not nz:
            seen_zero = True
            continue
        assert not seen_zero, "zero rows must come last"
        p = nz[0]
        assert p > last and r[p] > 0
        for above in H[:H.index(r)]:
            assert 0 <= above[p] < r[p]
        last = p


# --- determinants and inverses ----------------------------------------------

def test_det_small_examples():
    assert det([[1, 2], [3, 4]]) == -2
    assert det(identity(5)) == 1
    assert det([[Fraction(1, 2), 0], [0, 4]]) == 2


@given(st.integers(1, 5).flatmap(lambda n: st.lists(
    st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)))
@settings(max_examples=80, deadline=None)
def test_det_matches_cofactor_expansion(A):
    assert det(A) == laplace_det(A)


def test_inverse_q_and_z():
    A = [[2, 1], [1, 1]]
    assert inverse_z(A) == IntMatrix([[1, -1], [-1, 2]])
    B = [[2, 0], [0, 3]]
    assert inverse_q(B) == RatMatrix([[Fraction(1, 2), 0], [0, Fraction(1, 3)]])
    with pytest.raises(SingularMatrix):
        inverse_q([[1, 2], [2, 4]])
    with pytest.raises(ValueError):
        inverse_z(B)


# --- Hermite form ------------------------------------------------------------

def test_hnf_example():
    H, U = hnf([[4, 6], [2, 2]])
    assert H == IntMatrix([[2, 0], [0, 2]])
    check_hnf([[4, 6], [2, 2]], H, U)


@given(matrices(5))
@settings(max_examples=150, deadline=None)
def test_hnf_invariants(A):
    H, U = hnf(A)
    check_hnf(A, H, U)
    assert sum(1 for r in H if any(r)) == brute_rank(A)


def test_hnf_is_canonical_under_row_operations():
    rng = random.Random(4)
    for _ in range(40):
        A = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(3)]
        V = random_unimodular(3, rng)
        assert hnf(A)[0] == hnf(mat_mul(V, A))[0]


# --- Smith form ----------------------------------------------------------------

def test_snf_example():
    res = snf([[2, 0], [0, 3]])
    assert res.diagonal == (1, 6)
    assert invariant_factors([[2, 0], [0, 3]]) == (1, 6)


@given(matrices(4))
@settings(max_examples=150, deadline=None)
def test_snf_transforms_and_minor_gcds(A):
    res = snf(A)
    assert is_unimodular(res.U) and is_unimodular(res.V)
    assert mat_mul(mat_mul(res.U, A), res.V) == tuple(tuple(r) for r in res.S)
    d = [x for x in res.diagonal if x]
    for i in range(len(res.S)):
        for j in range(len(res.S[0])):
            if i != j:
                assert res.S[i][j] == 0
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    # product of the first k factors = gcd of the k x k minors
    prod = 1
    for k, x in enumerate(d, 1):
        prod *= x
        assert prod == minors_gcd(A, k)
    assert tuple(d) == invariant_factors(A)


# --- kernels -----------------------------------------------------------------

def test_kernel_examples():
    assert integer_kernel([[2, 4], [1, 2]]) in ([(2, -1)], [(-2, 1)])
    assert integer_kernel([[1, -1]]) == [(1, 1)]
    assert integer_kernel([[1, 0], [0, 1]]) == []


@given(matrices(4, -5, 5))
@settings(max_examples=100, deadline=None)
def test_integer_kernel_is_saturated_basis(A):
    n = len(A[0])
    K = integer_kernel(A)
    assert len(K) == n - brute_rank(A)
    for v in K:
        assert all(x == 0 for x in mat_vec(A, v))
    if K:
        # saturated: the basis matrix has all Smith invariants equal to 1
        assert set(invariant_factors(K)) == {1}
        # brute force: every small integer kernel vector lies in the span
        coords = itertools.product(range(-2, 3), repeat=n)
        for x in coords:
            if any(mat_vec(A, x)):
                continue
            aug = [list(v) for v in K] + [list(x)]
            assert brute_rank(aug) == len(K)
            assert invariant_factors(aug) == invariant_factors(K)


def test_rational_kernel_matches_rank():
    A = [[1, 2, 3], [2, 4, 6]]
    K = rational_kernel(A)
    assert len(K) == 2
    for v in K:
        assert all(x == 0 for x in mat_vec(A, v))
    assert rank(A) == 1


# --- forms --------------------------------------------------------------------

def test_gram_reduce_examples():
    F, T = gram_reduce([[5, 4], [4, 5]])
    assert F == IntMatrix([[2, -1], [-1, 5]])
    F2, T2 = gram_reduce([[2, 1], [1, 2]])
    assert F2 == IntMatrix([[2, 1], [1, 2]])
    with pytest.raises(NotPositiveDefinite):
        gram_reduce([[1, 2], [2, 1]])


def _box_vectors(F, bound):
    n = len(F)
    Fi = inverse_q(F)
    r = [math.isqrt(int(bound * Fi[i][i]) + 1) + 1 for i in range(n)]
    out = []
    for x in itertools.product(*[range(-k, k + 1) for k in r]):
        if any(x):
            v = sum(x[i] * F[i][j] * x[j] for i in range(n) for j in range(n))
            if v <= bound:
                out.append((v, x))
    return sorted(out)


def test_gram_reduce_is_equivalent_and_short():
    rng = random.Random(11)
    for _ in range(30):
        d = rng.randint(2, 3)
        base = [[rng.randint(-2, 2) for _ in range(d)] for _ in range(d)]
        if det(base) == 0:
            continue
        F0 = mat_mul(transpose(base), base)
        U = random_unimodular(d, rng)
        F = mat_mul(mat_mul(transpose(U), F0), U)
        Fr, T = gram_reduce(F)
        assert is_unimodular(T)
        assert mat_mul(mat_mul(transpose(T), F), T) == tuple(tuple(r) for r in Fr)
        lam = _box_vectors(F, Fr[0][0])[0][0]
        assert Fr[0][0] <= 2 ** (d - 1) * lam


def test_short_vectors_match_box_enumeration():
    for F, b in ([[[2, -1], [-1, 2]], 6], [[[2, 1, 1], [1, 2, 1], [1, 1, 2]], 4],
                 [[[3, -1, -1], [-1, 3, -1], [-1, -1, 3]], 8], [[[1, 0], [0, 7]], 9]):
        got = sorted(short_vectors(F, b))
        assert got == _box_vectors(F, b)


# --- JSON ----------------------------------------------------------------------

def test_matrix_json_round_trip():
    for A in (IntMatrix([[1, -2], [3, 4]]), RatMatrix([[Fraction(1, 2), 0], [0, 3]])):
        assert matrix_from_json(matrix_to_json(A)) == A
    assert matrix_to_json(RatMatrix([[Fraction(-1, 3)]]))["data"] == [["-1/3"]]
    with pytest.raises(ValueError):
        matrix_from_json({"rows": 1, "cols": 2, "data": [[1]]})
    with pytest.raises(ValueError):
        matrix_from_json({"rows": 1, "cols": 1, "data": [[0.5]]})
    assert isinstance(as_matrix([[Fraction(2, 1)]]), IntMatrix)
