from __future__ import annotations

import math
from fractions import Fraction

import pytest

from torlat.conjtest import invariant_form
from torlat.errors import InvalidType
from torlat.exact import det, mat_mul, transpose
from torlat.matgroup import closure, direct_product
from torlat.rootsys import (
    RootSystemType,
    cartan_matrix,
    max_order_entry,
    max_order_group,
    max_order_table,
    root_count,
    roots,
    signed_permutation_group,
    weyl_generators,
    weyl_order,
)

ALL_TYPES = ["A1", "A2", "A3", "B2", "B3", "C3", "D4", "G2", "F4", "E6", "E7", "E8"]

# Coxeter numbers: |roots| = rank * h
COXETER = {"A1": 2, "A2": 3, "A3": 4, "B2": 4, "B3": 6, "C3": 6, "D4": 6, "G2": 6,
           "F4": 12, "E6": 12, "E7": 18, "E8": 30}


def test_type_validation():
    assert RootSystemType.parse("E8") == RootSystemType("E", 8)
    assert str(RootSystemType.parse("g_2")) == "G2"
    for bad in ("E5", "F3", "G3", "D3", "B1", "X2", "A0", ""):
        with pytest.raises(InvalidType):
            RootSystemType.parse(bad)


def test_cartan_matrices():
    assert cartan_matrix("A1") == ((2,),)
    assert cartan_matrix("G2") == ((2, -1), (-3, 2))
    assert det(cartan_matrix("E8")) == 1
    assert det(cartan_matrix("E7")) == 2
    assert det(cartan_matrix("E6")) == 3
    assert det(cartan_matrix("F4")) == 1
    for t in ALL_TYPES:
        C = cartan_matrix(t)
        n = len(C)
        assert all(C[i][i] == 2 for i in range(n))
        assert all(C[i][j] <= 0 for i in range(n) for j in range(n) if i != j)
        assert all((C[i][j] == 0) == (C[j][i] == 0) for i in range(n) for j in range(n))


def _symmetrized(t):
    """B[i][j] = C[i][j] * |a_j|^2 / 2, with root lengths found by propagation."""
    C = cartan_matrix(t)
    n = len(C)
    half = [None] * n
    half[0] = Fraction(1)
    while None in half:
        for i in range(n):
            for j in range(n):
                if half[i] is not None and half[j] is None and C[i][j]:
                    # C[i][j] * half[j] = C[j][i] * half[i]
                    half[j] = C[j][i] * half[i] / C[i][j]
    return [[C[i][j] * half[j] for j in range(n)] for i in range(n)]


def test_weyl_generators_are_reflections():
    for t in ALL_TYPES:
        G = weyl_generators(t)
        n = G.dimension
        one = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        B = _symmetrized(t)
        assert all(B[i][j] == B[j][i] for i in range(n) for j in range(n))
        for g in G.generators:
            assert mat_mul(g, g) == one
            assert det(g) == -1
            assert mat_mul(mat_mul(transpose(g), B), g) == tuple(tuple(r) for r in B)


def test_generators_preserve_group_averaged_form():
    for t in ("A2", "B3", "G2", "D4"):
        G = weyl_generators(t)
        F = invariant_form(G)
        for g in G.generators:
            assert mat_mul(mat_mul(transpose(g), F), g) == tuple(tuple(r) for r in F)


def test_weyl_orders():
    assert weyl_order("A1") == 2
    assert weyl_order("G2") == 12
    assert weyl_order("F4") == 1152
    assert weyl_order("E6") == 51840
    assert weyl_order("E7") == 2903040
    assert weyl_order("E8") == 696729600


def test_schreier_sims_matches_closure():
    for t in ("A1", "A2", "A3", "A4", "A5", "A6", "B2", "B3", "B4", "G2", "D4"):
        G = weyl_generators(t)
        assert weyl_order(t) == len(closure(G.generators, dimension=G.dimension))


def test_root_counts():
    assert root_count("A1") == 2
    assert root_count("G2") == 12
    assert root_count("E8") == 240
    for t in ALL_TYPES:
        assert root_count(t) == RootSystemType.parse(t).rank * COXETER[t]


def test_roots_are_integral_and_symmetric():
    R = set(roots("G2"))
    assert all(tuple(-x for x in r) in R for r in R)
    assert (1, 0) in R and (0, 1) in R and (3, 2) in R


def test_signed_permutations():
    assert signed_permutation_group(1).order() == 2
    assert signed_permutation_group(3).order() == 48
    assert signed_permutation_group(5).order() == 3840
    for d in range(1, 7):
        assert signed_permutation_group(d).order() == 2 ** d * math.factorial(d)


def test_e6_with_minus_identity_doubles():
    G, entry = max_order_group(6)
    assert G.order() == 2 * weyl_order("E6") == 103680


def test_direct_product_orders_multiply():
    G, entry = max_order_group(9)
    assert entry.kind == "direct_product" and G.dimension == 9
    P = direct_product(weyl_generators("G2"), weyl_generators("A2"))
    assert P.order() == 12 * 6


def test_max_order_table():
    expected = {1: 2, 2: 12, 3: 48, 4: 1152, 5: 3840, 6: 103680, 7: 2903040,
                8: 696729600, 9: 1393459200, 10: 8360755200}
    table = max_order_table()
    assert [e.d for e in table[:-1]] == list(range(1, 11))
    for e in table[:-1]:
        assert e.max_order == expected[e.d]
        assert e.max_order >= 2 ** e.d * math.factorial(e.d)
    assert table[-1].d is None and table[-1].formula == "2^d * d!"
    assert max_order_entry(8).description == "W(E_8)"
