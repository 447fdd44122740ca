from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest

from torlat import classify
from torlat.exact import IntMatrix, det, mat_mul


@pytest.fixture(scope="session")
def catalogs():
    return {d: classify.build_catalog(d) for d in (1, 2, 3)}


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("TORLAT_CACHE_DIR", str(tmp_path / "cache"))


def random_unimodular(d: int, rng: random.Random, steps: int = 6, spread: int = 3) -> IntMatrix:
    """Product of random elementary matrices and sign flips."""
    U = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(steps):
        if d == 1:
            break
        i, j = rng.sample(range(d), 2)
        q = rng.randint(-spread, spread)
        E = [[int(a == b) for b in range(d)] for a in range(d)]
        E[i][j] = q
        U = mat_mul(E, U)
        if rng.random() < 0.3:
            k = rng.randrange(d)
            U = [[-x if r == k else x for x in row] for r, row in enumerate(U)]
    if rng.random() < 0.5:
        U = [[-x for x in U[0]]] + [list(r) for r in U[1:]]
    assert det(U) in (1, -1)
    return IntMatrix(U)


def brute_rank(rows) -> int:
    """Rank over Q by plain Fraction elimination."""
    M = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    cols = len(M[0]) if M else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / M[rank][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def minors_gcd(A, k: int) -> int:
    from math import gcd

    g = 0
    m, n = len(A), len(A[0])
    for rows in combinations(range(m), k):
        for cols in combinations(range(n), k):
            g = gcd(g, int(det([[A[i][j] for j in cols] for i in rows])))
    return g
