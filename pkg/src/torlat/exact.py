"""Exact integer and rational linear algebra.

Matrices are immutable tuples of row tuples. ``IntMatrix`` and ``RatMatrix``
are thin ``tuple`` subclasses that validate their entries, so any function
here also accepts plain nested tuples or lists. Nothing in this module
touches floating point except as a first guess that is then corrected
exactly (see ``short_vectors``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NotPositiveDefinite, SingularMatrix

Number = int | Fraction


class IntMatrix(tuple):
    """Dense integer matrix, stored row-major as a tuple of tuples."""

    __slots__ = ()

    def __new__(cls, rows: Iterable[Iterable[Number]]):
        out = []
        for row in rows:
            r = []
            for x in row:
                if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
                    raise TypeError(f"integer entry expected, got {x!r}")
                if isinstance(x, Fraction):
                    if x.denominator != 1:
                        raise ValueError(f"non-integral entry {x}")
                    x = x.numerator
                r.append(int(x))
            out.append(tuple(r))
        if not out or not out[0]:
            raise ValueError("matrix must have at least one row and one column")
        if any(len(r) != len(out[0]) for r in out):
            raise ValueError("ragged matrix")
        return super().__new__(cls, out)

    @property
    def nrows(self) -> int:
        return len(self)

    @property
    def ncols(self) -> int:
        return len(self[0])

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(zip(*self))

    def __matmul__(self, other):
        return _wrap(mat_mul(self, other))

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self]})"


class RatMatrix(tuple):
    """Dense rational matrix; entries are ``Fraction`` in lowest terms."""

    __slots__ = ()

    def __new__(cls, rows: Iterable[Iterable[Number | str]]):
        out = [tuple(_to_fraction(x) for x in row) for row in rows]
        if not out or not out[0]:
            raise ValueError("matrix must have at least one row and one column")
        if any(len(r) != len(out[0]) for r in out):
            raise ValueError("ragged matrix")
        return super().__new__(cls, out)

    @property
    def nrows(self) -> int:
        return len(self)

    @property
    def ncols(self) -> int:
        return len(self[0])

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix(zip(*self))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self for x in r)

    def to_int(self) -> IntMatrix:
        return IntMatrix(self)

    def __matmul__(self, other):
        return _wrap(mat_mul(self, other))

    def __repr__(self):
        return f"RatMatrix({[[str(x) for x in r] for r in self]})"


def _to_fraction(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"exact entry expected, got {x!r}")
    return Fraction(x)


def _wrap(rows):
    if all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1)
           for r in rows for x in r):
        return IntMatrix(rows)
    return RatMatrix(rows)


def as_matrix(rows) -> IntMatrix | RatMatrix:
    """Build an IntMatrix when every entry is integral, else a RatMatrix."""
    if isinstance(rows, (IntMatrix, RatMatrix)):
        return rows
    return _wrap([[_to_fraction(x) if isinstance(x, str) else x for x in r] for r in rows])


# ---------------------------------------------------------------------------
# elementary helpers on tuple matrices

def identity(n: int) -> IntMatrix:
    return IntMatrix([[int(i == j) for j in range(n)] for i in range(n)])


def zeros(r: int, c: int) -> IntMatrix:
    return IntMatrix([[0] * c for _ in range(r)])


def diag(*entries) -> IntMatrix | RatMatrix:
    n = len(entries)
    return _wrap([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])


def mat_mul(A, B) -> tuple:
    cols = tuple(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in A)


def mat_vec(A, v) -> tuple:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in A)


def transpose(A) -> tuple:
    return tuple(zip(*A))


def mat_add(A, B) -> tuple:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A, B) -> tuple:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_scale(c, A) -> tuple:
    return tuple(tuple(c * a for a in r) for r in A)


def block_diag(A, B) -> tuple:
    n, m = len(A), len(B)
    rows = [tuple(A[i]) + (0,) * m for i in range(n)]
    rows += [(0,) * n + tuple(B[i]) for i in range(m)]
    return tuple(rows)


def trace(A):
    return sum(A[i][i] for i in range(len(A)))


def normalize_entries(A) -> tuple:
    """Replace integral Fractions by ints so hashing and JSON stay canonical."""
    return tuple(tuple(x.numerator if isinstance(x, Fraction) and x.denominator == 1 else x
                       for x in r) for r in A)


# ---------------------------------------------------------------------------
# determinant, inverse, rank

def det(A) -> Number:
    """Exact determinant (Bareiss for integer input, Gaussian over Q otherwise)."""
    n = len(A)
    if any(len(r) != n for r in A):
        raise ValueError("determinant of a non-square matrix")
    if all(isinstance(x, int) for r in A for x in r):
        return _bareiss(A)
    M = [[Fraction(x) for x in r] for r in A]
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            M[c], M[p] = M[p], M[c]
            result = -result
        result *= M[c][c]
        inv = 1 / M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] * inv
            if f:
                Mi, Mc = M[i], M[c]
                for j in range(c, n):
                    Mi[j] -= f * Mc[j]
    return result.numerator if result.denominator == 1 else result


def _bareiss(A) -> int:
    n = len(A)
    M = [list(r) for r in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            p = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if p is None:
                return 0
            M[k], M[p] = M[p], M[k]
            sign = -sign
        piv = M[k][k]
        for i in range(k + 1, n):
            Mi, Mk = M[i], M[k]
            a = Mi[k]
            for j in range(k + 1, n):
                Mi[j] = (Mi[j] * piv - a * Mk[j]) // prev
        prev = piv
    return sign * M[n - 1][n - 1]


def inverse_q(A) -> RatMatrix:
    n = len(A)
    M = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(A)]
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            raise SingularMatrix("matrix is singular")
        M[c], M[p] = M[p], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return RatMatrix([r[n:] for r in M])


def inverse_z(A) -> IntMatrix:
    """Inverse of a unimodular integer matrix."""
    inv = inverse_q(A)
    if not inv.is_integral():
        raise ValueError("matrix is not unimodular")
    return inv.to_int()


def is_unimodular(A) -> bool:
    if len(A) != len(A[0]):
        return False
    if not all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1)
               for r in A for x in r):
        return False
    return det(A) in (1, -1)


def rank(A) -> int:
    M = [[Fraction(x) for x in r] for r in A]
    rows, cols = len(M), len(M[0]) if M else 0
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        for i in range(r + 1, rows):
            if M[i][c]:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
        if r == rows:
            break
    return r


def mod_n(A, N: int) -> IntMatrix:
    """Entrywise reduction into [0, N)."""
    if N < 1:
        raise ValueError("modulus must be positive")
    return IntMatrix([[x % N for x in r] for r in A])


# ---------------------------------------------------------------------------
# Hermite and Smith normal forms

def hnf(A) -> tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form: returns (H, U) with U unimodular and U·A = H.

    Pivots are positive and the entries above each pivot lie in [0, pivot).
    Zero rows collect at the bottom. Pivot choice is smallest absolute value,
    which keeps intermediate entries small.
    """
    H = [list(r) for r in A]
    m, n = len(H), len(H[0])
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(H[i][c]), i))
            H[r], H[p] = H[p], H[r]
            U[r], U[p] = U[p], U[r]
            clean = True
            piv = H[r][c]
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // piv
                    _row_axpy(H, i, r, -q)
                    _row_axpy(U, i, r, -q)
                    if H[i][c]:
                        clean = False
            if clean:
                break
        if r == m or H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        piv = H[r][c]
        for i in range(r):
            q = H[i][c] // piv
            if q:
                _row_axpy(H, i, r, -q)
                _row_axpy(U, i, r, -q)
        r += 1
    return IntMatrix(H), IntMatrix(U)


def _row_axpy(M, i, j, q):
    """row_i += q * row_j"""
    Mi, Mj = M[i], M[j]
    for k in range(len(Mi)):
        if Mj[k]:
            Mi[k] += q * Mj[k]


def _col_axpy(M, i, j, q):
    """col_i += q * col_j"""
    for row in M:
        if row[j]:
            row[i] += q * row[j]


@dataclass(frozen=True)
class SnfResult:
    S: IntMatrix
    U: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.S[i][i] for i in range(min(self.S.nrows, self.S.ncols)))


def snf(A) -> SnfResult:
    """Smith normal form with transforms: U·A·V = S, d_1 | d_2 | ... ."""
    S = [list(r) for r in A]
    m, n = len(S), len(S[0])
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (S, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    for t in range(min(m, n)):
        entries = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            piv = S[t][t]
            for i in range(t + 1, m):
                if S[i][t]:
                    q = S[i][t] // piv
                    _row_axpy(S, i, t, -q)
                    _row_axpy(U, i, t, -q)
            for j in range(t + 1, n):
                if S[t][j]:
                    q = S[t][j] // piv
                    _col_axpy(S, j, t, -q)
                    _col_axpy(V, j, t, -q)
            rest = [(abs(S[i][t]), i, t) for i in range(t + 1, m) if S[i][t]]
            rest += [(abs(S[t][j]), t, j) for j in range(t + 1, n) if S[t][j]]
            if rest:
                _, i0, j0 = min(rest)
                if i0 != t:
                    swap_rows(t, i0)
                else:
                    swap_cols(t, j0)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % piv), None)
            if bad is None:
                break
            _row_axpy(S, t, bad[0], 1)
            _row_axpy(U, t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return SnfResult(IntMatrix(S), IntMatrix(U), IntMatrix(V))


def invariant_factors(A) -> tuple[int, ...]:
    """Nonzero Smith invariants of A, without transforms."""
    if not A or not A[0]:
        return ()
    # Row HNF first shrinks wide/tall stacks to a square-ish core cheaply.
    M = A
    if len(A) > len(A[0]):
        M = hnf(A)[0]
        M = [r for r in M if any(r)]
    else:
        M = hnf(transpose(A))[0]
        M = [r for r in M if any(r)]
    if not M:
        return ()
    S = [list(r) for r in M]
    m, n = len(S), len(S[0])
    out = []
    for t in range(min(m, n)):
        entries = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        S[t], S[i0] = S[i0], S[t]
        for row in S:
            row[t], row[j0] = row[j0], row[t]
        while True:
            piv = S[t][t]
            for i in range(t + 1, m):
                if S[i][t]:
                    _row_axpy(S, i, t, -(S[i][t] // piv))
            for j in range(t + 1, n):
                if S[t][j]:
                    _col_axpy(S, j, t, -(S[t][j] // piv))
            rest = [(abs(S[i][t]), i, t) for i in range(t + 1, m) if S[i][t]]
            rest += [(abs(S[t][j]), t, j) for j in range(t + 1, n) if S[t][j]]
            if rest:
                _, i0, j0 = min(rest)
                if i0 != t:
                    S[t], S[i0] = S[i0], S[t]
                else:
                    for row in S:
                        row[t], row[j0] = row[j0], row[t]
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % piv), None)
            if bad is None:
                break
            _row_axpy(S, t, bad[0], 1)
        out.append(abs(S[t][t]))
    return tuple(out)


def integer_kernel(A) -> list[tuple[int, ...]]:
    """Z-basis of {x : A·x = 0}, HNF-reduced so the output is canonical."""
    n = len(A[0])
    H, U = hnf(transpose(A))
    basis = [U[i] for i in range(n) if not any(H[i])]
    if not basis:
        return []
    K, _ = hnf(basis)
    return [tuple(r) for r in K if any(r)]


def rational_kernel(A) -> list[tuple[Fraction, ...]]:
    """Q-basis of {x : A·x = 0} from reduced row echelon form."""
    M = [[Fraction(x) for x in r] for r in A]
    rows, cols = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][f]
        basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------------------
# quadratic forms: reduction and short vectors

def leading_minors_positive(F) -> bool:
    n = len(F)
    return all(det([row[:k] for row in F[:k]]) > 0 for k in range(1, n + 1))


def _check_form(F):
    n = len(F)
    if any(len(r) != n for r in F):
        raise NotPositiveDefinite("form is not square")
    if any(F[i][j] != F[j][i] for i in range(n) for j in range(i)):
        raise NotPositiveDefinite("form is not symmetric")
    if not leading_minors_positive(F):
        raise NotPositiveDefinite("form is not positive definite")


def _round_nearest(x: Fraction) -> int:
    """Nearest integer, ties toward zero (so |mu| = 1/2 is left alone)."""
    if abs(x) <= Fraction(1, 2):
        return 0
    return math.floor(x + Fraction(1, 2))


def lll_gram(F, delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """LLL on a Gram matrix. Returns T (columns = new basis) with T^t F T reduced."""
    n = len(F)
    B = [[int(i == j) for j in range(n)] for i in range(n)]  # row k = coords of b_k

    def gso():
        G = [[_gram_entry(F, B[i], B[j]) for j in range(n)] for i in range(n)]
        mu = [[Fraction(0)] * n for _ in range(n)]
        bs = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = G[i][j] - sum(mu[j][k] * mu[i][k] * bs[k] for k in range(j))
                mu[i][j] = s / bs[j]
            bs[i] = G[i][i] - sum(mu[i][k] ** 2 * bs[k] for k in range(i))
        return mu, bs

    mu, bs = gso()
    k = 1
    while k < n:
        changed = False
        for j in range(k - 1, -1, -1):
            q = _round_nearest(mu[k][j])
            if q:
                B[k] = [a - q * b for a, b in zip(B[k], B[j])]
                for i in range(j + 1):
                    mu[k][i] -= q * (mu[j][i] if i < j else 1)
                changed = True
        if changed:
            mu, bs = gso()
        if bs[k] >= (delta - mu[k][k - 1] ** 2) * bs[k - 1]:
            k += 1
        else:
            B[k], B[k - 1] = B[k - 1], B[k]
            mu, bs = gso()
            k = max(k - 1, 1)
    return [list(c) for c in zip(*B)]


def _gram_entry(F, x, y):
    return sum(x[i] * F[i][j] * y[j] for i in range(len(x)) for j in range(len(y)) if x[i] and y[j])


def gram_reduce(F) -> tuple[IntMatrix | RatMatrix, IntMatrix]:
    """LLL-reduce a positive definite Gram matrix: returns (F', T) with T^t·F·T = F'."""
    _check_form(F)
    T = lll_gram(F)
    Fp = mat_mul(mat_mul(transpose(T), F), T)
    return as_matrix(normalize_entries(Fp)), IntMatrix(T)


def lll_reduce(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """LLL-reduce a list of linearly independent integer row vectors."""
    if not rows:
        return []
    G = [[sum(a * b for a, b in zip(u, v)) for v in rows] for u in rows]
    T = lll_gram(G)
    k = len(rows)
    dim = len(rows[0])
    return [tuple(sum(T[i][c] * rows[i][j] for i in range(k)) for j in range(dim))
            for c in range(k)]


def _fincke_pohst_q(F):
    n = len(F)
    Q = [[Fraction(x) for x in r] for r in F]
    for i in range(n):
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] -= Q[k][i] * Q[i][l]
    return Q


def short_vectors(F, bound, min_norm=1) -> list[tuple[int, tuple[int, ...]]]:
    """All x in Z^n with min_norm <= x^t F x <= bound, as (norm, x) pairs.

    Both x and -x are returned. F must be positive definite.
    """
    n = len(F)
    Q = _fincke_pohst_q(F)
    bound = Fraction(bound)
    out = []
    x = [0] * n

    def rec(i, remaining):
        c = sum((Q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        q = Q[i][i]
        r = remaining / q
        s = math.sqrt(float(r)) if r > 0 else 0.0
        lo = math.floor(float(-c) - s) - 1
        hi = math.ceil(float(-c) + s) + 1
        for v in range(lo, hi + 1):
            t = q * (v + c) ** 2
            if t > remaining:
                continue
            x[i] = v
            if i == 0:
                if any(x):
                    norm = bound - (remaining - t)
                    if norm >= min_norm:
                        out.append((int(norm), tuple(x)))
            else:
                rec(i - 1, remaining - t)
        x[i] = 0

    rec(n - 1, bound)
    return out


# ---------------------------------------------------------------------------
# JSON encoding shared repo-wide

def matrix_to_json(A) -> dict:
    data = []
    for r in A:
        row = []
        for x in r:
            x = Fraction(x)
            row.append(x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}")
        data.append(row)
    return {"rows": len(A), "cols": len(A[0]), "data": data}


def matrix_from_json(obj) -> IntMatrix | RatMatrix:
    try:
        data = obj["data"]
        r, c = int(obj["rows"]), int(obj["cols"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from None
    if len(data) != r or any(len(row) != c for row in data):
        raise ValueError("matrix JSON shape does not match rows/cols")
    if any(isinstance(x, float) for row in data for x in row):
        raise ValueError("matrix JSON entries must be integers or 'num/den' strings")
    return as_matrix([[Fraction(x) if isinstance(x, str) else x for x in row] for row in data])
