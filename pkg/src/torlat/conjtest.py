"""Conjugacy of finite matrix groups in GL_d(Z) and GL_d(Q).

Z-conjugacy runs in three stages:

1. cheap invariants (order, character fingerprint, Smith forms of g - I,
   coinvariant modules of the group and its dual);
2. when the groups are absolutely irreducible (one-dimensional space of
   invariant forms) a complete isometry search between the primitive reduced
   invariant forms, with each isometry checked for group transport;
3. otherwise, for every isomorphism compatible with traces and the Smith
   forms of g - I (up to inner automorphisms of the target), the lattice of
   integral intertwiners is tested for a unimodular element: first locally
   modulo each prime dividing |G|, then globally by enumerating short
   intertwiners of an LLL-reduced basis.

A ``NotConjugate`` verdict always names the invariant or exhausted complete
search that proves it. ``Unknown`` only comes from stage 3 running past its
norm bound after every local test passed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd

from .errors import DimensionMismatch
from .exact import (
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
    lll_reduce,
    mat_mul,
    mat_sub,
    matrix_from_json,
    matrix_to_json,
    normalize_entries,
    rational_kernel,
    short_vectors,
    trace,
    transpose,
)
from .matgroup import MatrixGroup, element_order, generating_subset

CONJUGATE = "conjugate"
NOT_CONJUGATE = "not_conjugate"
UNKNOWN = "unknown"

DEFAULT_SEARCH_BOUND = 96


@dataclass(frozen=True)
class ConjugacyCertificate:
    """Outcome of a conjugacy test.

    For ``conjugate`` the witness U satisfies U·G1·U^{-1} = G2. For
    ``not_conjugate`` the ``reason`` names the discriminating invariant.
    """

    verdict: str
    witness: IntMatrix | RatMatrix | None = None
    reason: str = ""
    bound: int | None = None

    @property
    def is_conjugate(self) -> bool:
        return self.verdict == CONJUGATE

    def to_json(self) -> dict:
        if self.verdict == CONJUGATE:
            w = matrix_to_json(self.witness)
        elif self.verdict == UNKNOWN:
            w = f"search bound {self.bound} exhausted"
        else:
            w = self.reason
        return {"verdict": self.verdict, "witness": w}

    @classmethod
    def from_json(cls, obj) -> "ConjugacyCertificate":
        v = obj["verdict"]
        if v == CONJUGATE:
            return cls(v, matrix_from_json(obj["witness"]))
        if v == NOT_CONJUGATE:
            return cls(v, reason=obj["witness"])
        if v == UNKNOWN:
            return cls(v, reason=obj["witness"])
        raise ValueError(f"unknown verdict {v!r}")


# ---------------------------------------------------------------------------
# invariant forms

def invariant_form(G: MatrixGroup) -> IntMatrix | RatMatrix:
    """F = sum over g of g^t g; symmetric, positive definite, G-invariant."""
    n = G.dimension
    F = [[0] * n for _ in range(n)]
    for g in G.elements():
        for i in range(n):
            for j in range(i, n):
                s = sum(g[k][i] * g[k][j] for k in range(n))
                F[i][j] += s
    for i in range(n):
        for j in range(i):
            F[i][j] = F[j][i]
    return as_matrix(normalize_entries(F))


def is_invariant_form(G: MatrixGroup, F) -> bool:
    return all(mat_mul(mat_mul(transpose(g), F), g) == tuple(map(tuple, F)) for g in G.generators)


def formspace_dimension(G: MatrixGroup) -> int:
    """Dimension over Q of the space of G-invariant symmetric bilinear forms."""
    n = G.dimension
    idx = {}
    for i in range(n):
        for j in range(i, n):
            idx[(i, j)] = len(idx)

    def var(i, j):
        return idx[(min(i, j), max(i, j))]

    rows = []
    for g in G.generators:
        # (g^t F g)[a][b] - F[a][b] = sum_{i,j} g[i][a] F[i][j] g[j][b] - F[a][b]
        for a in range(n):
            for b in range(a, n):
                row = [Fraction(0)] * len(idx)
                for i in range(n):
                    for j in range(n):
                        c = g[i][a] * g[j][b]
                        if c:
                            row[var(i, j)] += c
                row[var(a, b)] -= 1
                rows.append(row)
    if not rows:
        return len(idx)
    return len(rational_kernel(rows))


def primitive(F) -> tuple:
    g = reduce(gcd, (abs(x) for r in F for x in r), 0)
    return tuple(tuple(x // g for x in r) for r in F)


def reduced_basis(G: MatrixGroup) -> tuple[MatrixGroup, IntMatrix, tuple]:
    """Conjugate G into a basis where its primitive invariant form is LLL-reduced.

    Returns (T^{-1} G T, T, reduced primitive form).
    """
    F = primitive(invariant_form(G))
    Fr, T = gram_reduce(F)
    return G.conjugate(inverse_q(T)), T, tuple(map(tuple, Fr))


# ---------------------------------------------------------------------------
# isometries of forms

def isometries(F1, F2, limit: int | None = None):
    """Yield integer U with U^t·F2·U = F1 (both positive definite, same size)."""
    n = len(F1)
    if len(F2) != n:
        return
    if det(F1) != det(F2):
        return
    top = max(F1[i][i] for i in range(n))
    by_norm: dict[int, list] = {}
    for norm, v in short_vectors(F2, top):
        by_norm.setdefault(norm, []).append(v)
    for vs in by_norm.values():
        vs.sort()
    cols: list = []
    count = 0

    def ip(u, v):
        return sum(u[i] * F2[i][j] * v[j] for i in range(n) for j in range(n) if u[i] and v[j])

    def rec(i):
        nonlocal count
        if i == n:
            count += 1
            yield IntMatrix(transpose(cols))
            return
        for v in by_norm.get(F1[i][i], ()):
            if all(ip(v, cols[j]) == F1[i][j] for j in range(i)):
                cols.append(v)
                yield from rec(i + 1)
                cols.pop()
                if limit is not None and count >= limit:
                    return

    yield from rec(0)


def automorphism_group(F, label: str = "") -> MatrixGroup:
    """All U in GL_n(Z) with U^t·F·U = F."""
    els = list(isometries(F, F))
    n = len(F)
    G0 = MatrixGroup([], ring="Z", dimension=n, elements=els)
    members, index, mult, _ = G0.table()
    one = index[G0.identity]
    gens = generating_subset(range(len(members)), mult, one)
    return MatrixGroup([members[i] for i in gens], ring="Z", label=label, dimension=n,
                       elements=members)


# ---------------------------------------------------------------------------
# invariants

def _snf_key(g) -> tuple:
    return invariant_factors(mat_sub(g, identity(len(g))))


def snf_profile(G: MatrixGroup) -> tuple:
    """Sorted multiset of Smith invariants of g - I over the elements."""
    return tuple(sorted(_snf_key(g) for g in G.elements()))


def coinvariant_profile(G: MatrixGroup) -> tuple:
    """Smith invariants of the augmentation submodule for G and its dual."""
    n = G.dimension
    out = []
    for H in (G, G.transpose_inverse()):
        cols = []
        for g in H.elements():
            cols.extend(zip(*mat_sub(g, identity(n))))
        if not cols:
            out.append(())
            continue
        out.append(invariant_factors(transpose(cols)))
    return tuple(out)


def element_keys(G: MatrixGroup, with_snf: bool) -> list:
    els = G.elements()
    keys = []
    for g in els:
        t = trace(g)
        k = (element_order(g), t)
        if with_snf:
            k = k + (_snf_key(g),)
        keys.append(k)
    return keys


# ---------------------------------------------------------------------------
# isomorphism enumeration

def _class_reps(G: MatrixGroup) -> set:
    els, index, mult, invs = G.table()
    reps = set()
    for rep, _ in G.conjugacy_classes():
        reps.add(index[rep])
    return reps


def candidate_isomorphisms(G1: MatrixGroup, G2: MatrixGroup, keys1, keys2):
    """Yield (generator indices of G1, their images in G2, full index map).

    Every yielded map is a group isomorphism preserving the element keys.
    Maps are enumerated up to inner automorphisms of G2.
    """
    els1, index1, mult1, _ = G1.table()
    els2, index2, mult2, _ = G2.table()
    if len(els1) != len(els2):
        return
    one1 = index1[G1.identity]
    one2 = index2[G2.identity]
    gens = generating_subset(range(len(els1)), mult1, one1)
    if not gens:
        yield [], [], {one1: one2}
        return
    reps2 = _class_reps(G2)
    cands = []
    for k, g in enumerate(gens):
        c = [j for j in range(len(els2)) if keys2[j] == keys1[g]]
        if k == 0:
            c = [j for j in c if j in reps2]
        if not c:
            return
        cands.append(c)

    def extend(images):
        m = {one1: one2}
        frontier = [one1]
        pairs = list(zip(gens[:len(images)], images))
        while frontier:
            nxt = []
            for x in frontier:
                fx = m[x]
                for g, h in pairs:
                    y = mult1[x][g]
                    z = mult2[fx][h]
                    got = m.get(y)
                    if got is None:
                        if keys1[y] != keys2[z]:
                            return None
                        m[y] = z
                        nxt.append(y)
                    elif got != z:
                        return None
            frontier = nxt
        return m

    images: list[int] = []

    def rec(k):
        if k == len(gens):
            m = extend(images)
            if m is not None and len(m) == len(els1) and len(set(m.values())) == len(els2):
                yield list(gens), list(images), m
            return
        for h in cands[k]:
            images.append(h)
            m = extend(images)
            if m is not None and len(set(m.values())) == len(m):
                yield from rec(k + 1)
            images.pop()

    yield from rec(0)


# ---------------------------------------------------------------------------
# intertwiner lattices

def intertwiner_system(pairs, d1: int, d2: int) -> list[list]:
    """Linear equations on vec(X) (row-major, X is d2 x d1) for X·g = h·X."""
    rows = []
    for g, h in pairs:
        for a in range(d2):
            for c in range(d1):
                row = [0] * (d1 * d2)
                for b in range(d1):
                    row[a * d1 + b] += g[b][c]
                for e in range(d2):
                    row[e * d1 + c] -= h[a][e]
                rows.append(row)
    return rows


def _clear_denominators(rows):
    out = []
    for r in rows:
        den = 1
        for x in r:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
        out.append([int(x * den) for x in r])
    return out


def integral_intertwiners(pairs, d1: int, d2: int) -> list[tuple]:
    """HNF-canonical Z-basis of {X in M_{d2 x d1}(Z) : X·g = h·X for all pairs}."""
    rows = intertwiner_system(pairs, d1, d2)
    if not rows:
        return [tuple(int(i == j) for j in range(d1 * d2)) for i in range(d1 * d2)]
    rows = _clear_denominators(rows)
    if not any(any(r) for r in rows):
        return [tuple(int(i == j) for j in range(d1 * d2)) for i in range(d1 * d2)]
    return integer_kernel(rows)


def _unvec(v, d1: int, d2: int) -> tuple:
    return tuple(tuple(v[a * d1:(a + 1) * d1]) for a in range(d2))


def _rank_mod_p_basis(vectors, p):
    """Echelon basis of the F_p-span of integer vectors."""
    basis = []
    pivots = []
    for v in vectors:
        w = [x % p for x in v]
        for b, c in zip(basis, pivots):
            if w[c]:
                f = w[c]
                w = [(x - f * y) % p for x, y in zip(w, b)]
        c = next((i for i, x in enumerate(w) if x), None)
        if c is None:
            continue
        inv = pow(w[c], -1, p)
        w = [(x * inv) % p for x in w]
        for k, b in enumerate(basis):
            if b[c]:
                f = b[c]
                basis[k] = [(x - f * y) % p for x, y in zip(b, w)]
        basis.append(w)
        pivots.append(c)
    return basis


def has_invertible_mod_p(basis, n: int, p: int) -> bool:
    """Whether some F_p-combination of the n x n matrices in ``basis`` is invertible."""
    red = _rank_mod_p_basis(basis, p)
    if not red:
        return False
    for coeffs in itertools.product(range(p), repeat=len(red)):
        if not any(coeffs):
            continue
        v = [sum(c * b[i] for c, b in zip(coeffs, red)) % p for i in range(n * n)]
        if det(_unvec(v, n, n)) % p:
            return True
    return False


def _prime_divisors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _short_unimodular(basis, n: int, bound: int, lower: int = 0):
    """Unimodular integer combinations of ``basis`` with Frobenius norm^2 in (lower, bound]."""
    G = [[sum(a * b for a, b in zip(u, v)) for v in basis] for u in basis]
    found = []
    for norm, c in short_vectors(G, bound, min_norm=max(lower + 1, n)):
        v = [sum(ci * b[i] for ci, b in zip(c, basis)) for i in range(n * n)]
        X = _unvec(v, n, n)
        if det(X) in (1, -1):
            found.append((norm, X))
    found.sort()
    return [X for _, X in found]


def transports(U, G1: MatrixGroup, G2: MatrixGroup) -> bool:
    """U·g·U^{-1} lies in G2 for every generator g of G1, and |G1| = |G2|."""
    if G1.order() != G2.order():
        return False
    Ui = inverse_q(U)
    S2 = G2.element_set()
    return all(normalize_entries(mat_mul(mat_mul(U, g), Ui)) in S2 for g in G1.generators)


# ---------------------------------------------------------------------------
# Z-conjugacy

def _cheap_rejection(G1: MatrixGroup, G2: MatrixGroup, integral: bool) -> str | None:
    if G1.order() != G2.order():
        return "order"
    if G1.character_fingerprint() != G2.character_fingerprint():
        return "character_fingerprint"
    if integral:
        if snf_profile(G1) != snf_profile(G2):
            return "snf_multiset"
        if coinvariant_profile(G1) != coinvariant_profile(G2):
            return "coinvariants"
    return None


def _check_pair(G1, G2):
    if G1.dimension != G2.dimension:
        raise DimensionMismatch(f"dimensions {G1.dimension} and {G2.dimension}")


def z_conjugacy(G1: MatrixGroup, G2: MatrixGroup,
                search_bound: int = DEFAULT_SEARCH_BOUND) -> ConjugacyCertificate:
    """Decide whether U·G1·U^{-1} = G2 for some U in GL_d(Z)."""
    _check_pair(G1, G2)
    if not (G1.is_integral() and G2.is_integral()):
        raise ValueError("z_conjugacy needs groups of integral matrices")
    n = G1.dimension
    if G1.same_elements(G2):
        return ConjugacyCertificate(CONJUGATE, identity(n))
    why = _cheap_rejection(G1, G2, integral=True)
    if why:
        return ConjugacyCertificate(NOT_CONJUGATE, reason=why)

    R1, T1, F1 = reduced_basis(G1)
    R2, T2, F2 = reduced_basis(G2)

    def lift(W):
        U = mat_mul(mat_mul(T2, W), inverse_q(T1))
        return IntMatrix(normalize_entries(U))

    if formspace_dimension(G1) == 1:
        for W in isometries(F1, F2):
            if transports(W, R1, R2):
                U = lift(W)
                assert transports(U, G1, G2)
                return ConjugacyCertificate(CONJUGATE, U)
        return ConjugacyCertificate(NOT_CONJUGATE, reason="isometry_search_exhausted")

    keys1 = element_keys(R1, with_snf=True)
    keys2 = element_keys(R2, with_snf=True)
    els1 = R1.elements()
    els2 = R2.elements()
    primes = _prime_divisors(G1.order())
    lattices = []
    any_iso = False
    for gens, images, _ in candidate_isomorphisms(R1, R2, keys1, keys2):
        any_iso = True
        pairs = [(els1[g], els2[h]) for g, h in zip(gens, images)]
        basis = integral_intertwiners(pairs, n, n)
        if not basis:
            continue
        if all(has_invertible_mod_p(basis, n, p) for p in primes):
            lattices.append(lll_reduce(basis))
    if not any_iso:
        return ConjugacyCertificate(NOT_CONJUGATE, reason="no_compatible_isomorphism")
    if not lattices:
        return ConjugacyCertificate(NOT_CONJUGATE, reason="local_obstruction")

    lower = 0
    b = n
    while True:
        b = min(search_bound, b)
        for basis in lattices:
            for W in _short_unimodular(basis, n, b, lower):
                if transports(W, R1, R2):
                    U = lift(W)
                    assert transports(U, G1, G2)
                    return ConjugacyCertificate(CONJUGATE, U)
        if b >= search_bound:
            break
        lower = b
        b *= 2
    return ConjugacyCertificate(UNKNOWN, bound=search_bound)


# ---------------------------------------------------------------------------
# Q-conjugacy

def _invertible_combination(basis, n):
    """An invertible matrix in the span of ``basis``, smallest coefficients first."""
    for b in basis:
        X = _unvec(b, n, n)
        if det(X) != 0:
            return X
    # a nonzero polynomial of degree n cannot vanish on all of {-h..h}^k once 2h+1 > n
    for height in range(1, n + 1):
        for coeffs in itertools.product(range(-height, height + 1), repeat=len(basis)):
            if max(map(abs, coeffs)) != height:
                continue
            v = [sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(n * n)]
            X = _unvec(v, n, n)
            if det(X) != 0:
                return X
    raise ArithmeticError("no invertible intertwiner in the span")


def q_conjugacy(G1: MatrixGroup, G2: MatrixGroup) -> ConjugacyCertificate:
    """Decide GL_d(Q)-conjugacy via character-preserving isomorphisms.

    Equal characters under some isomorphism give equivalent rational
    representations, and then an invertible rational intertwiner exists;
    it is found by solving the intertwining equations.
    """
    _check_pair(G1, G2)
    n = G1.dimension
    if G1.same_elements(G2):
        return ConjugacyCertificate(CONJUGATE, identity(n))
    why = _cheap_rejection(G1, G2, integral=False)
    if why:
        return ConjugacyCertificate(NOT_CONJUGATE, reason=why)
    keys1 = element_keys(G1, with_snf=False)
    keys2 = element_keys(G2, with_snf=False)
    els1, els2 = G1.elements(), G2.elements()
    for gens, images, _ in candidate_isomorphisms(G1, G2, keys1, keys2):
        pairs = [(els1[g], els2[h]) for g, h in zip(gens, images)]
        rows = intertwiner_system(pairs, n, n)
        if rows:
            basis = rational_kernel(rows)
            basis = [_primitive_vector(v) for v in basis]
        else:
            basis = [tuple(int(i == j) for j in range(n * n)) for i in range(n * n)]
        X = _invertible_combination(basis, n)
        U = as_matrix(normalize_entries(X))
        if transports(U, G1, G2):
            return ConjugacyCertificate(CONJUGATE, U)
        raise AssertionError("character-matched isomorphism without a transporting intertwiner")
    return ConjugacyCertificate(NOT_CONJUGATE, reason="no_character_preserving_isomorphism")


def _primitive_vector(v) -> tuple:
    den = 1
    for x in v:
        x = Fraction(x)
        den = den * x.denominator // gcd(den, x.denominator)
    w = [int(Fraction(x) * den) for x in v]
    g = reduce(gcd, (abs(x) for x in w), 0) or 1
    return tuple(x // g for x in w)


# ---------------------------------------------------------------------------
# invariant lattices

def invariant_lattice(G: MatrixGroup) -> tuple[RatMatrix, MatrixGroup]:
    """Basis B of the lattice sum_g g·Z^d and the integral group B^{-1}·G·B."""
    n = G.dimension
    cols = []
    for g in G.elements():
        cols.extend(zip(*g))
    den = 1
    for c in cols:
        for x in c:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
    int_cols = [[int(Fraction(x) * den) for x in c] for c in cols]
    H, _ = hnf(int_cols)
    basis_rows = [r for r in H if any(r)]
    B = RatMatrix([[Fraction(basis_rows[j][i], den) for j in range(n)] for i in range(n)])
    Gp = G.conjugate(inverse_q(B), ring="Z")
    return B, Gp
