"""Algebraic tori as finite groups acting on their character lattice.

A torus of dimension d splitting over a Galois extension with group Γ is
recorded by the image of Γ in GL_d(Z) acting on X(T) = Z^d. The image is
the Galois group of the splitting field, so the splitting degree is its
order. Operations that relate two tori over the same Γ (Hom modules,
isomorphism, isogeny) need the two images identified: the i-th generator
of one presentation corresponds to the i-th generator of the other.

Stored lattice: characters. ``dual_torus`` passes to cocharacters by
replacing every matrix with its transpose-inverse.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .conjtest import (
    CONJUGATE,
    NOT_CONJUGATE,
    UNKNOWN,
    ConjugacyCertificate,
    _prime_divisors,
    has_invertible_mod_p,
    integral_intertwiners,
)
from .errors import MismatchedGroups, NotASubgroup, NotFinite, NotFiniteWithinBound, SerreBoundViolation
from .exact import IntMatrix, block_diag, det, identity, inverse_z, mat_mul, normalize_entries, trace, transpose
from .matgroup import MatrixGroup, closure, group_from_json, group_to_json

DEFAULT_HEIGHT = 5


@dataclass
class TorusPresentation:
    dim: int
    galois: MatrixGroup
    label: str = ""

    @property
    def splitting_degree(self) -> int:
        return self.galois.order()

    @property
    def generators(self) -> tuple:
        return self.galois.generators

    def canonical(self) -> tuple:
        return (self.dim, tuple(tuple(g) for g in self.galois.generators), self.label)

    def __eq__(self, other):
        if not isinstance(other, TorusPresentation):
            return NotImplemented
        return self.canonical() == other.canonical()

    def to_json(self) -> dict:
        return {"dimension": self.dim, "galois": group_to_json(self.galois), "label": self.label}

    @classmethod
    def from_json(cls, obj) -> "TorusPresentation":
        try:
            G = group_from_json(obj["galois"])
            d = int(obj.get("dimension", G.dimension))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed torus JSON: {exc}") from None
        if d != G.dimension:
            raise ValueError("torus dimension does not match its Galois group")
        return make_torus(G, obj.get("label", ""))


@dataclass
class HomModule:
    """Z-basis of {φ : ρ2(γ)·φ = φ·ρ1(γ)}; each φ is a d2 x d1 integer matrix."""

    basis: list
    d1: int
    d2: int

    @property
    def rank(self) -> int:
        return len(self.basis)

    def to_json(self) -> dict:
        from .exact import matrix_to_json

        return {"rank": self.rank, "rows": self.d2, "cols": self.d1,
                "basis": [matrix_to_json(b) for b in self.basis]}


@dataclass
class TorsionRep:
    N: int
    images: list
    image_order: int


@dataclass
class SerreReport:
    dimension: int
    modulus: int
    splitting_degree: int
    image_order: int
    kernel: list
    gl_order: int
    bound: int
    passed: bool
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "modulus": self.modulus,
            "splitting_degree": self.splitting_degree,
            "image_order": self.image_order,
            "kernel": [[list(r) for r in k] for k in self.kernel],
            "gl_order": self.gl_order,
            "bound": self.bound,
            "passed": self.passed,
            "checks": self.checks,
        }


# ---------------------------------------------------------------------------
# constructors

def make_torus(G: MatrixGroup, label: str = "") -> TorusPresentation:
    if not G.is_integral():
        raise ValueError("the Galois action on a character lattice must be integral")
    try:
        G.elements()
    except NotFiniteWithinBound as exc:
        raise NotFinite(f"acting group is not finite within {exc.cap} elements") from None
    if G.ring != "Z":
        G = G.as_ring("Z")
    return TorusPresentation(G.dimension, G, label)


def split_torus(d: int = 1) -> TorusPresentation:
    return make_torus(MatrixGroup([], dimension=d, label="trivial"))


def dual_torus(T: TorusPresentation) -> TorusPresentation:
    gens = [normalize_entries(transpose(inverse_z(g))) for g in T.galois.generators]
    G = MatrixGroup(gens, ring="Z", label=T.galois.label, dimension=T.dim)
    return TorusPresentation(T.dim, G, T.label)


def product(T1: TorusPresentation, T2: TorusPresentation) -> TorusPresentation:
    """Block-diagonal sum of character lattices.

    With equal non-empty labels and generator lists of equal length the two
    tori are taken over one Galois group and generators are paired;
    otherwise the acting group is the direct product.
    """
    g1, g2 = T1.galois.generators, T2.galois.generators
    d = T1.dim + T2.dim
    if T1.label and T1.label == T2.label and len(g1) == len(g2):
        gens = [block_diag(a, b) for a, b in zip(g1, g2)]
        label = T1.label
    else:
        gens = [block_diag(a, identity(T2.dim)) for a in g1]
        gens += [block_diag(identity(T1.dim), b) for b in g2]
        label = " x ".join(x for x in (T1.label, T2.label) if x)
    return make_torus(MatrixGroup(gens, dimension=d), label)


def weil_restriction(perms, n: int | None = None, label: str = "") -> TorusPresentation:
    """Torus whose character lattice is the permutation lattice Z^n.

    ``perms`` are permutations of range(n) as image lists; the matrix of σ
    sends e_i to e_σ(i).
    """
    perms = [tuple(p) for p in perms]
    if n is None:
        if not perms:
            raise ValueError("n required for an empty permutation list")
        n = len(perms[0])
    gens = []
    for p in perms:
        if sorted(p) != list(range(n)):
            raise ValueError(f"not a permutation of {n} points: {p}")
        P = [[0] * n for _ in range(n)]
        for i, j in enumerate(p):
            P[j][i] = 1
        gens.append(IntMatrix(P))
    return make_torus(MatrixGroup(gens, dimension=n), label)


# ---------------------------------------------------------------------------
# matched groups

def _paired_elements(T1: TorusPresentation, T2: TorusPresentation) -> list[tuple]:
    """Pairs (ρ1(γ), ρ2(γ)) over the common group Γ generated by paired generators.

    The matching must define a homomorphism from one image onto the other,
    i.e. Γ projects bijectively to at least one side; the other side may be a
    quotient (a representation of Γ with kernel, such as the trivial action).
    """
    g1, g2 = T1.galois.generators, T2.galois.generators
    if len(g1) != len(g2):
        raise MismatchedGroups(f"generating sets of sizes {len(g1)} and {len(g2)}")
    n1, n2 = T1.dim, T2.dim
    pairs = [block_diag(a, b) for a, b in zip(g1, g2)]
    P = closure(pairs, dimension=n1 + n2) if pairs else {tuple(identity(n1 + n2))}
    if len(P) not in (T1.galois.order(), T2.galois.order()):
        raise MismatchedGroups("generator correspondence does not define a homomorphism")
    out = []
    for m in P:
        a = tuple(tuple(r[:n1]) for r in m[:n1])
        b = tuple(tuple(r[n1:]) for r in m[n1:])
        out.append((a, b))
    out.sort()
    return out


def _hom_from_pairs(pairs, d1, d2) -> HomModule:
    # integral_intertwiners solves X·g = h·X with X of shape d2 x d1
    basis_vecs = integral_intertwiners(pairs, d1, d2)
    basis = [IntMatrix(tuple(tuple(v[a * d1:(a + 1) * d1]) for a in range(d2))) for v in basis_vecs]
    return HomModule(basis, d1, d2)


def hom_module(T1: TorusPresentation, T2: TorusPresentation) -> HomModule:
    """Equivariant maps φ: X(T1) -> X(T2), i.e. ρ2(γ)·φ = φ·ρ1(γ)."""
    g1, g2 = T1.galois.generators, T2.galois.generators
    if len(g1) != len(g2):
        raise MismatchedGroups(f"generating sets of sizes {len(g1)} and {len(g2)}")
    _paired_elements(T1, T2)
    return _hom_from_pairs(list(zip(g1, g2)), T1.dim, T2.dim)


def homs_fixed_by(T1: TorusPresentation, T2: TorusPresentation, H) -> HomModule:
    """Maps equivariant for the subgroup H only (base change to the fixed field of H).

    H is a MatrixGroup or a list of matrices inside T1's Galois image; its
    action on X(T2) is read off through the generator matching.
    """
    pairs = _paired_elements(T1, T2)
    lookup = dict(pairs)
    hgens = H.generators if isinstance(H, MatrixGroup) else H
    chosen = []
    for h in hgens:
        h = normalize_entries(h)
        if h not in lookup:
            raise NotASubgroup("element outside the Galois image of the first torus")
        chosen.append((h, lookup[h]))
    return _hom_from_pairs(chosen, T1.dim, T2.dim)


def character_inner_product(T1: TorusPresentation, T2: TorusPresentation) -> Fraction:
    """(1/|Γ|) Σ χ1(γ) χ2(γ) over the matched group."""
    pairs = _paired_elements(T1, T2)
    return Fraction(sum(trace(a) * trace(b) for a, b in pairs), len(pairs))


# ---------------------------------------------------------------------------
# isomorphism and isogeny

def is_isomorphic(T1: TorusPresentation, T2: TorusPresentation,
                  search_bound: int = DEFAULT_HEIGHT) -> ConjugacyCertificate:
    """Look for U in GL_d(Z) with U·ρ1(γ)·U^{-1} = ρ2(γ) for every γ.

    Non-isomorphism is proved by a character mismatch or by the absence of an
    invertible equivariant map modulo a prime dividing |Γ|. Otherwise integer
    combinations of the Hom basis with coefficients up to ``search_bound`` in
    absolute value are tried; running out gives ``unknown``.
    """
    if T1.dim != T2.dim:
        return ConjugacyCertificate(NOT_CONJUGATE, reason="dimension")
    pairs = _paired_elements(T1, T2)
    if any(trace(a) != trace(b) for a, b in pairs):
        return ConjugacyCertificate(NOT_CONJUGATE, reason="character")
    n = T1.dim
    if T1.generators == T2.generators:
        return ConjugacyCertificate(CONJUGATE, identity(n))
    hom = hom_module(T1, T2)
    vecs = [tuple(x for r in b for x in r) for b in hom.basis]
    for p in _prime_divisors(len(pairs)):
        if not has_invertible_mod_p(vecs, n, p):
            return ConjugacyCertificate(NOT_CONJUGATE, reason=f"local_obstruction_mod_{p}")
    k = len(vecs)
    for height in range(0, search_bound + 1):
        values = sorted(range(-height, height + 1), key=lambda c: (abs(c), -c))
        for coeffs in itertools.product(values, repeat=k):
            if max(map(abs, coeffs), default=0) != height:
                continue
            X = tuple(tuple(sum(c * hom.basis[i][a][b] for i, c in enumerate(coeffs))
                            for b in range(n)) for a in range(n))
            if det(X) in (1, -1):
                return ConjugacyCertificate(CONJUGATE, IntMatrix(X))
    return ConjugacyCertificate(UNKNOWN, bound=search_bound)


def is_isogenous(T1: TorusPresentation, T2: TorusPresentation) -> bool:
    """Equal characters on the matched group, i.e. equivalent rational representations."""
    if T1.dim != T2.dim:
        return False
    return all(trace(a) == trace(b) for a, b in _paired_elements(T1, T2))


# ---------------------------------------------------------------------------
# torsion points and splitting-degree bounds

def gl_order_mod_n(d: int, N: int) -> int:
    """#GL_d(Z/N), multiplicative over the prime powers dividing N."""
    if d < 1 or N < 1:
        raise ValueError("need d >= 1 and N >= 1")
    out = 1
    for p in _prime_divisors(N):
        k = 0
        m = N
        while m % p == 0:
            m //= p
            k += 1
        q = p ** d
        local = p ** ((k - 1) * d * d)
        for i in range(d):
            local *= q - p ** i
        out *= local
    return out


def torsion_rep(T: TorusPresentation, N: int) -> TorsionRep:
    """Action of the Galois group on T[N], i.e. the generators reduced mod N."""
    if N < 2:
        raise ValueError("modulus must be at least 2")
    images = [tuple(tuple(x % N for x in r) for r in g) for g in T.galois.generators]
    d = T.dim
    one = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    seen = {one}
    frontier = [one]
    while frontier:
        nxt = []
        for x in frontier:
            for s in images:
                y = tuple(tuple(v % N for v in r) for r in mat_mul(x, s))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return TorsionRep(N, [IntMatrix(g) for g in images], len(seen))


def serre_bound_check(T: TorusPresentation, N: int) -> SerreReport:
    """Check the reduction-mod-N bounds on the splitting degree of T.

    N >= 3: reduction is injective on the Galois image and the degree divides
    #GL_d(Z/N). N = 2: the kernel K consists of commuting involutions, so
    |K| <= 2^d and the degree divides |K|·#GL_d(F_2). Two stronger mod-2
    statements, K inside {±I} and the degree dividing 2·#GL_d(F_2), are
    evaluated and reported in ``checks`` without being enforced:
    ⟨diag(-1, 1)⟩ and the order-8 square-lattice group violate them.
    Raises SerreBoundViolation with a witness when an enforced check fails.
    """
    if N < 2:
        raise ValueError("modulus must be at least 2")
    d = T.dim
    G = T.galois
    order = G.order()
    rep = torsion_rep(T, N)
    one = G.identity
    minus = tuple(tuple(-int(i == j) for j in range(d)) for i in range(d))
    kernel = [g for g in G.elements()
              if g != one and all((x - int(i == j)) % N == 0 for i, r in enumerate(g) for j, x in enumerate(r))]
    glo = gl_order_mod_n(d, N)
    checks = {}
    if N >= 3:
        bound = glo
        checks["injective"] = not kernel and rep.image_order == order
        checks["divides"] = bound % order == 0
        if not checks["injective"]:
            raise SerreBoundViolation(f"reduction mod {N} not injective", kernel[:1])
        if not checks["divides"]:
            raise SerreBoundViolation(f"splitting degree {order} does not divide {bound}", order)
    else:
        bound = 2 * glo
        k = len(kernel) + 1
        checks["kernel_in_pm_identity"] = all(g == minus for g in kernel)
        checks["divides"] = bound % order == 0
        checks["kernel_elementary_abelian"] = all(
            mat_mul(g, g) == one and mat_mul(g, h) == mat_mul(h, g) for g in kernel for h in kernel)
        checks["kernel_order_at_most_2^d"] = k <= 2 ** d
        checks["divides_kernel_times_gl"] = (k * glo) % order == 0 and k * rep.image_order == order
        if not checks["kernel_elementary_abelian"]:
            raise SerreBoundViolation("kernel of reduction mod 2 is not elementary abelian", kernel)
        if not checks["kernel_order_at_most_2^d"]:
            raise SerreBoundViolation(f"kernel of reduction mod 2 has order {k} > 2^{d}", kernel)
        if not checks["divides_kernel_times_gl"]:
            raise SerreBoundViolation(f"splitting degree {order} does not divide {k}·{glo}", order)
    return SerreReport(d, N, order, rep.image_order, [IntMatrix(k) for k in kernel], glo, bound,
                       True, checks)
