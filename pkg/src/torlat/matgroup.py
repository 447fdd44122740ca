"""Finite matrix groups over Z and Q.

Group elements are plain tuples of row tuples (ints for ring Z, ints or
Fractions for ring Q) so they hash and compare quickly. Closures are
computed lazily and cached; the order of large groups comes from a
stabilizer chain on the orbits of the standard basis vectors, so nothing
like W(E8) is ever enumerated.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotFiniteWithinBound, OrbitExplosion
from .exact import (
    IntMatrix,
    as_matrix,
    det,
    identity,
    inverse_q,
    mat_mul,
    mat_vec,
    matrix_from_json,
    matrix_to_json,
    normalize_entries,
    trace,
    transpose,
)
from .schreier import StabilizerChain

DEFAULT_CLOSURE_CAP = 10**6
DEFAULT_ORBIT_BOUND = 10**5
ELEMENT_ORDER_CAP = 10**4


def element_order(g, cap: int = ELEMENT_ORDER_CAP) -> int:
    """Multiplicative order of g; raises NotFiniteWithinBound past ``cap``."""
    one = _identity_tuple(len(g))
    x = g
    for k in range(1, cap + 1):
        if x == one:
            return k
        x = mat_mul(x, g)
    raise NotFiniteWithinBound(cap)


def _identity_tuple(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def closure(generators, cap: int = DEFAULT_CLOSURE_CAP, dimension: int | None = None) -> set:
    """All elements of the group generated by ``generators``.

    Raises NotFiniteWithinBound once more than ``cap`` elements appear.
    """
    gens = [normalize_entries(g) for g in generators]
    if dimension is None:
        if not gens:
            raise ValueError("dimension required for an empty generating set")
        dimension = len(gens[0])
    one = _identity_tuple(dimension)
    seen = {one}
    frontier = [one]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = normalize_entries(mat_mul(x, s))
                if y not in seen:
                    seen.add(y)
                    if len(seen) > cap:
                        raise NotFiniteWithinBound(cap)
                    nxt.append(y)
        frontier = nxt
    return seen


@dataclass(frozen=True)
class PermAction:
    """Faithful permutation action on a finite set of lattice vectors."""

    points: tuple
    perms: tuple  # one permutation (tuple of indices) per generator


def perm_action(generators, dimension: int, orbit_bound: int = DEFAULT_ORBIT_BOUND) -> PermAction:
    gens = [normalize_entries(g) for g in generators]
    basis = [tuple(int(i == j) for j in range(dimension)) for i in range(dimension)]
    index = {}
    points = []
    for b in basis:
        if b in index:
            continue
        index[b] = len(points)
        points.append(b)
        k = len(points) - 1
        while k < len(points):
            v = points[k]
            k += 1
            for g in gens:
                w = mat_vec(g, v)
                if w not in index:
                    index[w] = len(points)
                    points.append(w)
                    if len(points) > orbit_bound:
                        raise OrbitExplosion(orbit_bound)
    perms = tuple(tuple(index[mat_vec(g, v)] for v in points) for g in gens)
    return PermAction(tuple(points), perms)


class MatrixGroup:
    """A finite subgroup of GL_d(Z) or GL_d(Q) given by generators.

    ``ring`` is ``"Z"`` or ``"Q"``. Generators are validated to be invertible
    over the ring. Elements, order, classes and the character fingerprint
    are computed on first use and cached.
    """

    def __init__(self, generators: Iterable = (), ring: str = "Z", label: str = "",
                 dimension: int | None = None, *, elements: Iterable | None = None):
        if ring not in ("Z", "Q"):
            raise ValueError(f"ring must be 'Z' or 'Q', not {ring!r}")
        gens = [as_matrix(g) for g in generators]
        if dimension is None:
            if not gens:
                raise ValueError("dimension required for a group with no generators")
            dimension = gens[0].nrows
        for g in gens:
            if g.nrows != dimension or g.ncols != dimension:
                raise DimensionMismatch(f"generator of shape {g.nrows}x{g.ncols} in dimension {dimension}")
            d = det(g)
            if ring == "Z":
                if not isinstance(g, IntMatrix):
                    raise ValueError("ring Z generator with non-integral entries")
                if d not in (1, -1):
                    raise ValueError(f"ring Z generator with determinant {d}")
            elif d == 0:
                raise ValueError("singular generator")
        self.dimension = dimension
        self.ring = ring
        self.label = label
        self.generators: tuple = tuple(gens)
        self._lock = threading.RLock()
        self._elements = None
        self._order = None
        self._classes = None
        self._fingerprint = None
        self._table = None
        if elements is not None:
            self._elements = tuple(sorted(normalize_entries(e) for e in elements))
            self._order = len(self._elements)

    # -- basic structure -------------------------------------------------

    @property
    def identity(self):
        return _identity_tuple(self.dimension)

    def elements(self, cap: int = DEFAULT_CLOSURE_CAP) -> tuple:
        """All elements, sorted."""
        with self._lock:
            if self._elements is None:
                els = closure(self.generators, cap, self.dimension)
                self._elements = tuple(sorted(els))
                self._order = len(els)
            return self._elements

    def element_set(self) -> frozenset:
        return frozenset(self.elements())

    def order(self) -> int:
        with self._lock:
            if self._order is None:
                self._order = order_schreier_sims(self)
            return self._order

    def __len__(self):
        return self.order()

    def __contains__(self, g) -> bool:
        return normalize_entries(g) in self.element_set()

    def __repr__(self):
        lab = f" {self.label!r}" if self.label else ""
        return f"<MatrixGroup{lab} d={self.dimension} ring={self.ring} gens={len(self.generators)}>"

    def same_elements(self, other: "MatrixGroup") -> bool:
        return self.dimension == other.dimension and self.element_set() == other.element_set()

    def is_integral(self) -> bool:
        return all(isinstance(g, IntMatrix) and det(g) in (1, -1) for g in self.generators)

    # -- derived groups ----------------------------------------------------

    def conjugate(self, U, ring: str | None = None) -> "MatrixGroup":
        """The group U·G·U^{-1}."""
        Ui = inverse_q(U)
        new = [normalize_entries(mat_mul(mat_mul(U, g), Ui)) for g in self.generators]
        if ring is None:
            integral = all(isinstance(x, int) for g in new for r in g for x in r)
            ring = "Z" if integral and self.ring == "Z" else "Q"
        els = None
        if self._elements is not None:
            els = [normalize_entries(mat_mul(mat_mul(U, g), Ui)) for g in self._elements]
        return MatrixGroup(new, ring=ring, label=self.label, dimension=self.dimension, elements=els)

    def transpose_inverse(self) -> "MatrixGroup":
        new = [normalize_entries(transpose(inverse_q(g))) for g in self.generators]
        els = None
        if self._elements is not None:
            els = [normalize_entries(transpose(inverse_q(g))) for g in self._elements]
        return MatrixGroup(new, ring=self.ring, label=self.label, dimension=self.dimension, elements=els)

    def as_ring(self, ring: str) -> "MatrixGroup":
        return MatrixGroup(self.generators, ring=ring, label=self.label, dimension=self.dimension,
                           elements=self._elements)

    # -- index machinery used by classes and subgroups --------------------

    def table(self):
        """(elements, index, multiplication table, inverse table)."""
        with self._lock:
            if self._table is None:
                els = self.elements()
                index = {e: i for i, e in enumerate(els)}
                mult = [[index[normalize_entries(mat_mul(a, b))] for b in els] for a in els]
                e = index[self.identity]
                invs = [row.index(e) for row in mult]
                self._table = (els, index, mult, invs)
            return self._table

    def conjugacy_classes(self) -> list[tuple[tuple, int]]:
        with self._lock:
            if self._classes is None:
                self._classes = conjugacy_classes(self)
            return self._classes

    def character_fingerprint(self) -> tuple:
        with self._lock:
            if self._fingerprint is None:
                self._fingerprint = character_fingerprint(self)
            return self._fingerprint

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return group_to_json(self)


def order_schreier_sims(G: MatrixGroup, orbit_bound: int = DEFAULT_ORBIT_BOUND) -> int:
    """Group order from a stabilizer chain on the basis-vector orbits."""
    if not G.generators:
        return 1
    act = perm_action(G.generators, G.dimension, orbit_bound)
    return StabilizerChain(act.perms, len(act.points)).order()


def conjugacy_classes(G: MatrixGroup) -> list[tuple[tuple, int]]:
    """(representative, class size) pairs; the representative is the least element."""
    els, index, mult, invs = G.table()
    gens = [index[normalize_entries(g)] for g in G.generators]
    seen = [False] * len(els)
    out = []
    for i in range(len(els)):
        if seen[i]:
            continue
        orbit = [i]
        seen[i] = True
        k = 0
        while k < len(orbit):
            x = orbit[k]
            k += 1
            for s in gens:
                y = mult[mult[s][x]][invs[s]]
                if not seen[y]:
                    seen[y] = True
                    orbit.append(y)
        out.append((els[min(orbit)], len(orbit)))
    return out


def character_fingerprint(G: MatrixGroup) -> tuple:
    """Sorted multiset of (trace, element order, class size) over the classes."""
    items = []
    for rep, size in G.conjugacy_classes():
        t = trace(rep)
        if isinstance(t, Fraction) and t.denominator == 1:
            t = t.numerator
        items.append((t, element_order(rep), size))
    return tuple(sorted(items))


def generating_subset(members: Sequence[int], mult, one: int) -> list[int]:
    """Greedy generating set: scan indices in order, keep what is not yet generated."""
    gens: list[int] = []
    current = {one}
    for i in sorted(members):
        if i not in current:
            gens.append(i)
            current = close_indices(gens, mult, one)
    return gens


def close_indices(gens, mult, one: int) -> set:
    """Closure of element indices under a multiplication table."""
    seen = {one}
    frontier = [one]
    while frontier:
        nxt = []
        for x in frontier:
            row = mult[x]
            for s in gens:
                y = row[s]
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def all_subgroups(G: MatrixGroup) -> list[MatrixGroup]:
    """Every subgroup of G exactly once, grown from cyclic subgroups.

    Subgroups come back sorted by (order, sorted element list) with a greedy
    generating set and their element list cached.
    """
    els, index, mult, invs = G.table()
    n = len(els)
    one = index[G.identity]

    def mask_of(s):
        m = 0
        for i in s:
            m |= 1 << i
        return m

    cyclic = {}
    for i in range(n):
        m = mask_of(close_indices([i], mult, one))
        cyclic.setdefault(m, i)
    cyclic_items = sorted(cyclic.items(), key=lambda kv: (bin(kv[0]).count("1"), kv[1]))
    found = {mask_of([one]): []}
    queue = [(mask_of([one]), [])]
    for m, g in cyclic_items:
        if m not in found:
            found[m] = [g]
            queue.append((m, [g]))
    k = 0
    while k < len(queue):
        m, gens = queue[k]
        k += 1
        for cm, c in cyclic_items:
            if cm & ~m == 0:
                continue
            new_gens = gens + [c]
            joined = mask_of(close_indices(new_gens, mult, one))
            if joined not in found:
                found[joined] = new_gens
                queue.append((joined, new_gens))
    out = []
    for m in found:
        members = [i for i in range(n) if m >> i & 1]
        gens = generating_subset(members, mult, one)
        out.append(MatrixGroup([els[i] for i in gens], ring=G.ring, dimension=G.dimension,
                               elements=[els[i] for i in members]))
    out.sort(key=lambda H: (H.order(), H.elements()))
    return out


def is_faithful_reduction(G: MatrixGroup, N: int) -> tuple[bool, list]:
    """Whether g -> g mod N is injective on G; returns (flag, kernel minus identity)."""
    if N < 2:
        raise ValueError("modulus must be at least 2")
    if G.ring != "Z" and not G.is_integral():
        raise ValueError("reduction mod N needs an integral group")
    one = G.identity
    kernel = [g for g in G.elements()
              if g != one and all((x - int(i == j)) % N == 0 for i, r in enumerate(g) for j, x in enumerate(r))]
    return (not kernel, kernel)


def direct_product(G: MatrixGroup, H: MatrixGroup, label: str = "") -> MatrixGroup:
    """Block-diagonal G x H."""
    from .exact import block_diag

    gens = [block_diag(g, identity(H.dimension)) for g in G.generators]
    gens += [block_diag(identity(G.dimension), h) for h in H.generators]
    ring = "Z" if G.ring == H.ring == "Z" else "Q"
    return MatrixGroup(gens, ring=ring, label=label, dimension=G.dimension + H.dimension)


# ---------------------------------------------------------------------------
# JSON

def group_to_json(G: MatrixGroup) -> dict:
    return {
        "dimension": G.dimension,
        "ring": G.ring,
        "label": G.label,
        "generators": [matrix_to_json(g) for g in G.generators],
    }


def group_from_json(obj) -> MatrixGroup:
    try:
        d = int(obj["dimension"])
        ring = obj.get("ring", "Z")
        gens = [matrix_from_json(m) for m in obj["generators"]]
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed group JSON: {exc}") from None
    return MatrixGroup(gens, ring=ring, label=obj.get("label", ""), dimension=d)
