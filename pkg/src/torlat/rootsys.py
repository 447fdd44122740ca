"""Root systems, Weyl groups in the simple-root basis, and the max-order table.

Cartan matrix convention: ``C[i][j] = 2 (a_i, a_j) / (a_j, a_j)`` with
Bourbaki numbering of the simple roots. For G2 the first simple root is the
short one, giving ``[[2, -1], [-3, 2]]``. The simple reflection ``s_i`` sends
``a_j`` to ``a_j - C[j][i] a_i``; its matrix acts on column vectors of
root-lattice coordinates, so every Weyl group element is an integer matrix.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import InvalidType
from .exact import IntMatrix
from .matgroup import MatrixGroup, direct_product, perm_action

FAMILIES = "ABCDEFG"


@dataclass(frozen=True, order=True)
class RootSystemType:
    family: str
    rank: int

    def __post_init__(self):
        f, n = self.family, self.rank
        if f not in FAMILIES or not isinstance(n, int) or n < 1:
            raise InvalidType(f"invalid root system {f}{n}")
        ok = {
            "A": n >= 1,
            "B": n >= 2,
            "C": n >= 3,
            "D": n >= 4,
            "E": n in (6, 7, 8),
            "F": n == 4,
            "G": n == 2,
        }[f]
        if not ok:
            raise InvalidType(f"invalid root system {f}{n}")

    @classmethod
    def parse(cls, text: str) -> "RootSystemType":
        m = re.fullmatch(r"\s*([A-Ga-g])_?(\d+)\s*", text)
        if not m:
            raise InvalidType(f"cannot parse root system type {text!r}")
        return cls(m.group(1).upper(), int(m.group(2)))

    def __str__(self):
        return f"{self.family}{self.rank}"


def _as_type(t) -> RootSystemType:
    if isinstance(t, RootSystemType):
        return t
    if isinstance(t, str):
        return RootSystemType.parse(t)
    raise InvalidType(f"not a root system type: {t!r}")


def cartan_matrix(t) -> IntMatrix:
    t = _as_type(t)
    n = t.rank
    C = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, cij=-1, cji=-1):
        C[i][j] = cij
        C[j][i] = cji

    f = t.family
    if f in "ABCD":
        for i in range(n - 2):
            link(i, i + 1)
        if f == "A" and n >= 2:
            link(n - 2, n - 1)
        elif f == "B":
            # a_{n} short: C[n-1][n] = 2(a_{n-1},a_n)/(a_n,a_n) = -2
            link(n - 2, n - 1, -2, -1)
        elif f == "C":
            link(n - 2, n - 1, -1, -2)
        elif f == "D":
            link(n - 3, n - 1)
    elif f == "E":
        # Bourbaki: 1-3-4-5-6(-7-8), with 2 attached to 4
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif f == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif f == "G":
        link(0, 1, -1, -3)
    return IntMatrix(C)


def weyl_generators(t) -> MatrixGroup:
    """Simple reflections acting on the root lattice in the simple-root basis."""
    t = _as_type(t)
    C = cartan_matrix(t)
    n = t.rank
    gens = []
    for i in range(n):
        # column j is the image of a_j
        S = [[int(r == c) for c in range(n)] for r in range(n)]
        for j in range(n):
            S[i][j] -= C[j][i]
        gens.append(IntMatrix(S))
    return MatrixGroup(gens, ring="Z", label=f"W({t})", dimension=n)


def roots(t) -> list[tuple[int, ...]]:
    """All roots, as the union of the Weyl orbits of the simple roots."""
    G = weyl_generators(t)
    return list(perm_action(G.generators, G.dimension).points)


def root_count(t) -> int:
    return len(roots(t))


def weyl_order(t) -> int:
    return weyl_generators(t).order()


def signed_permutation_group(d: int) -> MatrixGroup:
    if d < 1:
        raise ValueError("dimension must be positive")
    gens = []
    for i in range(d - 1):
        P = [[int(r == c) for c in range(d)] for r in range(d)]
        P[i][i] = P[i + 1][i + 1] = 0
        P[i][i + 1] = P[i + 1][i] = 1
        gens.append(IntMatrix(P))
    D = [[int(r == c) for c in range(d)] for r in range(d)]
    D[0][0] = -1
    gens.append(IntMatrix(D))
    return MatrixGroup(gens, ring="Z", label=f"signed permutations of degree {d}", dimension=d)


@dataclass
class MaxOrderEntry:
    d: int | None
    description: str
    kind: str
    components: list = field(default_factory=list)
    max_order: int | None = None
    formula: str = ""

    def to_json(self) -> dict:
        out = {"d": self.d, "group": self.description, "kind": self.kind,
               "components": self.components, "max_order": self.max_order}
        if self.formula:
            out["formula"] = self.formula
        return out


def _with_minus_identity(G: MatrixGroup, label: str) -> MatrixGroup:
    minus = IntMatrix([[-int(i == j) for j in range(G.dimension)] for i in range(G.dimension)])
    return MatrixGroup(list(G.generators) + [minus], label=label, dimension=G.dimension)


def max_order_group(d: int) -> tuple[MatrixGroup | None, MaxOrderEntry]:
    """The designated maximal-order finite subgroup of GL_d(Q) and its table entry.

    For d = 9 and 10 the group is a block-diagonal product; the returned
    group is built, but its order is the product of the factor orders.
    """
    if d == 2:
        G = weyl_generators("G2")
        return G, MaxOrderEntry(2, "W(G_2)", "weyl", ["G2"])
    if d == 4:
        G = weyl_generators("F4")
        return G, MaxOrderEntry(4, "W(F_4)", "weyl", ["F4"])
    if d == 6:
        G = _with_minus_identity(weyl_generators("E6"), "<W(E6), -I>")
        return G, MaxOrderEntry(6, "<W(E_6), -I>", "weyl_with_minus_identity", ["E6"])
    if d == 7:
        G = weyl_generators("E7")
        return G, MaxOrderEntry(7, "W(E_7)", "weyl", ["E7"])
    if d == 8:
        G = weyl_generators("E8")
        return G, MaxOrderEntry(8, "W(E_8)", "weyl", ["E8"])
    if d == 9:
        G = direct_product(weyl_generators("E8"), weyl_generators("A1"), "W(E8) x W(A1)")
        return G, MaxOrderEntry(9, "W(E_8) x W(A_1)", "direct_product", ["E8", "A1"])
    if d == 10:
        G = direct_product(weyl_generators("E8"), weyl_generators("G2"), "W(E8) x W(G2)")
        return G, MaxOrderEntry(10, "W(E_8) x W(G_2)", "direct_product", ["E8", "G2"])
    G = signed_permutation_group(d)
    return G, MaxOrderEntry(d, f"W(B_{d}) = signed permutations" if d > 1 else "{+-1}",
                            "signed_permutation", [])


def max_order_entry(d: int) -> MaxOrderEntry:
    G, entry = max_order_group(d)
    if entry.kind == "direct_product":
        entry.max_order = math.prod(weyl_order(c) for c in entry.components)
    else:
        entry.max_order = G.order()
    return entry


def max_order_table(dims=range(1, 11)) -> list[MaxOrderEntry]:
    """Computed table rows for the requested dimensions plus the generic row."""
    rows = [max_order_entry(d) for d in dims]
    rows.append(MaxOrderEntry(None, "{+-1}^d x| S_d", "signed_permutation", [],
                              None, "2^d * d!"))
    return rows
