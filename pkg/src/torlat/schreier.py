"""Deterministic Schreier–Sims for permutation groups given as tuples.

A permutation ``p`` on ``range(n)`` maps ``i`` to ``p[i]``. Products apply
the right factor first: ``mul(p, q)[i] == p[q[i]]``.
"""

from __future__ import annotations


def mul(p, q):
    return tuple(p[i] for i in q)


def inv(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


class _Level:
    __slots__ = ("base", "gens", "trans", "trans_inv", "done")

    def __init__(self, base, n):
        self.base = base
        self.gens = []
        ident = tuple(range(n))
        self.trans = {base: ident}
        self.trans_inv = {base: ident}
        self.done = set()

    def extend_orbit(self):
        # Breadth-first extension keeps already recorded transversal words,
        # which is what makes the ``done`` memo of Schreier pairs sound.
        queue = list(self.trans)
        k = 0
        while k < len(queue):
            pt = queue[k]
            k += 1
            u = self.trans[pt]
            for s in self.gens:
                img = s[pt]
                if img not in self.trans:
                    w = mul(s, u)
                    self.trans[img] = w
                    self.trans_inv[img] = inv(w)
                    queue.append(img)


class StabilizerChain:
    """Base and strong generating set for ``<generators>`` on ``n`` points."""

    def __init__(self, generators, n):
        self.n = n
        self.levels: list[_Level] = []
        ident = tuple(range(n))
        gens = [tuple(g) for g in generators if tuple(g) != ident]
        if gens:
            self._build(gens)

    def _new_level(self, g):
        b = next(i for i in range(self.n) if g[i] != i)
        lv = _Level(b, self.n)
        self.levels.append(lv)
        return lv

    def strip(self, g, start=0):
        """Sift g through levels >= start; returns (residue, level reached)."""
        for i in range(start, len(self.levels)):
            lv = self.levels[i]
            img = g[lv.base]
            if img not in lv.trans:
                return g, i
            g = mul(lv.trans_inv[img], g)
        return g, len(self.levels)

    def _build(self, gens):
        ident = tuple(range(self.n))
        lv = self._new_level(gens[0])
        lv.gens.extend(gens)
        lv.extend_orbit()
        i = 0
        while i >= 0:
            lv = self.levels[i]
            found = None
            for pt in list(lv.trans):
                u = lv.trans[pt]
                for si, s in enumerate(lv.gens):
                    if (pt, si) in lv.done:
                        continue
                    lv.done.add((pt, si))
                    img = s[pt]
                    sg = mul(lv.trans_inv[img], mul(s, u))
                    h, j = self.strip(sg, i + 1)
                    if h != ident:
                        found = (h, j)
                        break
                if found:
                    break
            if found is None:
                i -= 1
                continue
            h, j = found
            if j == len(self.levels):
                self._new_level(h)
            for l in range(i + 1, j + 1):
                self.levels[l].gens.append(h)
                self.levels[l].extend_orbit()
            i = j

    @property
    def base(self) -> list[int]:
        return [lv.base for lv in self.levels]

    def orbit_sizes(self) -> list[int]:
        return [len(lv.trans) for lv in self.levels]

    def order(self) -> int:
        out = 1
        for lv in self.levels:
            out *= len(lv.trans)
        return out

    def contains(self, g) -> bool:
        h, j = self.strip(tuple(g))
        return j == len(self.levels) and h == tuple(range(self.n))


def perm_group_order(generators, n) -> int:
    return StabilizerChain(generators, n).order()
