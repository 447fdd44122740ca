"""Conjugacy classes of finite subgroups of GL_d(Z), d <= 3, and their Q-classes.

Every finite subgroup of GL_d(Z) fixes a positive definite form, hence lies
(up to conjugacy) in the automorphism group of one of a few maximal lattice
forms. We enumerate all subgroups of those seed groups, drop duplicates up to
conjugacy inside each seed, and merge across seeds with ``z_conjugacy``.
The known class counts serve as a completeness check on the seed list.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .conjtest import (
    CONJUGATE,
    UNKNOWN,
    automorphism_group,
    invariant_lattice,
    q_conjugacy,
    z_conjugacy,
)
from .errors import (
    ChecksumMismatch,
    DimensionMismatch,
    FormatVersionMismatch,
    IncompleteSeedSet,
    NotInCatalog,
    TorlatError,
)
from .matgroup import MatrixGroup, all_subgroups, group_from_json, group_to_json

log = logging.getLogger(__name__)

FORMAT_VERSION = 1

# Gram matrices of the maximal lattice symmetries in each dimension.
SEED_FORMS: dict[int, list[tuple[str, list[list[int]]]]] = {
    1: [("Z", [[1]])],
    2: [
        ("square", [[1, 0], [0, 1]]),
        ("hexagonal", [[2, -1], [-1, 2]]),
    ],
    3: [
        ("cubic P", [[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
        ("cubic I", [[3, -1, -1], [-1, 3, -1], [-1, -1, 3]]),
        ("cubic F", [[2, 1, 1], [1, 2, 1], [1, 1, 2]]),
        ("hexagonal", [[2, -1, 0], [-1, 2, 0], [0, 0, 3]]),
    ],
}

# Used only to refuse an incomplete catalog.
KNOWN_Z_COUNTS = {1: 2, 2: 13, 3: 73}


class UndecidedConjugacy(TorlatError):
    """The conjugacy engine returned Unknown while building a catalog."""


@dataclass
class TypeCatalog:
    dimension: int
    z_classes: list[MatrixGroup]
    q_partition: list[list[int]] | None = None
    provenance: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, TypeCatalog):
            return NotImplemented
        return (self.dimension == other.dimension
                and [tuple(g.generators) for g in self.z_classes]
                == [tuple(g.generators) for g in other.z_classes]
                and self.q_partition == other.q_partition)

    def __len__(self):
        return len(self.z_classes)

    @property
    def q_count(self) -> int | None:
        return None if self.q_partition is None else len(self.q_partition)

    def q_class_of(self, index: int) -> int:
        for k, block in enumerate(self.q_partition or ()):
            if index in block:
                return k
        raise KeyError(index)

    def to_json(self) -> dict:
        body = {
            "version": FORMAT_VERSION,
            "dimension": self.dimension,
            "z_classes": [group_to_json(g) for g in self.z_classes],
            "q_partition": self.q_partition,
            "provenance": self.provenance,
        }
        body["checksum"] = _checksum(body)
        return body


def _checksum(body: dict) -> str:
    content = {k: v for k, v in body.items() if k != "checksum"}
    blob = json.dumps(content, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _rep_key(G: MatrixGroup):
    return tuple(sorted(tuple(g) for g in G.generators))


def _bucket_key(G: MatrixGroup):
    return (G.order(), G.character_fingerprint())


def seed_groups(d: int) -> list[tuple[str, MatrixGroup]]:
    if d not in SEED_FORMS:
        raise ValueError(f"no seed forms for dimension {d}")
    return [(name, automorphism_group(F, label=f"Aut({name})")) for name, F in SEED_FORMS[d]]


def _subgroups_up_to_conjugacy(S: MatrixGroup) -> list[MatrixGroup]:
    """One subgroup from each S-conjugacy class of subgroups of S."""
    els, index, mult, invs = S.table()
    seen = set()
    out = []
    for H in all_subgroups(S):
        key = frozenset(index[h] for h in H.elements())
        if key in seen:
            continue
        out.append(H)
        for s in range(len(els)):
            si = invs[s]
            seen.add(frozenset(mult[mult[s][h]][si] for h in key))
    return out


def enumerate_z_types(d: int, seeds=None, *, validate: bool = True,
                      progress: Callable[[str], None] | None = None) -> TypeCatalog:
    """Representatives of the GL_d(Z)-classes of finite subgroups of GL_d(Z)."""
    if seeds is None:
        seeds = seed_groups(d)
    candidates = []
    for name, S in seeds:
        subs = _subgroups_up_to_conjugacy(S)
        if progress:
            progress(f"seed {name}: order {S.order()}, {len(subs)} subgroup classes")
        candidates.extend((name, H) for H in subs)

    buckets: dict = {}
    merges = 0
    for k, (name, H) in enumerate(candidates):
        classes = buckets.setdefault(_bucket_key(H), [])
        for members in classes:
            cert = z_conjugacy(members[0], H)
            if cert.verdict == CONJUGATE:
                members.append(H)
                merges += 1
                break
            if cert.verdict == UNKNOWN:
                raise UndecidedConjugacy(
                    f"conjugacy undecided between candidates of order {H.order()} in dimension {d}")
        else:
            classes.append([H])
        if progress and k % 20 == 0:
            progress(f"dedup {k + 1}/{len(candidates)}")

    reps = []
    for classes in buckets.values():
        for members in classes:
            reps.append(min(members, key=_rep_key))
    reps.sort(key=lambda G: (G.order(), G.character_fingerprint(), _rep_key(G)))
    for i, G in enumerate(reps):
        G.label = f"{d}.{i}"

    if validate and d in KNOWN_Z_COUNTS and len(reps) != KNOWN_Z_COUNTS[d]:
        raise IncompleteSeedSet(
            f"dimension {d}: found {len(reps)} classes, expected {KNOWN_Z_COUNTS[d]}")
    provenance = {
        "seeds": [{"name": name, "order": S.order(),
                   "form": [list(r) for r in dict(SEED_FORMS.get(d, [])).get(name, [])]}
                  for name, S in seeds],
        "candidates": len(candidates),
        "merges": merges,
    }
    return TypeCatalog(d, reps, None, provenance)


def partition_q_types(catalog: TypeCatalog) -> TypeCatalog:
    """Group the Z-classes into GL_d(Q)-classes."""
    blocks: list[list[int]] = []
    by_fp: dict = {}
    for i, G in enumerate(catalog.z_classes):
        for b in by_fp.setdefault(_bucket_key(G), []):
            if q_conjugacy(catalog.z_classes[blocks[b][0]], G).verdict == CONJUGATE:
                blocks[b].append(i)
                break
        else:
            by_fp[_bucket_key(G)].append(len(blocks))
            blocks.append([i])
    return TypeCatalog(catalog.dimension, catalog.z_classes, blocks, catalog.provenance)


def lookup(catalog: TypeCatalog, G: MatrixGroup) -> int:
    """Index of the catalog class containing G (rational groups are integralized first)."""
    if G.dimension != catalog.dimension:
        raise DimensionMismatch(f"group of dimension {G.dimension} in a dimension {catalog.dimension} catalog")
    if not G.is_integral():
        _, G = invariant_lattice(G)
    key = _bucket_key(G)
    for i, R in enumerate(catalog.z_classes):
        if _bucket_key(R) != key:
            continue
        cert = z_conjugacy(R, G)
        if cert.verdict == CONJUGATE:
            return i
        if cert.verdict == UNKNOWN:
            raise UndecidedConjugacy(f"conjugacy undecided against class {i}")
    raise NotInCatalog(f"no class of the dimension {catalog.dimension} catalog contains this group")


def build_catalog(d: int, progress=None) -> TypeCatalog:
    return partition_q_types(enumerate_z_types(d, progress=progress))


# ---------------------------------------------------------------------------
# persistence

def save_catalog(catalog: TypeCatalog, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(catalog.to_json(), indent=1))
    os.replace(tmp, path)


def load_catalog(path) -> TypeCatalog:
    text = Path(path).read_text()
    try:
        body = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChecksumMismatch(f"{path}: unreadable catalog ({exc.msg})") from None
    if not isinstance(body, dict):
        raise ChecksumMismatch(f"{path}: not a catalog object")
    if body.get("version") != FORMAT_VERSION:
        raise FormatVersionMismatch(
            f"{path}: format version {body.get('version')!r}, reader expects {FORMAT_VERSION}")
    if body.get("checksum") != _checksum(body):
        raise ChecksumMismatch(f"{path}: checksum does not match content")
    groups = [group_from_json(g) for g in body["z_classes"]]
    return TypeCatalog(int(body["dimension"]), groups, body.get("q_partition"),
                       body.get("provenance", {}))


def cache_dir() -> Path:
    env = os.environ.get("TORLAT_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "torlat"


def get_catalog(d: int, use_cache: bool = True, progress=None) -> TypeCatalog:
    """Build the catalog for dimension d, reusing a cached copy when present."""
    path = cache_dir() / f"catalog_d{d}.json"
    if use_cache and path.exists():
        try:
            return load_catalog(path)
        except (ChecksumMismatch, FormatVersionMismatch) as exc:
            log.warning("ignoring cached catalog: %s", exc)
    cat = build_catalog(d, progress=progress)
    if use_cache:
        try:
            save_catalog(cat, path)
        except OSError as exc:
            log.warning("could not write catalog cache: %s", exc)
    return cat
