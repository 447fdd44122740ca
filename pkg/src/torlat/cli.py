"""Command-line front end: ``torlat <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 resource bound exceeded, 4 incomplete seed set, 5 dimension or
group mismatch between inputs.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import classify, conjtest, rootsys, torus
from .errors import (
    CatalogFormatError,
    DimensionMismatch,
    IncompleteSeedSet,
    InvalidType,
    MismatchedGroups,
    NotASubgroup,
    NotFinite,
    NotFiniteWithinBound,
    OrbitExplosion,
    SerreBoundViolation,
    SingularMatrix,
)
from .exact import matrix_to_json
from .matgroup import MatrixGroup, all_subgroups, group_from_json, group_to_json

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_SEEDS = 4
EXIT_MISMATCH = 5

# Reference orders of the maximal finite subgroups of GL_d(Q), d = 1..10.
EXPECTED_MAX_ORDERS = {
    1: 2,
    2: 12,
    3: 48,
    4: 1152,
    5: 3840,
    6: 103680,
    7: 2903040,
    8: 696729600,
    9: 1393459200,
    10: 8360755200,
}

# Reference numbers of GL_d(Z)- and GL_d(Q)-classes of finite subgroups.
EXPECTED_COUNTS = {1: (2, 2), 2: (13, 10), 3: (73, 32)}

log = logging.getLogger("torlat")


class InputError(Exception):
    pass


def _progress(args):
    if getattr(args, "quiet", False):
        return None

    def emit(msg):
        print(f"[torlat] {msg}", file=sys.stderr, flush=True)

    return emit


def _emit(args, payload, text: str):
    if args.format == "json":
        print(json.dumps(payload, indent=1, default=str))
    else:
        print(text)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc.msg} at line {exc.lineno}") from None


def load_group(spec: str) -> MatrixGroup:
    """Resolve ``weyl:<type>``, ``signedperm:<d>`` or a path to group/torus JSON."""
    if spec.startswith("weyl:"):
        return rootsys.weyl_generators(spec[5:])
    if spec.startswith("signedperm:"):
        try:
            d = int(spec[11:])
        except ValueError:
            raise InputError(f"bad degree in {spec!r}") from None
        return rootsys.signed_permutation_group(d)
    obj = _read_json(spec)
    if isinstance(obj, dict) and "galois" in obj:
        obj = obj["galois"]
    try:
        return group_from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{spec}: not a matrix group JSON object ({exc})") from None


def load_torus(spec: str) -> torus.TorusPresentation:
    label = ""
    if not (spec.startswith("weyl:") or spec.startswith("signedperm:")):
        obj = _read_json(spec)
        if isinstance(obj, dict):
            label = obj.get("label", "") or ""
    return torus.make_torus(load_group(spec), label)


# ---------------------------------------------------------------------------
# table1

def _parse_dims(text: str | None) -> list[int]:
    if not text:
        return list(range(1, 11))
    try:
        dims = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad --dims value {text!r}") from None
    bad = [d for d in dims if d not in EXPECTED_MAX_ORDERS]
    if bad:
        raise InputError(f"dimensions outside 1..10: {bad}")
    return dims


def cmd_table1(args) -> int:
    dims = _parse_dims(args.dims)
    progress = _progress(args)
    start = time.perf_counter()
    rows = []
    for d in dims:
        entry = rootsys.max_order_entry(d)
        rows.append(entry)
        if progress:
            progress(f"d={d}: {entry.description} order {entry.max_order} "
                     f"({time.perf_counter() - start:.1f}s)")
    mismatch = next((e for e in rows if e.max_order != EXPECTED_MAX_ORDERS[e.d]), None)
    if args.format == "json":
        payload = [e.to_json() for e in rows]
        if not args.dims:
            payload.append(rootsys.max_order_table(dims=[])[-1].to_json())
        print(json.dumps(payload, indent=1))
    else:
        for e in rows:
            print(f"{e.d} | {e.description} | {e.max_order}")
        if not args.dims:
            print("otherwise | signed permutations | 2^d * d!")
    if args.verify and mismatch is not None:
        print(f"mismatch at d={mismatch.d}: computed {mismatch.max_order}, "
              f"expected {EXPECTED_MAX_ORDERS[mismatch.d]}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# classify

def cmd_classify(args) -> int:
    d = args.dim
    if d == 4 and not args.experimental_d4:
        raise InputError("dimension 4 requires --experimental-d4")
    if d == 4:
        print("dimension 4: no seed lattice set is implemented at this scale", file=sys.stderr)
        return EXIT_RESOURCE
    if d not in EXPECTED_COUNTS:
        raise InputError(f"classification supports dimensions 1, 2, 3 (got {d})")
    progress = _progress(args)
    if args.catalog:
        cat = classify.load_catalog(args.catalog)
        if cat.q_partition is None:
            cat = classify.partition_q_types(cat)
    else:
        cat = classify.get_catalog(d, use_cache=not args.no_cache, progress=progress)
    if args.out:
        classify.save_catalog(cat, args.out)
    nz, nq = len(cat), cat.q_count
    payload = {"dimension": d, "z_classes": nz, "q_classes": nq,
               "orders": [G.order() for G in cat.z_classes]}
    _emit(args, payload, f"{nz} Z-classes, {nq} Q-classes")
    if args.verify_counts and (nz, nq) != EXPECTED_COUNTS[d]:
        ez, eq = EXPECTED_COUNTS[d]
        print(f"count mismatch: expected {ez} Z-classes and {eq} Q-classes", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# conj

def cmd_conj(args) -> int:
    G1, G2 = load_group(args.a), load_group(args.b)
    if G1.dimension != G2.dimension:
        raise DimensionMismatch(f"groups of dimension {G1.dimension} and {G2.dimension}")
    if args.ring == "Z":
        cert = conjtest.z_conjugacy(G1, G2, search_bound=args.search_bound)
    else:
        cert = conjtest.q_conjugacy(G1, G2)
    payload = cert.to_json()
    text = cert.verdict
    if cert.witness is not None:
        text += "\n" + "\n".join(" ".join(str(x) for x in row) for row in cert.witness)
    elif cert.reason:
        text += f" ({cert.reason})"
    _emit(args, payload, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# group

def cmd_group(args) -> int:
    G = load_group(args.spec)
    what = args.what
    if what == "order":
        n = G.order()
        _emit(args, {"order": n}, str(n))
    elif what == "closure":
        els = G.elements()
        payload = {"order": len(els), "elements": [matrix_to_json(g) for g in els]}
        _emit(args, payload, "\n\n".join("\n".join(" ".join(map(str, r)) for r in g) for g in els))
    elif what == "classes":
        classes = G.conjugacy_classes()
        payload = [{"representative": matrix_to_json(r), "size": s} for r, s in classes]
        _emit(args, payload, "\n".join(f"{s}\t{[list(x) for x in r]}" for r, s in classes))
    elif what == "fingerprint":
        fp = G.character_fingerprint()
        payload = [{"trace": str(t), "order": o, "size": s} for t, o, s in fp]
        _emit(args, payload, "\n".join(f"trace {t}, order {o}: {s}" for t, o, s in fp))
    elif what == "subgroups":
        subs = all_subgroups(G)
        payload = [group_to_json(H) | {"order": H.order()} for H in subs]
        _emit(args, payload, "\n".join(f"{H.order()}\t{[[list(r) for r in g] for g in H.generators]}"
                                       for H in subs))
    return EXIT_OK


# ---------------------------------------------------------------------------
# torus

def _parse_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"bad modulus range {text!r}") from None
    if not out or min(out) < 2:
        raise InputError("moduli must be at least 2")
    return out


def cmd_torus(args) -> int:
    op = args.op
    T1 = load_torus(args.a)
    if op in ("hom", "isogeny", "isomorphic"):
        if args.b is None:
            raise InputError(f"torus {op} needs two inputs")
        T2 = load_torus(args.b)
    if op == "hom":
        H = torus.hom_module(T1, T2)
        _emit(args, H.to_json(), f"rank {H.rank}\n" + "\n\n".join(
            "\n".join(" ".join(map(str, r)) for r in b) for b in H.basis))
    elif op == "dual":
        D = torus.dual_torus(T1)
        _emit(args, D.to_json(), "\n\n".join("\n".join(" ".join(map(str, r)) for r in g)
                                            for g in D.generators))
    elif op == "torsion":
        if args.modulus is None or args.modulus < 2:
            raise InputError("--modulus N with N >= 2 is required")
        R = torus.torsion_rep(T1, args.modulus)
        payload = {"modulus": R.N, "image_order": R.image_order,
                   "images": [matrix_to_json(g) for g in R.images]}
        _emit(args, payload, f"image order {R.image_order} mod {R.N}")
    elif op == "serre-check":
        reports = [torus.serre_bound_check(T1, N) for N in _parse_range(args.modulus_range)]
        _emit(args, [r.to_json() for r in reports], "\n".join(
            f"N={r.modulus}: degree {r.splitting_degree}, image order {r.image_order}, "
            f"bound {r.bound}; " + ", ".join(f"{k}={v}" for k, v in r.checks.items())
            for r in reports))
    elif op == "isogeny":
        ok = torus.is_isogenous(T1, T2)
        _emit(args, {"isogenous": ok}, "isogenous" if ok else "not isogenous")
    elif op == "isomorphic":
        cert = torus.is_isomorphic(T1, T2, search_bound=args.search_bound)
        _emit(args, cert.to_json(), cert.verdict + (f" ({cert.reason})" if cert.reason else ""))
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--threads", type=int, default=1,
                        help="accepted for interface stability; computations run serially")
    common.add_argument("-q", "--quiet", action="store_true", help="no progress lines on stderr")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="torlat", description="Finite integral matrix groups and tori.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table1", parents=[common], help="maximal finite subgroup orders, d = 1..10")
    t.add_argument("--verify", action="store_true")
    t.add_argument("--dims", help="comma-separated subset of 1..10")
    t.set_defaults(func=cmd_table1)

    c = sub.add_parser("classify", parents=[common], help="finite subgroups of GL_d(Z) up to conjugacy")
    c.add_argument("--dim", type=int, required=True)
    c.add_argument("--out", help="write the catalog JSON here")
    c.add_argument("--catalog", help="load an existing catalog instead of building")
    c.add_argument("--verify-counts", action="store_true")
    c.add_argument("--no-cache", action="store_true")
    c.add_argument("--experimental-d4", action="store_true")
    c.set_defaults(func=cmd_classify)

    cj = sub.add_parser("conj", help="conjugacy of two groups")
    cjs = cj.add_subparsers(dest="conj_op", required=True)
    ct = cjs.add_parser("test", parents=[common])
    ct.add_argument("a")
    ct.add_argument("b")
    ct.add_argument("--ring", choices=("Z", "Q"), default="Z")
    ct.add_argument("--search-bound", type=int, default=conjtest.DEFAULT_SEARCH_BOUND)
    ct.set_defaults(func=cmd_conj)

    g = sub.add_parser("group", parents=[common], help="group calculators")
    g.add_argument("what", choices=("order", "closure", "classes", "fingerprint", "subgroups"))
    g.add_argument("spec", help="weyl:<type>, signedperm:<d> or a JSON file")
    g.set_defaults(func=cmd_group)

    tr = sub.add_parser("torus", parents=[common], help="torus calculators")
    tr.add_argument("op", choices=("hom", "dual", "torsion", "serre-check", "isogeny", "isomorphic"))
    tr.add_argument("a")
    tr.add_argument("b", nargs="?")
    tr.add_argument("--modulus", type=int)
    tr.add_argument("--modulus-range", default="2..8")
    tr.add_argument("--search-bound", type=int, default=torus.DEFAULT_HEIGHT)
    tr.set_defaults(func=cmd_torus)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.threads < 1:
        parser.error("--threads must be positive")
    for name in ("search_bound",):
        if getattr(args, name, 1) is not None and getattr(args, name, 1) < 0:
            parser.error(f"--{name.replace('_', '-')} must be non-negative")
    try:
        return args.func(args)
    except IncompleteSeedSet as exc:
        print(f"error: incomplete seed set: {exc}", file=sys.stderr)
        return EXIT_SEEDS
    except (NotFiniteWithinBound, OrbitExplosion, NotFinite) as exc:
        print(f"error: resource bound exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DimensionMismatch, MismatchedGroups, NotASubgroup) as exc:
        print(f"error: inputs do not match: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except SerreBoundViolation as exc:
        print(f"error: bound violated: {exc} (witness {exc.witness})", file=sys.stderr)
        return EXIT_VERIFY
    except (InputError, InvalidType, CatalogFormatError, SingularMatrix, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
