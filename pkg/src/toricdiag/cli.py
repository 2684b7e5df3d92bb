"""Command line front end.

    toricdiag list
    toricdiag resolve F.3D.0008 [--emit-complex] [--side first]
    toricdiag check F.3D.0003 [--paper-order] [--format text|json|dot]
    toricdiag check --all --format json > golden.json
    toricdiag cohomology F.3D.0000 1,-1,1
    toricdiag classify-surfaces
    toricdiag quiver F.3D.0017 -o q.dot
    toricdiag verify F.3D.0005 [--oracle-sample 5] [--seed 0]

Exit codes: 0 success, 1 internal error, 2 usage error, 3 negative verdict.
A variety is a built-in name or a path to a JSON record with the database
schema ("rays" and "max_cones", or "halfspaces" rows [a_0, a_1, ..., a_n]
meaning a_0 + a . x >= 0).
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import json
import os
import random
import re
import sys

from . import __version__
from .cohomology import cech_oracle, cohomology, cohomology_in_box
from .diagres import (
    NoUnimodularFrame, euler_char_oracle, extract_collection, resolve_diagonal,
)
from .excol import (
    NO_ORDER, STRONG, NoOrdering, find_exceptional_order, hom_table, quiver_dot, report_for_order,
)
from .toric import (
    ToricVariety, VarietyRecord, classify_unimodular_surfaces, diagonal_map, fan_from_reflexive_polytope,
    load_database, product, record_from_dict,
)

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_NEGATIVE = 0, 1, 2, 3
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def resolve_selector(sel):
    db = load_database()
    if sel in db:
        return db[sel]
    if os.path.exists(sel):
        with open(sel) as fh:
            d = json.load(fh)
        if "rays" in d and "grading" in d:
            return record_from_dict(d)
        name = d.get("name", os.path.basename(sel))
        if "rays" in d:
            return VarietyRecord(ToricVariety(name, d["rays"], d["max_cones"]), expected=d.get("expected", {}))
        if "halfspaces" in d:
            v = fan_from_reflexive_polytope(d["halfspaces"], name)
            return VarietyRecord(v, d["halfspaces"], d.get("expected", {}))
        raise UsageError(f"{sel}: need 'rays' and 'max_cones' or 'halfspaces'")
    raise UsageError(f"unknown variety {sel!r} (not a built-in name or a file)")


def parse_class(text):
    try:
        return tuple(int(x) for x in re.split(r"[,\s]+", text.strip().strip("()[]")) if x)
    except ValueError:
        raise UsageError(f"bad class {text!r}; expected integers like 1,-1,1")


def _fmt_vec(v):
    return "(" + ",".join(str(x) for x in v) + ")"


def _fmt_matrix(M):
    w = max((len(str(x)) for row in M for x in row), default=1)
    return "\n".join("  " + " ".join(str(x).rjust(w) for x in row) for row in M)


# -- commands --------------------------------------------------------------------

def cmd_list(args):
    rows = []
    for name, rec in sorted(load_database().items(), key=lambda kv: (not kv[0].startswith("F."), kv[0])):
        rep = rec.variety.validate()
        rows.append({"name": name, "dim": rec.variety.dim, "nrays": rec.variety.nrays, **rep.as_dict()})
    if args.format == "json":
        print(json.dumps({"schema_version": SCHEMA_VERSION, "varieties": rows}, sort_keys=True, indent=1))
    else:
        for r in rows:
            flags = " ".join(k for k in ("smooth", "complete", "unimodular", "fano_hint") if r[k])
            print(f"{r['name']:10s} dim {r['dim']} rays {r['nrays']}  {flags}")
    return EXIT_OK


def resolve_report(rec, emit_complex=False, side="first"):
    X = rec.variety
    C = resolve_diagonal(X)
    multi, coll = extract_collection(C, side)
    out = {
        "schema_version": SCHEMA_VERSION,
        "name": X.name,
        "ranks": C.ranks(),
        "twists": [[[list(a), list(b)] for a, b in map(C.split, term)] for term in C.terms],
        "collection": [list(c) for c in coll],
        "side": side,
    }
    if emit_complex:
        out["complex"] = C.to_json()
    return out, C


def cmd_resolve(args):
    rec = resolve_selector(args.variety)
    out, _ = resolve_report(rec, args.emit_complex, args.side)
    if args.format == "json":
        print(json.dumps(out, sort_keys=True))
        return EXIT_OK
    print(f"{out['name']}: ranks {' '.join(map(str, out['ranks']))}")
    print("  0 <- " + " <- ".join(f"S^{r}" for r in out["ranks"]) + " <- 0")
    for t, term in enumerate(out["twists"]):
        print(f"  term {t}: " + "  ".join(f"O{_fmt_vec(a)}x{_fmt_vec(b)}" for a, b in term))
    print(f"  collection ({out['side']} factor): " + " ".join(_fmt_vec(c) for c in out["collection"]))
    if args.emit_complex:
        print(json.dumps(out["complex"], sort_keys=True))
    return EXIT_OK


def check_report(rec, paper_order=False):
    X = rec.variety
    C = resolve_diagonal(X)
    _, coll = extract_collection(C, "first")
    classes = list(coll)
    out = {"schema_version": SCHEMA_VERSION, "name": X.name, "ranks": C.ranks(),
           "collection": [list(c) for c in classes]}
    if paper_order:
        stored = [tuple(c) for c in rec.expected.get("collection", [])]
        if not stored:
            raise UsageError(f"{X.name} has no stored order")
        if sorted(stored) != sorted(classes):
            raise ArithmeticError(f"{X.name}: stored collection differs from the extracted one")
        T = hom_table(X, stored)
        try:
            rep = report_for_order(T, list(range(len(stored))), X.name)
        except NoOrdering:
            backward = [{"from": list(T.classes[b]), "to": list(T.classes[a]), "hom": list(T.hom[b, a])}
                        for a in range(len(stored)) for b in range(a + 1, len(stored)) if T.total(b, a)]
            rep = find_exceptional_order(T, X.name)
            out["paper_order_backward_homs"] = backward
    else:
        rep = find_exceptional_order(hom_table(X, classes), X.name)
    d = rep.to_dict()
    d.pop("schema_version")
    out.update(d)
    return out, rep


def _check_worker(name, paper_order):
    out, _ = check_report(resolve_selector(name), paper_order)
    return out


def render_check_text(out):
    lines = [f"{out['name']}: {out['verdict']}  (ranks {' '.join(map(str, out['ranks']))})"]
    if out.get("paper_order_backward_homs"):
        lines.append("  stored order is not admissible; backward Homs:")
        for b in out["paper_order_backward_homs"]:
            lines.append(f"    Hom(O{_fmt_vec(b['from'])}, O{_fmt_vec(b['to'])}) = {_fmt_vec(b['hom'])}")
    if out["verdict"] == NO_ORDER:
        c = out["certificate"]
        if "pair" in c:
            a, b = c["pair"]
            lines.append(f"  Hom(O{_fmt_vec(a)}, O{_fmt_vec(b)}) = {_fmt_vec(c['forward'])}")
            lines.append(f"  Hom(O{_fmt_vec(b)}, O{_fmt_vec(a)}) = {_fmt_vec(c['backward'])}")
        else:
            lines.append("  cycle: " + " -> ".join(_fmt_vec(x) for x in c["cycle"]))
        return "\n".join(lines)
    lines.append("  order: " + " ".join(_fmt_vec(c) for c in out["ordered_classes"]))
    lines.append(f"  admissible orders: {out['order_count']}")
    lines.append("  F =")
    lines.append(_fmt_matrix(out["F"]))
    for p in out["non_strong_pairs"]:
        lines.append(f"  not strong: Hom(O{_fmt_vec(p['from'])}, O{_fmt_vec(p['to'])}) = {_fmt_vec(p['hom'])}")
    return "\n".join(lines)


def cmd_check(args):
    if args.all == (args.variety is not None):
        raise UsageError("give exactly one of a variety or --all")
    if args.all:
        from .toric import threefold_names
        names = threefold_names()
        if args.jobs == 1:
            outs = [_check_worker(n, args.paper_order) for n in names]
        else:
            with ProcessPoolExecutor(max_workers=args.jobs) as ex:
                outs = list(ex.map(_check_worker, names, [args.paper_order] * len(names)))
        outs.sort(key=lambda o: o["name"])
        if args.format == "json":
            print(json.dumps({"schema_version": SCHEMA_VERSION, "reports": outs}, sort_keys=True, indent=1))
        elif args.format == "dot":
            raise UsageError("--format dot needs a single variety")
        else:
            for o in outs:
                print(render_check_text(o))
            n_strong = sum(o["verdict"] == STRONG for o in outs)
            print(f"{n_strong} of {len(outs)} strong_exceptional")
        return EXIT_NEGATIVE if any(o["verdict"] == NO_ORDER for o in outs) else EXIT_OK
    rec = resolve_selector(args.variety)
    out, rep = check_report(rec, args.paper_order)
    if args.format == "json":
        print(json.dumps(out, sort_keys=True))
    elif args.format == "dot":
        if rep.verdict == NO_ORDER:
            print(render_check_text(out), file=sys.stderr)
            return EXIT_NEGATIVE
        sys.stdout.write(quiver_dot(rep))
    else:
        print(render_check_text(out))
    return EXIT_NEGATIVE if rep.verdict == NO_ORDER else EXIT_OK


def cmd_cohomology(args):
    rec = resolve_selector(args.variety)
    X = rec.variety
    cls = parse_class(args.cls)
    if len(cls) != X.cl_rank:
        raise UsageError(f"{X.name} has class group of rank {X.cl_rank}, got {len(cls)} entries")
    h = cohomology(X, X.class_to_coeffs(cls))
    if args.format == "json":
        print(json.dumps({"schema_version": SCHEMA_VERSION, "name": X.name, "class": list(cls), "dims": list(h)}))
    else:
        print(f"H^*({X.name}, O{_fmt_vec(cls)}) = " + ", ".join(f"h^{i}={d}" for i, d in enumerate(h)))
    return EXIT_OK


def cmd_classify_surfaces(args):
    found = classify_unimodular_surfaces()
    if args.format == "json":
        print(json.dumps({"schema_version": SCHEMA_VERSION,
                          "surfaces": [{"name": s.name, "rays": s.rays.tolist()} for s in found]}))
    else:
        for s in found:
            print(f"{s.name:8s} " + " ".join(_fmt_vec(r) for r in s.rays.tolist()))
    return EXIT_OK


def cmd_quiver(args):
    rec = resolve_selector(args.variety)
    out, rep = check_report(rec, args.paper_order)
    if rep.verdict == NO_ORDER:
        print(render_check_text(out), file=sys.stderr)
        return EXIT_NEGATIVE
    text = quiver_dot(rep)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def verify_report(rec, oracle_sample=5, seed=0):
    """Invariant suite: d^2, homogeneity, minimality, symmetry, Euler oracle, Cech oracle, box stability."""
    X = rec.variety
    rng = random.Random(seed)
    C = resolve_diagonal(X)
    Y = product(X, X)
    checks = {}
    checks["d_squared"] = C.is_complex()
    checks["homogeneous"] = not C.homogeneity_defects(Y.grading)
    checks["minimal"] = not C.minimality_defects()
    checks["symmetric"] = extract_collection(C, "first")[1] == extract_collection(C, "second")[1]

    coll = extract_collection(C, "first")[1]
    k = X.cl_rank
    # strictly positive bidegrees: sums of collection differences shifted up
    sample = []
    for _ in range(oracle_sample):
        a = tuple(rng.randint(0, 1) + max(0, -min(c[i] for c in coll)) for i in range(k))
        b = tuple(rng.randint(0, 1) for i in range(k))
        sample.append((a, b))
    euler = euler_char_oracle(Y, diagonal_map(X), C, sample, cap=200000)
    checks["euler_char"] = all(r["ok"] for r in euler)

    pairs = [(rng.choice(coll), rng.choice(coll)) for _ in range(oracle_sample)]
    cech_ok = True
    box_ok = True
    for a, b in pairs:
        D = X.class_to_coeffs(tuple(y - x for x, y in zip(a, b)))
        h, half = cohomology(X, D, return_box=True)
        cech_ok &= cech_oracle(X, D) == h
        box_ok &= cohomology_in_box(X, D, 4 * half) == h
    checks["cech_oracle"] = cech_ok
    checks["box_stability"] = box_ok
    return {"schema_version": SCHEMA_VERSION, "name": X.name, "ranks": C.ranks(),
            "checks": checks, "euler_sample": [[list(a), list(b)] for a, b in sample],
            "ok": all(checks.values())}


def cmd_verify(args):
    rec = resolve_selector(args.variety)
    out = verify_report(rec, args.oracle_sample, args.seed)
    if args.format == "json":
        print(json.dumps(out, sort_keys=True))
    else:
        print(f"{out['name']}: ranks {' '.join(map(str, out['ranks']))}")
        for k, v in out["checks"].items():
            print(f"  {k:14s} {'ok' if v else 'FAILED'}")
    return EXIT_OK if out["ok"] else EXIT_ERROR


def build_parser():
    p = argparse.ArgumentParser(prog="toricdiag", description="Resolutions of the diagonal and exceptional "
                                "collections on smooth toric varieties.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp, choices=("text", "json")):
        sp.add_argument("--format", choices=choices, default="text")

    sp = sub.add_parser("list", help="built-in varieties with validation flags")
    fmt(sp)
    sp.set_defaults(func=cmd_list)

    sp = sub.add_parser("resolve", help="rank sequence and twists of the resolution of the diagonal")
    sp.add_argument("variety")
    sp.add_argument("--emit-complex", action="store_true")
    sp.add_argument("--side", choices=("first", "second"), default="first")
    fmt(sp)
    sp.set_defaults(func=cmd_resolve)

    sp = sub.add_parser("check", help="decide (strong) exceptionality of the extracted collection")
    sp.add_argument("variety", nargs="?")
    sp.add_argument("--all", action="store_true", help="all 18 threefolds")
    sp.add_argument("--paper-order", action="store_true", help="use the stored order of the collection")
    sp.add_argument("--jobs", type=int, default=None)
    fmt(sp, ("text", "json", "dot"))
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("cohomology", help="dimensions of H^i(X, O(class))")
    sp.add_argument("variety")
    sp.add_argument("cls", metavar="class", help="comma separated, e.g. 1,-1,1")
    fmt(sp)
    sp._negative_number_matcher = re.compile(r"^-\d[\d,\s-]*$")
    sp.set_defaults(func=cmd_cohomology)

    sp = sub.add_parser("classify-surfaces", help="complete unimodular toric surfaces up to isomorphism")
    fmt(sp)
    sp.set_defaults(func=cmd_classify_surfaces)

    sp = sub.add_parser("quiver", help="DOT quiver of the collection")
    sp.add_argument("variety")
    sp.add_argument("-o", "--output")
    sp.add_argument("--paper-order", action="store_true")
    sp.set_defaults(func=cmd_quiver)

    sp = sub.add_parser("verify", help="run the invariant and oracle checks")
    sp.add_argument("variety")
    sp.add_argument("--oracle-sample", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    fmt(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"toricdiag: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NoUnimodularFrame as e:
        print(f"toricdiag: {e}", file=sys.stderr)
        return EXIT_ERROR
    except BrokenPipeError:
        return EXIT_OK
    except Exception as e:  # noqa: BLE001
        print(f"toricdiag: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
