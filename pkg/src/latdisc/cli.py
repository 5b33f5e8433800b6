"""latdisc command line: parse Gram matrices, dispatch, emit JSON reports."""

from __future__ import annotations

import argparse
import json
import sys

from .padic_core import PadicContext, ModMatrix, PadicError
from . import jordan as jd
from . import orders as od
from . import generators as gn
from . import group_engine as ge
from . import hensel as hn


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, separators=(", ", ": ")))
    sys.stdout.write("\n")


def _fail(kind, detail, code):
    _emit({"error": {"kind": kind, "detail": detail}})
    return code


def _read_json(path):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _rows_of(doc, key="rows"):
    rows = doc.get(key)
    if not isinstance(rows, list) or not rows:
        raise UsageError("input needs a nonempty %r matrix" % key)
    n = len(rows)
    out = []
    for row in rows:
        if not isinstance(row, list) or len(row) != n:
            raise UsageError("%r must be a square matrix" % key)
        out.append([int(x) for x in row])
    for i in range(n):
        for j in range(n):
            if out[i][j] != out[j][i]:
                raise UsageError("%r must be symmetric" % key)
    return out


def _local_setup(doc, args, n_needed):
    """Jordan decomposition at the requested prime with adequate precision."""
    p = args.p if args.p is not None else doc.get("p")
    if p is None:
        raise UsageError("this command needs a prime (--p or \"p\" in the input)")
    p = int(p)
    gram = _rows_of(doc)
    J = od.decompose_over_Zp(gram, p, extra=n_needed + 3)
    floor = n_needed + J.max_scale() + 3
    prec = args.prec if args.prec is not None else doc.get("prec")
    if prec is not None:
        prec = int(prec)
        if prec < floor:
            raise UsageError("--prec below the floor %d for this request" % floor)
        val = od._factorize(abs(od._int_det(gram))).get(p, 0)
        J = od.decompose_over_Zp(
            gram, p, extra=max(n_needed + 3, prec - val - jd.PRECISION_MARGIN)
        )
    return p, gram, J


def _jordan_json(J):
    return {
        "p": J.ctx.p,
        "blocks": [
            {
                "scale": b.scale,
                "rank": b.rank,
                "parity": b.parity,
                "gram": b.gram.tolists(),
            }
            for b in J.blocks
        ],
    }


def cmd_jordan(args):
    doc = _read_json(args.gram)
    _, _, J = _local_setup(doc, args, 1)
    _emit(_jordan_json(J))
    return 0


def cmd_order(args):
    doc = _read_json(args.gram)
    n = args.n if args.n is not None else 1
    _, _, J = _local_setup(doc, args, n)
    bd = od.order_mod_pn(J, n)
    out = bd.json()
    if args.verify:
        gs = gn.generators_mod_pn(J, n)
        co = ge.closure_order(gs.matrices)
        if co != bd.total:
            return _fail("verification", "closure %d != formula %d" % (co, bd.total), 1)
        out["verified"] = True
        out["closure_order"] = str(co)
    _emit(out)
    return 0


def cmd_disc_order(args):
    doc = _read_json(args.gram)
    gram = _rows_of(doc)
    total, primes = od.order_discriminant_Z(gram)
    out = {"order": str(total), "primes": {str(p): str(o) for p, o in primes.items()}}
    if args.verify:
        dg = gn.generators_discriminant(gram)
        closure = 1
        for p, acts in dg.actions.items():
            closure *= _disc_closure(p, dg.divisors[p], acts)
        if closure != total:
            return _fail("verification", "closure %d != formula %d" % (closure, total), 1)
        out["verified"] = True
        out["closure_order"] = str(closure)
    _emit(out)
    return 0


def cmd_gens(args):
    doc = _read_json(args.gram)
    n = args.n if args.n is not None else 1
    _, _, J = _local_setup(doc, args, n)
    gs = gn.generators_mod_pn(J, n)
    out = gs.json()
    if args.verify:
        co = ge.closure_order(gs.matrices)
        if co != gs.asserted_order:
            return _fail("verification", "closure %d != formula %d" % (co, gs.asserted_order), 1)
        out["verified"] = True
        out["closure_order"] = str(co)
    _emit(out)
    return 0


def _disc_closure(p, divisors, acts):
    size = sum(rk for _, rk in divisors)
    ident = gn.DiscAction(
        p, divisors, [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    )
    seen = {ident.canonical()}
    queue = [ident]
    while queue:
        cur = queue.pop()
        for g in acts:
            nxt = cur.compose(g)
            key = nxt.canonical()
            if key not in seen:
                seen.add(key)
                queue.append(nxt)
    return len(seen)


def cmd_disc_gens(args):
    doc = _read_json(args.gram)
    gram = _rows_of(doc)
    dg = gn.generators_discriminant(gram)
    out = dg.json()
    if args.verify:
        closure = 1
        for p, acts in dg.actions.items():
            closure *= _disc_closure(p, dg.divisors[p], acts)
        if closure != dg.order_O:
            return _fail("verification", "closure %d != formula %d" % (closure, dg.order_O), 1)
        out["verified"] = True
        out["closure_order"] = str(closure)
    _emit(out)
    return 0


def cmd_lift(args):
    doc = _read_json(args.gram)
    p = args.p if args.p is not None else doc.get("p")
    if p is None:
        raise UsageError("lift needs a prime")
    p = int(p)
    F = _rows_of_any(doc, "F")
    G = _rows_of(doc, "G")
    Z = _rows_of(doc, "Z")
    a, b = args.a, args.b
    if a is None or b is None:
        raise UsageError("lift needs --a and --b")
    maxv = max(abs(x) for row in G for x in row)
    sc = 0
    while p ** sc <= maxv:
        sc += 1
    prec = args.prec if args.prec is not None else doc.get("prec")
    N = int(prec) if prec is not None else b + sc + 6
    ctx = PadicContext(p, N)
    Fm, Gm, Zm = (ModMatrix(ctx, M) for M in (F, G, Z))
    res = hn.hensel_qf(Fm, Gm, Zm, a, b)
    _emit({"p": p, "prec": N, "a": a, "b": b, "rows": res.tolists()})
    return 0


def _rows_of_any(doc, key):
    rows = doc.get(key)
    if not isinstance(rows, list) or not rows:
        raise UsageError("input needs a nonempty %r matrix" % key)
    return [[int(x) for x in row] for row in rows]


def cmd_mass(args):
    doc = _read_json(args.gram)
    n_req = args.n
    _, _, J = _local_setup(doc, args, (n_req or 1) + 4)
    n = n_req if n_req is not None else od.n_stable(J)
    mass = od.p_mass(J, n)
    _emit(
        {
            "p": J.ctx.p,
            "n": n,
            "watson_count": str(od.watson_count(J, n)),
            "p_mass": {"num": str(mass.numerator), "den": str(mass.denominator)},
        }
    )
    return 0


def cmd_verify(args):
    args.verify = True
    doc = _read_json(args.gram)
    if args.p is None and "p" not in doc:
        return cmd_disc_order(args)
    return cmd_order(args)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="latdisc",
        description="Exact orders and generators for orthogonal groups of "
        "lattices mod p^n and of their discriminant groups.",
    )
    sub = ap.add_subparsers(dest="command")
    handlers = {}

    def add(name, fn, needs_ab=False):
        sp = sub.add_parser(name)
        sp.add_argument("gram", help="path to a JSON input file, or - for stdin")
        sp.add_argument("--p", type=int, default=None)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--prec", type=int, default=None)
        sp.add_argument("--verify", action="store_true")
        if needs_ab:
            sp.add_argument("--a", type=int, default=None)
            sp.add_argument("--b", type=int, default=None)
        handlers[name] = fn
        return sp

    add("jordan", cmd_jordan)
    add("order", cmd_order)
    add("disc-order", cmd_disc_order)
    add("gens", cmd_gens)
    add("disc-gens", cmd_disc_gens)
    add("lift", cmd_lift, needs_ab=True)
    add("mass", cmd_mass)
    add("verify", cmd_verify)
    return ap, handlers


def main(argv=None) -> int:
    ap, handlers = build_parser()
    args = ap.parse_args(argv)
    if not args.command:
        ap.print_usage(sys.stderr)
        return 2
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        _emit({"error": {"kind": "usage", "detail": str(exc)}})
        return 2
    except (json.JSONDecodeError, OSError, ValueError) as exc:
        _emit({"error": {"kind": "usage", "detail": str(exc)}})
        return 2
    except (
        od.OrdersError,
        gn.GeneratorError,
        ge.EngineError,
        hn.HenselError,
        jd.JordanError,
        PadicError,
    ) as exc:
        _emit({"error": {"kind": type(exc).__name__, "detail": str(exc)}})
        return 1


if __name__ == "__main__":
    sys.exit(main())
