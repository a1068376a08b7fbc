"""Command line front end: qmodular <command> [options]."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Callable

import mpmath

SCHEMA = "qmodular-report/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    order: int = 200
    prec: int = 256
    terms: int = 80
    format: str = "json"
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.order < 10:
            raise UsageError("--order must be at least 10")
        if self.prec < 64:
            raise UsageError("--prec must be at least 64")
        if self.terms < 1:
            raise UsageError("--terms must be positive")
        if self.jobs < 1:
            raise UsageError("--jobs must be positive")


# ----- verify ----------------------------------------------------------------

SUITE_KEYS = ("Z-ode", "F-ode", "psi3", "psi3-transpose", "psi3-diagonal")


def verify_keys() -> list[str]:
    from qmodular.odes import identity_names

    return identity_names() + list(SUITE_KEYS)


def run_verify_key(key: str, order: int) -> dict:
    from qmodular import modeq, odes

    if key == "Z-ode":
        r = odes.ode_residual_Z(min(order, 50)).to_dict()
        r["status"] = "pass" if r["pass"] else "fail"
        return r
    if key == "F-ode":
        r = odes.ode_residual_F(min(order, 50)).to_dict()
        r["status"] = "pass" if r["pass"] else "fail"
        return r
    if key in ("psi3", "psi3-transpose"):
        r = modeq.psi3_verify(max(order, 50), transpose=key.endswith("transpose")).to_dict()
        r["name"] = key
        return r
    if key == "psi3-diagonal":
        r = modeq.diagonal_factor().to_dict()
        r["name"] = key
        r["status"] = "pass" if r["pass"] else "fail"
        return r
    return odes.verify_identity(key, order).to_dict()


def _ok(rec: dict) -> bool:
    return rec.get("status") in ("pass", "paper-discrepancy")


def _map(fn: Callable, args: list, jobs: int) -> list:
    if jobs <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map keeps catalog order regardless of completion order
        return list(pool.map(_call, [(fn, a) for a in args]))


def _call(packed):
    fn, a = packed
    return fn(*a)


def cmd_verify(args, cfg: RunConfig) -> tuple[list[dict], bool]:
    known = verify_keys()
    keys = known if args.keys in ([], ["all"]) else args.keys
    unknown = [k for k in keys if k not in known]
    if unknown:
        raise UsageError(f"unknown key(s): {', '.join(unknown)}; known: {', '.join(known)}")
    results = _map(run_verify_key, [(k, cfg.order) for k in keys], cfg.jobs)
    return results, all(_ok(r) for r in results)


# ----- coefficients ------------------------------------------------------------


def cmd_coeffs(args, cfg: RunConfig) -> tuple[list, bool]:
    from qmodular.odes import Z_in_X, recurrence_coeffs

    if args.count < 1:
        raise UsageError("count must be at least 1")
    seq = recurrence_coeffs(args.count)
    ok = seq.integral
    vals = [int(v) if Fraction(v).denominator == 1 else str(v) for v in seq.values]
    if args.check:
        other = Z_in_X(max(args.count, 3)).values[: args.count]
        ok = ok and tuple(other) == tuple(seq.values)
    return vals, ok


# ----- pi series -----------------------------------------------------------------


def _pi_row(index: int, terms: int, prec: int, tol: float) -> dict:
    from qmodular.numerics.singular import pi_check
    from qmodular.numerics.tables import load_tables

    row = load_tables().series[index]
    s = pi_check(row, terms, prec)
    d = s.to_dict()
    d.update({"A": str(row.A), "B": str(row.B), "C": str(row.C)})
    d["status"] = "pass" if s.error < tol and s.imag_error < tol else "fail"
    return d


def cmd_pi(args, cfg: RunConfig) -> tuple[list[dict], bool]:
    from qmodular.numerics.tables import load_tables

    n = len(load_tables().series)
    if args.row is None:
        rows = list(range(n))
    else:
        if not 0 <= args.row < n:
            raise UsageError(f"row must be in 0..{n - 1}")
        rows = [args.row]
    prec = args.prec if args.prec is not None else 512
    results = _map(_pi_row, [(i, cfg.terms, prec, args.tol) for i in rows], cfg.jobs)
    return results, all(_ok(r) for r in results)


# ----- singular values -----------------------------------------------------------


def _singular_row(index: int, prec: int) -> dict:
    from qmodular.numerics.singular import verify_singular_value
    from qmodular.numerics.tables import load_tables

    t = load_tables()
    return verify_singular_value(t.singular[index], prec, t).to_dict()


def cmd_singular(args, cfg: RunConfig) -> tuple[list[dict], bool]:
    from qmodular.numerics.quadform import QuadForm
    from qmodular.numerics.singular import match_table3_to_forms
    from qmodular.numerics.tables import load_tables

    t = load_tables()
    idx = list(range(len(t.singular)))
    if args.form:
        f = QuadForm.parse(args.form)
        idx = [i for i, r in enumerate(t.singular) if r.form == f]
        if not idx:
            raise UsageError(f"form {f} is not in the singular-value table")
    prec = args.prec if args.prec is not None else cfg.prec
    results = _map(_singular_row, [(i, prec) for i in idx], cfg.jobs)
    if args.match:
        m = match_table3_to_forms(t).to_dict()
        m["name"] = "series-to-forms"
        m["status"] = "pass" if not m["unmatched_series"] else "fail"
        results.append(m)
    return results, all(_ok(r) for r in results)


# ----- modular equation ------------------------------------------------------------


def cmd_modeq(args, cfg: RunConfig) -> tuple[dict, bool]:
    from qmodular import modeq

    order = args.order if args.order is not None else 300
    try:
        res = modeq.derive_modeq(args.n, args.bidegree, order)
    except modeq.NoRelation as exc:
        return {"n": args.n, "bidegree": args.bidegree, "order": order, "status": "no-relation",
                "message": str(exc)}, True
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    polys = res if isinstance(res, list) else [res]
    rec = {"n": args.n, "bidegree": args.bidegree, "order": order, "dimension": len(polys),
           "polynomials": [str(p) for p in polys],
           "integral": all(p.is_integral() for p in polys)}
    ok = rec["integral"]
    if args.n == 3 and len(polys) == 1:
        rec["matches_published"] = polys[0] == modeq.PSI3
        ok = ok and rec["matches_published"]
    rec["status"] = "pass" if ok else "fail"
    return rec, ok


# ----- Atkin-Lehner matrix table --------------------------------------------------


def cmd_table2(args, cfg: RunConfig) -> tuple[list[dict], bool]:
    from qmodular.modeq import check_table2

    results = [r.to_dict() for r in check_table2()]
    return results, all(_ok(r) for r in results)


# ----- relations -----------------------------------------------------------------


def _frac(v) -> str:
    return str(Fraction(v))


def cmd_relations(args, cfg: RunConfig) -> tuple[list[dict], bool]:
    from qmodular.forms import M20_LABELS, build, find_relation, m20_basis, membership_decomposition
    from qmodular.forms import coefficient_matrix
    from qmodular.linalg import RationalMatrix, primitive

    N = cfg.order
    out = []
    z, u, v = build("z", N + 2), build("u", N + 2), build("v", N + 2)
    rel = find_relation([(z).truncate_q(N), (z * u).truncate_q(N), (z / u).truncate_q(N),
                         (z * v).truncate_q(N), (z / v).truncate_q(N)], N)
    vec = primitive(rel.basis[0]) if len(rel.basis) == 1 else None
    out.append({"name": "cusp-relation", "basis": ["z", "zu", "z/u", "zv", "z/v"],
                "vector": vec,
                "status": "pass" if vec == [4, -1, -1, 5, 1] else "fail"})
    rank = RationalMatrix(coefficient_matrix(m20_basis(N), N)).rank()
    out.append({"name": "m20-basis-rank", "rank": rank, "labels": M20_LABELS,
                "status": "pass" if rank == 6 else "fail"})
    for name in ("Z", "z(1+v)", "zu", "z/u", "zv", "z/v"):
        f = {"Z": lambda: build("Z", N), "z(1+v)": lambda: z * (1 + v), "zu": lambda: z * u,
             "z/u": lambda: z / u, "zv": lambda: z * v, "z/v": lambda: z / v}[name]().truncate_q(N)
        d = membership_decomposition(f, N)
        out.append({"name": f"decompose {name}", "order": N,
                    "eisenstein": {f"P{k}": _frac(c) for k, c in sorted(d.eisenstein.items())},
                    "cusp": _frac(d.cusp), "status": "pass"})
    return out, all(_ok(r) for r in out)


# ----- output ----------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, (Fraction, mpmath.mpf)):
        return str(x)
    if hasattr(x, "__dataclass_fields__"):
        return asdict(x)
    return str(x)


def _text(results) -> str:
    if isinstance(results, dict):
        results = [results]
    lines = []
    for r in results:
        if isinstance(r, dict):
            name = next((r[k] for k in ("name", "form", "row") if k in r), "")
            status = r.get("status", "")
            extra = {k: v for k, v in r.items() if k not in ("name", "status", "residuals")}
            lines.append(f"{status:18} {name}  " + " ".join(f"{k}={v}" for k, v in extra.items()))
        else:
            lines.append(str(r))
    return "\n".join(lines)


def emit(command: str, cfg: RunConfig, results, ok: bool, stream=None) -> None:
    if cfg.format == "json":
        doc = {"schema": SCHEMA, "command": command,
               "config": {"order": cfg.order, "prec": cfg.prec, "terms": cfg.terms},
               "ok": ok, "results": results,
               "generated": datetime.now(timezone.utc).isoformat(timespec="seconds")}
        text = json.dumps(doc, indent=2, default=_jsonable)
    else:
        text = _text(results) + f"\n{'OK' if ok else 'FAILED'}"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=stream or sys.stdout)


# ----- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=None, help="q-order for series checks (default 200)")
    common.add_argument("--prec", type=int, default=None, help="working precision in bits (default 256)")
    common.add_argument("--terms", type=int, default=80, help="series terms for pi sums")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", default=None, help="write the report to a file")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = argparse.ArgumentParser(prog="qmodular", description="Verify level-20 q-series identities and 1/pi series.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run identity, ODE and modular-equation checks")
    v.add_argument("keys", nargs="*", help="catalog keys, or 'all'")
    v.add_argument("--list", action="store_true", help="list the known keys")

    c = sub.add_parser("coeffs", parents=[common], help="print a_0 .. a_{count-1}")
    c.add_argument("count", type=int)
    c.add_argument("--check", action="store_true", help="cross-check against the reversion route")

    pi = sub.add_parser("pi", parents=[common], help="sum the 1/pi series")
    pi.add_argument("--row", type=int, default=None)
    pi.add_argument("--all", action="store_true")
    pi.add_argument("--tol", type=float, default=1e-40, help="pass threshold on |sum - 1/pi|")

    s = sub.add_parser("singular", parents=[common], help="verify tabulated singular values")
    s.add_argument("--all", action="store_true")
    s.add_argument("--form", default=None, help="a,b,c")
    s.add_argument("--match", action="store_true", help="also pair series constants with forms")

    m = sub.add_parser("modeq", parents=[common], help="derive a modular equation for X")
    m.add_argument("--n", type=int, default=3)
    m.add_argument("--bidegree", type=int, default=4)

    t = sub.add_parser("table2", parents=[common], help="check the Atkin-Lehner matrix table")
    t.add_argument("--verify-all", action="store_true")

    sub.add_parser("relations", parents=[common], help="linear relations among weight-2 forms")
    return p


COMMANDS = {
    "verify": cmd_verify, "coeffs": cmd_coeffs, "pi": cmd_pi, "singular": cmd_singular,
    "modeq": cmd_modeq, "table2": cmd_table2, "relations": cmd_relations,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = RunConfig(order=args.order if args.order is not None else 200,
                        prec=args.prec if args.prec is not None else 256,
                        terms=args.terms, format=args.format, out=args.out, jobs=args.jobs)
        if args.command == "verify" and args.list:
            print("\n".join(verify_keys()))
            return EXIT_OK
        results, ok = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"qmodular: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # verification machinery failed
        print(f"qmodular: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    emit(args.command, cfg, results, ok)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
