"""Command-line surface: moment, cumulant, verify, census, clt.

Output is reproducible by construction: float reductions are exactly
rounded, term order is the canonical pairing order, and the JSON
renderer sorts keys and omits wall-clock timing, so identical runs give
byte-identical JSON at any thread count.

Exit codes: 0 success, 1 failure or verification mismatch, 2 parse
errors (expression or input files), 3 dimension/binding errors, 4 work
budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import engine as _engine
from .engine import (
    Gram,
    MomentResult,
    MomentSpec,
    clt_report,
    cumulant,
    moment,
    subspec,
)
from .expr import ParseError, TraceWordAst, build_shape, elaborate, parse, pretty
from .gluing import surface_census
from .matrices import (
    DimensionError,
    Matrix,
    MatrixFormatError,
    UnboundSlotError,
    parse_bindings,
    slot_identity_fill,
)
from .oracles import BudgetError, mc_oracle, wick_oracle
from .perm import crossings, enumerate_pairings, pairing_count

FLOAT_TOL = 1e-10
MC_SIGMA = 5.0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--expr", help="expression text, e.g. \"E[ tr(X' D1 X D2) ]\"")
    p.add_argument("--expr-file", help="file containing the expression")
    p.add_argument("--bind", metavar="FILE", help="matrix bindings file")
    p.add_argument(
        "--bind-identity",
        action="store_true",
        help="bind any unbound slot to the identity of its required size",
    )
    p.add_argument("-N", dest="n_dim", type=int, default=1, help="columns of X (trace scale)")
    p.add_argument("-M", dest="m_dim", type=int, default=1, help="rows of X")
    p.add_argument("--q", default="1", help="deformation parameter in [-1, 1]")
    p.add_argument("--gram", metavar="FILE", help="family inner-product matrix file")
    p.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")
    p.add_argument("--samples", type=int, default=0, help="Monte Carlo sample count")
    p.add_argument("--exact", action="store_true", help="exact rational arithmetic")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--threads", type=int, default=0, help="0 means all cores")
    p.add_argument("--terms", action="store_true", help="emit the per-term table")
    p.add_argument("--wigner", default="", help="comma-separated Wigner families")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wte",
        description="Moments and cumulants of Wishart/Wigner trace words.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, descr in (
        ("moment", "expected value of the trace-word product"),
        ("cumulant", "joint cumulant of the trace factors"),
        ("verify", "cross-check the engine against the oracles"),
        ("census", "classify the glued surface of every pairing"),
        ("clt", "pairwise N^2 k_2 fluctuation table for the factors"),
    ):
        p = sub.add_parser(name, help=descr)
        _add_common(p)
    return parser


def _parse_number_token(token: str):
    if "/" in token:
        return Fraction(token)
    try:
        return int(token)
    except ValueError:
        return float(token)


def parse_gram(text: str) -> Gram:
    """Gram file: a line of family names, then the symmetric matrix rows."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFormatError("empty gram file")
    labels = tuple(lines[0].split())
    if len(lines) != len(labels) + 1:
        raise MatrixFormatError(
            f"gram file: expected {len(labels)} rows after the label line"
        )
    rows = []
    for ln in lines[1:]:
        tokens = ln.split()
        if len(tokens) != len(labels):
            raise MatrixFormatError("gram file: row width does not match labels")
        rows.append(tuple(_parse_number_token(t) for t in tokens))
    return Gram(labels, tuple(rows))


def _expression_text(args) -> str:
    if bool(args.expr) == bool(args.expr_file):
        raise ParseError("provide exactly one of --expr or --expr-file", 0, 0)
    if args.expr:
        return args.expr
    with open(args.expr_file, "r", encoding="utf-8") as fh:
        return fh.read()


def _threads(args) -> int:
    return args.threads if args.threads > 0 else (os.cpu_count() or 1)


def _make_spec(args, ast: TraceWordAst) -> MomentSpec:
    bindings: dict[str, Matrix] = {}
    if args.bind:
        with open(args.bind, "r", encoding="utf-8") as fh:
            bindings = parse_bindings(fh.read())
    shape, slot_names = build_shape(ast)
    if args.bind_identity:
        bindings = slot_identity_fill(bindings, slot_names, shape, args.n_dim, args.m_dim)
    gram = None
    if args.gram:
        with open(args.gram, "r", encoding="utf-8") as fh:
            gram = parse_gram(fh.read())
    wigner = tuple(w for w in args.wigner.split(",") if w)
    return elaborate(
        ast,
        bindings,
        args.n_dim,
        args.m_dim,
        q=_parse_number_token(args.q),
        gram=gram,
        wigner=wigner,
    )


def _fnum(x) -> float:
    return float(x)


def _exact_str(x) -> str:
    return str(Fraction(x)) if not isinstance(x, float) else repr(x)


def _term_record(t: _engine.TermReport, exact: bool) -> dict:
    rec = {
        "index": t.index,
        "blocks": [list(b) for b in t.blocks],
        "weight": _fnum(t.weight),
        "order_exponent": t.order_exponent,
        "cycles": _cycles_str(t.cycles),
        "value": _fnum(t.value),
        "surface": {
            "components": [
                {
                    "factors": list(c.factors),
                    "vertices": c.vertices,
                    "edges": c.edges,
                    "faces": c.faces,
                    "chi": c.chi,
                    "orientable": c.orientable,
                    "classification": c.classification,
                }
                for c in t.surface.components
            ]
        },
    }
    if exact:
        rec["value_exact"] = _exact_str(t.value)
    if t.epsilon is not None:
        rec["epsilon"] = list(t.epsilon)
    return rec


def _cycles_str(cyc_list) -> str:
    return "".join("(" + ",".join(str(k) for k in c) + ")" for c in cyc_list)


def _result_payload(args, ast, spec, result: MomentResult, statistic: str) -> dict:
    r = spec.shape.r
    payload = {
        "schema": "wte.result.v1",
        "command": args.command,
        "statistic": statistic,
        "expression": pretty(ast),
        "n_dim": spec.n_dim,
        "m_dim": spec.m_dim,
        "q": _fnum(spec.q),
        "exact": args.exact,
        "normalized_total": _fnum(result.total),
        "unnormalized_total": _fnum(result.total) * spec.n_dim**r,
        "prefactor_exponent": result.prefactor_exponent,
        "unnormalized_prefactor_exponent": result.prefactor_exponent + r,
        "term_count": len(result.terms),
        "spec_hash": result.metadata["spec_hash"],
    }
    if args.exact:
        payload["normalized_total_exact"] = _exact_str(result.total)
        payload["unnormalized_total_exact"] = _exact_str(
            Fraction(result.total) * spec.n_dim**r
        )
    if args.terms:
        payload["terms"] = [_term_record(t, args.exact) for t in result.terms]
    return payload


def _emit_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


def _emit_result_text(payload: dict, result: MomentResult) -> None:
    out = sys.stdout
    out.write(f"statistic: {payload['statistic']} ({result.metadata['mode']})\n")
    out.write(f"expression: {payload['expression']}\n")
    out.write(
        f"dims: N={payload['n_dim']} M={payload['m_dim']}  q={payload['q']}\n"
    )
    if "normalized_total_exact" in payload:
        out.write(
            f"normalized total   = {payload['normalized_total_exact']}"
            f" (= {payload['normalized_total']!r})\n"
        )
        out.write(
            f"unnormalized total = {payload['unnormalized_total_exact']}"
            f" (= {payload['unnormalized_total']!r})\n"
        )
    else:
        out.write(f"normalized total   = {payload['normalized_total']!r}\n")
        out.write(f"unnormalized total = {payload['unnormalized_total']!r}\n")
    out.write(
        f"prefactor exponent = {payload['prefactor_exponent']} (normalized), "
        f"{payload['unnormalized_prefactor_exponent']} (unnormalized)\n"
    )
    out.write(f"terms: {payload['term_count']}\n")
    out.write(f"spec: {payload['spec_hash'][:16]}\n")
    out.write(f"elapsed: {result.metadata['elapsed_s']:.3f}s\n")
    if "terms" in payload:
        out.write(
            f"{'idx':>5} {'blocks':<18} {'weight':>10} {'exp':>4} "
            f"{'chi':<8} {'class':<22} {'cycles':<26} value\n"
        )
        for t in payload["terms"]:
            blocks = ";".join("-".join(str(x) for x in b) for b in t["blocks"])
            chis = ",".join(str(c["chi"]) for c in t["surface"]["components"])
            cls = ",".join(c["classification"] for c in t["surface"]["components"])
            value = t.get("value_exact", repr(t["value"]))
            out.write(
                f"{t['index']:>5} {blocks:<18} {t['weight']:>10.4g} "
                f"{t['order_exponent']:>4} {chis:<8} {cls:<22} "
                f"{t['cycles']:<26} {value}\n"
            )


def _emit_result_csv(payload: dict) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(
        ["index", "blocks", "weight", "order_exponent", "chi", "orientable",
         "classification", "cycles", "value"]
    )
    for t in payload.get("terms", []):
        comps = t["surface"]["components"]
        writer.writerow(
            [
                t["index"],
                ";".join("-".join(str(x) for x in b) for b in t["blocks"]),
                t["weight"],
                t["order_exponent"],
                "|".join(str(c["chi"]) for c in comps),
                "|".join(str(c["orientable"]).lower() for c in comps),
                "|".join(c["classification"] for c in comps),
                t["cycles"],
                t["value"],
            ]
        )


def _cmd_moment(args, statistic: str) -> int:
    ast = parse(_expression_text(args))
    spec = _make_spec(args, ast)
    effective = "cumulant" if (statistic == "cumulant" or ast.kind == "cumulant") else "moment"
    fn = cumulant if effective == "cumulant" else moment
    result = fn(spec, exact=args.exact, threads=_threads(args))
    if args.format == "csv":
        args.terms = True
    payload = _result_payload(args, ast, spec, result, effective)
    if args.format == "json":
        _emit_json(payload)
    elif args.format == "csv":
        _emit_result_csv(payload)
    else:
        _emit_result_text(payload, result)
    return 0


def _cmd_verify(args) -> int:
    ast = parse(_expression_text(args))
    spec = _make_spec(args, ast)
    effective_cumulant = ast.kind == "cumulant"
    if effective_cumulant:
        raise ValueError("verify compares moments; use an E[...] expression")
    result = moment(spec, exact=args.exact, threads=_threads(args))
    oracle = wick_oracle(spec, exact=args.exact)
    checks = []
    if args.exact:
        ok = Fraction(result.total) == Fraction(oracle)
        checks.append(("wick(exact)", str(result.total), str(oracle), "equal", "0", ok))
    else:
        scale = max(abs(float(oracle)), abs(float(result.total)), 1.0)
        rel = abs(float(result.total) - float(oracle)) / scale
        checks.append(
            ("wick(float)", repr(float(result.total)), repr(float(oracle)),
             f"rel={rel:.3e}", f"{FLOAT_TOL:g}", rel <= FLOAT_TOL)
        )
    if args.samples > 0:
        report = mc_oracle(spec, args.samples, seed=args.seed)
        z = report.zscore(float(result.total))
        checks.append(
            ("monte-carlo", repr(float(result.total)),
             f"{report.estimate!r} +/- {report.stderr:.3e}",
             f"z={z:.2f}", f"{MC_SIGMA:g} sigma", z <= MC_SIGMA)
        )
    passed = all(c[-1] for c in checks)
    if args.format == "json":
        _emit_json(
            {
                "schema": "wte.verify.v1",
                "expression": pretty(ast),
                "checks": [
                    {"name": n, "engine": a, "oracle": b, "metric": m,
                     "tolerance": t, "pass": ok}
                    for n, a, b, m, t, ok in checks
                ],
                "pass": passed,
            }
        )
    elif args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["check", "engine", "oracle", "metric", "tolerance", "pass"])
        for row in checks:
            writer.writerow([row[0], row[1], row[2], row[3], row[4], row[5]])
    else:
        for n, a, b, m, t, ok in checks:
            sys.stdout.write(
                f"{n}: engine={a} oracle={b} {m} (tol {t}): "
                f"{'OK' if ok else 'MISMATCH'}\n"
            )
        sys.stdout.write(f"VERIFY: {'PASS' if passed else 'FAIL'}\n")
    return 0 if passed else 1


def _cmd_census(args) -> int:
    ast = parse(_expression_text(args))
    shape, _ = build_shape(ast)
    if shape.m % 2:
        raise ValueError(f"odd letter count {shape.m}: no pairings to classify")
    groups: dict[tuple, int] = {}
    detail = []
    for idx, p in enumerate(enumerate_pairings(shape.m)):
        report = surface_census(p, shape)
        transitive = _engine.is_transitive(p, shape)
        chis = tuple(sorted(report.chi_list))
        orients = tuple(sorted(c.orientable for c in report.components))
        key = (report.order_exponent, chis, orients, transitive, crossings(p))
        groups[key] = groups.get(key, 0) + 1
        if args.terms:
            detail.append((idx, p, report, transitive))
    rows = sorted(groups.items(), key=lambda kv: (-kv[0][0], kv[0]))
    payload = {
        "schema": "wte.census.v1",
        "expression": pretty(ast),
        "m": shape.m,
        "r": shape.r,
        "total_pairings": pairing_count(shape.m),
        "groups": [
            {
                "order_exponent": k[0],
                "chi": list(k[1]),
                "orientable": list(k[2]),
                "transitive": k[3],
                "crossings": k[4],
                "count": count,
            }
            for k, count in rows
        ],
    }
    if args.terms:
        payload["pairings"] = [
            {
                "index": idx,
                "blocks": [list(b) for b in p.blocks()],
                "order_exponent": rep.order_exponent,
                "chi": list(rep.chi_list),
                "orientable": [c.orientable for c in rep.components],
                "classification": [c.classification for c in rep.components],
                "transitive": tr,
                "crossings": crossings(p),
            }
            for idx, p, rep, tr in detail
        ]
    if args.format == "json":
        _emit_json(payload)
    elif args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(
            ["order_exponent", "chi", "orientable", "transitive", "crossings", "count"]
        )
        for g in payload["groups"]:
            writer.writerow(
                [
                    g["order_exponent"],
                    "|".join(str(c) for c in g["chi"]),
                    "|".join(str(o).lower() for o in g["orientable"]),
                    str(g["transitive"]).lower(),
                    g["crossings"],
                    g["count"],
                ]
            )
    else:
        sys.stdout.write(
            f"census: {payload['expression']}  m={shape.m} r={shape.r} "
            f"pairings={payload['total_pairings']}\n"
        )
        sys.stdout.write(
            f"{'exponent':>8} {'chi':<12} {'orientable':<14} "
            f"{'transitive':<10} {'crossings':>9} {'count':>7}\n"
        )
        for g in payload["groups"]:
            sys.stdout.write(
                f"{g['order_exponent']:>8} "
                f"{','.join(str(c) for c in g['chi']):<12} "
                f"{','.join('yes' if o else 'no' for o in g['orientable']):<14} "
                f"{'yes' if g['transitive'] else 'no':<10} "
                f"{g['crossings']:>9} {g['count']:>7}\n"
            )
        if args.terms:
            for rec in payload["pairings"]:
                sys.stdout.write(
                    f"  #{rec['index']}: blocks="
                    + ";".join("-".join(str(x) for x in b) for b in rec["blocks"])
                    + f" exp={rec['order_exponent']}"
                    + f" chi={rec['chi']} class={rec['classification']}"
                    + f" transitive={'yes' if rec['transitive'] else 'no'}"
                    + f" crossings={rec['crossings']}\n"
                )
    return 0


def _cmd_clt(args) -> int:
    ast = parse(_expression_text(args))
    spec = _make_spec(args, ast)
    factors = [subspec(spec, [i]) for i in range(1, spec.shape.r + 1)]
    report = clt_report(factors, exact=args.exact)
    n = len(factors)
    gap = [
        [abs(float(report.full[i][j]) - float(report.leading[i][j])) for j in range(n)]
        for i in range(n)
    ]
    payload = {
        "schema": "wte.clt.v1",
        "expression": pretty(ast),
        "n_dim": spec.n_dim,
        "m_dim": spec.m_dim,
        "full": [[_fnum(x) for x in row] for row in report.full],
        "leading": [[_fnum(x) for x in row] for row in report.leading],
        "gap": gap,
    }
    if args.format == "json":
        _emit_json(payload)
    elif args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["i", "j", "full", "leading", "gap"])
        for i in range(n):
            for j in range(n):
                writer.writerow(
                    [i + 1, j + 1, payload["full"][i][j],
                     payload["leading"][i][j], gap[i][j]]
                )
    else:
        sys.stdout.write(f"clt covariances (N^2 k2), N={spec.n_dim} M={spec.m_dim}\n")
        for name, table in (("full", payload["full"]), ("leading", payload["leading"]),
                            ("gap", gap)):
            sys.stdout.write(f"{name}:\n")
            for row in table:
                sys.stdout.write("  " + "  ".join(f"{x: .10g}" for x in row) + "\n")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command in ("moment", "cumulant"):
            return _cmd_moment(args, args.command)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "census":
            return _cmd_census(args)
        if args.command == "clt":
            return _cmd_clt(args)
        raise AssertionError(args.command)
    except (ParseError, MatrixFormatError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (DimensionError, UnboundSlotError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except BudgetError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
