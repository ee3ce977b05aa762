"""Command-line front end.

Exit status: 0 when every check passes, 1 on a mathematical failure, 2 on
usage, parse or input-shape errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .catalog import ParseError, SemanticError, load_catalog, parse_expression
from .catalog.grammar import EvaluationError, evaluate
from .arith import poly_ring, to_fmpq
from .curves.belyi import BelyiError, UnresolvedClusters, belyi_certify
from .curves.invariants import degree_of_map, genus
from .curves.models import ModelError, model_equation, quartic_symmetry_check, verify_model
from .curves.singularities import SingularityError, analyze_plane_singularities
from .field import FieldElement, TowerError
from .pipeline import DEFAULT_CHAINS, PipelineError, run_pipeline, seed_form_of
from .pvi import DegenerateSolution, pvi_numeric_check, pvi_residual
from .transforms import ShapeError, TransformError, folded_quadratic_transform, rgt_from_seed

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

INPUT_ERRORS = (ParseError, SemanticError, EvaluationError, ShapeError, PipelineError, KeyError, OSError)


class UsageError(ValueError):
    pass


# ------------------------------------------------------------------ helpers

def format_element(a: FieldElement) -> str:
    parts = []
    for m in a.support():
        c = str(a.coords[m])
        parts.append(c if m == 0 else f"({c})*{a.tower.monomial_name(m)}")
    return " + ".join(parts) or "0"


def _tower_dict(tower) -> dict:
    return {"base": tower.var,
            "relations": {n: str(f) for n, f in zip(tower.names, tower.radicands)}}


def _catalog(path: str | None):
    try:
        return load_catalog(path)
    except (ParseError, SemanticError, OSError) as exc:
        raise UsageError(f"catalog: {type(exc).__name__}: {exc}") from exc


def _record(catalog, rid: str):
    if rid not in catalog:
        raise UsageError(f"unknown record {rid!r}")
    return catalog[rid]


# ------------------------------------------------------------------ verify

def verify_record(rid: str, catalog_dir: str | None, mode: str, bits: int, tol: float,
                  belyi: bool = True, catalog=None) -> dict:
    catalog = catalog if catalog is not None else _catalog(catalog_dir)
    rec = _record(catalog, rid)
    sol = rec.solution
    out: dict = {"id": rid, "theta": str(sol.theta), "checks": {}, "seconds": {}}
    checks, seconds = out["checks"], out["seconds"]

    def timed(name, fn):
        t0 = time.perf_counter()
        try:
            return fn()
        finally:
            seconds[name] = round(time.perf_counter() - t0, 3)

    inv = timed("genus", lambda: genus(sol.tower))
    deg = timed("degree", lambda: degree_of_map(sol.tower, sol.t))
    out["genus"], out["degree"] = inv.genus, deg
    checks["genus"] = rec.expected_genus is None or inv.genus == rec.expected_genus
    checks["degree"] = rec.expected_degree is None or deg == rec.expected_degree
    if mode in ("exact", "both"):
        try:
            res = timed("residual", lambda: pvi_residual(sol))
            checks["residual_zero"] = res.is_zero
            out["residual"] = res.stats
            if not res.is_zero:
                out["diagnostic"] = "nonzero PVI residual"
        except DegenerateSolution as exc:
            checks["residual_zero"] = False
            out["diagnostic"] = str(exc)
        models = {}
        for spec in rec.models:
            try:
                models[spec.name] = timed(f"model:{spec.name}", lambda: verify_model(spec, rec.built)).ok
            except (ModelError, TowerError) as exc:
                models[spec.name] = False
                out.setdefault("model_errors", {})[spec.name] = str(exc)
        if models:
            out["models"] = models
            checks["models"] = all(models.values())
    if mode in ("numeric", "both"):
        num = timed("numeric", lambda: pvi_numeric_check(sol, precision_bits=bits, tolerance=tol))
        out["numeric"] = {"max_residual": f"{num.max_residual:.3e}", "points": len(num.residuals)}
        checks["numeric_residual"] = num.ok
        if belyi:
            try:
                cert = timed("belyi", lambda: belyi_certify(sol.tower, sol.t, inv.genus, deg,
                                                           precision_bits=bits, tolerance=tol))
                out["belyi"] = cert.to_dict()
                checks["belyi"] = cert.ok
            except (BelyiError, UnresolvedClusters) as exc:
                out["belyi"] = {"error": str(exc)}
                checks["belyi"] = False
    out["ok"] = all(checks.values())
    return out


def cmd_verify(args) -> tuple[int, dict]:
    catalog = _catalog(args.catalog)
    ids = args.ids or list(catalog)
    for rid in ids:
        _record(catalog, rid)
    belyi = not args.no_belyi
    if args.jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            futures = [pool.submit(verify_record, rid, args.catalog, args.mode, args.precision_bits,
                                   args.tolerance, belyi) for rid in ids]
            reports = [f.result() for f in futures]
    else:
        reports = [verify_record(rid, args.catalog, args.mode, args.precision_bits, args.tolerance,
                                 belyi, catalog) for rid in ids]
    ok = all(r["ok"] for r in reports)
    return (EXIT_OK if ok else EXIT_FAIL), {"command": "verify", "mode": args.mode, "ok": ok,
                                            "records": reports}


# ------------------------------------------------------------------ transform

def cmd_transform(args) -> tuple[int, dict]:
    catalog = _catalog(args.catalog)
    rec = _record(catalog, args.id)
    seed, via = seed_form_of(rec)
    try:
        if args.kind == "folded":
            result = folded_quadratic_transform(seed)
        else:
            result = rgt_from_seed(seed, args.branch_y, args.branch_t)
    except TransformError as exc:
        return EXIT_FAIL, {"command": "transform", "ok": False, "id": args.id, "error": str(exc)}
    sol = result.solution
    res = pvi_residual(sol)
    inv = genus(sol.tower)
    out = {
        "command": "transform", "id": args.id, "kind": args.kind, "via_model": via,
        "theta": str(sol.theta), "tower": _tower_dict(sol.tower),
        "y": format_element(sol.y), "t": format_element(sol.t),
        "residual_zero": res.is_zero, "genus": inv.genus, "degree": degree_of_map(sol.tower, sol.t),
    }
    out["ok"] = res.is_zero
    return (EXIT_OK if res.is_zero else EXIT_FAIL), out


# ------------------------------------------------------------------ pipeline

def cmd_pipeline(args) -> tuple[int, dict]:
    catalog = _catalog(args.catalog)
    chains = [tuple(args.ids)] if args.ids else list(DEFAULT_CHAINS)
    t0 = time.perf_counter()
    reports = [run_pipeline(chain, catalog, relabel=not args.strict).to_dict() for chain in chains]
    ok = all(r["ok"] for r in reports)
    return (EXIT_OK if ok else EXIT_FAIL), {"command": "pipeline", "strict": args.strict, "ok": ok,
                                            "chains": reports,
                                            "seconds": round(time.perf_counter() - t0, 3)}


# ------------------------------------------------------------------ analyze

def _plane_polynomial(text: str, variables: list[str]):
    if len(variables) != 2:
        raise UsageError("--variables needs exactly two names")
    R = poly_ring(tuple(variables))
    env = {str(g): g for g in R.gens()}
    return evaluate(parse_expression(text), env, convert=lambda c: R.constant(to_fmpq(c)))


def cmd_analyze(args) -> tuple[int, dict]:
    out: dict = {"command": "analyze"}
    checks = {}
    if args.equation:
        F = _plane_polynomial(args.equation, args.variables)
        rep = analyze_plane_singularities(F, precision_bits=args.precision_bits)
        out["singularities"] = rep.to_dict()
        checks["classified"] = rep.classified
        out["ok"] = all(checks.values())
        return (EXIT_OK if out["ok"] else EXIT_FAIL), out
    if not args.id:
        raise UsageError("analyze needs a record id or --equation")
    catalog = _catalog(args.catalog)
    rec = _record(catalog, args.id)
    sol = rec.solution
    inv = genus(sol.tower)
    out.update({"id": args.id, "genus": inv.genus, "degree": degree_of_map(sol.tower, sol.t),
                "tower": _tower_dict(sol.tower), "models": {}})
    for spec in rec.models:
        if args.model and spec.name != args.model:
            continue
        entry = {"kind": spec.kind, "verified": verify_model(spec, rec.built).ok}
        checks[f"model:{spec.name}"] = entry["verified"]
        if spec.kind in ("plane", "plane-image"):
            rep = analyze_plane_singularities(model_equation(spec), precision_bits=args.precision_bits)
            entry["singularities"] = rep.to_dict()
            checks[f"genus:{spec.name}"] = rep.implied_genus == inv.genus
        out["models"][spec.name] = entry
    if args.model and args.model not in out["models"]:
        raise UsageError(f"{args.id} has no model {args.model!r}")
    if args.symmetries:
        report = quartic_symmetry_check(rec)
        out["symmetries"] = report.to_dict()
        checks["symmetries"] = report.ok
    out["checks"] = checks
    out["ok"] = all(checks.values())
    return (EXIT_OK if out["ok"] else EXIT_FAIL), out


# ------------------------------------------------------------------ catalog-list

def cmd_catalog_list(args) -> tuple[int, dict]:
    catalog = _catalog(args.catalog)
    rows = []
    for rid, rec in catalog.items():
        rows.append({"id": rid, "tower": rec.tower.name, "theta": str(rec.theta),
                     "genus": rec.expected_genus, "degree": rec.expected_degree,
                     "derived_from": rec.derived_from, "sibling": rec.sibling,
                     "models": [m.name for m in rec.models]})
    return EXIT_OK, {"command": "catalog-list", "ok": True, "records": rows}


# ------------------------------------------------------------------ output

def _text(report: dict) -> str:
    cmd = report.get("command")
    lines = []
    if cmd == "verify":
        for r in report["records"]:
            flag = "PASS" if r["ok"] else "FAIL"
            failed = [k for k, v in r["checks"].items() if not v]
            extra = f"  failed: {', '.join(failed)}" if failed else ""
            if "belyi" in r and "ramification_sum" in r["belyi"]:
                extra += f"  RH sum {r['belyi']['ramification_sum']}"
            lines.append(f"{flag} {r['id']}: genus {r['genus']}, degree {r['degree']}, theta {r['theta']}"
                         f"{extra}  ({sum(r['seconds'].values()):.2f}s)")
            if "diagnostic" in r:
                lines.append(f"     {r['diagnostic']}")
    elif cmd == "pipeline":
        for ch in report["chains"]:
            lines.append(("PASS " if ch["ok"] else "FAIL ") + " -> ".join(ch["chain"]))
            for s in ch["steps"]:
                m = s["match"]
                how = "no match" if m is None else f"mask {m['sign_flip_mask']}" + (
                    f" after {m['relabelling']}" if m["relabelling"] else "")
                lines.append(f"     {s['source']} -> {s['target']}: theta {s['theta']}, "
                             f"degree {s['degree_in']} -> {s['degree_out']}, {how}")
    elif cmd == "catalog-list":
        for r in report["records"]:
            lines.append(f"{r['id']:8} {r['tower']:9} genus {r['genus']}  degree {r['degree']:>3}  "
                         f"theta {r['theta']}")
    elif cmd == "transform":
        if "error" in report:
            lines.append(f"FAIL {report['id']}: {report['error']}")
        else:
            lines.append(f"{'PASS' if report['ok'] else 'FAIL'} {report['kind']} transform of {report['id']}: "
                         f"theta {report['theta']}, genus {report['genus']}, degree {report['degree']}")
            for n, f in report["tower"]["relations"].items():
                lines.append(f"     {n}^2 = {f}")
            lines.append(f"     y = {report['y']}")
            lines.append(f"     t = {report['t']}")
    elif cmd == "analyze":
        head = f"{'PASS' if report['ok'] else 'FAIL'}"
        if "id" in report:
            lines.append(f"{head} {report['id']}: genus {report['genus']}, degree {report['degree']}")
            models = report["models"].items()
        else:
            lines.append(head)
            models = [("equation", {"singularities": report["singularities"]})]
        for name, entry in models:
            desc = f"     {name}"
            if "verified" in entry:
                desc += f" ({entry['kind']}): verified {entry['verified']}"
            sg = entry.get("singularities")
            if sg:
                desc += (f"; {sg['nodes']} nodes, {sg['tacnodes']} tacnodes, {sg['other']} other, "
                         f"delta {sg['total_delta']}, implied genus {sg['implied_genus']}")
            lines.append(desc)
        if "symmetries" in report:
            lines.append(f"     symmetries: {report['symmetries']['ok']}")
    else:
        lines.append(json.dumps(report))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    def bits(text: str) -> int:
        v = int(text)
        if v < 64:
            raise argparse.ArgumentTypeError("precision must be at least 64 bits")
        return v

    def tol(text: str) -> float:
        v = float(text)
        if not 0 < v < 1e-6:
            raise argparse.ArgumentTypeError("tolerance must lie in (0, 1e-6)")
        return v

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", help="catalog directory (default: the shipped catalog)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--precision-bits", type=bits, default=200)
    common.add_argument("--tolerance", type=tol, default=1e-30)

    parser = argparse.ArgumentParser(prog="pvicurves", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="residual, genus, degree and Belyi checks")
    p.add_argument("ids", nargs="*", help="record ids (default: all)")
    p.add_argument("--mode", choices=("exact", "numeric", "both"), default="both")
    p.add_argument("--no-belyi", action="store_true", help="skip the Belyi certificate")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("transform", parents=[common], help="apply a quadratic transform to a seed record")
    p.add_argument("id")
    p.add_argument("--kind", choices=("folded", "rgt"), default="folded")
    p.add_argument("--branch-y", type=int, choices=(1, -1), default=1)
    p.add_argument("--branch-t", type=int, choices=(1, -1), default=1)
    p.set_defaults(run=cmd_transform)

    p = sub.add_parser("pipeline", parents=[common], help="run a transform chain against the catalog")
    p.add_argument("ids", nargs="*", help="chain of ids, e.g. seed-10 sol-45 sol-51 (default: all chains)")
    p.add_argument("--strict", action="store_true", help="match up to generator sign flips only")
    p.set_defaults(run=cmd_pipeline)

    p = sub.add_parser("analyze", parents=[common], help="models, singularities and symmetries")
    p.add_argument("id", nargs="?")
    p.add_argument("--model")
    p.add_argument("--symmetries", action="store_true", help="check the quartic's coordinate symmetries")
    p.add_argument("--equation", help="analyze an arbitrary plane curve instead of a record")
    p.add_argument("--variables", nargs=2, default=["p", "q"])
    p.set_defaults(run=cmd_analyze)

    p = sub.add_parser("catalog-list", parents=[common], help="list shipped records")
    p.set_defaults(run=cmd_catalog_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        status, report = args.run(args)
    except (UsageError, *INPUT_ERRORS, SingularityError, ModelError, TowerError) as exc:
        status = EXIT_USAGE
        report = {"command": args.command, "ok": False, "error": f"{type(exc).__name__}: {exc}"}
        if args.format == "text":
            print(f"error: {report['error']}", file=sys.stderr)
            return status
    report["exit_status"] = status
    report["timing"] = {"total_seconds": round(time.perf_counter() - t0, 3)}
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(_text(report))
        print(f"({report['timing']['total_seconds']:.2f}s)")
    return status


if __name__ == "__main__":
    sys.exit(main())
