"""End-to-end acceptance checks, one printed verdict line per criterion."""
import time

import pytest
from hypothesis import settings

from pvicurves.catalog import RECORD_ORDER
from pvicurves.curves.belyi import belyi_certify
from pvicurves.curves.invariants import degree_of_map, genus
from pvicurves.curves.models import conic_identity_holds, model_equation, verify_model
from pvicurves.curves.singularities import analyze_plane_singularities
from pvicurves.pipeline import DEFAULT_CHAINS, run_pipeline
from pvicurves.pvi import ThetaParams, pvi_residual
from pvicurves.transforms import apply_mobius, to_seed_form

import test_catalog
import test_field


def report(capsys, n, ok, text):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}")


def th(*a, d):
    return ThetaParams.of(*a, denominator=d)


PRINTED = {
    "seed-10": th(0, 1, 0, 5, d=5),
    "sol-45": th(0, 1, 0, 9, d=10),
    "sol-44": th(0, 3, 0, 7, d=10),
    "sol-47": th(2, 7, 2, 23, d=30),
    "sol-48": th(4, 1, 4, 29, d=30),
    "sol-49": th(0, 1, 0, 5, d=6),
    "sol-51": th(1, 1, 1, 19, d=20),
    "sol-50": th(3, 3, 3, 17, d=20),
    "sol-52": th(1, 1, 1, 11, d=12),
}

GENUS = {"sol-45": 1, "sol-44": 1, "sol-51": 3, "sol-50": 3, "sol-47": 2, "sol-48": 2,
         "sol-49": 3, "sol-52": 7, "seed-10": 0, "seed-15": 1, "seed-18": 1}
DEGREE = {"sol-45": 20, "sol-44": 20, "sol-51": 40, "sol-50": 40, "sol-47": 30, "sol-48": 30,
          "sol-49": 36, "sol-52": 72, "seed-10": 10, "seed-15": 15, "seed-18": 18}


def test_criterion_1_exact_residuals(catalog, capsys):
    start = time.perf_counter()
    zero = {rid: pvi_residual(catalog[rid].solution).is_zero for rid in RECORD_ORDER}
    thetas = all(catalog[rid].theta == value for rid, value in PRINTED.items())
    elapsed = time.perf_counter() - start
    ok = len(zero) == 11 and all(zero.values()) and thetas and elapsed < 300
    report(capsys, 1, ok, f"{sum(zero.values())}/11 records have zero residual at the printed theta "
                          f"({elapsed:.1f}s)")
    assert ok, zero


def test_criterion_2_genus(catalog, capsys):
    got = {rid: genus(catalog[rid].solution.tower).genus for rid in GENUS}
    ok = got == GENUS
    report(capsys, 2, ok, "genera " + ", ".join(f"{k}={v}" for k, v in got.items() if k.startswith("sol")))
    assert ok, got


def test_criterion_3_degree(catalog, capsys):
    got = {rid: degree_of_map(catalog[rid].solution.tower, catalog[rid].solution.t) for rid in DEGREE}
    ok = got == DEGREE
    report(capsys, 3, ok, "degrees " + ", ".join(f"{k}={v}" for k, v in got.items()))
    assert ok, got


def test_criterion_4_pipelines(catalog, capsys):
    reports = [run_pipeline(chain, catalog) for chain in DEFAULT_CHAINS]
    steps = [s for r in reports for s in r.steps]
    wanted = {str(PRINTED[r]) for r in ("sol-45", "sol-44", "sol-47", "sol-48", "sol-49", "sol-51", "sol-50")}
    seen = {s.theta for s in steps}
    relabelled = [f"{s.source}->{s.target}" for s in steps if s.match and s.match.relabelling]
    ok = all(r.ok for r in reports) and wanted <= seen
    # strict sign-flip matching on its own: first-level steps all match
    strict_first = all(run_pipeline(c[:2], catalog, relabel=False).ok for c in DEFAULT_CHAINS)
    ok = ok and strict_first
    note = f"; {', '.join(relabelled)} match after (t/y,t)" if relabelled else ""
    report(capsys, 4, ok, f"{len(steps)} steps, theta chain covers {len(wanted & seen)}/7 printed values, "
                          f"first level matches up to sign flips{note}")
    assert ok


def test_criterion_5_belyi(catalog, capsys):
    start = time.perf_counter()
    certs = {}
    for rid in RECORD_ORDER:
        rec = catalog[rid]
        certs[rid] = belyi_certify(rec.solution.tower, rec.solution.t, rec.expected_genus,
                                   rec.expected_degree, precision_bits=200)
    elapsed = time.perf_counter() - start
    ok = all(c.ok and c.rh_consistent for c in certs.values()) \
        and certs["sol-52"].ramification_sum == 156 and elapsed < 600
    report(capsys, 5, ok, f"{sum(c.ok for c in certs.values())}/11 certified, "
                          f"sol-52 sum(e-1)={certs['sol-52'].ramification_sum} ({elapsed:.1f}s)")
    assert ok


def test_criterion_6_symmetries(catalog, quartic_report, capsys):
    seeds_ok = True
    for rid in ("seed-10", "seed-15", "seed-18"):
        sol = catalog[rid].solution
        moved = apply_mobius("(1-y,1-t)", sol)
        seeds_ok &= (sol.y.conjugate(1), sol.t.conjugate(1)) == (moved.y, moved.t)
        seeds_ok &= to_seed_form(sol) is not None
    sol = catalog["sol-45"].solution
    inter = apply_mobius("(y/(y-1),t/(t-1))", sol)
    inv = apply_mobius("(1/y,1/t)", inter)
    vw_ok = (inter.y.conjugate(1), inter.t.conjugate(1)) == (inv.y, inv.t)
    q = quartic_report
    quartic_ok = q.ok and q.group_order == 8 and all(q.results.values())
    ok = seeds_ok and vw_ok and quartic_ok
    report(capsys, 6, ok, f"seed u-negation {seeds_ok}, sol-45 (v,w)-negation {vw_ok}, "
                          f"quartic D4 {sum(q.results.values())}/{len(q.results)} (sign mask {q.normalization})")
    assert ok


def test_criterion_7_models(catalog, capsys):
    names = []
    ok = True
    for rid in RECORD_ORDER:
        rec = catalog[rid]
        for spec in rec.models:
            ok &= verify_model(spec, rec.built).ok
            names.append(f"{rid}:{spec.name}")
    quartic = analyze_plane_singularities(model_equation(catalog["sol-51"].model("quartic")))
    octic = analyze_plane_singularities(model_equation(catalog["sol-52"].model("octic")))
    ok &= quartic.points == [] and quartic.implied_genus == 3
    ok &= (octic.count("node"), octic.count("tacnode"), octic.count("other")) == (10, 2, 0)
    ok &= octic.total_delta == 14 and octic.implied_genus == 7
    report(capsys, 7, ok, f"{len(names)} model maps verified, quartic smooth, octic "
                          f"{octic.count('node')} nodes + {octic.count('tacnode')} tacnodes, "
                          f"delta={octic.total_delta}, genus {octic.implied_genus}")
    assert ok


def test_criterion_8_typo(capsys):
    fixed = conic_identity_holds("j^2 - 18*j + 1")
    printed = conic_identity_holds("j^2 - 18 + 1")
    ok = fixed and not printed
    report(capsys, 8, ok, f"conic identity corrected={fixed}, literal={printed}")
    assert ok


PROPERTIES = [
    test_field.test_field_axioms, test_field.test_leibniz, test_field.test_inverse_law,
    test_field.test_minimal_polynomial_vanishes, test_field.test_adjoin_idempotent,
    test_catalog.test_expression_round_trip, test_catalog.test_round_trip_preserves_value,
    test_catalog.test_theta_line_round_trip,
]


def test_criterion_9_properties(capsys):
    failures = []
    for prop in PROPERTIES:
        try:
            settings(max_examples=100, deadline=None)(prop)()
        except Exception as exc:  # noqa: BLE001
            failures.append(f"{prop.__name__}: {exc}")
    ok = not failures
    report(capsys, 9, ok, f"{len(PROPERTIES) - len(failures)}/{len(PROPERTIES)} property suites, "
                          "100 examples each")
    assert ok, failures


@pytest.mark.parametrize("rid", RECORD_ORDER)
def test_expected_values_in_records(catalog, rid):
    assert catalog[rid].expected_genus == GENUS[rid]
    assert catalog[rid].expected_degree == DEGREE[rid]
