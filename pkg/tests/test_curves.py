from fractions import Fraction

import pytest

from pvicurves.arith import RatFunc, UniPoly, poly_ring
from pvicurves.catalog import RECORD_ORDER
from pvicurves.curves.belyi import BelyiError, belyi_certify
from pvicurves.curves.invariants import degree_of_map, genus, ramified_places
from pvicurves.curves.models import model_equation, verify_model
from pvicurves.curves.singularities import SingularityError, analyze_plane_singularities
from pvicurves.field import TowerError, TowerPresentation
from pvicurves.transforms import SYMMETRIES

s = UniPoly.gen("s")
j = UniPoly.gen("j")


@pytest.mark.parametrize("radicands, R, g", [
    ([(9 * s - 1) * (s - 1), s**2 - 18 * s + 1], 4, 1),
    ([s * (s + 5) * (s + 2) * (s - 3), s * (s + 5) * (s + 2) * (s + 3)], 5, 2),
    ([-(j - 1) * (j - 9) * (5 * j**2 - 2 * j + 13), 2 * (j - 9) * (j**2 - 1)], 6, 3),
])
def test_genus_examples(radicands, R, g):
    tw = TowerPresentation(radicands[0].var, radicands, ["v", "w"])
    inv = genus(tw)
    assert (inv.ramified_place_count, inv.genus) == (R, g)


def test_genus_hyperelliptic():
    assert genus(TowerPresentation("s", [s**5 - 1], ["u"])).genus == 2
    assert genus(TowerPresentation("s", [s**3 - 1], ["u"])).genus == 1
    assert genus(TowerPresentation("s", [s**4 - 1], ["u"])).genus == 1
    assert ramified_places(TowerPresentation("s", [s], ["u"])) == 2


def test_reducible_tower_genus():
    with pytest.raises(TowerError):
        TowerPresentation("s", [s + 1, 9 * (s + 1)], ["a", "b"])


@pytest.mark.parametrize("rid", RECORD_ORDER)
def test_catalog_genus_and_degree(catalog, rid):
    rec = catalog[rid]
    sol = rec.solution
    assert genus(sol.tower).genus == rec.expected_genus
    assert degree_of_map(sol.tower, sol.t) == rec.expected_degree


def test_degree_examples(catalog):
    tw = TowerPresentation("s", [s**3 - 1], ["u"])
    assert degree_of_map(tw, tw.base(RatFunc(s**2))) == 4
    sol = catalog["sol-52"].solution
    assert degree_of_map(sol.tower, sol.t) == 72 == 18 * 4


@pytest.mark.parametrize("rid", ["sol-45", "sol-47", "sol-49"])
def test_degree_invariance(catalog, rid):
    sol = catalog[rid].solution
    d = degree_of_map(sol.tower, sol.t)
    for mask in range(sol.tower.size):
        assert degree_of_map(sol.tower, sol.t.conjugate(mask)) == d
    for label in ("(1-y,1-t)", "(1/y,1/t)", "(y/(y-1),t/(t-1))"):
        _, t = SYMMETRIES[label].action(sol.y, sol.t)
        assert degree_of_map(sol.tower, t) == d


def test_degree_of_constant_fails():
    tw = TowerPresentation("s", [s], ["u"])
    with pytest.raises(ValueError):
        degree_of_map(tw, tw.base(Fraction(1, 2)))


# ------------------------------------------------------------ Belyi

@pytest.mark.parametrize("rid", RECORD_ORDER)
def test_belyi_certificate(catalog, rid):
    rec = catalog[rid]
    sol = rec.solution
    cert = belyi_certify(sol.tower, sol.t, rec.expected_genus, rec.expected_degree)
    assert cert.ok and cert.rh_consistent
    assert cert.ramification_sum == 2 * rec.expected_genus - 2 + 2 * rec.expected_degree
    assert all(sum(p) == rec.expected_degree for p in cert.profiles.values())
    # tower genus and the genus forced by the extracted profile agree
    assert (cert.ramification_sum - 2 * rec.expected_degree + 2) // 2 == genus(sol.tower).genus


def test_belyi_sol52_profile(catalog):
    sol = catalog["sol-52"].solution
    cert = belyi_certify(sol.tower, sol.t, 7, 72)
    assert cert.ramification_sum == 156
    assert sorted(cert.profiles["0"], reverse=True) == [5] * 8 + [3] * 8 + [2] * 4


def test_belyi_control(catalog):
    sol = catalog["sol-45"].solution
    t = sol.t + sol.tower.variable()
    with pytest.raises(BelyiError, match="not in"):
        belyi_certify(sol.tower, t, 1, degree_of_map(sol.tower, t))


def test_belyi_rh_deficit(catalog):
    sol = catalog["sol-45"].solution
    with pytest.raises(BelyiError, match="accounts for 40 of 42"):
        belyi_certify(sol.tower, sol.t, 2, 20)


def test_belyi_precision_floor(catalog):
    sol = catalog["seed-10"].solution
    with pytest.raises(ValueError):
        belyi_certify(sol.tower, sol.t, 0, 10, precision_bits=32)


# ------------------------------------------------------------ models

@pytest.mark.parametrize("rid", ["sol-45", "sol-44", "sol-47", "sol-49", "sol-51", "sol-50", "sol-52"])
def test_models_verify(catalog, rid):
    rec = catalog[rid]
    assert rec.models
    for spec in rec.models:
        assert verify_model(spec, rec.built).ok, spec.name


def test_wrong_model_map_fails(catalog):
    from dataclasses import replace
    from pvicurves.catalog import parse_expression
    rec = catalog["sol-45"]
    spec = rec.model("elliptic")
    decls = tuple(replace(d, expr=parse_expression("(j^2 + 1)/(2*j - 18)")) if d.name == "s" else d
                  for d in spec.decls)
    assert not verify_model(replace(spec, decls=decls), rec.built).ok


# ------------------------------------------------------------ singularities

def test_octic_singularities(catalog):
    F = model_equation(catalog["sol-52"].model("octic"))
    rep = analyze_plane_singularities(F)
    assert (rep.count("node"), rep.count("tacnode"), rep.count("other")) == (10, 2, 0)
    assert rep.total_delta == 14 and rep.implied_genus == 7 == genus(catalog["sol-52"].solution.tower).genus


def test_quartic_smooth(catalog):
    rep = analyze_plane_singularities(model_equation(catalog["sol-51"].model("quartic")))
    assert rep.points == [] and rep.implied_genus == 3


def _poly(text):
    from pvicurves.cli import _plane_polynomial
    return _plane_polynomial(text, ["p", "q"])


@pytest.mark.parametrize("text, kinds", [
    ("p^2 - q^2", ["node"]),
    ("q^2 - p^2 - p^3", ["node"]),
    ("q^2 - p^4 - p^5", ["tacnode", "other"]),
    ("q^2 - p^3", ["other"]),
    ("p^3 - p*q^2", ["other"]),
    ("p^2 + q^2 - 1", []),
    ("(q - p^2)*(q + p^2) + p^5", ["tacnode", "other"]),
])
def test_classifier_smoke(text, kinds):
    rep = analyze_plane_singularities(_poly(text))
    assert sorted(pt.kind for pt in rep.points) == sorted(kinds)


def test_cusp_detail():
    rep = analyze_plane_singularities(_poly("q^2 - p^3"))
    assert rep.points[0].detail == "A2" and rep.implied_genus is None


def test_nodal_cubic_genus():
    rep = analyze_plane_singularities(_poly("q^2 - p^2 - p^3"))
    assert rep.implied_genus == 0


def test_non_reduced_rejected():
    with pytest.raises(SingularityError):
        analyze_plane_singularities(_poly("(p - q)^2*(p + 1)"))
    R = poly_ring(("a", "b", "c"))
    with pytest.raises(SingularityError):
        analyze_plane_singularities(R.gens()[0])


# ------------------------------------------------------------ quartic symmetries

def test_quartic_symmetries(quartic_report):
    rep = quartic_report
    assert rep.ok and rep.group_order == 8
    assert rep.normalization == 2
    assert all(rep.results.values())
    assert len(rep.results) == 4


def test_quartic_unnormalized_fails(quartic_report):
    failed = quartic_report.attempts[0]
    assert not all(failed.values())
