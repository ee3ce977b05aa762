"""Genus and Belyi degree of a tower curve, computed exactly."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from ..arith import RatFunc, UniPoly, poly_gcd
from ..field import FieldElement, TowerError, TowerPresentation, minimal_polynomial


@dataclass(frozen=True)
class CurveInvariants:
    genus: int
    ramified_place_count: int
    hyperelliptic: bool | None = None

    def to_dict(self) -> dict:
        return {"genus": self.genus, "ramified_places": self.ramified_place_count,
                "hyperelliptic": self.hyperelliptic}


def _odd_at_infinity(f: UniPoly) -> bool:
    return f.degree() % 2 == 1


def ramified_places(tower: TowerPresentation) -> int:
    """Points of P^1 over which some radicand has odd order.

    For squarefree radicands this is the number of distinct roots of their
    product, plus one when some radicand has odd degree.
    """
    if tower.depth == 0:
        return 0
    lcm = reduce(lambda a, b: a * (b // poly_gcd(a, b)), [f.monic() for f in tower.radicands])
    R = lcm.degree()
    if any(_odd_at_infinity(f) for f in tower.radicands):
        R += 1
    return R


def genus(tower: TowerPresentation) -> CurveInvariants:
    """Riemann-Hurwitz for the (Z/2)^k cover of the s-line.

    Every ramified point has inertia of order 2, so 2g - 2 = -2^(k+1) + R 2^(k-1),
    i.e. g = 1 - 2^k + R 2^(k-2): g = R/2 - 1 at depth one and g = R - 3 at depth two.
    """
    if tower.depth == 0:
        return CurveInvariants(0, 0, None)
    classes = tower.square_classes.classes
    if any(c.core.is_constant() and c.core.leading_coefficient() == 1 for c in classes):
        raise TowerError("reducible tower")
    k = tower.depth
    R = ramified_places(tower)
    twice = 2 - 2 ** (k + 1) + R * 2 ** (k - 1)
    if twice % 2:
        raise TowerError("inconsistent ramification count")
    g = twice // 2
    hyper = None
    if k == 1 and g >= 1:
        hyper = True if g >= 2 else None
    elif g == 2:
        hyper = True
    return CurveInvariants(g, R, hyper)


def primitive_integral_form(coeffs: list[RatFunc]) -> list[UniPoly]:
    """Clear denominators and remove the content in s: P(s, T) primitive in Q[s][T]."""
    var = coeffs[0].var
    den = UniPoly([1], var)
    for c in coeffs:
        d = c.denominator
        den = den * (d // poly_gcd(den, d))
    polys = [c.numerator * (den // c.denominator) for c in coeffs]
    content = reduce(poly_gcd, [p for p in polys if not p.is_zero()])
    return [p // content for p in polys]


def degree_of_map(tower: TowerPresentation, t: FieldElement) -> int:
    """Degree of t as a map from the curve to P^1.

    [K : Q(t)] = [K : Q(s, t)] [Q(s, t) : Q(t)] = (2^k / d) deg_s P where P is
    the primitive integral minimal polynomial of t (of degree d in T).
    """
    if t.tower != tower:
        raise TowerError("t does not belong to the tower")
    if t.is_constant():
        raise ValueError("constant t has no degree")
    m = minimal_polynomial(t)
    d = len(m) - 1
    P = primitive_integral_form(m)
    deg_s = max(p.degree() for p in P if not p.is_zero())
    return (tower.size // d) * deg_s
