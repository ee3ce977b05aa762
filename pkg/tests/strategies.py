"""Hypothesis strategies shared by the property suites."""
from fractions import Fraction

from hypothesis import strategies as st

from pvicurves.arith import RatFunc, UniPoly
from pvicurves.field import FieldElement, TowerPresentation

small = st.fractions(min_value=-20, max_value=20, max_denominator=12)
coeff_lists = st.lists(small, min_size=0, max_size=5)


@st.composite
def polys(draw, var="s", nonzero=False, max_size=5):
    cs = draw(st.lists(small, min_size=1 if nonzero else 0, max_size=max_size))
    p = UniPoly(cs, var)
    if nonzero and p.is_zero():
        p = UniPoly([1], var)
    return p


@st.composite
def ratfuncs(draw, var="s", nonzero=False):
    n = draw(polys(var, nonzero=nonzero, max_size=4))
    d = draw(polys(var, nonzero=True, max_size=3))
    return RatFunc(n, d, var)


# towers used by the field properties: the sol-45 and sol-47 curves plus a rational one
TOWERS = [
    TowerPresentation("s", [UniPoly([0, 1])], ["u"]),
    TowerPresentation("s", [UniPoly([1, -10, 9]), UniPoly([1, -18, 1])], ["v", "w1"]),
    TowerPresentation("s", [UniPoly([0, -30, -11, 4, 1]), UniPoly([0, 30, 31, 10, 1])], ["v", "w"]),
]


@st.composite
def elements(draw, tower=None, nonzero=False):
    tw = tower if tower is not None else draw(st.sampled_from(TOWERS))
    coords = [draw(ratfuncs()) for _ in range(tw.size)]
    a = FieldElement(tw, coords)
    if nonzero and a.is_zero():
        a = tw.one()
    return a


@st.composite
def element_pairs(draw, n=2, nonzero=False):
    tw = draw(st.sampled_from(TOWERS))
    return tuple(draw(elements(tw, nonzero=nonzero)) for _ in range(n))


__all__ = ["Fraction", "coeff_lists", "element_pairs", "elements", "polys", "ratfuncs", "small", "TOWERS"]
