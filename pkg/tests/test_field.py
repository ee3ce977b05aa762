from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pvicurves.arith import RatFunc, UniPoly, squarefree_part
from pvicurves.field import (FieldElement, TowerError, TowerPresentation, ZeroDivisorError, adjoin_root,
                             evaluate_polynomial, minimal_polynomial)
from pvicurves.transforms import to_seed_form
from strategies import TOWERS, element_pairs, elements, polys

s = UniPoly.gen("s")
F45 = (9 * s - 1) * (s - 1)
G45 = s**2 - 18 * s + 1
T45 = TowerPresentation("s", [F45, G45], ["v", "w1"])
U = TowerPresentation("s", [s], ["u"])


def test_multiply_examples():
    v, w1 = T45.generator("v"), T45.generator("w1")
    assert v * v == T45.base(F45)
    assert T45.one() * v == v
    assert v * w1 == T45.monomial(3)


def test_invert_examples():
    v = T45.generator("v")
    assert v.inverse() == v / T45.base(F45)
    assert T45.base(Fraction(1, 2)).inverse() == 2
    u = U.generator(0)
    inv = (1 + u).inverse()
    assert inv * (1 + u) == 1
    assert inv == (1 - u) / U.base(1 - s)


def test_invert_zero():
    with pytest.raises(ZeroDivisionError):
        T45.zero().inverse()


def test_reducible_tower_rejected():
    with pytest.raises(TowerError):
        TowerPresentation("s", [s, 4 * s], ["a", "b"])
    with pytest.raises(TowerError):
        TowerPresentation("s", [s, s + 1, s * (s + 1)], ["a", "b", "c"])
    assert issubclass(ZeroDivisorError, ZeroDivisionError)


def test_derivative_examples():
    u = U.generator(0)
    assert u.derivative() == u / U.base(2 * s)
    assert T45.base(Fraction(7, 3)).derivative() == 0
    vw = T45.monomial(3)
    f, g = RatFunc(F45), RatFunc(G45)
    expected = T45.base(f.derivative() / (2 * f) + g.derivative() / (2 * g)) * vw
    assert vw.derivative() == expected


def test_minimal_polynomial_examples():
    v = T45.generator("v")
    assert minimal_polynomial(v) == [RatFunc(-F45), RatFunc.const(0), RatFunc.const(1)]
    c = T45.base(RatFunc(s + 3))
    assert minimal_polynomial(c) == [RatFunc(-(s + 3)), RatFunc.const(1)]
    a = v + T45.generator("w1")
    m = minimal_polynomial(a)
    # (T^2 - f - g)^2 - 4 f g
    f, g = RatFunc(F45), RatFunc(G45)
    expected = [(f - g) ** 2, RatFunc.const(0), -2 * (f + g), RatFunc.const(0), RatFunc.const(1)]
    assert m == expected
    assert evaluate_polynomial(m, a).is_zero()


def test_adjoin_examples():
    res = adjoin_root(U, s**2)
    assert res.is_square and not res.extended and res.root == U.base(RatFunc(s))
    tw = TowerPresentation("s", [F45], ["v"])
    tw2, w1, _, ext = adjoin_root(tw, G45, "w1")
    assert ext
    c = Fraction(3, 2) * (s + 2)
    tw3, root, sq, ext2 = adjoin_root(tw2, F45 * G45 * c * c)
    assert tw3 is tw2 and not ext2 and not sq
    assert root == tw2.monomial(3, RatFunc(c))


def test_sol49_square_classes(catalog):
    seed = to_seed_form(catalog["seed-18"].solution)
    u2 = RatFunc(seed.u2)
    A_y, A_t = 2 * seed.a_y * u2, 2 * seed.a_t * u2
    base = TowerPresentation("s", [], [])
    tw, v, _, _ = adjoin_root(base, A_y * A_y - u2, "v")
    tw, w, _, _ = adjoin_root(tw, A_t * A_t - u2, "w")
    printed_v = (s - 2) * (2 * s - 1) * (2 * s**2 + s + 2)
    printed_w1 = s**2 - 7 * s + 1
    assert tw.radicands[0] == squarefree_part(printed_v)[0]
    assert tw.radicands[1] == squarefree_part(printed_v * printed_w1)[0]
    other = TowerPresentation("s", [printed_v, printed_w1], ["v", "w1"])
    assert tw.same_field(other)
    assert not tw.same_field(TowerPresentation("s", [printed_v, s**2 - 7 * s + 2], ["v", "x"]))


# ------------------------------------------------------------ properties

@given(element_pairs(3))
def test_field_axioms(abc):
    a, b, c = abc
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == 0


@given(element_pairs(2))
def test_leibniz(ab):
    a, b = ab
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


@given(st.sampled_from(TOWERS))
def test_derivative_of_square_root(tw):
    for i, f in enumerate(tw.radicands):
        r = tw.generator(i)
        assert (r * r).derivative() == tw.base(RatFunc(f.derivative()))


@given(elements(nonzero=True))
def test_inverse_law(a):
    inv = a.inverse()
    assert a * inv == 1 and inv * a == 1


@given(elements())
def test_minimal_polynomial_vanishes(a):
    m = minimal_polynomial(a)
    assert m[-1] == 1
    assert a.tower.size % (len(m) - 1) == 0
    assert evaluate_polynomial(m, a).is_zero()


@given(st.sampled_from(TOWERS[:2]), polys(nonzero=True, max_size=4), polys(nonzero=True, max_size=3))
def test_adjoin_idempotent(tw, f, c):
    first = adjoin_root(tw, f, "x")
    if first.is_square:
        assert first.root * first.root == first.tower.base(RatFunc(f))
        return
    second = adjoin_root(first.tower, f * c * c, "y")
    assert second.tower == first.tower and not second.extended
    assert second.root * second.root == first.tower.base(RatFunc(f * c * c))
