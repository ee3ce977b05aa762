from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pvicurves.arith import RatFunc, UniPoly
from pvicurves.field import TowerPresentation
from pvicurves.pvi import PviSolution, ThetaParams, pvi_residual, theta_equivalent_up_to_signs
from pvicurves.transforms import (SYMMETRIES, SeedForm, ShapeError, TransformError, apply_mobius,
                                  folded_quadratic_transform, folded_theta, recover_seed, restrict_to_subfield,
                                  rgt_from_seed, rgt_theta, same_up_to_sign_flips, sqrt_in_tower, to_seed_form,
                                  unfolded_theta)

s = UniPoly.gen("s")
SEEDS = {"seed-10": "sol-45", "seed-15": "sol-47", "seed-18": "sol-49"}


def flipped(sol, mask):
    return sol.y.conjugate(mask), sol.t.conjugate(mask)


def test_mobius_theta_rule():
    th = ThetaParams.of(1, 2, 3, 4, denominator=10)
    assert SYMMETRIES["identity"].theta(th) == th.canonical()
    assert SYMMETRIES["(1-y,1-t)"].theta(th) == ThetaParams.of(3, 2, 1, 4, denominator=10).canonical()
    # (t/y, t) reverses the order of the four exponents
    bar = th.bar()
    assert SYMMETRIES["(t/y,t)"].theta(th) == ThetaParams.from_bar(bar[::-1]).canonical()


@given(st.tuples(*[st.fractions(max_denominator=20)] * 4), st.sampled_from(sorted(SYMMETRIES)))
def test_mobius_involutions(values, label):
    sym = SYMMETRIES[label]
    th = ThetaParams(*values)
    assert theta_equivalent_up_to_signs(sym.theta(sym.theta(th)), th)


@pytest.mark.parametrize("label", sorted(SYMMETRIES))
def test_mobius_actions_are_involutions(catalog, label):
    sol = catalog["seed-10"].solution
    twice = apply_mobius(label, apply_mobius(label, sol))
    assert (twice.y, twice.t) == (sol.y, sol.t)
    assert pvi_residual(apply_mobius(label, sol)).is_zero


@pytest.mark.parametrize("rid", sorted(SEEDS))
def test_seed_u_negation(catalog, rid):
    sol = catalog[rid].solution
    moved = apply_mobius("(1-y,1-t)", sol)
    assert flipped(sol, 1) == (moved.y, moved.t)
    assert moved.theta == sol.theta.canonical()


def test_seed_form_errors(catalog):
    with pytest.raises(ShapeError, match="theta shape"):
        to_seed_form(catalog["sol-51"].solution)
    with pytest.raises(ShapeError, match="tower shape"):
        to_seed_form(catalog["sol-45"].solution)
    sol = catalog["seed-10"].solution
    shifted = PviSolution(sol.tower, sol.y + 1, sol.t, sol.theta)
    with pytest.raises(ShapeError, match="y shape"):
        to_seed_form(shifted)


def test_folded_theta_chain():
    assert folded_theta(ThetaParams.of(0, 1, 0, 5, denominator=5)) == ThetaParams.of(0, 1, 0, 9, denominator=10)
    assert folded_theta(ThetaParams.of(0, 1, 0, 9, denominator=10)) == ThetaParams.of(1, 1, 1, 19, denominator=20)
    assert folded_theta(ThetaParams.of(0, 7, 0, 13, denominator=15)) == ThetaParams.of(2, 7, 2, 23, denominator=30)
    assert folded_theta(ThetaParams.of(0, 1, 0, 3, denominator=3)) == ThetaParams.of(0, 1, 0, 5, denominator=6)
    assert folded_theta(ThetaParams.of(0, 1, 0, 5, denominator=6)) == ThetaParams.of(1, 1, 1, 11, denominator=12)
    th = ThetaParams.of(0, 3, 0, 5, denominator=5)
    assert unfolded_theta(folded_theta(th)) == th


@pytest.mark.parametrize("rid", sorted(SEEDS))
def test_folded_transform_reproduces_record(catalog, rid):
    seed = to_seed_form(catalog[rid].solution)
    out = folded_quadratic_transform(seed).solution
    target = catalog[SEEDS[rid]].solution
    assert pvi_residual(out).is_zero
    assert out.theta == target.theta
    assert out.tower.same_field(target.tower)
    assert same_up_to_sign_flips(out, target) == 0


def test_transform_degeneracies():
    with pytest.raises(TransformError, match="identically"):
        folded_quadratic_transform(SeedForm(RatFunc(s), RatFunc(s), s, ThetaParams(0, 0, 0, 1), "s"))
    a_y = RatFunc(s + 1, 4 * s)  # A_y = (s+1)/2, A_y^2 - s is a square
    with pytest.raises(TransformError, match="perfect square"):
        folded_quadratic_transform(SeedForm(a_y, RatFunc(s), s, ThetaParams(0, 0, 0, 1), "s"))


def test_recover_seed(catalog):
    seed10 = catalog["seed-10"].solution
    back = recover_seed(catalog["sol-45"].solution, seed10)
    assert (back.solution().y, back.solution().t) == (seed10.y, seed10.t)
    sib = recover_seed(catalog["sol-44"].solution, seed10)
    assert sib.theta == ThetaParams.of(0, 3, 0, 5, denominator=5)
    assert pvi_residual(sib.solution()).is_zero
    sib15 = recover_seed(catalog["sol-48"].solution, catalog["seed-15"].solution)
    assert sib15.theta == ThetaParams.of(0, 1, 0, 11, denominator=15)
    assert pvi_residual(sib15.solution()).is_zero


def test_sol45_vw_negation(catalog):
    sol = catalog["sol-45"].solution
    # negating v negates v and w = v*w1
    moved = apply_mobius("(1-y,1-t)", sol)
    assert flipped(sol, 1) == (moved.y, moved.t)
    assert flipped(sol, 1) != (apply_mobius("(1/y,1/t)", sol).y, apply_mobius("(1/y,1/t)", sol).t)
    # before (y, t) -> (y/(y-1), t/(t-1)) the same flip is (1/y, 1/t)
    inter = apply_mobius("(y/(y-1),t/(t-1))", sol)
    inv = apply_mobius("(1/y,1/t)", inter)
    assert flipped(inter, 1) == (inv.y, inv.t)


@pytest.mark.parametrize("rid", sorted(SEEDS))
@pytest.mark.parametrize("branches", [(1, 1), (1, -1), (-1, 1), (-1, -1)])
def test_rgt_transform(catalog, rid, branches):
    seed = to_seed_form(catalog[rid].solution)
    out = rgt_from_seed(seed, *branches).solution
    assert pvi_residual(out).is_zero
    moved = SYMMETRIES["(y/(y-1),t/(t-1))"].theta(seed.theta)
    assert out.theta == rgt_theta(moved)
    assert out.tower.same_field(folded_quadratic_transform(seed).solution.tower)


def test_rgt_generator_flips(catalog):
    out = rgt_from_seed(to_seed_form(catalog["seed-10"].solution)).solution
    inv = apply_mobius("(1/y,1/t)", out)
    assert flipped(out, 3) == (inv.y, inv.t)
    ok = apply_mobius("(y/t,1/t)", out)
    assert flipped(out, 2) == (ok.y, ok.t)


def test_sqrt_needs_square_norm(catalog):
    sol = catalog["seed-10"].solution
    with pytest.raises(TransformError, match="norm"):
        sqrt_in_tower(sol.y)
    tw, root = sqrt_in_tower(sol.tower.base(RatFunc(4 * s**2)))
    assert root * root == sol.tower.base(RatFunc(4 * s**2))


def test_restrict_to_subfield():
    tw = TowerPresentation("s", [s, s + 1], ["a", "b"])
    x = tw.monomial(3, RatFunc(s))
    sub, (y,) = restrict_to_subfield([x])
    assert sub.depth == 1
    assert sub.radicands[0] == s * (s + 1)
    assert y * y == sub.base(RatFunc(s**3 * (s + 1)))
