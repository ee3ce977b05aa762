"""Okamoto fractional-linear symmetries and the quadratic transformations.

Marked points are ordered (0, t, 1, oo) and carry the exponents
theta_bar = (theta1, theta2, theta3, theta4 - 1).  A fractional-linear change
of y moves the marked points; the exponent of each point travels with it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .arith import RatFunc, UniPoly, squarefree_part
from .field import (FieldElement, TowerError, TowerMap, TowerPresentation, adjoin_root, embed,
                    representation_map)
from .pvi import DegenerateSolution, PviSolution, ThetaParams

HALF = Fraction(1, 2)


class ShapeError(ValueError):
    """A solution does not have the shape an operation requires."""


class TransformError(ValueError):
    pass


# ---------------------------------------------------------------- Mobius symmetries

@dataclass(frozen=True)
class MobiusSymmetry:
    label: str
    action: Callable[[FieldElement, FieldElement], tuple[FieldElement, FieldElement]]
    permutation: tuple[int, int, int, int]  # marked point k goes to position permutation[k]
    involution: bool = True

    def theta(self, theta: ThetaParams) -> ThetaParams:
        bar = theta.bar()
        new = [Fraction(0)] * 4
        for k, target in enumerate(self.permutation):
            new[target] = bar[k]
        return ThetaParams.from_bar(new).canonical()


SYMMETRIES: dict[str, MobiusSymmetry] = {
    s.label: s for s in (
        MobiusSymmetry("identity", lambda y, t: (y, t), (0, 1, 2, 3)),
        MobiusSymmetry("(1-y,1-t)", lambda y, t: (1 - y, 1 - t), (2, 1, 0, 3)),
        MobiusSymmetry("(1/y,1/t)", lambda y, t: (1 / y, 1 / t), (3, 1, 2, 0)),
        MobiusSymmetry("(y/t,1/t)", lambda y, t: (y / t, 1 / t), (0, 2, 1, 3)),
        MobiusSymmetry("(y(t-1)/(t-y),1-t)", lambda y, t: (y * (t - 1) / (t - y), 1 - t), (0, 3, 2, 1)),
        MobiusSymmetry("((y-t)/(y-1),t)", lambda y, t: ((y - t) / (y - 1), t), (1, 0, 3, 2)),
        MobiusSymmetry("(t/y,t)", lambda y, t: (t / y, t), (3, 2, 1, 0)),
        MobiusSymmetry("(y/(y-1),t/(t-1))", lambda y, t: (y / (y - 1), t / (t - 1)), (0, 1, 3, 2)),
    )
}


def apply_mobius(sym: MobiusSymmetry | str, sol: PviSolution) -> PviSolution:
    if isinstance(sym, str):
        sym = SYMMETRIES[sym]
    y, t = sym.action(sol.y, sol.t)
    if y.is_constant():
        raise DegenerateSolution(f"{sym.label} sends y to a constant")
    out = PviSolution(sol.tower, y, t, sym.theta(sol.theta), label=f"{sym.label}({sol.label})")
    return out.check_nondegenerate()


# ---------------------------------------------------------------- sign flips and matching

def same_up_to_sign_flips(a: PviSolution, b: PviSolution) -> int | None:
    """Smallest mask of generator sign flips taking (a.y, a.t) to (b.y, b.t), after
    rewriting a in b's presentation; None if no flip matches."""
    if a.tower != b.tower:
        if a.tower.var != b.tower.var or not a.tower.same_field(b.tower):
            return None
        iso = representation_map(a.tower, b.tower)
        ay, at = iso(a.y), iso(a.t)
    else:
        ay, at = a.y, a.t
    for mask in range(b.tower.size):
        if ay.conjugate(mask) == b.y and at.conjugate(mask) == b.t:
            return mask
    return None


# ---------------------------------------------------------------- seed form

@dataclass
class SeedForm:
    a_y: RatFunc
    a_t: RatFunc
    u2: UniPoly
    theta: ThetaParams
    var: str
    name: str = "u"

    @property
    def tower(self) -> TowerPresentation:
        return TowerPresentation(self.var, [self.u2], [self.name])

    def solution(self, label: str = "") -> PviSolution:
        tw = self.tower
        u = tw.generator(0)
        return PviSolution(tw, HALF + tw.base(self.a_y) * u, HALF + tw.base(self.a_t) * u, self.theta, label)


def to_seed_form(sol: PviSolution) -> SeedForm:
    """Read off y = 1/2 + a_y u, t = 1/2 + a_t u on u^2 = u2(s)."""
    th = sol.theta
    if th.theta1 != 0 or th.theta3 != 0:
        raise ShapeError("theta shape: seed form needs theta1 = theta3 = 0")
    if sol.tower.depth != 1:
        raise ShapeError(f"tower shape: seed form needs one radicand, found {sol.tower.depth}")
    for name, el in (("y", sol.y), ("t", sol.t)):
        c = el.coords[0]
        if not (c.is_constant() and c.constant_value() == HALF):
            raise ShapeError(f"{name} shape: constant part is not 1/2")
        if el.coords[1].is_zero():
            raise ShapeError(f"{name} shape: no odd part")
    return SeedForm(sol.y.coords[1], sol.t.coords[1], sol.tower.radicands[0], th, sol.tower.var,
                    sol.tower.names[0])


def folded_theta(theta: ThetaParams) -> ThetaParams:
    """Parameter map (1-theta4, theta2, 1-theta4, 2-theta2)/2."""
    return ThetaParams((1 - theta.theta4) / 2, theta.theta2 / 2, (1 - theta.theta4) / 2, (2 - theta.theta2) / 2)


def unfolded_theta(theta: ThetaParams) -> ThetaParams:
    """Inverse of folded_theta on its image."""
    if theta.theta1 != theta.theta3 or theta.theta4 != 1 - theta.theta2:
        raise ShapeError("theta is not in the image of the folded parameter map")
    return ThetaParams(0, 2 * theta.theta2, 0, 1 - 2 * theta.theta1)


# ---------------------------------------------------------------- subfield projection

def _gf2_basis(masks: Sequence[int]) -> list[int]:
    basis: list[int] = []
    for m in masks:
        x = m
        for b in basis:
            x = min(x, x ^ b)
        if x:
            basis.append(x)
    # reduced echelon form for stable ordering
    basis.sort(reverse=True)
    for i in range(len(basis)):
        for j in range(len(basis)):
            if i != j and basis[j] ^ basis[i] < basis[j]:
                basis[j] ^= basis[i]
    return sorted(basis)


def _decompose(m: int, basis: list[int]) -> int | None:
    """Bitmask over basis indices whose XOR is m."""
    n = len(basis)
    for sel in range(1 << n):
        x = 0
        for i in range(n):
            if sel >> i & 1:
                x ^= basis[i]
        if x == m:
            return sel
    return None


def restrict_to_subfield(elements: Sequence[FieldElement], names: Sequence[str] | None = None
                         ) -> tuple[TowerPresentation, list[FieldElement]]:
    """Rewrite elements in the smallest subtower containing them.

    The monomials used span a subgroup of (Z/2)^k; each basis monomial r_b,
    with r_b^2 = core_b cof_b^2, becomes a generator sqrt(core_b).
    """
    tower = elements[0].tower
    used = sorted({m for e in elements for m in e.support() if m})
    basis = _gf2_basis(used)
    if len(basis) == tower.depth and basis == [1 << i for i in range(tower.depth)]:
        return tower, list(elements)
    cores, cofs = [], []
    for b in basis:
        prod = UniPoly([1], tower.var)
        for i in range(tower.depth):
            if b >> i & 1:
                prod = prod * tower.radicands[i]
        core, cof = squarefree_part(prod)
        cores.append(core)
        cofs.append(cof)
    if names is None:
        names = [tower.monomial_name(b) if bin(b).count("1") == 1 else f"r{i + 1}" for i, b in enumerate(basis)]
    new = TowerPresentation(tower.var, cores, names)
    gens_old = [tower.monomial(b) for b in basis]  # r_b in the old tower
    out = []
    for e in elements:
        coords = [RatFunc.const(0, tower.var)] * new.size
        for m in e.support():
            sel = _decompose(m, basis)
            if sel is None:
                raise TowerError("element escapes the spanned subfield")
            prod_old = tower.one()
            scale = RatFunc.const(1, tower.var)
            for i in range(len(basis)):
                if sel >> i & 1:
                    prod_old = prod_old * gens_old[i]
                    scale = scale * RatFunc(cofs[i])
            # prod_old = c * r_m, and prod_old = scale * g_sel, so r_m = scale/c * g_sel
            c = prod_old.coords[m]
            coords[sel] = coords[sel] + e.coords[m] * scale / c
        out.append(FieldElement(new, coords))
    return new, out


# ---------------------------------------------------------------- folded quadratic transform

@dataclass
class TransformResult:
    solution: PviSolution
    details: dict = field(default_factory=dict)


def folded_quadratic_transform(seed: SeedForm, names: Sequence[str] = ("v", "w")) -> TransformResult:
    """y = 1/2 + (w+v)/(2(A_y-A_t)), t = 1/2 - A_t/(2w) with A_i = 2 a_i u2,
    v^2 = A_y^2 - u2, w^2 = A_t^2 - u2 (square factors pulled out of the roots)."""
    u2 = RatFunc(seed.u2)
    A_y = seed.a_y * 2 * u2
    A_t = seed.a_t * 2 * u2
    if A_y == A_t:
        raise TransformError("A_y = A_t identically")
    tower = seed.tower
    vr = adjoin_root(tower, A_y * A_y - u2, names[0])
    if vr.is_square:
        raise TransformError("A_y^2 - u2 is a perfect square: the cover degenerates")
    wr = adjoin_root(vr.tower, A_t * A_t - u2, names[1])
    if wr.is_square:
        raise TransformError("A_t^2 - u2 is a perfect square: the cover degenerates")
    big = wr.tower
    v = embed(vr.root, big)
    w = wr.root
    y = HALF + (w + v) / (big.base(A_y - A_t) * 2)
    t = HALF - big.base(A_t) / (w * 2)
    sub, (y2, t2) = restrict_to_subfield([y, t], names)
    theta = folded_theta(seed.theta)
    sol = PviSolution(sub, y2, t2, theta, label="folded")
    sol.check_nondegenerate()
    return TransformResult(sol, {
        "radicand_v": str(vr.tower.radicands[-1]) if vr.extended else None,
        "radicand_w": str(wr.tower.radicands[-1]) if wr.extended else None,
        "tower": str(sub),
    })


def recover_seed(derived: PviSolution, seed_t: PviSolution) -> SeedForm:
    """Seed whose folded transform has the given derived y, using the seed's t.

    From t = 1/2 - A_t/(2w') the scaled root w' is recovered; the w-coordinate
    beta of y then gives A_y = A_t + w'/(2 beta w).
    """
    base_seed = to_seed_form(seed_t) if seed_t.theta.theta1 == 0 else None
    if base_seed is None:
        raise ShapeError("seed t must come from a seed-form solution")
    u2 = RatFunc(base_seed.u2)
    A_t = base_seed.a_t * 2 * u2
    tw = derived.tower
    dt = derived.t - HALF
    if dt.is_zero():
        raise ShapeError("derived t is 1/2")
    wprime = tw.base(A_t) / (dt * -2)  # the scaled root w'
    sup = [m for m in wprime.support()]
    if len(sup) != 1:
        raise ShapeError("derived t is not of the folded shape")
    wmask = sup[0]
    dy = derived.y - HALF
    beta = dy.coords[wmask]
    if beta.is_zero():
        raise ShapeError("derived y has no w component")
    diff = wprime.coords[wmask] / (beta * 2)
    A_y = A_t + diff
    a_y = A_y / (u2 * 2)
    theta = unfolded_theta(derived.theta)
    return SeedForm(a_y, base_seed.a_t, base_seed.u2, theta, base_seed.var, base_seed.name)


# ---------------------------------------------------------------- RGT quadratic transform

def sqrt_in_tower(a: FieldElement, branch: int = 1, name: str | None = None
                  ) -> tuple[TowerPresentation, FieldElement]:
    """Square root of p + q r (one generator r) via the B-trick.

    If p^2 - q^2 f = N^2 with N in the base field, then
    sqrt(p + q r) = sqrt(h) + q r / (2 sqrt(h)) with h = (p + branch N)/2.
    """
    tower = a.tower
    if a.is_base():
        res = adjoin_root(tower, a.base_value(), name)
        return res.tower, res.root
    sup = [m for m in a.support() if m]
    if len(sup) != 1:
        raise TransformError("square root needs an element of the form p + q r")
    m = sup[0]
    p = a.coords[0]
    q = a.coords[m]
    rr = tower.monomial(m)
    f = (rr * rr).base_value()
    n = p * p - q * q * f
    N = _rational_sqrt(n)
    if N is None:
        raise TransformError("norm is not a square: the root leaves the multiquadratic tower")
    h = (p + N * branch) / 2
    if h.is_zero():
        h = (p - N * branch) / 2
    res = adjoin_root(tower, h, name)
    big = res.tower
    sh = res.root
    root = sh + embed(tower.base(q) * rr, big) / (sh * 2)
    return big, root


def _rational_sqrt(x: RatFunc) -> RatFunc | None:
    """Square root in Q(s), or None when x is not a square there."""
    if x.is_zero():
        return x
    core, cof = squarefree_part(x.numerator * x.denominator)
    if not (core.is_constant() and core.leading_coefficient() == 1):
        return None
    return RatFunc(cof) / RatFunc(x.denominator)


def rgt_theta(theta: ThetaParams) -> ThetaParams:
    return ThetaParams(theta.theta3 / 2, theta.theta2 / 2, theta.theta2 / 2, (2 - theta.theta3) / 2)


def rgt_transform(sol: PviSolution, branch_y: int = 1, branch_t: int = 1) -> TransformResult:
    """y = (tau-1)(eta+1)/((tau+1)(eta-1)), t = ((tau-1)/(tau+1))^2 with eta^2 = y0, tau^2 = t0.

    ``branch_y``/``branch_t`` pick the sign in h = (p +- N)/2 of the B-trick.
    """
    if sol.theta.theta1 != 0 or sol.theta.theta4 != 1:
        raise ShapeError("theta shape: need theta1 = 0 and theta4 = 1")
    big, eta = sqrt_in_tower(sol.y, branch_y, name="eta")
    big, tau = sqrt_in_tower(embed(sol.t, big), branch_t, name="tau")
    eta = embed(eta, big)
    y = (tau - 1) * (eta + 1) / ((tau + 1) * (eta - 1))
    t = ((tau - 1) / (tau + 1)) ** 2
    sub, (y2, t2) = restrict_to_subfield([y, t], ("v", "w"))
    out = PviSolution(sub, y2, t2, rgt_theta(sol.theta), label="rgt")
    out.check_nondegenerate()
    return TransformResult(out, {"tower": str(sub), "branches": [branch_y, branch_t]})


def rgt_from_seed(seed: SeedForm, branch_y: int = 1, branch_t: int = 1) -> TransformResult:
    """Prop-style transform of a seed after (Y, T) -> (Y/(Y-1), T/(T-1)).

    That map sends (0, th2, 0, th4) to (0, th2, |th4 - 1|, 1), and Y/(Y-1) becomes
    (A+u)/(A-u), whose norm is 1, so both square roots exist.
    """
    moved = apply_mobius("(y/(y-1),t/(t-1))", seed.solution("seed"))
    return rgt_transform(moved, branch_y, branch_t)
