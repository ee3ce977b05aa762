"""Verification of the hyperelliptic and plane models attached to catalog towers."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import flint

from ..arith import RatFunc, poly_ring, to_fmpq
from ..catalog.grammar import SquareOnly, evaluate, parse_expression
from ..catalog.records import BuiltTower, ModelSpec, SemanticError, SolutionRecord, build_tower_map
from ..field import FieldElement, TowerPresentation


class ModelError(ValueError):
    pass


class PlaneCurveField:
    """Function field Q(C) of an irreducible plane curve F(p, q) = 0.

    Elements are fractions N/D of polynomials whose numerators are reduced
    modulo F with respect to ``main`` (F must have a constant leading
    coefficient in that variable, so the remainder is canonical).
    """

    def __init__(self, equation, variables: tuple[str, str], main: str | None = None):
        self.variables = tuple(variables)
        if main is None:
            main = self._pick_main(equation)
        other = [v for v in self.variables if v != main][0]
        self.main = main
        self.ctx = poly_ring((main, other))
        self.F = self._import(equation)
        if not self._lead_is_constant(self.F):
            raise ModelError(f"equation is not monic-like in {main}")
        factors = self.F.factor()[1]
        if len(factors) != 1 or factors[0][1] != 1:
            raise ModelError("plane equation is not irreducible")

    def _pick_main(self, equation) -> str:
        for name in self.variables:
            ctx = poly_ring((name, [v for v in self.variables if v != name][0]))
            if self._lead_is_constant(self._convert(equation, ctx)):
                return name
        raise ModelError("no variable with constant leading coefficient")

    @staticmethod
    def _lead_is_constant(F) -> bool:
        top = F.degrees()[0]
        return all(m[0] < top or sum(m[1:]) == 0 for m in F.monoms())

    @staticmethod
    def _convert(poly, ctx):
        src = poly.context()
        names = [str(g) for g in src.gens()]
        target = {str(g): g for g in ctx.gens()}
        return poly.compose(*(target[n] for n in names), ctx=ctx)

    def _import(self, poly):
        return self._convert(poly, self.ctx)

    def gen(self, name: str) -> "CurveFunction":
        g = {str(x): x for x in self.ctx.gens()}[name]
        return CurveFunction(self, g, self.ctx.constant(1))

    def const(self, c) -> "CurveFunction":
        return CurveFunction(self, self.ctx.constant(to_fmpq(c)), self.ctx.constant(1))

    def reduce(self, poly):
        return divmod(poly, self.F)[1]

    def symmetry(self, images: dict[str, tuple[int, str]]) -> Callable:
        """Linear coordinate map, e.g. {'p': (-1, 'p'), 'q': (1, 'q')} or a swap."""
        gens = {str(x): x for x in self.ctx.gens()}
        order = [str(x) for x in self.ctx.gens()]
        subs = [images[n][0] * gens[images[n][1]] for n in order]

        def act(f: "CurveFunction") -> "CurveFunction":
            return CurveFunction(self, f.num.compose(*subs), f.den.compose(*subs))
        return act

    def eval_mod(self, poly, point: dict[str, int], prime: int) -> flint.nmod:
        """Value of a polynomial at a point over GF(prime)."""
        names = [str(g) for g in self.ctx.gens()]
        xs = [flint.nmod(point[n], prime) for n in names]
        acc = flint.nmod(0, prime)
        for mono, c in poly.terms():
            term = flint.nmod(int(c.p), prime) / flint.nmod(int(c.q), prime)
            for x, e in zip(xs, mono):
                if e:
                    term *= x ** e
            acc += term
        return acc

    def points_mod(self, prime: int, count: int, seed: int = 1) -> list[dict[str, int]]:
        """Points of F = 0 over GF(prime), found by fixing the non-main variable."""
        rng = random.Random(seed)
        other = [v for v in self.variables if v != self.main][0]
        top = self.F.degrees()[0]
        out = []
        for _ in range(50 * count):
            a = rng.randrange(1, prime)
            coeffs = [flint.nmod(0, prime)] * (top + 1)
            for mono, c in self.F.terms():
                coeffs[mono[0]] += flint.nmod(int(c.p), prime) / flint.nmod(int(c.q), prime) \
                    * flint.nmod(a, prime) ** mono[1]
            roots = flint.nmod_poly([int(x) for x in coeffs], prime).roots()
            for r, _mult in roots:
                out.append({self.main: int(r), other: a})
            if len(out) >= count:
                return out[:count]
        return out

    def preserves(self, images) -> bool:
        act = self.symmetry(images)
        moved = act(CurveFunction(self, self.F, self.ctx.constant(1), reduce=False))
        return self.reduce(moved.num).is_zero()


class CurveFunction:
    __slots__ = ("field", "num", "den")

    def __init__(self, fld: PlaneCurveField, num, den, reduce: bool = True):
        self.field = fld
        if reduce:
            num = fld.reduce(num)
            den = fld.reduce(den)
            if den.is_zero():
                raise ZeroDivisionError("denominator vanishes on the curve")
        self.num, self.den = num, den

    def simplified(self) -> "CurveFunction":
        """Cancel the polynomial gcd of numerator and denominator."""
        g = self.num.gcd(self.den)
        if g.is_one() or g.is_zero():
            return self
        return CurveFunction(self.field, divmod(self.num, g)[0], divmod(self.den, g)[0], reduce=False)

    def _lift(self, other) -> "CurveFunction":
        if isinstance(other, CurveFunction):
            return other
        return self.field.const(other)

    def __add__(self, other):
        o = self._lift(other)
        return CurveFunction(self.field, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return CurveFunction(self.field, -self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        return CurveFunction(self.field, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "CurveFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("zero function on the curve")
        return CurveFunction(self.field, self.den, self.num, reduce=False)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        acc = self.field.const(1)
        base = self
        while n:
            if n & 1:
                acc = acc * base
            n >>= 1
            if n:
                base = base * base
        return acc

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def value_mod(self, point: dict[str, int], prime: int):
        """Value at a point over GF(prime), or None where the denominator vanishes."""
        d = self.field.eval_mod(self.den, point, prime)
        if int(d) == 0:
            return None
        return self.field.eval_mod(self.num, point, prime) / d

    def __eq__(self, other):
        o = self._lift(other)
        return self.field.reduce(self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self):
        raise TypeError("curve functions are not hashable")


def ratfunc_at(c: RatFunc, x) -> object:
    """Evaluate a rational function of one variable at any field-like value."""
    def poly_at(coeffs):
        acc = None
        for a in reversed(coeffs):
            acc = (acc * x + a) if acc is not None else x * 0 + a
        return acc if acc is not None else x * 0
    num = poly_at(c.numerator.coefficients)
    den = poly_at(c.denominator.coefficients)
    return num / den


def field_element_at(a: FieldElement, base, gens: list) -> object:
    """Image of a tower element under s -> base, r_i -> gens[i]."""
    acc = None
    for m in a.support():
        term = ratfunc_at(a.coords[m], base)
        for i in range(a.tower.depth):
            if m >> i & 1:
                term = term * gens[i]
        acc = term if acc is None else acc + term
    return acc if acc is not None else base * 0


@dataclass
class ModelCheck:
    name: str
    kind: str
    ok: bool
    defects: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"model": self.name, "kind": self.kind, "ok": self.ok, "defects": self.defects, **self.details}


@dataclass
class PlaneModel:
    spec: ModelSpec
    field: PlaneCurveField
    images: dict  # tower coordinate name -> CurveFunction

    def pullback(self, a: FieldElement) -> CurveFunction:
        tower = a.tower
        base = self.images[tower.var]
        gens = [self.images[n] for n in tower.names]
        return field_element_at(a, base, gens)


def _plane_equation(spec: ModelSpec):
    ctx = poly_ring(tuple(spec.variables))
    env = {str(g): g for g in ctx.gens()}
    F = evaluate(spec.equation, env, convert=lambda c: ctx.constant(to_fmpq(c)))
    if F.is_constant():
        raise ModelError("plane equation is constant")
    return _clear(F)


def _clear(F):
    """Scale a rational bivariate polynomial to a primitive integral one."""
    den = 1
    for c in F.coeffs():
        den = den * c.denom() // flint.fmpz(den).gcd(c.denom())
    G = F * den
    g = 0
    for c in G.coeffs():
        g = flint.fmpz(g).gcd(c.numer())
    return G / g


def plane_model(spec: ModelSpec, built: BuiltTower) -> PlaneModel:
    if spec.kind != "plane":
        raise ModelError("not a plane model")
    F = _plane_equation(spec)
    fld = PlaneCurveField(F, tuple(spec.variables))
    env: dict = {name: fld.gen(name) for name in spec.variables}
    images = {}
    for d in spec.decls:
        value = evaluate(d.expr, env)
        if not isinstance(value, CurveFunction):
            value = fld.const(value)
        env[d.name] = value
        if d.kind == "map":
            images[d.name] = value
    tower = built.tower
    missing = [n for n in (tower.var,) + tower.names if n not in images]
    if missing:
        raise ModelError(f"model {spec.name} does not map {', '.join(missing)}")
    return PlaneModel(spec, fld, images)


def _verify_hyperelliptic(spec: ModelSpec, built: BuiltTower) -> ModelCheck:
    tmap = build_tower_map(spec, built)
    defects = {}
    for name, d in zip(built.tower.names, tmap.relation_defects()):
        defects[name] = not d.is_zero()
    ok = not any(defects.values())
    return ModelCheck(spec.name, spec.kind, ok, defects,
                      {"target": str(tmap.dst)})


def _verify_plane(spec: ModelSpec, built: BuiltTower) -> ModelCheck:
    model = plane_model(spec, built)
    tower = built.tower
    base = model.images[tower.var]
    defects = {}
    for name, f in zip(tower.names, tower.radicands):
        r = model.images[name]
        lhs = r * r - ratfunc_at(RatFunc(f), base)
        defects[name] = not lhs.is_zero()
    ok = not any(defects.values())
    return ModelCheck(spec.name, spec.kind, ok, defects, {"main_variable": model.field.main})


def _verify_plane_image(spec: ModelSpec, built: BuiltTower) -> ModelCheck:
    env = dict(built.env)
    images = {}
    for d in spec.decls:
        value = evaluate(d.expr, env)
        env[d.name] = value
        if d.kind == "map":
            images[d.name] = value
    missing = [v for v in spec.variables if v not in images]
    if missing:
        raise ModelError(f"model {spec.name} does not map {', '.join(missing)}")
    value = evaluate(spec.equation, {v: images[v] for v in spec.variables})
    ok = isinstance(value, FieldElement) and value.is_zero()
    return ModelCheck(spec.name, spec.kind, ok, {"equation": not ok})


def verify_model(spec: ModelSpec, built: BuiltTower) -> ModelCheck:
    """Exact check that the model's substitution respects every tower relation."""
    if spec.kind == "hyperelliptic":
        return _verify_hyperelliptic(spec, built)
    if spec.kind == "plane":
        return _verify_plane(spec, built)
    if spec.kind == "plane-image":
        return _verify_plane_image(spec, built)
    raise ModelError(f"unknown model kind {spec.kind}")


def model_equation(spec: ModelSpec):
    """Primitive integral defining polynomial of a plane model, in the ring of its variables."""
    return _plane_equation(spec)


# ------------------------------------------------------------------ quartic symmetries

QUARTIC_SYMMETRIES = {
    "(-p,q)": {"p": (-1, "p"), "q": (1, "q")},
    "(p,-q)": {"p": (1, "p"), "q": (-1, "q")},
    "(q,p)": {"p": (1, "q"), "q": (1, "p")},
}

OKAMOTO_IMAGES: dict[str, Callable] = {
    "(-p,q)": lambda y, t: (1 - y, 1 - t),
    "(p,-q)": lambda y, t: (y * (t - 1) / (t - y), 1 - t),
    "(q,p)": lambda y, t: ((y - t) / (y - 1), t),
}


@dataclass
class SymmetryReport:
    ok: bool
    results: dict
    group_order: int
    normalization: int | None = None  # generator sign flips applied to the model map
    attempts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "results": self.results, "group_order": self.group_order,
                "normalization": self.normalization, "attempts": self.attempts}


def _linear_group_order(gens: list[tuple[tuple[int, int], tuple[int, int]]]) -> int:
    identity = ((1, 0), (0, 1))

    def mul(a, b):
        return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)) for i in range(2))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                x = mul(g, h)
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
        frontier = nxt
    return len(seen)


def _matrix(images: dict[str, tuple[int, str]]) -> tuple[tuple[int, int], tuple[int, int]]:
    idx = {"p": 0, "q": 1}
    rows = []
    for name in ("p", "q"):
        sign, src = images[name]
        row = [0, 0]
        row[idx[src]] = sign
        rows.append(tuple(row))
    return tuple(rows)


SCREEN_PRIME = 2 ** 61 - 1


def _okamoto_image(label: str, y, t):
    if label == "(-p,-q)":
        y, t = OKAMOTO_IMAGES["(-p,q)"](y, t)
        return OKAMOTO_IMAGES["(p,-q)"](y, t)
    return OKAMOTO_IMAGES[label](y, t)


def _moved(point: dict[str, int], images: dict[str, tuple[int, str]], prime: int) -> dict[str, int]:
    return {name: (sign * point[src]) % prime for name, (sign, src) in images.items()}


def _screen(Y, T, images, label: str, points, prime: int) -> bool:
    """False if some point over GF(prime) refutes the identity; a refutation is a
    proof of failure, a pass only means the exact check is worth running."""
    for pt in points:
        vals = [Y.value_mod(pt, prime), T.value_mod(pt, prime)]
        moved = _moved(pt, images, prime)
        vals += [Y.value_mod(moved, prime), T.value_mod(moved, prime)]
        if any(v is None for v in vals):
            continue
        y, t, ys, ts = vals
        try:
            y2, t2 = _okamoto_image(label, y, t)
        except ZeroDivisionError:
            continue
        if y2 != ys or t2 != ts:
            return False
    return True


SYMMETRY_CHECKS = list(QUARTIC_SYMMETRIES.items()) + [("(-p,-q)", {"p": (-1, "p"), "q": (-1, "q")})]


def _symmetry_results(model: PlaneModel, y: FieldElement, t: FieldElement, stop_early: bool,
                      points=None) -> dict:
    fld = model.field
    Y = model.pullback(y)
    T = model.pullback(t)
    results = {}
    if points:
        for label, images in SYMMETRY_CHECKS:
            if fld.preserves(images) and not _screen(Y, T, images, label, points, SCREEN_PRIME):
                results[label] = False
                if stop_early:
                    return results
    for label, images in SYMMETRY_CHECKS:
        if label in results:
            continue
        if not fld.preserves(images):
            results[label] = False
        else:
            act = fld.symmetry(images)
            y2, t2 = _okamoto_image(label, Y, T)
            results[label] = act(T) == t2 and act(Y) == y2
        if stop_early and not results[label]:
            break
    return results


def quartic_symmetry_check(record: SolutionRecord, model_name: str = "quartic",
                           normalizations=None) -> SymmetryReport:
    """Each coordinate symmetry of the quartic acts on (y, t) by the listed Okamoto map.

    The model map is determined only up to the signs of the generators; the
    check is run for each sign normalization (mask of flipped generators)
    until one satisfies every identity, and reports that mask.  The composite
    (-p,-q) is checked against the composite of the first two maps.
    """
    spec = record.model(model_name)
    model = plane_model(spec, record.built)
    sol = record.solution
    order = _linear_group_order([_matrix(m) for m in QUARTIC_SYMMETRIES.values()])
    masks = range(sol.tower.size) if normalizations is None else normalizations
    points = model.field.points_mod(SCREEN_PRIME, 4)
    attempts = {}
    for mask in masks:
        results = _symmetry_results(model, sol.y.conjugate(mask), sol.t.conjugate(mask), stop_early=True,
                                    points=points)
        attempts[mask] = results
        if len(results) == len(QUARTIC_SYMMETRIES) + 1 and all(results.values()):
            return SymmetryReport(order == 8, results, order, mask, attempts)
    return SymmetryReport(False, attempts.get(0, {}), order, None, attempts)


# ------------------------------------------------------------------ conic parametrization check

def conic_identity_holds(w1_numerator: str, conic: str = "s^2 - 18*s + 1",
                         s_of_j: str = "(j^2 - 1)/(2*j - 18)", w1_denominator: str = "2*j - 18") -> bool:
    """Does w1 = N(j)/D(j) satisfy w1^2 = conic(s(j)) identically in Q(j)?"""
    j = RatFunc.gen("j")
    env = {"j": j}
    s = evaluate(parse_expression(s_of_j), env)
    w1 = evaluate(parse_expression(w1_numerator), env) / evaluate(parse_expression(w1_denominator), env)
    rhs = evaluate(parse_expression(conic), {"s": s})
    return w1 * w1 == rhs
