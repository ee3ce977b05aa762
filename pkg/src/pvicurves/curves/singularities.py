"""Singular points of a projective plane curve and their delta invariants.

Affine singular points are found by exact elimination: the p-coordinates are
roots of gcd(Res_q(F, F_q), Res_q(F_p, F_q)) and the q-coordinates roots of
the analogous eliminant in p.  Certified roots of both are paired by checking,
in ball arithmetic, that F, F_p and F_q all vanish.  Points on the line at
infinity come from exact univariate gcds in the charts y = 1 and x = 1.

A double point is a node when its Hessian is nondegenerate.  Otherwise the
curve is X^2 + ... = 0 in coordinates where Y runs along the tangent; solving
dF/dX = 0 for X(Y) and expanding F(X(Y), Y) gives c Y^(k+1) + ..., i.e. an A_k
point.  k = 3 is a tacnode (delta 2).  Anything else is tagged "other".
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import factorial

from flint import acb, ctx, fmpq, fmpq_poly, fmpz_poly

from ..arith import poly_ring

ORDER = 6


class SingularityError(ValueError):
    """Input is not a reduced plane curve, or the analysis cannot conclude."""


class _Unresolved(ArithmeticError):
    pass


@dataclass
class SingularPoint:
    chart: str
    point: tuple[acb, acb, acb]
    kind: str
    delta: int | None
    detail: str

    def to_dict(self) -> dict:
        def fmt(z: acb) -> str:
            return z.mid().str(12, radius=False)
        return {"chart": self.chart, "point": [fmt(z) for z in self.point],
                "kind": self.kind, "delta": self.delta, "detail": self.detail}


@dataclass
class SingularityReport:
    degree: int
    points: list[SingularPoint] = field(default_factory=list)
    precision_bits: int = 0
    seconds: float = 0.0

    def count(self, kind: str) -> int:
        return sum(1 for pt in self.points if pt.kind == kind)

    @property
    def classified(self) -> bool:
        return all(pt.kind != "other" for pt in self.points)

    @property
    def total_delta(self) -> int | None:
        if not self.classified:
            return None
        return sum(pt.delta for pt in self.points)

    @property
    def implied_genus(self) -> int | None:
        td = self.total_delta
        if td is None:
            return None
        return (self.degree - 1) * (self.degree - 2) // 2 - td

    def to_dict(self) -> dict:
        return {
            "degree": self.degree, "nodes": self.count("node"), "tacnodes": self.count("tacnode"),
            "other": self.count("other"), "total_delta": self.total_delta,
            "implied_genus": self.implied_genus, "precision_bits": self.precision_bits,
            "points": [pt.to_dict() for pt in self.points],
        }


# ------------------------------------------------------------------ polynomials

def _bivariate(F):
    names = F.context().names()
    if len(names) != 2:
        raise SingularityError("expected a polynomial in two variables")
    return names


def _homogenize(F):
    d = F.total_degree()
    R = poly_ring(("x", "y", "z"))
    x, y, z = R.gens()
    out = R.from_dict({})
    for (i, j), c in zip(F.monoms(), F.coeffs()):
        out += c * x**i * y**j * z**(d - i - j)
    return out, d


def _restrict(H, fixed: int):
    """Dehomogenize at coordinate ``fixed`` = 1; returns a polynomial in the
    other two coordinates, in their original order."""
    names = [n for k, n in enumerate(("x", "y", "z")) if k != fixed]
    R = poly_ring(tuple(names))
    a, b = R.gens()
    args = [a, b]
    args.insert(fixed, R.from_dict({(0, 0): 1}))
    return H.compose(*args, ctx=R)


def _univariate(F, var: int) -> fmpq_poly:
    """Coefficients of a bivariate polynomial that only involves variable ``var``."""
    coeffs: dict[int, fmpq] = {}
    for m, c in zip(F.monoms(), F.coeffs()):
        if m[1 - var]:
            raise SingularityError("eliminant is not univariate")
        coeffs[m[var]] = c
    top = max(coeffs, default=-1)
    return fmpq_poly([coeffs.get(k, 0) for k in range(top + 1)])


def _at_zero(F, var: int) -> fmpq_poly:
    """F restricted to the line where the other variable is zero."""
    coeffs: dict[int, fmpq] = {}
    for m, c in zip(F.monoms(), F.coeffs()):
        if m[1 - var] == 0:
            coeffs[m[var]] = c
    top = max(coeffs, default=-1)
    return fmpq_poly([coeffs.get(k, 0) for k in range(top + 1)])


def _roots(p: fmpq_poly) -> list[acb]:
    if p.degree() < 1:
        return []
    out = []
    for fac, _ in fmpz_poly(p.numer()).factor()[1]:
        if fac.degree() == 1:
            c = fac.coeffs()
            out.append(acb(fmpq(-c[0], c[1])))
        else:
            out.extend(r for r, _ in fac.complex_roots())
    return out


def _eval(F, a: acb, b: acb) -> acb:
    total = acb(0)
    for (i, j), c in zip(F.monoms(), F.coeffs()):
        total += acb(c) * a**i * b**j
    return total


def _is_zero(z: acb, scale: float) -> bool:
    if not z.contains(0):
        return False
    if float(z.rad()) > scale * 2.0 ** (-ctx.prec // 4):
        raise _Unresolved("ball too wide to decide vanishing")
    return True


# ------------------------------------------------------------------ locating points

def _eliminant(F, var: int) -> fmpq_poly:
    """Polynomial in variable ``var`` vanishing at the var-coordinates of the
    affine singular points."""
    names = F.context().names()
    other = names[1 - var]
    F_o = F.derivative(other)
    F_v = F.derivative(names[var])
    if F_o.is_zero():
        return _univariate(F_v, var).gcd(_univariate(F, var)) if not F_v.is_zero() else fmpq_poly([0])
    r1 = _univariate(F.resultant(F_o, other), var)
    r2 = _univariate(F_v.resultant(F_o, other), var)
    if r1.is_zero() or r2.is_zero():
        raise SingularityError("non-isolated singularities: eliminant vanishes identically")
    return r1.gcd(r2)


def _affine_points(F) -> list[tuple[acb, acb]]:
    names = F.context().names()
    Fa, Fb = F.derivative(names[0]), F.derivative(names[1])
    ra, rb = _eliminant(F, 0), _eliminant(F, 1)
    A, B = _roots(ra), _roots(rb)
    found = []
    for a in A:
        for b in B:
            if all(v.contains(0) for v in (_eval(F, a, b), _eval(Fa, a, b), _eval(Fb, a, b))):
                found.append((a, b))
    return found


def _line_points(H) -> list[acb]:
    """Points (x0, 0) of a chart polynomial H(x, z) where H is singular."""
    names = H.context().names()
    h = [_at_zero(H, 0), _at_zero(H.derivative(names[0]), 0), _at_zero(H.derivative(names[1]), 0)]
    g = h[0].gcd(h[1]).gcd(h[2])
    if h[0].is_zero() and h[1].is_zero() and h[2].is_zero():
        raise SingularityError("non-isolated singularities along the line at infinity")
    return _roots(g)


def _origin_singular(K) -> bool:
    names = K.context().names()
    return all(_constant(P) == 0 for P in (K, K.derivative(names[0]), K.derivative(names[1])))


def _constant(P) -> fmpq:
    for m, c in zip(P.monoms(), P.coeffs()):
        if m == (0, 0):
            return c
    return fmpq(0)


# ------------------------------------------------------------------ local classification

def _taylor(F, a: acb, b: acb, order: int) -> dict[tuple[int, int], acb]:
    names = F.context().names()
    out = {}
    Di = F
    for i in range(order + 1):
        Dij = Di
        for j in range(order + 1 - i):
            out[(i, j)] = _eval(Dij, a, b) / (factorial(i) * factorial(j))
            Dij = Dij.derivative(names[1])
        Di = Di.derivative(names[0])
    return out


def _series_mul(x: list[acb], y: list[acb], n: int) -> list[acb]:
    out = [acb(0)] * (n + 1)
    for i, xi in enumerate(x[: n + 1]):
        for j, yj in enumerate(y[: n + 1 - i]):
            out[i + j] += xi * yj
    return out


def _shear(c: dict[tuple[int, int], acb], rho: acb, order: int) -> dict[tuple[int, int], acb]:
    """Substitute u = U + rho V, v = V (truncated at total degree ``order``)."""
    out: dict[tuple[int, int], acb] = {}
    for (i, j), cij in c.items():
        # (U + rho V)^i V^j
        for k in range(i + 1):
            key = (k, i - k + j)
            if sum(key) > order:
                continue
            term = cij * acb(_binom(i, k)) * rho ** (i - k)
            out[key] = out.get(key, acb(0)) + term
    return out


def _binom(n: int, k: int) -> int:
    return factorial(n) // (factorial(k) * factorial(n - k))


def _contact_order(c: dict[tuple[int, int], acb], order: int, scale: float) -> int | None:
    """c is a local form whose quadratic part is c[(2,0)] X^2.  Returns the
    order in Y of F(X(Y), Y) along the solution of dF/dX = 0, or None if it
    exceeds ``order``."""
    lead = 2 * c[(2, 0)]
    X = [acb(0)] * (order + 1)
    for _ in range(order + 1):
        pw = [[acb(1)] + [acb(0)] * order]
        for _ in range(order):
            pw.append(_series_mul(pw[-1], X, order))
        dF = [acb(0)] * (order + 1)
        for (i, j), cij in c.items():
            if i == 0 or j > order:
                continue
            term = pw[i - 1]
            for k in range(order + 1 - j):
                dF[k + j] += i * cij * term[k]
        X = [xk - dk / lead for xk, dk in zip(X, dF)]
    pw = [[acb(1)] + [acb(0)] * order]
    for _ in range(order):
        pw.append(_series_mul(pw[-1], X, order))
    phi = [acb(0)] * (order + 1)
    for (i, j), cij in c.items():
        if j > order:
            continue
        for k in range(order + 1 - j):
            phi[k + j] += cij * pw[i][k]
    for k, v in enumerate(phi):
        if not _is_zero(v, scale):
            return k
    return None


def _classify(F, a: acb, b: acb) -> tuple[str, int | None, str]:
    c = _taylor(F, a, b, ORDER)
    scale = max(1.0, max(float(abs(v).mid()) for v in c.values()))
    if not all(_is_zero(c[k], scale) for k in ((0, 0), (1, 0), (0, 1))):
        raise SingularityError("point is not singular")
    c20, c11, c02 = c[(2, 0)], c[(1, 1)], c[(0, 2)]
    if all(_is_zero(v, scale) for v in (c20, c11, c02)):
        return "other", None, "multiplicity >= 3"
    if not _is_zero(c11 * c11 - 4 * c20 * c02, scale):
        return "node", 1, "A1"
    if _is_zero(c20, scale):
        # quadratic part is c02 v^2; swap roles so that it reads X^2
        c = {(j, i): v for (i, j), v in c.items()}
        c20, c11 = c[(2, 0)], c[(1, 1)]
    local = _shear(c, -c11 / (2 * c20), ORDER)
    k = _contact_order(local, ORDER, scale)
    if k is None:
        return "other", None, f"A_k with k >= {ORDER}"
    if k == 4:
        return "tacnode", 2, "A3"
    return "other", k // 2 if k >= 3 else None, f"A{k - 1}"


# ------------------------------------------------------------------ driver

def _analyze(F, degree: int) -> list[SingularPoint]:
    H, _ = _homogenize(F)
    pts = []
    one, zero = acb(1), acb(0)
    for a, b in _affine_points(F):
        kind, delta, detail = _classify(F, a, b)
        pts.append(SingularPoint("z=1", (a, b, one), kind, delta, detail))
    Hy = _restrict(H, 1)   # polynomial in (x, z)
    for x0 in _line_points(Hy):
        kind, delta, detail = _classify(Hy, x0, zero)
        pts.append(SingularPoint("y=1", (x0, one, zero), kind, delta, detail))
    Hx = _restrict(H, 0)   # polynomial in (y, z)
    if _origin_singular(Hx):
        kind, delta, detail = _classify(Hx, zero, zero)
        pts.append(SingularPoint("x=1", (one, zero, zero), kind, delta, detail))
    return pts


def analyze_plane_singularities(F, precision_bits: int = 256, escalations: int = 3) -> SingularityReport:
    """Singular points of the projective closure of F(p, q) = 0 with node and
    tacnode classification; raises on a non-reduced input."""
    _bivariate(F)
    if F.is_constant():
        raise SingularityError("constant polynomial")
    for _, e in F.factor()[1]:
        if e > 1:
            raise SingularityError("non-isolated singularities: F has a repeated factor")
    t0 = time.perf_counter()
    degree = int(F.total_degree())
    bits = precision_bits
    for _ in range(escalations + 1):
        try:
            with ctx.workprec(bits):
                pts = _analyze(F, degree)
            break
        except _Unresolved:
            bits *= 2
    else:
        raise SingularityError(f"could not decide vanishing at {bits // 2} bits")
    return SingularityReport(degree, pts, bits, time.perf_counter() - t0)
