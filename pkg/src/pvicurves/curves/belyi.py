"""Numeric certification that t is a Belyi map, with an exact Riemann-Hurwitz check.

Work in the chart s = s_g + 1/sigma, where s_g is an exactly checked generic
point, so that s = oo is the finite point sigma = 0 and every fibre of t over
0, 1, oo has finite sigma.  Radicands become F_i(sigma) = sigma^(2 h_i) f_i(s)
with h_i = ceil(deg f_i / 2), and the generators r_i = R_i / sigma^h_i.

Over c in {0, 1, oo} the fibre t = c + eps (eps = 2^-(bits/4)) has exactly
``degree`` points.  Each is found as a root sigma_j of P(sigma, c + eps) together
with the generator signs that make t = c + eps (ball containment).  As eps -> 0
the points converge to the places over c, and e of them converge to a place
of ramification index e.  A place is identified by an exact root sigma_0 of
P(sigma, c), split by gcd against the F_i into the set S of radicands that
vanish there, plus the signs of
    rho_A = prod_{i in A} R_i / (sigma - sigma_0)^(|A & S| / 2)
for A running over a basis of the masks with |A & S| even.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count

from flint import acb, acb_poly, ctx, fmpq, fmpq_poly, fmpz_poly

from ..arith import RatFunc, UniPoly
from ..field import FieldElement, TowerPresentation, minimal_polynomial
from .invariants import primitive_integral_form


class BelyiError(RuntimeError):
    """t ramifies outside {0, 1, oo}."""


class UnresolvedClusters(RuntimeError):
    """Fibre points could not be separated at the working precision."""


@dataclass
class BelyiCertificate:
    degree: int
    genus: int
    profiles: dict[str, list[int]]
    precision_bits: int
    rh_consistent: bool
    ramification_sum: int
    critical_points_checked: int = 0
    chart_point: str = ""
    attempts: list[int] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.rh_consistent and all(sum(p) == self.degree for p in self.profiles.values())

    def to_dict(self) -> dict:
        return {
            "degree": self.degree, "genus": self.genus, "profiles": self.profiles,
            "precision_bits": self.precision_bits, "rh_consistent": self.rh_consistent,
            "ramification_sum": self.ramification_sum,
            "critical_points_checked": self.critical_points_checked,
            "chart_point": self.chart_point, "seconds": round(self.seconds, 3),
        }


# ---------------------------------------------------------------- exact chart helpers

def _chart(p: fmpq_poly, s_g: Fraction, D: int) -> fmpq_poly:
    """sigma^D p(s_g + 1/sigma)."""
    lin = fmpq_poly([1, fmpq(s_g.numerator, s_g.denominator)])  # 1 + s_g sigma
    sig = fmpq_poly([0, 1])
    acc = fmpq_poly([])
    coeffs = p.coeffs()
    for k, a in enumerate(coeffs):
        if a != 0:
            acc += a * lin ** k * sig ** (D - k)
    return acc


def _integral(p: fmpq_poly) -> fmpz_poly:
    return p.numer() if p.denom() == 1 else (p * p.denom()).numer()


def _squarefree(p: fmpq_poly) -> fmpq_poly:
    g = p.gcd(p.derivative())
    return p / g if g.degree() > 0 else p


def _sqrt(x: acb) -> acb:
    """A square root whose ball stays narrow on the negative real axis."""
    if x.real < 0:
        return acb(0, 1) * (-x).sqrt()
    return x.sqrt()


def _eval_poly(p: fmpq_poly, x: acb) -> acb:
    return acb_poly(p)(x)


class _Chart:
    """Exact data of the sigma chart and numeric evaluation of tower elements."""

    def __init__(self, tower: TowerPresentation, s_g: Fraction):
        self.tower = tower
        self.s_g = s_g
        self.h = [(f.degree() + 1) // 2 for f in tower.radicands]
        self.F = [_chart(f.raw, s_g, 2 * h) for f, h in zip(tower.radicands, self.h)]
        self.Fd = [f.derivative() for f in self.F]

    def radicand_values(self, sigma: acb) -> list[acb]:
        return [_eval_poly(f, sigma) for f in self.F]

    def lift_roots(self, sigma: acb) -> list[acb]:
        return [_sqrt(v) for v in self.radicand_values(sigma)]

    def evaluate(self, a: FieldElement, sigma: acb, R: list[acb]) -> acb:
        s = acb(fmpq(self.s_g.numerator, self.s_g.denominator)) + 1 / sigma
        r = [Ri / sigma ** hi for Ri, hi in zip(R, self.h)]
        acc = acb(0)
        for m in a.support():
            c = a.coords[m]
            term = _eval_poly(c.numerator.raw, s) / _eval_poly(c.denominator.raw, s)
            for i in range(self.tower.depth):
                if m >> i & 1:
                    term *= r[i]
            acc += term
        return acc

    def signed(self, R: list[acb], mask: int) -> list[acb]:
        return [-x if mask >> i & 1 else x for i, x in enumerate(R)]


def _candidates():
    yield Fraction(2)
    for n in count(3):
        for v in (Fraction(n), Fraction(-n + 1), Fraction(2 * n - 1, n), Fraction(-n, n + 1)):
            yield v


def _choose_chart(tower, t, P: list[UniPoly], dt_norm: RatFunc, limit: int = 400) -> Fraction:
    """First candidate s_g that is not a branch point, pole, critical point, or in a fibre over 0, 1, oo."""
    dens = [c.denominator for c in t.coords if not c.is_zero()]
    P0 = P[0]
    P1 = sum(P[1:], P[0])
    lead = P[-1]
    for i, s_g in zip(range(limit), _candidates()):
        if any(f(s_g) == 0 for f in tower.radicands):
            continue
        if any(d(s_g) == 0 for d in dens):
            continue
        if P0(s_g) == 0 or P1(s_g) == 0 or lead(s_g) == 0:
            continue
        if dt_norm.numerator(s_g) == 0 or dt_norm.denominator(s_g) == 0:
            continue
        return s_g
    raise UnresolvedClusters("no generic chart point found")


# ---------------------------------------------------------------- clustering

def _even_basis(k: int, S: frozenset[int]) -> list[int]:
    """Basis of the masks A with |A & S| even."""
    basis = [1 << i for i in range(k) if i not in S]
    s = sorted(S)
    basis += [(1 << s[0]) | (1 << j) for j in s[1:]]
    return basis


@dataclass
class _LimitRoot:
    root: acb
    S: frozenset[int]
    sep: float
    refs: dict[int, acb]


def _limit_roots(chart: _Chart, Q: fmpq_poly, k: int) -> list[_LimitRoot]:
    comps = [(_squarefree(Q), frozenset())]
    for i, Fi in enumerate(chart.F):
        nxt = []
        for A, S in comps:
            g = A.gcd(Fi)
            if g.degree() > 0:
                nxt.append((g, S | {i}))
                A = A / g
            if A.degree() > 0:
                nxt.append((A, S))
        comps = nxt
    roots: list[tuple[acb, frozenset]] = []
    for A, S in comps:
        for r, _m in _integral(A).complex_roots():
            roots.append((r, S))
    out = []
    mids = [r.mid() for r, _ in roots]
    for idx, (r, S) in enumerate(roots):
        sep = min((float(abs(mids[idx] - m).mid()) for j, m in enumerate(mids) if j != idx), default=float("inf"))
        refs = {}
        for A in _even_basis(k, S):
            G = acb(1)
            for i in range(k):
                if A >> i & 1:
                    G *= _eval_poly(chart.Fd[i] if i in S else chart.F[i], r)
            refs[A] = _sqrt(G)
        out.append(_LimitRoot(r, S, sep, refs))
    return out


def _cluster_key(limits: list[_LimitRoot], sigma: acb, R: list[acb]) -> tuple:
    dists = [float(abs(sigma - L.root).mid()) for L in limits]
    idx = min(range(len(limits)), key=dists.__getitem__)
    L = limits[idx]
    if not dists[idx] < L.sep / 3:
        raise UnresolvedClusters("fibre point not separated from the other limit roots")
    signs = []
    for A, ref in L.refs.items():
        rho = acb(1)
        n_s = 0
        for i in range(len(R)):
            if A >> i & 1:
                rho *= R[i]
                n_s += i in L.S
        rho /= (sigma - L.root) ** (n_s // 2)
        ratio = rho / ref
        re = ratio.real
        if abs(ratio - 1).mid() < 0.5 and re > 0:
            signs.append(1)
        elif abs(ratio + 1).mid() < 0.5 and re < 0:
            signs.append(-1)
        else:
            raise UnresolvedClusters("branch signs not resolved near a limit point")
    return (idx, tuple(signs))


# ---------------------------------------------------------------- fibres

def _fibre_profile(chart: _Chart, t: FieldElement, P: list[UniPoly], c: str, bits: int, degree: int) -> list[int]:
    k = chart.tower.depth
    d = len(P) - 1
    D = max(p.degree() for p in P)
    eps = Fraction(1, 2 ** (bits // 4))
    if c == "oo":
        target_T = None
        pert = sum((P[i] * (eps ** (d - i)) for i in range(d + 1)), UniPoly([], chart.tower.var))
        limit = P[-1]
    else:
        cv = Fraction(int(c))
        T = cv + eps
        pert = sum((P[i] * (T ** i) for i in range(d + 1)), UniPoly([], chart.tower.var))
        limit = sum((P[i] * (cv ** i) for i in range(d + 1)), UniPoly([], chart.tower.var))
        target_T = acb(fmpq(T.numerator, T.denominator))
    Pe = _chart(pert.raw, chart.s_g, D)
    Q = _chart(limit.raw, chart.s_g, D)
    limits = _limit_roots(chart, Q, k)
    eps_b = acb(fmpq(eps.numerator, eps.denominator))
    clusters: dict[tuple, int] = {}
    total = 0
    for sigma, mult in _integral(Pe).complex_roots():
        R0 = chart.lift_roots(sigma)
        for mask in range(1 << k):
            R = chart.signed(R0, mask)
            val = chart.evaluate(t, sigma, R)
            if not val.is_finite():
                raise UnresolvedClusters(f"fibre over {c}: evaluation lost all precision")
            hit = (1 / val - eps_b).contains(0) if target_T is None else (val - target_T).contains(0)
            if not hit:
                continue
            key = _cluster_key(limits, sigma, R)
            clusters[key] = clusters.get(key, 0) + mult
            total += mult
    if total != degree:
        raise UnresolvedClusters(f"fibre over {c}: {total} lifted points for degree {degree}")
    return sorted(clusters.values(), reverse=True)


# ---------------------------------------------------------------- critical values

def _critical_screen(chart: _Chart, t: FieldElement, dt: FieldElement, dt_norm: RatFunc,
                     tolerance: float) -> int:
    """Evaluate t at the zeros of dt/ds away from the branch points of the s-cover."""
    N = dt_norm.numerator.raw
    if N.degree() < 1:
        return 0
    Nc = _squarefree(_chart(N, chart.s_g, N.degree()))
    for Fi in chart.F:
        g = Nc.gcd(Fi)
        if g.degree() > 0:
            Nc = Nc / g
    if Nc.degree() < 1:
        return 0
    k = chart.tower.depth
    checked = 0
    for sigma, _m in _integral(Nc).complex_roots():
        R0 = chart.lift_roots(sigma)
        found = False
        for mask in range(1 << k):
            R = chart.signed(R0, mask)
            dv = chart.evaluate(dt, sigma, R)
            if not dv.is_finite():
                raise UnresolvedClusters("critical point evaluation lost all precision")
            if not dv.contains(0):
                continue
            found = True
            checked += 1
            val = chart.evaluate(t, sigma, R)
            near = float(abs(val).mid()) < tolerance or float(abs(val - 1).mid()) < tolerance \
                or float(abs(val).mid()) > 1 / tolerance
            if not near:
                raise BelyiError(f"critical value {val.mid()} is not in {{0, 1, oo}}")
        if not found:
            raise UnresolvedClusters("zero of the norm of dt/ds has no critical lift")
    return checked


# ---------------------------------------------------------------- driver

def belyi_certify(tower: TowerPresentation, t: FieldElement, genus: int, degree: int,
                  precision_bits: int = 200, tolerance: float = 1e-30, escalations: int = 3,
                  critical_check: bool = True) -> BelyiCertificate:
    if precision_bits < 64:
        raise ValueError("precision must be at least 64 bits")
    t0 = time.perf_counter()
    m = minimal_polynomial(t)
    P = primitive_integral_form(m)
    dt = t.derivative()
    dt_norm = dt.norm()
    s_g = _choose_chart(tower, t, P, dt_norm)
    bits = precision_bits
    attempts = []
    last: Exception | None = None
    for _ in range(escalations + 1):
        attempts.append(bits)
        try:
            with ctx.workprec(bits):
                chart = _Chart(tower, s_g)
                profiles = {c: _fibre_profile(chart, t, P, c, bits, degree) for c in ("0", "1", "oo")}
                checked = _critical_screen(chart, t, dt, dt_norm, tolerance) if critical_check else 0
            break
        except UnresolvedClusters as exc:
            last = exc
            bits *= 2
    else:
        raise UnresolvedClusters(f"{last} (precision tried: {attempts})")
    ram = sum(degree - len(p) for p in profiles.values())
    required = 2 * genus - 2 + 2 * degree
    if ram < required:
        raise BelyiError(f"ramification over 0, 1, oo accounts for {ram} of {required}: t ramifies elsewhere")
    return BelyiCertificate(degree, genus, profiles, bits, ram == required, ram, checked, str(s_g),
                            attempts, time.perf_counter() - t0)
