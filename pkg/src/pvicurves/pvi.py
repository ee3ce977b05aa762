"""The sixth Painlevé equation on a tower: parameters, solutions and the exact residual."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from flint import acb, acb_series, ctx, fmpq

from .arith import UniPoly, to_fraction
from .field import FieldElement, TowerPresentation


class DegenerateSolution(ValueError):
    """t is constant, or y is identically 0, 1 or t."""


@dataclass(frozen=True)
class ThetaParams:
    theta1: Fraction
    theta2: Fraction
    theta3: Fraction
    theta4: Fraction

    def __post_init__(self):
        for name in ("theta1", "theta2", "theta3", "theta4"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))

    @classmethod
    def of(cls, *values, denominator=1) -> "ThetaParams":
        """``ThetaParams.of(0, 1, 0, 9, denominator=10)`` is (0, 1/10, 0, 9/10)."""
        if len(values) == 1:
            values = tuple(values[0])
        return cls(*(Fraction(v) / denominator for v in values))

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.theta1, self.theta2, self.theta3, self.theta4)

    def bar(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """(theta1, theta2, theta3, theta4 - 1): the exponents attached to 0, t, 1, infinity."""
        return (self.theta1, self.theta2, self.theta3, self.theta4 - 1)

    @classmethod
    def from_bar(cls, bar: Sequence[Fraction]) -> "ThetaParams":
        return cls(bar[0], bar[1], bar[2], bar[3] + 1)

    def squares(self) -> tuple[Fraction, ...]:
        return tuple(b * b for b in self.bar())

    def canonical(self) -> "ThetaParams":
        """Representative with nonnegative exponents and theta4 >= 1."""
        return ThetaParams.from_bar([abs(b) for b in self.bar()])

    def __str__(self):
        return " ".join(str(x) for x in self.as_tuple())


def theta_equivalent_up_to_signs(a: ThetaParams, b: ThetaParams) -> bool:
    """PVI only sees theta1^2, theta2^2, theta3^2 and (theta4 - 1)^2."""
    return a.squares() == b.squares()


@dataclass
class PviSolution:
    tower: TowerPresentation
    y: FieldElement
    t: FieldElement
    theta: ThetaParams
    label: str = ""

    def __post_init__(self):
        if self.y.tower != self.tower or self.t.tower != self.tower:
            raise ValueError("y and t must live in the solution's tower")

    def check_nondegenerate(self):
        if self.t.is_constant():
            raise DegenerateSolution("t is constant")
        for bad, what in ((self.tower.zero(), "0"), (self.tower.one(), "1"), (self.t, "t")):
            if self.y == bad:
                raise DegenerateSolution(f"y is identically {what}")
        return self


@dataclass
class ResidualReport:
    residual: FieldElement
    is_zero: bool
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"is_zero": self.is_zero, **self.stats}


def pvi_residual(sol: PviSolution) -> ResidualReport:
    """Exact PVI residual with all denominators cleared.

    With Y1 = Dy, T1 = Dt (D = d/ds) and the chain rule y' = Y1/T1,
    y'' = (D(Y1) T1 - Y1 D(T1))/T1^3, the equation is multiplied by
    2 t^2 (t-1)^2 y (y-1) (y-t) T1^3, leaving a polynomial expression in
    y, t and their first two derivatives; no field inversion is needed.
    """
    y, t = sol.y, sol.t
    t1 = t.derivative()
    if t1.is_zero():
        raise DegenerateSolution("t is constant (dt/ds = 0)")
    sol.check_nondegenerate()
    th = sol.theta
    alpha = (th.theta4 - 1) ** 2
    beta = th.theta1 ** 2
    gamma = th.theta3 ** 2
    kappa = 1 - th.theta2 ** 2

    y1 = y.derivative()
    y2 = y1.derivative()
    t2 = t1.derivative()
    ym1 = y - 1
    ymt = y - t
    tm1 = t - 1
    tt = t * tm1  # t(t-1)
    tt2 = tt * tt
    yy = y * ym1  # y(y-1)
    yyy = yy * ymt  # y(y-1)(y-t)

    lead = (yyy * tt2) * 2 * (y2 * t1 - y1 * t2)
    s_term = ym1 * ymt + y * ymt + yy
    first = tt2 * s_term * (y1 * y1) * t1
    coeff_y1 = yyy * tt * (t * 2 - 1) * 2 + yy * tt2 * 2
    second = coeff_y1 * y1 * (t1 * t1)
    ymt2 = ymt * ymt
    ym12 = ym1 * ym1
    y_2 = y * y
    poly = ym12 * ymt2 * y_2 * alpha - t * ym12 * ymt2 * beta + tm1 * y_2 * ymt2 * gamma \
        + tt * y_2 * ym12 * kappa
    third = poly * (t1 * t1 * t1)
    residual = lead - first + second - third
    stats = {
        "max_degree_y": y.max_degree(),
        "max_degree_t": t.max_degree(),
        "max_degree_residual_terms": max(e.max_degree() for e in (lead, first, second, third)),
        "tower_depth": sol.tower.depth,
    }
    return ResidualReport(residual, residual.is_zero(), stats)


# ------------------------------------------------------------------ numeric cross-check

@dataclass
class NumericReport:
    points: list[str]
    residuals: list[float]
    tolerance: float
    precision_bits: int

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    @property
    def ok(self) -> bool:
        return bool(self.residuals) and self.max_residual < self.tolerance

    def to_dict(self) -> dict:
        return {"ok": self.ok, "max_residual": self.max_residual, "tolerance": self.tolerance,
                "precision_bits": self.precision_bits, "points": self.points}


def _poly_series(p: UniPoly, x: acb_series) -> acb_series:
    acc = x * 0
    for c in reversed(p.coefficients):
        acc = acc * x + acb(fmpq(c.numerator, c.denominator))
    return acc


def _element_series(a: FieldElement, x: acb_series, roots: list[acb_series]) -> acb_series:
    acc = x * 0
    for m in a.support():
        c = a.coords[m]
        term = _poly_series(c.numerator, x) / _poly_series(c.denominator, x)
        for i, r in enumerate(roots):
            if m >> i & 1:
                term = term * r
        acc = acc + term
    return acc


def _excluded(sol: PviSolution) -> list[UniPoly]:
    """Polynomials whose zeros are unsafe sample points."""
    out = list(sol.tower.radicands)
    for e in (sol.y, sol.t):
        out.extend(e.coords[m].denominator for m in e.support())
    return out


def pvi_numeric_check(sol: PviSolution, points: int = 5, precision_bits: int = 200,
                      tolerance: float = 1e-30, seed: int = 0) -> NumericReport:
    """Evaluate the PVI equation numerically at random points of the curve.

    Independent of the exact residual: y and t are expanded as power series in
    s around a random complex point (generators via series square roots) and
    dy/dt, d2y/dt2 are read off the Taylor coefficients.
    """
    if precision_bits < 64:
        raise ValueError("precision must be at least 64 bits")
    rng = random.Random(seed)
    th = sol.theta
    a4, a1, a3, a2 = ((fmpq(x.numerator, x.denominator)) for x in
                      ((th.theta4 - 1) ** 2, th.theta1 ** 2, th.theta3 ** 2, 1 - th.theta2 ** 2))
    bad = _excluded(sol)
    labels, residuals = [], []
    with ctx.workprec(precision_bits):
        while len(residuals) < points:
            s0 = acb(fmpq(rng.randint(-300, 300), 100), fmpq(rng.randint(-300, 300), 100))
            if any(abs(_poly_series(f, acb_series([s0], prec=1)).coeffs()[0]) < 1e-3 for f in bad):
                continue
            x = acb_series([s0, 1], prec=3)
            roots = [_poly_series(f, x).sqrt() for f in sol.tower.radicands]
            Y = _element_series(sol.y, x, roots).coeffs() + [acb(0)] * 3
            T = _element_series(sol.t, x, roots).coeffs() + [acb(0)] * 3
            y, y1, y2 = Y[0], Y[1], 2 * Y[2]
            t, t1, t2 = T[0], T[1], 2 * T[2]
            if abs(t1) < 1e-6 or min(abs(y), abs(y - 1), abs(y - t), abs(t), abs(t - 1)) < 1e-6:
                continue
            yp = y1 / t1
            ypp = (y2 * t1 - y1 * t2) / t1 ** 3
            rhs = (1 / y + 1 / (y - 1) + 1 / (y - t)) * yp ** 2 / 2 \
                - (1 / t + 1 / (t - 1) + 1 / (y - t)) * yp \
                + y * (y - 1) * (y - t) / (2 * t ** 2 * (t - 1) ** 2) \
                * (a4 - a1 * t / y ** 2 + a3 * (t - 1) / (y - 1) ** 2 + a2 * t * (t - 1) / (y - t) ** 2)
            r = abs(ypp - rhs)
            labels.append(s0.mid().str(6, radius=False))
            residuals.append(float(r.mid()) + float(r.rad()))
    return NumericReport(labels, residuals, tolerance, precision_bits)
