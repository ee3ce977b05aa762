"""Exact arithmetic kernel: rationals, univariate polynomials and rational functions over Q.

Rationals are :class:`fractions.Fraction`.  Polynomials are dense and backed by
FLINT's ``fmpq_poly``; the wrappers here carry the variable name and keep every
value immutable.  A :class:`RatFunc` is always stored in canonical form
(coprime numerator and denominator, monic denominator), so equality is a
structural comparison.

Bivariate polynomials (used for elimination and plane models) are plain FLINT
``fmpq_mpoly`` objects obtained from :func:`poly_ring`.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from flint import fmpq, fmpq_mpoly_ctx, fmpq_poly, fmpz, fmpz_poly

Rational = Fraction
Coefficient = Union[int, Fraction, fmpq]


def to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, (fmpq, fmpz)):
        c = fmpq(c)
        return Fraction(int(c.p), int(c.q))
    raise TypeError(f"not a rational: {c!r}")


def to_fmpq(c) -> fmpq:
    if isinstance(c, fmpq):
        return c
    if isinstance(c, int):
        return fmpq(c)
    if isinstance(c, Fraction):
        return fmpq(c.numerator, c.denominator)
    if isinstance(c, fmpz):
        return fmpq(c)
    raise TypeError(f"not a rational: {c!r}")


@lru_cache(maxsize=None)
def poly_ring(names: tuple[str, ...]):
    """Context for multivariate polynomials over Q in the given variables."""
    return fmpq_mpoly_ctx.get(names, "lex")


class UniPoly:
    """Dense univariate polynomial over Q in a named variable."""

    __slots__ = ("var", "_p")

    def __init__(self, coeffs: Iterable[Coefficient] | fmpq_poly = (), var: str = "s"):
        self.var = var
        if isinstance(coeffs, fmpq_poly):
            self._p = coeffs
        else:
            self._p = fmpq_poly([to_fmpq(c) for c in coeffs])

    @classmethod
    def gen(cls, var: str = "s") -> "UniPoly":
        return cls([0, 1], var)

    @classmethod
    def const(cls, c: Coefficient, var: str = "s") -> "UniPoly":
        return cls([c], var)

    @property
    def raw(self) -> fmpq_poly:
        return self._p

    @property
    def coefficients(self) -> list[Fraction]:
        """Coefficients, lowest degree first; empty for the zero polynomial."""
        return [to_fraction(c) for c in self._p.coeffs()]

    def degree(self) -> int:
        return self._p.degree()

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_constant(self) -> bool:
        return self._p.degree() <= 0

    def leading_coefficient(self) -> Fraction:
        return to_fraction(self._p.leading_coefficient()) if not self.is_zero() else Fraction(0)

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self._wrap(self._p / self._p.leading_coefficient())

    def derivative(self) -> "UniPoly":
        return self._wrap(self._p.derivative())

    def _wrap(self, p: fmpq_poly) -> "UniPoly":
        return UniPoly(p, self.var)

    def _coerce(self, other) -> fmpq_poly:
        if isinstance(other, UniPoly):
            if other.var != self.var and not (other.is_constant() or self.is_constant()):
                raise ValueError(f"variable mismatch: {self.var} vs {other.var}")
            return other._p
        return fmpq_poly([to_fmpq(other)])

    def __add__(self, other):
        return self._wrap(self._p + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self._p - self._coerce(other))

    def __rsub__(self, other):
        return self._wrap(self._coerce(other) - self._p)

    def __mul__(self, other):
        return self._wrap(self._p * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self._p)

    def __pow__(self, n: int):
        return self._wrap(self._p ** n)

    def __divmod__(self, other):
        q, r = divmod(self._p, self._coerce(other))
        return self._wrap(q), self._wrap(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self._p == other._p
        if isinstance(other, (int, Fraction, fmpq)):
            return self._p == fmpq_poly([to_fmpq(other)])
        return NotImplemented

    def __hash__(self):
        return hash((self.var, tuple(self.coefficients)))

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            return to_fraction(self._p(to_fmpq(x)))
        return self._p(x)

    def __repr__(self):
        return f"UniPoly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def format_poly(p: UniPoly) -> str:
    """Render a polynomial as an infix expression, highest degree first."""
    if p.is_zero():
        return "0"
    terms = []
    for k, c in reversed(list(enumerate(p.coefficients))):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        mono = "" if k == 0 else (p.var if k == 1 else f"{p.var}^{k}")
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        terms.append((sign, body))
    head_sign, head = terms[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic greatest common divisor (zero only if both inputs are zero)."""
    if a.var != b.var and not (a.is_constant() or b.is_constant()):
        raise ValueError("variable mismatch")
    return UniPoly(a.raw.gcd(b.raw), a.var)


def _squarefree_int(n: int) -> tuple[int, int]:
    """Split a nonzero integer as n = core * k**2 with core squarefree (sign kept in core)."""
    sign = -1 if n < 0 else 1
    core, k = 1, 1
    for prime, e in fmpz(abs(n)).factor():
        prime = int(prime)
        k *= prime ** (e // 2)
        if e % 2:
            core *= prime
    return sign * core, k


def squarefree_part(f: UniPoly) -> tuple[UniPoly, UniPoly]:
    """Split ``f = core * cofactor**2`` exactly.

    ``core`` is squarefree, has integer coefficients whose content is a
    squarefree integer, and its non-constant factors have positive leading
    coefficient; the constant carries the sign, since the sign changes the
    square class over Q.
    """
    if f.is_zero():
        raise ValueError("squarefree_part of the zero polynomial")
    num = f.raw.numer()  # integer polynomial
    den = int(f.raw.denom())
    content = int(num.content())
    if num.leading_coefficient() < 0:
        content = -content
    prim = fmpz_poly([c // content for c in num.coeffs()])
    core_poly = fmpz_poly([1])
    cof_poly = fmpz_poly([1])
    if prim.degree() > 0:
        _, factors = prim.factor_squarefree()
        for g, e in factors:
            if e % 2:
                core_poly *= g
            cof_poly *= g ** (e // 2)
    # f = (content/den) * core_poly * cof_poly**2 and content*den = c_core * k**2
    c_core, k = _squarefree_int(content * den)
    core = UniPoly(fmpq_poly(core_poly) * c_core, f.var)
    cofactor = UniPoly(fmpq_poly(cof_poly) * fmpq(k, den), f.var)
    return core, cofactor


def is_squarefree(f: UniPoly) -> bool:
    return f.degree() < 1 or poly_gcd(f, f.derivative()).degree() == 0


def resultant(a, b, eliminate: str):
    """Resultant of two bivariate polynomials with respect to ``eliminate``.

    Accepts FLINT ``fmpq_mpoly`` values; univariate :class:`UniPoly` inputs are
    treated as polynomials in their own variable.
    """
    if isinstance(a, UniPoly) and isinstance(b, UniPoly):
        if a.is_constant() and b.is_constant():
            raise ValueError("degenerate resultant: both inputs constant")
        return to_fraction(a.raw.resultant(b.raw))
    names = a.context().names()
    if eliminate not in names:
        raise ValueError(f"unknown variable {eliminate}")
    idx = names.index(eliminate)
    if a.degrees()[idx] == 0 and b.degrees()[idx] == 0:
        raise ValueError("degenerate resultant: both inputs constant in the eliminated variable")
    return a.resultant(b, eliminate)


class RatFunc:
    """Rational function over Q in canonical form (coprime, monic denominator)."""

    __slots__ = ("var", "_n", "_d")

    def __init__(self, num, den=None, var: str | None = None, _normalized: bool = False):
        if isinstance(num, UniPoly):
            var = var or num.var
            num = num.raw
        elif not isinstance(num, fmpq_poly):
            num = fmpq_poly([to_fmpq(num)])
        if den is None:
            den = fmpq_poly([1])
            _normalized = True
        elif isinstance(den, UniPoly):
            var = var or den.var
            den = den.raw
        elif not isinstance(den, fmpq_poly):
            den = fmpq_poly([to_fmpq(den)])
        self.var = var or "s"
        if not _normalized:
            if den.is_zero():
                raise ZeroDivisionError("rational function with zero denominator")
            if num.is_zero():
                den = fmpq_poly([1])
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num = num // g
                    den = den // g
                lc = den.leading_coefficient()
                if lc != 1:
                    num = num / lc
                    den = den / lc
        self._n = num
        self._d = den

    @classmethod
    def const(cls, c, var: str = "s") -> "RatFunc":
        return cls(fmpq_poly([to_fmpq(c)]), var=var)

    @classmethod
    def gen(cls, var: str = "s") -> "RatFunc":
        return cls(fmpq_poly([0, 1]), var=var)

    @property
    def numerator(self) -> UniPoly:
        return UniPoly(self._n, self.var)

    @property
    def denominator(self) -> UniPoly:
        return UniPoly(self._d, self.var)

    @property
    def raw(self) -> tuple[fmpq_poly, fmpq_poly]:
        return self._n, self._d

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def is_one(self) -> bool:
        return self._n.is_one() and self._d.is_one()

    def is_constant(self) -> bool:
        return self._n.degree() <= 0 and self._d.degree() == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return to_fraction(self._n[0] if not self._n.is_zero() else 0)

    def degree_pair(self) -> tuple[int, int]:
        return self._n.degree(), self._d.degree()

    def normalized(self) -> "RatFunc":
        return RatFunc(self._n, self._d, self.var)

    def _lift(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, UniPoly):
            return RatFunc(other.raw, var=self.var)
        return RatFunc(fmpq_poly([to_fmpq(other)]), var=self.var)

    def __add__(self, other):
        o = self._lift(other)
        if self._d == o._d:
            return RatFunc(self._n + o._n, self._d, self.var)
        return RatFunc(self._n * o._d + o._n * self._d, self._d * o._d, self.var)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self._n, self._d, self.var, _normalized=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        if o._d.is_one() and o._n.degree() <= 0:
            if o._n.is_zero():
                return RatFunc(fmpq_poly(), var=self.var)
            return RatFunc(self._n * o._n[0], self._d, self.var, _normalized=True)
        # cross-cancel before multiplying keeps intermediate degrees small
        g1 = self._n.gcd(o._d)
        g2 = o._n.gcd(self._d)
        n1, d2 = (self._n // g1, o._d // g1) if not g1.is_one() else (self._n, o._d)
        n2, d1 = (o._n // g2, self._d // g2) if not g2.is_one() else (o._n, self._d)
        num, den = n1 * n2, d1 * d2
        if num.is_zero():
            return RatFunc(fmpq_poly(), var=self.var)
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RatFunc(num, den, self.var, _normalized=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self._d, self._n, self.var)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self._n ** n, self._d ** n, self.var, _normalized=True)

    def derivative(self) -> "RatFunc":
        n, d = self._n, self._d
        return RatFunc(n.derivative() * d - n * d.derivative(), d * d, self.var)

    def compose(self, inner: "RatFunc") -> "RatFunc":
        """Substitute ``inner`` for the variable."""
        return _poly_at_ratfunc(self._n, inner) / _poly_at_ratfunc(self._d, inner)

    def __call__(self, x):
        d = self._d(x)
        return self._n(x) / d

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self._n == other._n and self._d == other._d
        if isinstance(other, (int, Fraction, fmpq, UniPoly)):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self):
        return hash((str(self._n), str(self._d)))

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        n, d = self.numerator, self.denominator
        if d.degree() == 0:
            return format_poly(n)
        return f"({format_poly(n)})/({format_poly(d)})"


def _poly_at_ratfunc(p: fmpq_poly, r: RatFunc) -> RatFunc:
    """Evaluate p(r) with a single common denominator d**deg(p)."""
    n, d = r.raw
    deg = p.degree()
    if deg < 0:
        return RatFunc(fmpq_poly(), var=r.var)
    coeffs = p.coeffs()
    acc = fmpq_poly([0])
    npow = fmpq_poly([1])
    dpows = [fmpq_poly([1])]
    for _ in range(deg):
        dpows.append(dpows[-1] * d)
    for k, c in enumerate(coeffs):
        if c != 0:
            acc += npow * dpows[deg - k] * c
        npow = npow * n
    return RatFunc(acc, dpows[deg], r.var)


def ratfunc(expr_num: Sequence[Coefficient] | UniPoly, expr_den: Sequence[Coefficient] | UniPoly = (1,),
            var: str = "s") -> RatFunc:
    """Convenience constructor from coefficient lists (lowest degree first)."""
    n = expr_num if isinstance(expr_num, UniPoly) else UniPoly(expr_num, var)
    d = expr_den if isinstance(expr_den, UniPoly) else UniPoly(expr_den, var)
    return RatFunc(n, d, var)
