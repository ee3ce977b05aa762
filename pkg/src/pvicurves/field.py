"""Function fields Q(s)(sqrt f_1, ..., sqrt f_k) presented as multiquadratic towers.

An element is stored by its coordinates over the monomial basis
``r_M = prod_{i in M} r_i`` where ``M`` runs over bitmasks of the generators
and ``r_i**2 = f_i``.  Multiplication uses ``r_A * r_B = (prod_{i in A&B} f_i) r_{A^B}``.

The derivation extends d/ds by ``D(r_i) = f_i'/(2 f_i) * r_i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .arith import RatFunc, UniPoly, squarefree_part, to_fmpq

MAX_DEPTH = 3


class TowerError(ValueError):
    """Invalid tower presentation or an operation leaving the supported depth."""


class ZeroDivisorError(ZeroDivisionError):
    """A nonzero element with zero norm: the tower is not a field."""


def _popcount(m: int) -> int:
    return bin(m).count("1")


@dataclass(frozen=True)
class SquareClass:
    mask: int
    core: UniPoly
    cofactor: UniPoly  # prod_{i in mask} f_i = core * cofactor**2


class SquareClassSet:
    """Nontrivial square classes generated by the radicands of a tower."""

    def __init__(self, tower: "TowerPresentation"):
        self.classes: list[SquareClass] = []
        for mask in range(1, 1 << tower.depth):
            prod = UniPoly([1], tower.var)
            for i in range(tower.depth):
                if mask >> i & 1:
                    prod = prod * tower.radicands[i]
            core, cof = squarefree_part(prod)
            self.classes.append(SquareClass(mask, core, cof))

    def cores(self) -> frozenset:
        return frozenset(tuple(c.core.coefficients) for c in self.classes)

    def lookup(self, core: UniPoly) -> SquareClass | None:
        key = tuple(core.coefficients)
        for c in self.classes:
            if tuple(c.core.coefficients) == key:
                return c
        return None

    def __len__(self):
        return len(self.classes)

    def __eq__(self, other):
        return isinstance(other, SquareClassSet) and self.cores() == other.cores()

    def __repr__(self):
        return "SquareClassSet({" + ", ".join(str(c.core) for c in self.classes) + "})"


class TowerPresentation:
    """Base variable, squarefree normalized radicands and generator names."""

    def __init__(self, var: str, radicands: Sequence[UniPoly] = (), names: Sequence[str] = (),
                 check: bool = True):
        radicands = [UniPoly(r.raw, var) for r in radicands]
        names = list(names) or [f"r{i + 1}" for i in range(len(radicands))]
        if len(names) != len(radicands):
            raise TowerError("one generator name per radicand required")
        if len(radicands) > MAX_DEPTH:
            raise TowerError(f"tower depth {len(radicands)} exceeds {MAX_DEPTH}")
        self.var = var
        self.radicands = tuple(radicands)
        self.names = tuple(names)
        if check:
            self._validate()

    def _validate(self):
        if len(set(self.names)) != len(self.names) or self.var in self.names:
            raise TowerError("generator names must be distinct from each other and the base variable")
        for name, f in zip(self.names, self.radicands):
            if f.is_zero():
                raise TowerError(f"radicand of {name} is zero")
            core, cof = squarefree_part(f)
            if not (cof.is_constant() and cof.leading_coefficient() == 1 and core == f):
                raise TowerError(f"radicand of {name} is not squarefree and normalized: {f}")
        for c in self.square_classes.classes:
            if c.core.is_constant() and c.core.leading_coefficient() == 1:
                raise TowerError("radicands are dependent modulo squares (reducible tower)")

    @property
    def depth(self) -> int:
        return len(self.radicands)

    @property
    def size(self) -> int:
        return 1 << self.depth

    @cached_property
    def square_classes(self) -> SquareClassSet:
        return SquareClassSet(self)

    @cached_property
    def _table(self) -> list[list[RatFunc]]:
        """factor[A][B] = prod_{i in A&B} f_i."""
        fr = [RatFunc(f) for f in self.radicands]
        n = self.size
        cache: dict[int, RatFunc] = {0: RatFunc.const(1, self.var)}
        for m in range(1, n):
            low = m & -m
            i = low.bit_length() - 1
            cache[m] = cache[m ^ low] * fr[i]
        return [[cache[a & b] for b in range(n)] for a in range(n)]

    @cached_property
    def _logder(self) -> list[RatFunc]:
        halves = [RatFunc(f.derivative()) / (RatFunc(f) * 2) for f in self.radicands]
        out = []
        for m in range(self.size):
            acc = RatFunc.const(0, self.var)
            for i in range(self.depth):
                if m >> i & 1:
                    acc = acc + halves[i]
            out.append(acc)
        return out

    def monomial_name(self, mask: int) -> str:
        if mask == 0:
            return "1"
        return "*".join(self.names[i] for i in range(self.depth) if mask >> i & 1)

    # element constructors
    def zero(self) -> "FieldElement":
        return FieldElement(self, [RatFunc.const(0, self.var)] * self.size)

    def one(self) -> "FieldElement":
        return self.base(RatFunc.const(1, self.var))

    def base(self, c) -> "FieldElement":
        if not isinstance(c, RatFunc):
            c = RatFunc(c if isinstance(c, UniPoly) else UniPoly([c], self.var))
        coords = [RatFunc.const(0, self.var)] * self.size
        coords[0] = c
        return FieldElement(self, coords)

    def variable(self) -> "FieldElement":
        return self.base(RatFunc.gen(self.var))

    def generator(self, i_or_name) -> "FieldElement":
        i = self.names.index(i_or_name) if isinstance(i_or_name, str) else i_or_name
        return self.monomial(1 << i)

    def monomial(self, mask: int, coeff=None) -> "FieldElement":
        coords = [RatFunc.const(0, self.var)] * self.size
        coords[mask] = coeff if coeff is not None else RatFunc.const(1, self.var)
        return FieldElement(self, coords)

    def key(self):
        return (self.var, tuple(tuple(r.coefficients) for r in self.radicands), self.names)

    def __eq__(self, other):
        return isinstance(other, TowerPresentation) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def same_field(self, other: "TowerPresentation") -> bool:
        """Square-class certificate: equal class sets define the same field."""
        return self.var == other.var and self.square_classes == other.square_classes

    def __repr__(self):
        rels = ", ".join(f"{n}^2 = {f}" for n, f in zip(self.names, self.radicands))
        return f"TowerPresentation({self.var}; {rels})"


class FieldElement:
    """Element of a tower, with coordinates over the square-root monomial basis."""

    __slots__ = ("tower", "coords")

    def __init__(self, tower: TowerPresentation, coords: Sequence[RatFunc]):
        if len(coords) != tower.size:
            raise TowerError("coordinate count does not match the tower")
        self.tower = tower
        self.coords = tuple(coords)

    def _check(self, other: "FieldElement"):
        if other.tower is not self.tower and other.tower != self.tower:
            raise TowerError("elements live in different towers")

    def _lift(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            self._check(other)
            return other
        return self.tower.base(other)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def is_base(self) -> bool:
        return all(c.is_zero() for c in self.coords[1:])

    def base_value(self) -> RatFunc:
        if not self.is_base():
            raise TowerError("element is not in the base field")
        return self.coords[0]

    def is_constant(self) -> bool:
        return self.is_base() and self.coords[0].is_constant()

    def support(self) -> list[int]:
        return [m for m, c in enumerate(self.coords) if not c.is_zero()]

    def __add__(self, other):
        o = self._lift(other)
        return FieldElement(self.tower, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.tower, [-a for a in self.coords])

    def __sub__(self, other):
        o = self._lift(other)
        return FieldElement(self.tower, [a - b for a, b in zip(self.coords, o.coords)])

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, FieldElement):
            c = other if isinstance(other, RatFunc) else RatFunc.const(other, self.tower.var) \
                if not isinstance(other, UniPoly) else RatFunc(other)
            return FieldElement(self.tower, [a * c for a in self.coords])
        self._check(other)
        n = self.tower.size
        if n == 1:
            return FieldElement(self.tower, [self.coords[0] * other.coords[0]])
        table = self.tower._table
        out = [RatFunc.const(0, self.tower.var)] * n
        sa, sb = self.support(), other.support()
        for a in sa:
            ca = self.coords[a]
            for b in sb:
                term = ca * other.coords[b]
                if a & b:
                    term = term * table[a][b]
                out[a ^ b] = out[a ^ b] + term
        return FieldElement(self.tower, out)

    __rmul__ = __mul__

    def conjugate(self, flip_mask: int) -> "FieldElement":
        """Apply the automorphism negating the generators in ``flip_mask``."""
        return FieldElement(self.tower, [-c if _popcount(m & flip_mask) % 2 else c
                                         for m, c in enumerate(self.coords)])

    def norm(self) -> RatFunc:
        b = self
        for i in range(self.tower.depth):
            b = b * b.conjugate(1 << i)
        return b.coords[0]

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        if self.is_base():
            return self.tower.base(self.coords[0].inverse())
        acc = self.tower.one()
        b = self
        for i in range(self.tower.depth):
            c = b.conjugate(1 << i)
            if c == b:
                continue  # b does not involve generator i
            acc = acc * c
            b = b * c
        if not b.is_base():
            raise TowerError("conjugation failed to reach the base field")
        n = b.coords[0]
        if n.is_zero():
            raise ZeroDivisorError("zero divisor: radicands are dependent modulo squares")
        return acc * n.inverse()

    def __truediv__(self, other):
        if isinstance(other, FieldElement):
            return self * other.inverse()
        if isinstance(other, RatFunc):
            return self * other.inverse()
        return self * (RatFunc.const(1, self.tower.var) / other) if not isinstance(other, UniPoly) \
            else self * RatFunc(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.tower.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def derivative(self) -> "FieldElement":
        ld = self.tower._logder
        out = []
        for m, c in enumerate(self.coords):
            if c.is_zero():
                out.append(c)
            elif m == 0:
                out.append(c.derivative())
            else:
                out.append(c.derivative() + c * ld[m])
        return FieldElement(self.tower, out)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.tower == other.tower and self.coords == other.coords
        if isinstance(other, (int, Fraction, RatFunc, UniPoly)):
            return self == self.tower.base(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def max_degree(self) -> int:
        return max(max(c.degree_pair()) for c in self.coords)

    def __repr__(self):
        parts = []
        for m, c in enumerate(self.coords):
            if not c.is_zero():
                parts.append(str(c) if m == 0 else f"({c})*{self.tower.monomial_name(m)}")
        return "FieldElement(" + (" + ".join(parts) or "0") + ")"


def derivative(a: FieldElement) -> FieldElement:
    return a.derivative()


def multiply(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def invert(a: FieldElement) -> FieldElement:
    return a.inverse()


def distinct_conjugates(a: FieldElement) -> list[FieldElement]:
    seen: list[FieldElement] = []
    for mask in range(a.tower.size):
        c = a.conjugate(mask)
        if all(c != s for s in seen):
            seen.append(c)
    return seen


def minimal_polynomial(a: FieldElement) -> list[RatFunc]:
    """Monic minimal polynomial of ``a`` over the base field, coefficients lowest first.

    The roots are exactly the distinct Galois conjugates of ``a``.
    """
    poly = [a.tower.one()]  # coefficients as field elements
    for c in distinct_conjugates(a):
        shifted = [a.tower.zero()] + poly  # T * poly
        for k, coeff in enumerate(poly):
            shifted[k] = shifted[k] - coeff * c
        poly = shifted
    return [p.base_value() for p in poly]


def evaluate_polynomial(coeffs: Sequence[RatFunc], a: FieldElement) -> FieldElement:
    acc = a.tower.zero()
    for c in reversed(coeffs):
        acc = acc * a + c
    return acc


class Adjoined(NamedTuple):
    tower: TowerPresentation
    root: FieldElement
    is_square: bool
    extended: bool


def embed(a: FieldElement, tower: TowerPresentation) -> FieldElement:
    """Embed an element into a tower whose radicand list extends a's tower."""
    src = a.tower
    if src == tower:
        return a
    if tower.var != src.var or tower.radicands[:src.depth] != src.radicands:
        raise TowerError("target tower does not extend the source tower")
    coords = list(a.coords) + [RatFunc.const(0, tower.var)] * (tower.size - src.size)
    return FieldElement(tower, coords)


def adjoin_root(tower: TowerPresentation, radicand, name: str | None = None) -> Adjoined:
    """Square root of a base-field radicand, extending the tower only when needed.

    The radicand is reduced to its squarefree core; the root returned is
    ``cofactor * sqrt(core)`` expressed in the (possibly extended) tower.
    """
    if isinstance(radicand, FieldElement):
        radicand = radicand.base_value()
    if isinstance(radicand, UniPoly):
        radicand = RatFunc(radicand)
    if not isinstance(radicand, RatFunc):
        radicand = RatFunc.const(radicand, tower.var)
    if radicand.is_zero():
        raise TowerError("cannot adjoin the square root of zero")
    num, den = radicand.numerator, radicand.denominator
    core, cof = squarefree_part(num * den)
    scale = RatFunc(cof) / RatFunc(den)  # sqrt(num/den) = scale * sqrt(core)
    if core.is_constant() and core.leading_coefficient() == 1:
        return Adjoined(tower, tower.base(scale), True, False)
    hit = tower.square_classes.lookup(core) if tower.depth else None
    if hit is not None:
        root = tower.monomial(hit.mask, scale / RatFunc(hit.cofactor))
        return Adjoined(tower, root, False, False)
    if tower.depth >= MAX_DEPTH:
        raise TowerError(f"adjoining sqrt({core}) exceeds tower depth {MAX_DEPTH}")
    name = name or f"r{tower.depth + 1}"
    new = TowerPresentation(tower.var, list(tower.radicands) + [core], list(tower.names) + [name])
    root = new.monomial(1 << tower.depth, scale)
    return Adjoined(new, root, False, True)


@dataclass
class TowerMap:
    """Field homomorphism from ``src`` to ``dst`` given by images of s and the generators."""

    src: TowerPresentation
    dst: TowerPresentation
    base_image: FieldElement
    gen_images: list[FieldElement]
    _mono: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.gen_images) != self.src.depth:
            raise TowerError("one image per generator required")

    def _monomial_image(self, mask: int) -> FieldElement:
        if mask not in self._mono:
            if mask == 0:
                self._mono[0] = self.dst.one()
            else:
                low = mask & -mask
                i = low.bit_length() - 1
                self._mono[mask] = self._monomial_image(mask ^ low) * self.gen_images[i]
        return self._mono[mask]

    def map_base(self, c: RatFunc) -> FieldElement:
        b = self.base_image
        if b.is_base():
            return self.dst.base(c.compose(b.coords[0]))
        num, den = c.numerator.coefficients, c.denominator.coefficients
        return evaluate_polynomial([RatFunc.const(x, self.dst.var) for x in num], b) / \
            evaluate_polynomial([RatFunc.const(x, self.dst.var) for x in den], b)

    def __call__(self, a: FieldElement) -> FieldElement:
        if a.tower != self.src:
            raise TowerError("element does not belong to the map's source tower")
        acc = self.dst.zero()
        for m in a.support():
            acc = acc + self.map_base(a.coords[m]) * self._monomial_image(m)
        return acc

    def relation_defects(self) -> list[FieldElement]:
        """image(r_i)**2 - f_i(image(s)) for each generator; all zero iff the map is well defined."""
        return [g * g - self.map_base(RatFunc(f)) for g, f in zip(self.gen_images, self.src.radicands)]

    def is_homomorphism(self) -> bool:
        return all(d.is_zero() for d in self.relation_defects())


def identity_base(tower: TowerPresentation) -> FieldElement:
    return tower.variable()


def representation_map(src: TowerPresentation, dst: TowerPresentation) -> TowerMap:
    """Isomorphism between two presentations of the same field (same base variable)."""
    if not src.same_field(dst):
        raise TowerError("towers have different square-class sets")
    images = []
    for f in src.radicands:
        res = adjoin_root(dst, f)
        if res.extended or res.is_square:
            raise TowerError("radicand does not lie in the target tower")
        images.append(res.root)
    return TowerMap(src, dst, dst.variable(), images)


def sign_flips(tower: TowerPresentation) -> Iterable[int]:
    return range(tower.size)


def base_element(tower: TowerPresentation, value) -> FieldElement:
    if isinstance(value, (int, Fraction)):
        value = RatFunc.const(value, tower.var)
    return tower.base(value)


__all__ = [
    "MAX_DEPTH", "TowerError", "ZeroDivisorError", "SquareClass", "SquareClassSet",
    "TowerPresentation", "FieldElement", "Adjoined", "TowerMap", "adjoin_root", "embed",
    "minimal_polynomial", "distinct_conjugates", "evaluate_polynomial", "representation_map",
    "multiply", "invert", "derivative", "to_fmpq",
]
