"""Exact scalars in towers of quadratic extensions of the rationals.

A tower is an ordered chain Q = K_0 < K_1 < ... < K_d where K_{j+1} = K_j(r_j)
and r_j**2 is a fixed element of K_j that is not a square in K_j.  An element
of K_d is stored as a sparse map from bitmasks S (subsets of {0..d-1}) to
rationals, meaning sum_S c_S * prod_{j in S} r_j.  Because every r_j is a
genuine new square root, this is a basis and the normal form is canonical.

Towers are interned: extending the same tower by the same radicand twice gives
the identical object, so elements from a prefix tower are automatically valid
in any extension of it.
"""

from __future__ import annotations

import cmath
import math
from typing import Union

from fractions import Fraction

from gmpy2 import mpq

MPQ = type(mpq(0))

__all__ = [
    "Tower", "Scalar", "QQ", "adjoin_sqrt", "sqrt_in_tower", "as_scalar",
    "DegenerateRootError", "TowerMismatchError",
]


class DegenerateRootError(ValueError):
    """Raised when asked for the square root of zero as a new generator."""


class TowerMismatchError(ValueError):
    """Raised when combining elements of towers where neither extends the other."""


class Tower:
    __slots__ = ("parent", "radicand", "depth", "_children", "_mono", "__weakref__")

    def __init__(self, parent: "Tower | None", radicand: "Scalar | None"):
        self.parent = parent
        self.radicand = radicand
        self.depth = 0 if parent is None else parent.depth + 1
        self._children: dict = {}
        self._mono: dict = {}

    def levels(self) -> list["Scalar"]:
        out = []
        t = self
        while t.parent is not None:
            out.append(t.radicand)
            t = t.parent
        return out[::-1]

    def ancestor(self, depth: int) -> "Tower":
        t = self
        while t.depth > depth:
            t = t.parent
        return t

    def extends(self, other: "Tower") -> bool:
        return self.depth >= other.depth and self.ancestor(other.depth) is other

    def child(self, radicand: "Scalar") -> "Tower":
        key = radicand._key()
        t = self._children.get(key)
        if t is None:
            t = Tower(self, radicand)
            self._children[key] = t
        return t

    def radicand_at(self, level: int) -> "Scalar":
        return self.ancestor(level + 1).radicand

    def generator(self, level: int) -> "Scalar":
        return Scalar(self, {1 << level: mpq(1)})

    def describe(self) -> list:
        """Radicands as coefficient maps, level by level."""
        return [r.to_dict() for r in self.levels()]

    def __repr__(self):
        if self.depth == 0:
            return "QQ"
        return "Tower(%s)" % ", ".join("sqrt(%s)" % r for r in self.levels())


QQ = Tower(None, None)


def _join(a: Tower, b: Tower) -> Tower:
    if a is b:
        return a
    if a.depth >= b.depth:
        if a.ancestor(b.depth) is b:
            return a
    elif b.ancestor(a.depth) is a:
        return b
    raise TowerMismatchError("incompatible towers %r and %r" % (a, b))


def _mono(tower: Tower, s: int, t: int) -> dict:
    """Normal form of r_S * r_T as a coefficient map."""
    key = (s, t) if s <= t else (t, s)
    hit = tower._mono.get(key)
    if hit is not None:
        return hit
    common = s & t
    out = {s ^ t: mpq(1)}
    level = 0
    while common:
        if common & 1:
            out = _mul_maps(tower, out, tower.radicand_at(level).c)
        common >>= 1
        level += 1
    tower._mono[key] = out
    return out


def _mul_maps(tower: Tower, a: dict, b: dict) -> dict:
    out: dict = {}
    for s, x in a.items():
        for t, y in b.items():
            xy = x * y
            if s & t == 0:
                m = s | t
                out[m] = out.get(m, 0) + xy
            else:
                for m, z in _mono(tower, s, t).items():
                    out[m] = out.get(m, 0) + xy * z
    return {m: v for m, v in out.items() if v}


Number = Union[int, "mpq", "Scalar"]


class Scalar:
    """Element of a quadratic tower.  Immutable."""

    __slots__ = ("tower", "c")

    def __init__(self, tower: Tower, coeffs: dict):
        self.tower = tower
        self.c = coeffs

    # construction helpers
    @staticmethod
    def rational(value, tower: Tower = QQ) -> "Scalar":
        v = mpq(value)
        return Scalar(tower, {0: v} if v else {})

    @staticmethod
    def zero(tower: Tower = QQ) -> "Scalar":
        return Scalar(tower, {})

    @staticmethod
    def one(tower: Tower = QQ) -> "Scalar":
        return Scalar(tower, {0: mpq(1)})

    def _key(self):
        return tuple(sorted((m, int(v.numerator), int(v.denominator)) for m, v in self.c.items()))

    def is_zero(self) -> bool:
        return not self.c

    def is_rational(self) -> bool:
        return not self.c or (len(self.c) == 1 and 0 in self.c)

    def to_rational(self) -> mpq:
        if not self.is_rational():
            raise ValueError("%s is not rational" % self)
        return self.c.get(0, mpq(0))

    def support_level(self) -> int:
        top = 0
        for m in self.c:
            top |= m
        return top.bit_length()

    # arithmetic
    def _coerce(self, other) -> "Scalar | None":
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, MPQ)):
            v = mpq(other)
            return Scalar(self.tower, {0: v} if v else {})
        if isinstance(other, Fraction):
            v = mpq(other.numerator, other.denominator)
            return Scalar(self.tower, {0: v} if v else {})
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        tower = _join(self.tower, o.tower)
        if not o.c:
            return Scalar(tower, self.c)
        if not self.c:
            return Scalar(tower, o.c)
        out = dict(self.c)
        for m, v in o.c.items():
            w = out.get(m)
            if w is None:
                out[m] = v
            else:
                w = w + v
                if w:
                    out[m] = w
                else:
                    del out[m]
        return Scalar(tower, out)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.tower, {m: -v for m, v in self.c.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        tower = _join(self.tower, o.tower)
        a, b = self.c, o.c
        if not a or not b:
            return Scalar(tower, {})
        if len(b) == 1 and 0 in b:
            k = b[0]
            return Scalar(tower, {m: v * k for m, v in a.items()})
        if len(a) == 1 and 0 in a:
            k = a[0]
            return Scalar(tower, {m: v * k for m, v in b.items()})
        return Scalar(tower, _mul_maps(tower, a, b))

    __rmul__ = __mul__

    def _split(self, level: int) -> tuple["Scalar", "Scalar"]:
        """Write self = p + q * r_level with p, q free of levels >= level."""
        bit = 1 << level
        p, q = {}, {}
        for m, v in self.c.items():
            if m & bit:
                q[m ^ bit] = v
            else:
                p[m] = v
        base = self.tower.ancestor(level)
        return Scalar(base, p), Scalar(base, q)

    def inverse(self) -> "Scalar":
        if not self.c:
            raise ZeroDivisionError("inverse of zero scalar")
        lvl = self.support_level()
        if lvl == 0:
            return Scalar(self.tower, {0: 1 / self.c[0]})
        p, q = self._split(lvl - 1)
        r = self.tower.radicand_at(lvl - 1)
        norm = p * p - q * q * r
        ninv = norm.inverse()
        gen = self.tower.generator(lvl - 1)
        out = p * ninv - q * ninv * gen
        return Scalar(self.tower, out.c)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_rational():
            if not o.c:
                raise ZeroDivisionError("division by zero scalar")
            k = 1 / o.c[0]
            return Scalar(_join(self.tower, o.tower), {m: v * k for m, v in self.c.items()})
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = Scalar.one(self.tower)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison
    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.c == o.c

    def __ne__(self, other):
        r = self.__eq__(other)
        if r is NotImplemented:
            return r
        return not r

    def __hash__(self):
        if self.is_rational():
            return hash(self.c.get(0, 0))
        return hash(frozenset(self.c.items()))

    def __bool__(self):
        return bool(self.c)

    # presentation
    def to_dict(self) -> dict:
        """Lossless form: {mask: "num/den"} with string keys."""
        return {str(m): _qstr(v) for m, v in sorted(self.c.items())}

    def numeric(self) -> complex:
        """Approximate value using principal square roots at every level."""
        vals = _approx_generators(self.tower)
        total = 0j
        for m, v in self.c.items():
            term = complex(float(v))
            j = 0
            while m:
                if m & 1:
                    term *= vals[j]
                m >>= 1
                j += 1
            total += term
        return total

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for m, v in sorted(self.c.items()):
            if m == 0:
                parts.append(_qstr(v))
            else:
                gens = "*".join("r%d" % j for j in range(m.bit_length()) if m >> j & 1)
                parts.append("%s*%s" % (_qstr(v), gens))
        return " + ".join(parts)


def _qstr(v) -> str:
    v = mpq(v)
    if v.denominator == 1:
        return str(v.numerator)
    return "%s/%s" % (v.numerator, v.denominator)


def _approx_generators(tower: Tower) -> list[complex]:
    vals: list[complex] = []
    for r in tower.levels():
        # radicand only involves earlier levels
        total = 0j
        for m, v in r.c.items():
            term = complex(float(v))
            j = 0
            while m:
                if m & 1:
                    term *= vals[j]
                m >>= 1
                j += 1
            total += term
        vals.append(cmath.sqrt(total))
    return vals


def as_scalar(value, tower: Tower = QQ) -> Scalar:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, Fraction):
        value = mpq(value.numerator, value.denominator)
    return Scalar.rational(value, tower)


def _rational_sqrt(v) -> "mpq | None":
    v = mpq(v)
    if v < 0:
        return None
    n, d = int(v.numerator), int(v.denominator)
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return mpq(rn, rd)
    return None


def _sqrt_upto(a: Scalar, depth: int, tower: Tower) -> "Scalar | None":
    """Square root of a (supported below depth) inside the first `depth` levels."""
    if a.is_zero():
        return Scalar(tower, {})
    if depth == 0:
        if not a.is_rational():
            return None
        r = _rational_sqrt(a.to_rational())
        return None if r is None else Scalar(tower, {0: r})
    lvl = depth - 1
    p, q = a._split(lvl) if a.support_level() > lvl else (a, Scalar(tower, {}))
    p, q = Scalar(tower, p.c), Scalar(tower, q.c)
    R = Scalar(tower, tower.radicand_at(lvl).c)
    gen = tower.generator(lvl)
    if q.is_zero():
        s = _sqrt_upto(p, lvl, tower)
        if s is not None:
            return s
        t = _sqrt_upto(p / R, lvl, tower)
        if t is not None:
            return t * gen
        return None
    norm = p * p - q * q * R
    s = _sqrt_upto(norm, lvl, tower)
    if s is None:
        return None
    for cand in ((p + s) / 2, (p - s) / 2):
        c = _sqrt_upto(cand, lvl, tower)
        if c is not None and not c.is_zero():
            d = q / (2 * c)
            return c + d * gen
    return None


def sqrt_in_tower(a: Scalar, tower: Tower | None = None) -> "Scalar | None":
    """A square root of a inside the given tower, or None if a is not a square there."""
    tower = _join(a.tower, tower) if tower is not None else a.tower
    return _sqrt_upto(Scalar(tower, a.c), tower.depth, tower)


def adjoin_sqrt(tower: Tower, radicand) -> tuple[Tower, Scalar]:
    """Return (tower', root) with root**2 == radicand.

    If the radicand is already a square the tower is returned unchanged.
    """
    rad = as_scalar(radicand, tower)
    tower = _join(tower, rad.tower)
    if rad.is_zero():
        raise DegenerateRootError("cannot adjoin the square root of zero")
    existing = sqrt_in_tower(rad, tower)
    if existing is not None:
        return tower, existing
    new = tower.child(Scalar(tower, rad.c))
    return new, new.generator(tower.depth)
