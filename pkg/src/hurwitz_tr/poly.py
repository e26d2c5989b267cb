"""Univariate polynomials and rational functions with Scalar coefficients."""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import PreconditionError
from .scalar import QQ, Scalar, Tower, adjoin_sqrt, as_scalar
from .series import Laurent

__all__ = ["Poly", "RationalFunction", "rational_roots_and_quadratics"]


def _strip(cs: list) -> list:
    while cs and cs[-1].is_zero():
        cs.pop()
    return cs


class Poly:
    """Dense polynomial, coefficients in ascending degree."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        self.c = _strip([as_scalar(x) for x in coeffs])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def const(cls, v) -> "Poly":
        return cls([v])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def lead(self) -> Scalar:
        return self.c[-1]

    def __call__(self, v):
        acc = 0
        for a in reversed(self.c):
            acc = acc * v + a
        return acc if self.c else as_scalar(0)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.c), len(other.c))
        z = as_scalar(0)
        return Poly([(self.c[i] if i < len(self.c) else z) + (other.c[i] if i < len(other.c) else z)
                     for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-a for a in self.c])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            k = as_scalar(other)
            return Poly([a * k for a in self.c])
        if not self.c or not other.c:
            return Poly()
        out = [as_scalar(0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a.is_zero():
                continue
            for j, b in enumerate(other.c):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly([1])
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = _as_poly(other)
        return len(self.c) == len(other.c) and all(a == b for a, b in zip(self.c, other.c))

    __hash__ = None

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        dq = len(r) - len(other.c)
        if dq < 0:
            return Poly(), Poly(r)
        q = [as_scalar(0)] * (dq + 1)
        linv = other.c[-1].inverse()
        for k in range(dq, -1, -1):
            coef = r[k + len(other.c) - 1] * linv
            q[k] = coef
            if coef.is_zero():
                continue
            for j, b in enumerate(other.c):
                r[k + j] = r[k + j] - coef * b
        return Poly(q), Poly(r[:len(other.c) - 1])

    def __floordiv__(self, other):
        return self.divmod(_as_poly(other))[0]

    def __mod__(self, other):
        return self.divmod(_as_poly(other))[1]

    def monic(self) -> "Poly":
        if not self.c:
            return self
        return self * self.c[-1].inverse()

    def deriv(self) -> "Poly":
        return Poly([a * i for i, a in enumerate(self.c)][1:])

    def shift(self, a) -> "Poly":
        """p(t + a) as a polynomial in t."""
        a = as_scalar(a)
        out = Poly()
        for coef in reversed(self.c):
            out = out * Poly([a, 1]) + Poly([coef])
        return out

    def reverse(self, n: int | None = None) -> "Poly":
        """t^n p(1/t)."""
        n = self.degree if n is None else n
        cs = list(self.c) + [as_scalar(0)] * (n + 1 - len(self.c))
        return Poly(cs[::-1])

    def valuation(self) -> int:
        for i, a in enumerate(self.c):
            if not a.is_zero():
                return i
        return 0

    def compose(self, other: "Poly") -> "Poly":
        out = Poly()
        for coef in reversed(self.c):
            out = out * other + Poly([coef])
        return out

    def to_series(self, prec: int) -> Laurent:
        return Laurent(0, list(self.c), prec)

    def __repr__(self):
        return "Poly(%s)" % ", ".join(map(repr, self.c))


def _as_poly(v) -> Poly:
    return v if isinstance(v, Poly) else Poly([v])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def _series_quotient(num: Poly, den: Poly, n: int) -> list:
    """First n coefficients of num/den where den(0) != 0."""
    d0inv = den.c[0].inverse()
    out = []
    for k in range(n):
        acc = num.c[k] if k < len(num.c) else as_scalar(0)
        for j in range(1, min(k, den.degree) + 1):
            acc = acc - den.c[j] * out[k - j]
        out.append(acc * d0inv)
    return out


class RationalFunction:
    """num/den with gcd removed and den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _normalised: bool = False):
        num = _as_poly(num) if not isinstance(num, Poly) else num
        den = Poly([1]) if den is None else (_as_poly(den) if not isinstance(den, Poly) else den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _normalised:
            if num.is_zero():
                den = Poly([1])
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num, den = num // g, den // g
                lc = den.lead().inverse()
                num, den = num * lc, den * lc
        self.num = num
        self.den = den

    @classmethod
    def from_ints(cls, num: Sequence[int], den: Sequence[int] = (1,)) -> "RationalFunction":
        return cls(Poly(num), Poly(den))

    @classmethod
    def z(cls) -> "RationalFunction":
        return cls(Poly([0, 1]))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __call__(self, v):
        d = self.den(v)
        if as_scalar(d).is_zero() if not hasattr(d, "is_zero_to_prec") else False:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num(v) / d

    def __add__(self, other):
        o = _as_rf(other)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _normalised=True)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) - self

    def __mul__(self, other):
        o = _as_rf(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_rf(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return _as_rf(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return RationalFunction(self.den ** (-n), self.num ** (-n))
        return RationalFunction(self.num ** n, self.den ** n)

    def __eq__(self, other):
        o = _as_rf(other)
        return self.num == o.num and self.den == o.den

    __hash__ = None

    def deriv(self) -> "RationalFunction":
        return RationalFunction(self.num.deriv() * self.den - self.num * self.den.deriv(),
                                self.den * self.den)

    def compose(self, other: "RationalFunction") -> "RationalFunction":
        """self(other(z))."""
        n, d = self.num, self.den
        deg = max(n.degree, d.degree, 0)
        # homogenise: N(p/q) q^deg
        p, q = other.num, other.den
        def hom(poly):
            out = Poly()
            for k, a in enumerate(poly.c):
                out = out + (p ** k) * (q ** (deg - k)) * a
            return out
        return RationalFunction(hom(n), hom(d))

    def order_at(self, a) -> int:
        """Valuation at a finite point (negative for poles)."""
        a = as_scalar(a)
        return self.num.shift(a).valuation() - self.den.shift(a).valuation() if not self.is_zero() else 10**9

    def order_at_infinity(self) -> int:
        """Valuation in w = 1/z."""
        if self.is_zero():
            return 10**9
        return self.den.degree - self.num.degree

    def expand_at(self, a, prec: int) -> Laurent:
        """Laurent expansion in t = z - a, valid below t**prec."""
        a = as_scalar(a)
        n = self.num.shift(a)
        d = self.den.shift(a)
        vn, vd = n.valuation(), d.valuation()
        if n.is_zero():
            return Laurent.zero(prec)
        n = Poly(n.c[vn:])
        d = Poly(d.c[vd:])
        lo = vn - vd
        count = prec - lo
        if count <= 0:
            return Laurent.zero(prec)
        return Laurent(lo, _series_quotient(n, d, count), prec)

    def expand_at_infinity(self, prec: int) -> Laurent:
        """Laurent expansion in w = 1/z, valid below w**prec."""
        if self.is_zero():
            return Laurent.zero(prec)
        dn, dd = self.num.degree, self.den.degree
        n = self.num.reverse(dn)
        d = self.den.reverse(dd)
        lo = dd - dn
        count = prec - lo
        if count <= 0:
            return Laurent.zero(prec)
        return Laurent(lo, _series_quotient(n, d, count), prec)

    def __repr__(self):
        return "RationalFunction(%r / %r)" % (self.num, self.den)


def _as_rf(v) -> RationalFunction:
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, Poly):
        return RationalFunction(v)
    return RationalFunction(Poly([v]))


def rational_roots_and_quadratics(poly: Poly, tower: Tower = QQ) -> tuple[Tower, list]:
    """Roots of a polynomial with rational coefficients, with multiplicities.

    Factors over Q; linear and quadratic irreducible factors give roots in a
    quadratic tower.  Higher-degree irreducible factors are rejected.
    Returns (tower, [(root, multiplicity), ...]) in a deterministic order:
    rational roots in decreasing order, then quadratic pairs with the +root first.
    """
    import sympy

    if not all(c.is_rational() for c in poly.c):
        raise PreconditionError("root finding needs rational coefficients")
    zs = sympy.Symbol("z")
    expr = sum(sympy.Rational(int(c.to_rational().numerator), int(c.to_rational().denominator)) * zs ** i
               for i, c in enumerate(poly.c))
    _, factors = sympy.factor_list(sympy.Poly(expr, zs, domain="QQ"))
    rational, quads = [], []
    for f, mult in factors:
        cs = [sympy.Rational(x) for x in reversed(f.all_coeffs())]
        if len(cs) == 2:
            r = -cs[0] / cs[1]
            rational.append((as_scalar(_mpq(r)), mult, r))
        elif len(cs) == 3:
            quads.append(([_mpq(x) for x in cs], mult))
        else:
            raise PreconditionError("irreducible factor of degree %d does not split in a quadratic tower"
                                    % (len(cs) - 1))
    rational.sort(key=lambda t: -t[2])
    out = [(r, m) for r, m, _ in rational]
    for (c0, c1, c2), mult in sorted(quads, key=lambda q: [str(x) for x in q[0]]):
        disc = c1 * c1 - 4 * c0 * c2
        tower, root = adjoin_sqrt(tower, as_scalar(disc, tower))
        for sgn in (1, -1):
            out.append(((root * sgn - c1) / (2 * c2), mult))
    return tower, out


def _mpq(r):
    from gmpy2 import mpq
    import sympy
    r = sympy.Rational(r)
    return mpq(int(r.p), int(r.q))
