"""Truncated Laurent series, dual numbers and a Newton solver for series equations.

A series stores the exponents val, val+1, ..., prec-1 (in units of 1/ram) and
claims nothing at or beyond prec.  Every operation derives the precision of
its result from the precisions of its inputs, and asking for a coefficient
outside the known window raises TruncationDeficit instead of padding with zero.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .errors import PreconditionError, SingularJacobianError, TruncationDeficit
from .scalar import Scalar, as_scalar

__all__ = ["Laurent", "Jet1", "series_solve", "residue"]


def _is_zero(c) -> bool:
    if isinstance(c, Scalar):
        return not c.c
    return c == 0


class Laurent:
    __slots__ = ("val", "coeffs", "prec", "ram", "center")

    def __init__(self, val: int, coeffs: Sequence, prec: int, ram: int = 1, center=None):
        n = prec - val
        if n < 0:
            val, coeffs = prec, []
            n = 0
        coeffs = list(coeffs[:n])
        if len(coeffs) < n:
            coeffs.extend([0] * (n - len(coeffs)))
        self.val = val
        self.coeffs = coeffs
        self.prec = prec
        self.ram = ram
        self.center = center

    # constructors
    @classmethod
    def monomial(cls, coeff, exp: int, prec: int, ram: int = 1) -> "Laurent":
        if exp >= prec:
            return cls(prec, [], prec, ram)
        return cls(exp, [coeff], prec, ram)

    @classmethod
    def from_dict(cls, terms: dict, prec: int, ram: int = 1) -> "Laurent":
        keys = [e for e in terms if e < prec]
        if not keys:
            return cls(prec, [], prec, ram)
        lo = min(keys)
        out = [0] * (prec - lo)
        for e in keys:
            out[e - lo] = terms[e]
        return cls(lo, out, prec, ram)

    @classmethod
    def zero(cls, prec: int, ram: int = 1) -> "Laurent":
        return cls(prec, [], prec, ram)

    def _norm(self) -> "Laurent":
        """Drop leading zero coefficients."""
        k = 0
        cs = self.coeffs
        while k < len(cs) and _is_zero(cs[k]):
            k += 1
        if k == 0:
            return self
        return Laurent(self.val + k, cs[k:], self.prec, self.ram, self.center)

    def valuation(self):
        """Exponent of the first nonzero known coefficient, or None if all vanish."""
        for k, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return self.val + k
        return None

    def coeff(self, e: int):
        if e >= self.prec:
            raise TruncationDeficit(
                "coefficient of exponent %d requested, known below %d" % (e, self.prec),
                needed=e + 1, available=self.prec)
        if e < self.val:
            return 0
        return self.coeffs[e - self.val]

    def __getitem__(self, e: int):
        return self.coeff(e)

    def items(self):
        for k, c in enumerate(self.coeffs):
            if not _is_zero(c):
                yield self.val + k, c

    def truncate(self, prec: int) -> "Laurent":
        if prec > self.prec:
            raise TruncationDeficit("cannot extend precision from %d to %d" % (self.prec, prec),
                                    needed=prec, available=self.prec)
        return Laurent(self.val, self.coeffs, prec, self.ram, self.center)

    def _check_ram(self, other: "Laurent"):
        if self.ram != other.ram:
            raise ValueError("mixing ramification %d and %d" % (self.ram, other.ram))

    # ring operations
    def __add__(self, other):
        if not isinstance(other, Laurent):
            if _is_zero(other):
                return self
            other = Laurent.monomial(other, 0, max(self.prec, 1), self.ram)
        self._check_ram(other)
        prec = min(self.prec, other.prec)
        lo = min(self.val, other.val)
        if lo >= prec:
            return Laurent(prec, [], prec, self.ram)
        out = [0] * (prec - lo)
        for k, c in enumerate(self.coeffs):
            e = self.val + k
            if e >= prec:
                break
            out[e - lo] = c
        for k, c in enumerate(other.coeffs):
            e = other.val + k
            if e >= prec:
                break
            if not _is_zero(c):
                out[e - lo] = out[e - lo] + c
        return Laurent(lo, out, prec, self.ram)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.val, [-c for c in self.coeffs], self.prec, self.ram)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k) -> "Laurent":
        return Laurent(self.val, [c * k for c in self.coeffs], self.prec, self.ram)

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            return self.scale(other)
        self._check_ram(other)
        a, b = self._norm(), other._norm()
        val = a.val + b.val
        prec = min(a.val + b.prec, b.val + a.prec)
        n = prec - val
        if n <= 0:
            return Laurent(prec, [], prec, self.ram)
        ac = a.coeffs[:n]
        bc = b.coeffs[:n]
        out = [0] * n
        bnz = [(j, y) for j, y in enumerate(bc) if not _is_zero(y)]
        for i, x in enumerate(ac):
            if _is_zero(x):
                continue
            lim = n - i
            for j, y in bnz:
                if j >= lim:
                    break
                out[i + j] = out[i + j] + x * y
        return Laurent(val, out, prec, self.ram)

    def __rmul__(self, other):
        return self.scale(other)

    def inverse(self) -> "Laurent":
        a = self._norm()
        if not a.coeffs:
            raise TruncationDeficit("cannot invert a series with no known nonzero coefficient",
                                    available=self.prec)
        n = len(a.coeffs)
        c0 = a.coeffs[0]
        a0inv = as_scalar(c0).inverse() if isinstance(c0, int) else 1 / c0
        out = [0] * n
        out[0] = a0inv
        for k in range(1, n):
            acc = 0
            for j in range(1, k + 1):
                cj = a.coeffs[j]
                if not _is_zero(cj):
                    acc = acc + cj * out[k - j]
            out[k] = -acc * a0inv
        return Laurent(-a.val, out, -a.val + n, self.ram)

    def __truediv__(self, other):
        if isinstance(other, Laurent):
            return self * other.inverse()
        if isinstance(other, int):
            other = as_scalar(other)
        inv = 1 / other
        return self.scale(inv)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = None
        base = self
        while True:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if not n:
                break
            base = base * base
        if result is None:
            return Laurent.monomial(as_scalar(1), 0, max(self.prec - self.val, 1), self.ram)
        return result

    # calculus
    def deriv(self) -> "Laurent":
        """d/ds, with s the variable of exponent unit 1/ram."""
        m = self.ram
        out = []
        for k, c in enumerate(self.coeffs):
            e = self.val + k
            out.append(c * e if e else 0)
        res = Laurent(self.val - m, out, self.prec - m, m)
        if m != 1:
            res = res.scale(as_scalar(1) / m)
        return res

    def integrate(self) -> "Laurent":
        """Antiderivative with zero constant term; requires no s^{-1} term."""
        if self.ram != 1:
            raise ValueError("integration implemented for integral exponents only")
        out = []
        for k, c in enumerate(self.coeffs):
            e = self.val + k
            if e == -1:
                if not _is_zero(c):
                    raise PreconditionError("series has a nonzero residue; primitive is logarithmic")
                out.append(0)
            else:
                out.append(c / (e + 1) if not _is_zero(c) else 0)
        res = Laurent(self.val + 1, out, self.prec + 1)
        if self.val + 1 <= 0 < self.prec + 1:
            # constant term of the primitive is set to zero
            res.coeffs[-res.val] = 0
        return res

    def residue(self):
        return self.coeff(-self.ram)

    def flip(self) -> "Laurent":
        """s -> -s."""
        if self.ram != 1:
            raise ValueError("flip only for integral exponents")
        return Laurent(self.val, [c if (self.val + k) % 2 == 0 else -c
                                  for k, c in enumerate(self.coeffs)], self.prec)

    def shift(self, k: int) -> "Laurent":
        """Multiply by s^k."""
        return Laurent(self.val + k, self.coeffs, self.prec + k, self.ram)

    def even_part(self) -> "Laurent":
        return Laurent(self.val, [c if (self.val + k) % 2 == 0 else 0
                                  for k, c in enumerate(self.coeffs)], self.prec)

    def odd_part(self) -> "Laurent":
        return Laurent(self.val, [c if (self.val + k) % 2 else 0
                                  for k, c in enumerate(self.coeffs)], self.prec)

    def principal_part(self) -> dict:
        return {e: c for e, c in self.items() if e < 0}

    def compose(self, inner: "Laurent") -> "Laurent":
        """self(inner(s)) for inner of positive valuation."""
        if self.ram != 1 or inner.ram != 1:
            raise ValueError("composition implemented for integral exponents")
        g = inner._norm()
        if not g.coeffs or g.val < 1:
            raise PreconditionError("inner series must have positive valuation")
        v, r = g.val, g.prec - g.val
        f = self._norm()
        if not f.coeffs:
            return Laurent.zero(v * f.prec)
        prec = min(v * f.prec, v * f.val + r)
        unit = Laurent(0, g.coeffs, r)
        upow = unit ** f.val
        acc = Laurent.zero(prec)
        for k, c in enumerate(f.coeffs):
            e = f.val + k
            if v * e >= prec:
                break
            if not _is_zero(c):
                acc = acc + upow.scale(c).shift(v * e)
            upow = upow * unit
        return acc

    def sqrt(self, lead_root=None) -> "Laurent":
        """Square root with the given root of the leading coefficient."""
        a = self._norm()
        if not a.coeffs:
            raise TruncationDeficit("square root of an unknown-zero series", available=self.prec)
        if a.val % 2:
            raise PreconditionError("square root needs even valuation")
        c0 = a.coeffs[0]
        if lead_root is None:
            from .scalar import sqrt_in_tower
            lead_root = sqrt_in_tower(as_scalar(c0))
            if lead_root is None:
                raise PreconditionError("leading coefficient %s is not a square in its tower" % c0)
        n = len(a.coeffs)
        out = [0] * n
        out[0] = lead_root
        inv2 = 1 / (2 * as_scalar(lead_root))
        for k in range(1, n):
            acc = a.coeffs[k]
            for j in range(1, k):
                if not _is_zero(out[j]) and not _is_zero(out[k - j]):
                    acc = acc - out[j] * out[k - j]
            out[k] = acc * inv2
        return Laurent(a.val // 2, out, a.val // 2 + n, self.ram)

    def is_zero_to_prec(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Laurent):
            return NotImplemented
        prec = min(self.prec, other.prec)
        lo = min(self.val, other.val)
        return all((self.coeff(e) if e >= self.val else 0) == (other.coeff(e) if e >= other.val else 0)
                   for e in range(lo, prec))

    __hash__ = None

    def __repr__(self):
        terms = ["(%s)*s^%s" % (c, e if self.ram == 1 else "%d/%d" % (e, self.ram))
                 for e, c in self.items()]
        return "Laurent(%s + O(s^%s))" % (" + ".join(terms) or "0", self.prec)


def residue(f: Laurent):
    """Coefficient of s^{-1} of the 1-form f(s) ds."""
    return f.residue()


class Jet1:
    """Dual number a + b*eps with eps**2 = 0."""

    __slots__ = ("a", "b", "tag")

    def __init__(self, a, b=0, tag: str = "eps"):
        self.a = a
        self.b = b
        self.tag = tag

    def _lift(self, other) -> "Jet1":
        if isinstance(other, Jet1):
            if other.tag != self.tag:
                raise ValueError("mixing jets in %s and %s" % (self.tag, other.tag))
            return other
        return Jet1(other, 0, self.tag)

    def __add__(self, other):
        o = self._lift(other)
        return Jet1(self.a + o.a, self.b + o.b, self.tag)

    __radd__ = __add__

    def __neg__(self):
        return Jet1(-self.a, -self.b, self.tag)

    def __sub__(self, other):
        o = self._lift(other)
        return Jet1(self.a - o.a, self.b - o.b, self.tag)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return Jet1(self.a * o.a, self.a * o.b + self.b * o.a, self.tag)

    __rmul__ = __mul__

    def inverse(self) -> "Jet1":
        ai = 1 / self.a if not isinstance(self.a, Laurent) else self.a.inverse()
        return Jet1(ai, -(self.b * ai * ai), self.tag)

    def __truediv__(self, other):
        o = self._lift(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n == 0:
            return Jet1(1, 0, self.tag)
        if n < 0:
            return self.inverse() ** (-n)
        p = self.a ** (n - 1)
        return Jet1(p * self.a, self.b * p * n, self.tag)

    def __eq__(self, other):
        o = self._lift(other)
        return self.a == o.a and self.b == o.b

    __hash__ = None

    def __repr__(self):
        return "Jet1(%r, %r)" % (self.a, self.b)


def series_solve(F: Callable, seed, order: int) -> Laurent:
    """Solve F(w(s), s) = 0 for a power series w with w(0) = seed.

    F is called with series (or dual numbers over series) and must be built
    from ring operations only.  The result is valid below s**order.
    """
    seed = as_scalar(seed)
    one = as_scalar(1)
    s = Laurent.monomial(one, 1, order)
    zero_s = Laurent.zero(order)
    w = Laurent.monomial(seed, 0, order)
    # F(seed, 0) must vanish and dF/dw(seed, 0) must be a unit
    base = F(Jet1(Laurent.monomial(seed, 0, 1), Laurent.monomial(one, 0, 1)), Laurent.zero(1))
    val0 = base.a.coeff(0) if isinstance(base.a, Laurent) else base.a
    if not _is_zero(val0):
        raise PreconditionError("F(seed, 0) = %s is not zero" % val0)
    jac0 = base.b.coeff(0) if isinstance(base.b, Laurent) else base.b
    if _is_zero(jac0):
        raise SingularJacobianError("dF/dw vanishes at the seed")
    del zero_s
    known = 1
    for _ in range(order.bit_length() + 2):
        jet = F(Jet1(w, Laurent.monomial(one, 0, order)), s)
        fval, fder = jet.a, jet.b
        if not isinstance(fval, Laurent):
            raise PreconditionError("F must return a series")
        if fval.prec < order:
            raise TruncationDeficit("F loses precision: %d < %d" % (fval.prec, order),
                                    needed=order, available=fval.prec)
        if fval.is_zero_to_prec():
            return w
        w = w - fval * fder.inverse()
        w = w.truncate(order) if w.prec > order else w
        known *= 2
    fval = F(w, s)
    if fval.prec < order or not fval.is_zero_to_prec():
        raise TruncationDeficit("Newton iteration did not reach the requested order",
                                needed=order, available=fval.prec)
    return w
