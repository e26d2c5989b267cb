"""Genus-zero spectral curves: branch points, Airy charts, pole charts and the Bergman kernel.

The curve is the Riemann sphere with coordinate z, a rational function x(z),
a rational differential dy = f(z) dz and the kernel B = dz dz' / (z - z')^2.
Local data at a simple zero a of dx is expressed in the Airy coordinate zeta,
x(a + t) = u + zeta^2 / 2, with zeta = s t + ... and s a fixed square root of
x''(a).  Differentials expanded at a chart are returned as Laurent series of
the coefficient of d(zeta).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import AdmissibilityError, DegeneracyError, PreconditionError
from .poly import Poly, RationalFunction, rational_roots_and_quadratics
from .scalar import QQ, Scalar, Tower, adjoin_sqrt, as_scalar
from .series import Laurent, series_solve

__all__ = [
    "BranchChart", "PoleChart", "SpectralCurve", "analyze", "evaluate_at_branch",
    "bergman_expand", "dominance_check", "compatibility_test", "CompatibilityReport",
    "parse_curve_spec", "curve_from_spec", "evaluate_differential", "compatibility_form",
]


def _horner(coeffs: Sequence, w, prec: int):
    """Evaluate the power series sum c_k w^k at a series (or jet) w of positive valuation."""
    acc = None
    for c in reversed(coeffs):
        acc = Laurent.monomial(c, 0, prec) if acc is None else w * acc + c
    return acc if acc is not None else Laurent.zero(prec)


class BranchChart:
    """Local data at a simple zero a of dx.

    Series are built lazily and cached at the largest precision requested so far.
    Precisions count exponents: a series with prec p is known below t**p.
    """

    def __init__(self, index: int, a: Scalar, x: RationalFunction, tower: Tower):
        self.index = index
        self.a = a
        self.x = x
        xt = x.expand_at(a, 4)
        self.u = xt.coeff(0)
        if not as_scalar(xt.coeff(1)).is_zero():
            raise DegeneracyError("dx does not vanish at z = %s" % a)
        c2 = as_scalar(xt.coeff(2))
        if c2.is_zero():
            raise DegeneracyError("zero of dx at z = %s is not simple" % a)
        self.x2 = c2 * 2
        self.tower, self.branch_sign = adjoin_sqrt(tower, self.x2)
        self._zeta = None
        self._t = None
        self._sigma = None

    # zeta(t) = s t sqrt(1 + h(t)) where x(a+t) - u = (x''/2) t^2 (1 + h)
    def zeta_series(self, prec: int) -> Laurent:
        if self._zeta is None or self._zeta.prec < prec:
            xt = self.x.expand_at(self.a, prec + 1)
            c2 = self.x2 / 2
            unit = (xt - self.u).shift(-2).scale(c2.inverse())
            root = unit.sqrt(lead_root=as_scalar(1))
            self._zeta = root.scale(self.branch_sign).shift(1)
        return self._zeta.truncate(prec)

    def t_series(self, prec: int) -> Laurent:
        """t(zeta) = z(zeta) - a, the inverse of zeta(t)."""
        if self._t is None or self._t.prec < prec:
            zt = self.zeta_series(prec + 1)
            coeffs = [zt.coeff(e) for e in range(prec + 1)]

            def F(w, s):
                return _horner(coeffs, w, prec) - s

            self._t = series_solve(F, 0, prec)
        return self._t.truncate(prec)

    def sigma_series(self, prec: int) -> Laurent:
        """Local involution in the t coordinate: sigma(t) = t(-zeta(t))."""
        if self._sigma is None or self._sigma.prec < prec:
            self._sigma = self.t_series(prec).compose(-self.zeta_series(prec))
        return self._sigma.truncate(prec)

    def expand_function(self, f: RationalFunction, prec: int) -> Laurent:
        """f(z(zeta)) known below zeta**prec."""
        if f.is_zero():
            return Laurent.zero(prec)
        v = f.order_at(self.a)
        ft = f.expand_at(self.a, prec)
        tz = self.t_series(max(prec - v, 1) + 1)
        return ft.compose(tz).truncate(prec)

    def expand(self, f: RationalFunction, prec: int) -> Laurent:
        """Coefficient of d(zeta) in f(z) dz, known below zeta**prec."""
        if f.is_zero():
            return Laurent.zero(prec)
        v = f.order_at(self.a)
        r = max(prec - v, 1) + 1
        tz = self.t_series(r)
        ft = f.expand_at(self.a, prec)
        return (ft.compose(tz) * tz.deriv()).truncate(prec)

    def expand_t(self, f: RationalFunction, prec: int) -> Laurent:
        return f.expand_at(self.a, prec)

    def describe(self) -> dict:
        return {"index": self.index, "z": self.a, "u": self.u, "x2": self.x2,
                "branch_sign": self.branch_sign}


class PoleChart:
    """A pole of x, at z = b or at z = infinity, with uniformiser w.

    w = z - b at a finite pole and w = 1/z at infinity, so x = c w^(-mu) (1 + O(w)).
    """

    def __init__(self, index: int, location, mu: int, x: RationalFunction):
        self.index = index
        self.location = location  # None means z = infinity
        self.mu = mu
        self.x = x
        xw = self.function(x, 1 - mu)
        self.lead = xw.coeff(-mu)

    @property
    def at_infinity(self) -> bool:
        return self.location is None

    def function(self, f: RationalFunction, prec: int) -> Laurent:
        """f as a Laurent series in w, known below w**prec."""
        if self.location is None:
            return f.expand_at_infinity(prec)
        return f.expand_at(self.location, prec)

    def differential(self, f: RationalFunction, prec: int) -> Laurent:
        """Coefficient of dw in f(z) dz."""
        if self.location is None:
            # dz = -dw / w^2
            return -self.function(f, prec + 2).shift(-2)
        return self.function(f, prec)

    def order_of(self, f: RationalFunction) -> int:
        return f.order_at_infinity() if self.location is None else f.order_at(self.location)

    def xi_series(self, prec: int) -> Laurent:
        """xi = (x / c)^(1/mu), a Laurent series w^-1 (1 + ...) with the real-positive branch."""
        mu = self.mu
        xw = self.function(self.x, prec + 1 - mu)
        unit = xw.shift(mu).scale(self.lead.inverse())
        if mu == 1:
            root = unit
        else:
            cs = [unit.coeff(e) for e in range(unit.prec)]

            def F(v, s):
                return v ** mu - _horner(cs, s, unit.prec)

            root = series_solve(F, 1, unit.prec)
        return root.shift(-1)

    def describe(self) -> dict:
        return {"index": self.index, "z": "infinity" if self.location is None else self.location,
                "mu": self.mu, "lead": self.lead}


def _differential_order_at_infinity(f: RationalFunction) -> int:
    """Order at infinity of f(z) dz."""
    return f.order_at_infinity() - 2


class SpectralCurve:
    """Genus-zero spectral curve (P^1, x, dy, B) with B = dz dz'/(z - z')^2."""

    def __init__(self, x: RationalFunction, dy: RationalFunction, charts: list, poles: list,
                 tower: Tower, order: int):
        self.x = x
        self.dy = dy
        self.dx = x.deriv()
        self.charts = charts
        self.poles = poles
        self.tower = tower
        self.order = order
        self._cache: dict = {}
        self.options: dict = {}

    @property
    def N(self) -> int:
        return len(self.charts)

    @property
    def mu(self) -> tuple:
        return tuple(p.mu for p in self.poles)

    @property
    def u(self) -> list:
        return [c.u for c in self.charts]

    def cached(self, key, build):
        hit = self._cache.get(key)
        if hit is None:
            hit = build()
            self._cache[key] = hit
        return hit

    # rational data on the Bergman kernel
    def bergman_column(self, j: int, l: int) -> RationalFunction:
        """b_l(p) = Res_{q=P_j} zeta_j(q)^(-l-1) B(p, q), as the coefficient of dp.

        Near P_j it equals (l+1) zeta^(-l-2) d zeta plus a holomorphic part; it has
        no other poles.
        """
        def build():
            ch = self.charts[j]
            zt = ch.zeta_series(l + 3)
            inv = zt ** (-(l + 1))
            # 1/(p-a-t)^2 = sum_n (n+1) t^n (p-a)^(-n-2)
            out = RationalFunction(Poly())
            pa = Poly([-ch.a, 1])
            for n in range(l + 1):
                g = inv.coeff(-n - 1)
                if g == 0 or (isinstance(g, Scalar) and g.is_zero()):
                    continue
                out = out + RationalFunction(Poly([g * (n + 1)]), pa ** (n + 2))
            return out
        return self.cached(("col", j, l), build)

    def dxi(self, j: int, k: int) -> RationalFunction:
        """dxi^j_k: pole only at P_j with principal part zeta^(-2k-2) d zeta."""
        return self.cached(("dxi", j, k),
                           lambda: self.bergman_column(j, 2 * k) * as_scalar(1, QQ) / (2 * k + 1))

    def expand_dxi(self, j: int, k: int, i: int, prec: int) -> Laurent:
        """dxi^j_k expanded at chart i, known below zeta_i**prec."""
        key = ("edxi", j, k, i)
        hit = self._cache.get(key)
        if hit is None or hit.prec < prec:
            hit = self.charts[i].expand(self.dxi(j, k), prec)
            self._cache[key] = hit
        return hit.truncate(prec)

    def expand_column(self, j: int, l: int, i: int, prec: int) -> Laurent:
        key = ("ecol", j, l, i)
        hit = self._cache.get(key)
        if hit is None or hit.prec < prec:
            hit = self.charts[i].expand(self.bergman_column(j, l), prec)
            self._cache[key] = hit
        return hit.truncate(prec)

    def B_coefficient(self, i: int, j: int, m: int, l: int):
        """B^{ij}_{m,l}: coefficient of zeta_i^m zeta_j^l in B, diagonal pole removed for i = j."""
        return self.expand_column(j, l, i, m + 1).coeff(m)

    def B_at(self, i: int, j: int):
        """B(P_i, P_j) = B^{ij}_{0,0}."""
        return self.B_coefficient(i, j, 0, 0)

    def B_global(self, p) -> RationalFunction:
        """B(p, q) as a rational function of q for fixed numeric p, coefficient of dp dq."""
        p = as_scalar(p)
        return RationalFunction(Poly([1]), Poly([-p, 1]) ** 2)

    def y_primitive_at(self, i: int, prec: int) -> Laurent:
        """Local primitive y(zeta) of dy at P_i with y(0) = 0."""
        return self.charts[i].expand(self.dy, prec - 1).integrate()

    def describe(self) -> dict:
        return {
            "N": self.N,
            "branch_points": [c.describe() for c in self.charts],
            "poles": [p.describe() for p in self.poles],
            "mu": list(self.mu),
            "tower": self.tower.describe(),
        }


def _leading_root_list(poly: Poly, tower: Tower):
    if poly.degree <= 0:
        return tower, []
    return rational_roots_and_quadratics(poly, tower)


def analyze(x: RationalFunction, dy: RationalFunction, order: int = 12) -> SpectralCurve:
    """Analyse a genus-zero spectral curve.

    Finds the zeros of dx (which must be simple and finite), builds an Airy
    chart at each, and classifies the poles of x.  Raises DegeneracyError for a
    non-simple zero of dx and AdmissibilityError if dy is singular or vanishes
    at a zero of dx.
    """
    if x.num.degree <= 0 and x.den.degree <= 0:
        raise PreconditionError("x must be nonconstant")
    dx = x.deriv()
    if dx.is_zero():
        raise PreconditionError("x must be nonconstant")
    tower = QQ
    for c in list(x.num.c) + list(x.den.c) + list(dy.num.c) + list(dy.den.c):
        if not c.is_rational():
            tower = c.tower if c.tower.depth > tower.depth else tower
    tower, roots = _leading_root_list(dx.num, tower)
    for r, mult in roots:
        if mult > 1:
            raise DegeneracyError("zero of dx at z = %s has multiplicity %d" % (r, mult + 1))
    # poles of x
    poles = []
    d_inf = x.num.degree - x.den.degree
    if d_inf > 0:
        poles.append((None, d_inf))
    tower, den_roots = _leading_root_list(x.den, tower)
    for r, mult in den_roots:
        poles.append((r, mult))
    n_expected = -2 + len(poles) + sum(m for _, m in poles)
    if len(roots) != n_expected:
        raise PreconditionError("dx has %d finite zeros but %d in total; a zero at infinity is not supported"
                                % (len(roots), n_expected))
    charts = []
    for i, (a, _) in enumerate(roots):
        ch = BranchChart(i, a, x, tower)
        tower = ch.tower
        charts.append(ch)
    for ch in charts:
        ch.tower = tower
        v = dy.order_at(ch.a)
        if v < 0:
            raise AdmissibilityError("dy has a pole at the branch point z = %s" % ch.a)
        if v > 0:
            raise AdmissibilityError("dy vanishes at the branch point z = %s" % ch.a)
        ch.zeta_series(order + 2)
        ch.t_series(order + 1)
    pole_charts = [PoleChart(k, loc, mu, x) for k, (loc, mu) in enumerate(poles)]
    return SpectralCurve(x, dy, charts, pole_charts, tower, order)


def evaluate_at_branch(omega: Laurent, i: int | None = None):
    """zeta^0 coefficient of omega / d zeta, omega given in the Airy coordinate at P_i."""
    return omega.coeff(0)


def evaluate_differential(curve: SpectralCurve, f: RationalFunction, i: int):
    """omega(P_i) for omega = f(z) dz."""
    return evaluate_at_branch(curve.charts[i].expand(f, 1), i)


def bergman_expand(curve: SpectralCurve, i: int, j: int, order: int) -> dict:
    """Table {(k, l): B^{ij}_{k,l}} for k, l < order; the diagonal pole is removed when i = j."""
    out = {}
    for l in range(order):
        col = curve.expand_column(j, l, i, order)
        for k in range(order):
            out[(k, l)] = col.coeff(k)
    return out


def _pole_order_of_differential(f: RationalFunction, location) -> int:
    if location is None:
        return -_differential_order_at_infinity(f)
    return -f.order_at(location)


def dominance_check(curve: SpectralCurve) -> bool:
    """True iff at every pole of dy the pole order of dx is at least that of dy."""
    dy, dx = curve.dy, curve.dx
    tower = curve.tower
    points = [None]
    if dy.den.degree > 0:
        _, rs = rational_roots_and_quadratics(dy.den, tower)
        points.extend(r for r, _ in rs)
    for p in points:
        ody = _pole_order_of_differential(dy, p)
        if ody <= 0:
            continue
        if _pole_order_of_differential(dx, p) < ody:
            return False
    return True


@dataclass
class CompatibilityReport:
    compatible: bool
    witness: tuple | None = None
    omega: RationalFunction | None = None

    def __bool__(self):
        return self.compatible


def compatibility_form(curve: SpectralCurve) -> RationalFunction:
    """d(dy/dx) + sum_i Res_{p'=P_i} (dy/dx)(p') B(p, p'), as the coefficient of dp."""
    f = curve.dy / curve.dx
    out = f.deriv()
    for ch in curve.charts:
        ft = f.expand_at(ch.a, 1)
        r = ft.coeff(-1)
        # dy/dx has a simple pole at P_i; Res f(p') dp'/(p-p')^2 = r / (p - a)^2
        out = out + RationalFunction(Poly([r]), Poly([-ch.a, 1]) ** 2)
    return out


def compatibility_test(curve: SpectralCurve, depth: int | None = None) -> CompatibilityReport:
    """Check sigma_i^* omega = omega at every branch point to the tracked order."""
    depth = curve.order if depth is None else depth
    om = compatibility_form(curve)
    for ch in curve.charts:
        et = om.expand_at(ch.a, depth)
        sig = ch.sigma_series(depth + 1)
        pulled = et.compose(sig) * sig.deriv()
        diff = pulled - et
        for e, c in diff.items():
            return CompatibilityReport(False, (ch.index, e, c), om)
    return CompatibilityReport(True, None, om)


# curve input files

_SPEC_KEYS = ("x_num", "x_den", "dy_num", "dy_den")


def parse_curve_spec(text: str) -> dict:
    """Parse `key = integers` lines; blank lines and #-comments are ignored."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError("line %d: expected 'key = values'" % lineno)
        key, _, val = line.partition("=")
        key = key.strip()
        items = val.replace(",", " ").split()
        try:
            out[key] = [int(v) for v in items] if key in _SPEC_KEYS or key.endswith("_c") else items
        except ValueError:
            raise ValueError("line %d: field %s must be a list of integers" % (lineno, key)) from None
    for key in ("x_num", "dy_num"):
        if key not in out:
            raise ValueError("missing field %s" % key)
    for key in _SPEC_KEYS:
        if key in out and not out[key]:
            raise ValueError("field %s is empty" % key)
        if key in out and all(v == 0 for v in out[key]) and key.endswith("_den"):
            raise ValueError("field %s is the zero polynomial" % key)
    out.setdefault("x_den", [1])
    out.setdefault("dy_den", [1])
    return out


def curve_from_spec(spec: dict, order: int = 12) -> SpectralCurve:
    x = RationalFunction.from_ints(spec["x_num"], spec["x_den"])
    dy = RationalFunction.from_ints(spec["dy_num"], spec["dy_den"])
    return analyze(x, dy, order)
