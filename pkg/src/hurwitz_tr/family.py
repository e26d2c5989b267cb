"""First-order variation along one-parameter families of curves at fixed x.

A family gives x(z; c) and dy(z; c) with coefficients polynomial in c.  Points are
identified across fibres by keeping x fixed: a point z0 of the base fibre moves as
z(c) = z0 + (c - c0) zeta(z0) + ..., zeta = -x_c / x'.  On a differential f dz this
identification acts by the Lie derivative  delta f = f_c + (zeta f)'.

Branch-point data (position, critical value, Airy coordinate, Bergman coefficients)
are carried as exact dual numbers Jet1(value, derivative).
"""

from __future__ import annotations

from math import comb

from .curve import SpectralCurve, analyze, evaluate_differential
from .errors import InternalConsistencyError, PreconditionError
from .frobenius import (CheckReport, ContourFunctional, flat_metric, kernel_residue,
                        primary_differential, rhat, _sample_points)
from .linalg import FormalMatrixSeries, mat_identity, mat_zero
from .poly import Poly, RationalFunction
from .scalar import Scalar, Tower, as_scalar, sqrt_in_tower
from .series import Jet1, Laurent, series_solve

__all__ = [
    "CurveFamily", "cubic_family", "shift_family", "scaling_family", "parse_family_spec",
    "family_from_spec", "du_dc", "rauch_check", "vardy_check", "flatness_check",
    "rmatrix_ode_check", "lg_deformation_check", "shift_covariance_check",
    "scaling_covariance_check", "BranchJet",
]

ZERO = as_scalar(0)
ONE = as_scalar(1)


def _s(c) -> Scalar:
    return c if isinstance(c, Scalar) else as_scalar(c)


def _mul(a, b):
    # keep dual numbers on the left so that series are lifted, not scaled
    if isinstance(b, Jet1) and not isinstance(a, Jet1):
        return b * a
    return a * b


def _horner(coeffs: list, v):
    acc = None
    for c in reversed(coeffs):
        acc = c if acc is None else _mul(acc, v) + c
    return acc if acc is not None else ZERO


def _jc(v) -> Jet1:
    return v if isinstance(v, Jet1) else Jet1(_s(v), ZERO, "c")


def _jet_parts(jets: list) -> tuple:
    return Poly([_s(j.a) for j in jets]), Poly([_s(j.b) for j in jets])


class CurveFamily:
    """x(z; c) = sum_k x_num[k](c) z^k / sum_k x_den[k](c) z^k and likewise dy.

    Each coefficient is a list of c-coefficients in ascending degree.
    """

    def __init__(self, x_num, x_den, dy_num, dy_den, c0=1, name: str = "family", order: int = 12):
        conv = lambda rows: [[_s(v) for v in r] for r in rows]
        self.x_num, self.x_den = conv(x_num), conv(x_den)
        self.dy_num, self.dy_den = conv(dy_num), conv(dy_den)
        self.c0 = _s(c0)
        self.name = name
        self.order = order
        self._curve = None
        self._cache: dict = {}

    def _coeffs_at(self, rows, c) -> list:
        return [_horner(list(r), c) if r else ZERO for r in rows]

    def fiber(self, c) -> tuple:
        c = _s(c)
        x = RationalFunction(Poly(self._coeffs_at(self.x_num, c)), Poly(self._coeffs_at(self.x_den, c)))
        dy = RationalFunction(Poly(self._coeffs_at(self.dy_num, c)), Poly(self._coeffs_at(self.dy_den, c)))
        return x, dy

    @property
    def curve(self) -> SpectralCurve:
        if self._curve is None:
            x, dy = self.fiber(self.c0)
            self._curve = analyze(x, dy, self.order)
        return self._curve

    def _jets(self, rows) -> list:
        c = Jet1(self.c0, ONE, "c")
        out = []
        for r in rows:
            v = _horner(list(r), c)
            out.append(v if isinstance(v, Jet1) else Jet1(_s(v), ZERO, "c"))
        return out

    def _c_derivative(self, num_rows, den_rows) -> RationalFunction:
        n0, nc = _jet_parts(self._jets(num_rows))
        d0, dc = _jet_parts(self._jets(den_rows))
        return RationalFunction(nc * d0 - n0 * dc, d0 * d0)

    @property
    def x_c(self) -> RationalFunction:
        """d/dc x(z; c) at fixed z."""
        if "x_c" not in self._cache:
            self._cache["x_c"] = self._c_derivative(self.x_num, self.x_den)
        return self._cache["x_c"]

    @property
    def dy_c(self) -> RationalFunction:
        if "dy_c" not in self._cache:
            self._cache["dy_c"] = self._c_derivative(self.dy_num, self.dy_den)
        return self._cache["dy_c"]

    @property
    def flow(self) -> RationalFunction:
        """zeta = -x_c / x', the velocity of points at fixed x."""
        return -self.x_c / self.curve.dx

    def variation(self, f: RationalFunction, f_c: RationalFunction | None = None) -> RationalFunction:
        """Fixed-x derivative of f dz, given the fixed-z derivative f_c (zero if omitted)."""
        out = (self.flow * f).deriv()
        return out + f_c if f_c is not None else out

    def poles_fixed(self) -> bool:
        """True if the poles of x do not move to first order in c."""
        d0, dc = _jet_parts(self._jets(self.x_den))
        n0, nc = _jet_parts(self._jets(self.x_num))
        # the denominator may only rescale, and the order at infinity may not grow
        ok_den = dc.is_zero() or (dc.degree == d0.degree and dc * d0.lead() == d0 * dc.lead())
        return ok_den and nc.degree <= n0.degree

    def matched_point(self, z0, order: int = 3) -> Laurent:
        """w(s) with x(z0 + w(s); c0 + s) = x(z0; c0), solved as a series equation."""
        z0 = _s(z0)
        x0, _ = self.fiber(self.c0)
        X0 = _s(x0(z0))

        def F(w, s):
            cv = s + self.c0
            zv = w + z0
            num = _horner(self._coeffs_at(self.x_num, cv), zv)
            den = _horner(self._coeffs_at(self.x_den, cv), zv)
            return num - den * X0

        w = series_solve(F, 0, order)
        if _s(w.coeff(1)) != _s(self.flow(z0)):
            raise InternalConsistencyError("matched-point series disagrees with the flow field")
        return w


def cubic_family(c0=1, order: int = 12) -> CurveFamily:
    """x = z^3/3 - c z, dy = dz."""
    return CurveFamily([[0], [0, -3], [0], [1]], [[3]], [[1]], [[1]], c0, "cubic", order)


def _const_rows(p: Poly) -> list:
    return [[c] for c in p.c] or [[ZERO]]


def shift_family(x: RationalFunction, dy: RationalFunction, order: int = 12) -> CurveFamily:
    """x + c with c0 = 0."""
    num = _const_rows(x.num)
    den = _const_rows(x.den)
    for k, d in enumerate(x.den.c):
        while len(num) <= k:
            num.append([ZERO])
        num[k] = [num[k][0], d]
    return CurveFamily(num, den, _const_rows(dy.num), _const_rows(dy.den), 0, "shift", order)


def scaling_family(x: RationalFunction, dy: RationalFunction, order: int = 12) -> CurveFamily:
    """lambda * x with lambda0 = 1; dy held fixed in z."""
    num = [[ZERO, c] for c in x.num.c]
    return CurveFamily(num, _const_rows(x.den), _const_rows(dy.num), _const_rows(dy.den), 1, "scaling", order)


def parse_family_spec(text: str) -> dict:
    """`key = p0 ; p1 ; ...` lines: one c-polynomial (ascending integers) per power of z."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError("line %d: expected 'key = values'" % lineno)
        key, _, val = line.partition("=")
        key = key.strip()
        try:
            if key == "c0":
                out[key] = int(val.strip())
            elif key in ("x_num", "x_den", "dy_num", "dy_den"):
                rows = [[int(v) for v in part.replace(",", " ").split()] for part in val.split(";")]
                if any(not r for r in rows):
                    raise ValueError
                out[key] = rows
            else:
                out[key] = val.strip()
        except ValueError:
            raise ValueError("line %d: field %s must be ';'-separated integer lists" % (lineno, key)) from None
    for key in ("x_num", "dy_num"):
        if key not in out:
            raise ValueError("missing field %s" % key)
    out.setdefault("x_den", [[1]])
    out.setdefault("dy_den", [[1]])
    out.setdefault("c0", 0)
    return out


def family_from_spec(spec: dict, order: int = 12) -> CurveFamily:
    return CurveFamily(spec["x_num"], spec["x_den"], spec["dy_num"], spec["dy_den"], spec["c0"],
                       spec.get("name", "family"), order)


# branch-point jets

class BranchJet:
    """Moving branch point a(c), critical value u(c), x''(a(c)) and the Airy chart, as jets."""

    def __init__(self, family: CurveFamily, i: int, prec: int):
        self.family = family
        self.i = i
        ch = family.curve.charts[i]
        self.prec = prec
        nj, dj = family._jets(family.x_num), family._jets(family.x_den)
        X = self._expand(nj, dj, Jet1(ch.a, ZERO, "c"), 3)
        t1, t2 = _jc(X.coeff(1)), _jc(X.coeff(2))
        a1 = -_s(t1.b) / (_s(t2.a) * 2)
        self.a = Jet1(ch.a, a1, "c")
        X = self._expand(nj, dj, self.a, prec + 3)
        if X.coeff(1) != 0:
            raise InternalConsistencyError("branch-point jet is not critical")
        self.X = X
        self.u = _jc(X.coeff(0))
        self.x2 = _jc(X.coeff(2)) * 2
        s0 = ch.branch_sign
        self.s = Jet1(s0, _s(self.x2.b) / (s0 * 2), "c")
        if _s(self.x2.a) != ch.x2 or _s(self.u.a) != ch.u:
            raise InternalConsistencyError("branch jet does not match the base chart")
        self._t = None

    @staticmethod
    def _taylor(coeffs: list, a, n: int) -> list:
        out = []
        for m in range(n):
            acc = Jet1(ZERO, ZERO, "c")
            for k in range(m, len(coeffs)):
                acc = acc + coeffs[k] * (a ** (k - m)) * comb(k, m)
            out.append(acc)
        return out

    def _expand(self, nj, dj, a, prec: int) -> Laurent:
        N = Laurent(0, self._taylor(nj, a, prec), prec)
        D = Laurent(0, self._taylor(dj, a, prec), prec)
        return N * D.inverse()

    def t_series(self) -> Laurent:
        """t(zeta) with x(a + t) = u + zeta^2/2, jets in c."""
        if self._t is None:
            P = self.prec
            unit = (self.X - self.u).shift(-2).scale(1 / _jc(self.X.coeff(2)))
            phi = unit.sqrt(lead_root=ONE)
            sinv = 1 / self.s
            t = Laurent.monomial(sinv, 1, P)
            for _ in range(P + 1):
                t = phi.compose(t).inverse().scale(sinv).shift(1).truncate(P)
            self._t = t
        return self._t


def _branch_jets(family: CurveFamily, prec: int) -> list:
    key = ("bjets", prec)
    if key not in family._cache:
        family._cache[key] = [BranchJet(family, i, prec) for i in range(family.curve.N)]
    return family._cache[key]


def du_dc(family: CurveFamily) -> list:
    """du_i/dc at c0, from the jet of the critical value."""
    return [_s(bj.u.b) for bj in _branch_jets(family, 4)]


def _jet_B_coefficients(family: CurveFamily, K: int) -> dict:
    """{(j, i, m): Jet1} for B^{ji}_{2m,0}, m < K, at the moving branch points."""
    P = 2 * K + 2
    bjs = _branch_jets(family, P)
    out = {}
    for i, bi in enumerate(bjs):
        sinv = 1 / bi.s
        for j, bj in enumerate(bjs):
            t = bj.t_series()
            dt = t.deriv()
            if i == j:
                F = Laurent.monomial(sinv, -2, P)
            else:
                d = bj.a - bi.a
                L = Laurent(0, [d, Jet1(ONE, ZERO, "c")], P)
                F = (L * L).inverse().scale(sinv)
            e = F.compose(t) * dt
            if i == j and (e.coeff(-2) != 1 or e.coeff(-1) != 0):
                raise InternalConsistencyError("diagonal jet expansion has the wrong pole")
            for m in range(K):
                out[(j, i, m)] = _jc(e.coeff(2 * m))
    return out


def _dfact(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def rhat_jet(family: CurveFamily, K: int) -> tuple:
    """(R, dR/dc) as matrix series to order K."""
    curve = family.curve
    N = curve.N
    Bj = _jet_B_coefficients(family, K)
    A0 = [mat_identity(N)]
    A1 = [mat_zero(N)]
    for k in range(1, K + 1):
        m = k - 1
        M0, M1 = mat_zero(N), mat_zero(N)
        for i in range(N):
            for j in range(N):
                v = Bj[(j, i, m)]
                if _s(v.a) != _s(curve.B_coefficient(j, i, 2 * m, 0)):
                    raise InternalConsistencyError("jet Bergman coefficient differs from the base curve")
                M0[i][j] = -_s(v.a) * _dfact(2 * m - 1)
                M1[i][j] = -_s(v.b) * _dfact(2 * m - 1)
        A0.append(M0)
        A1.append(M1)
    R = FormalMatrixSeries(A0).inverse()
    dR = (R * FormalMatrixSeries(A1) * R).scale(-1)
    return R, dR


# checks

def _point_jet(family: CurveFamily, z0) -> Jet1:
    return Jet1(_s(z0), _s(family.flow(_s(z0))), "c")


def rauch_check(family: CurveFamily, p1, p2) -> CheckReport:
    """d/dc B(p1, p2) at fixed x = sum_i du_i/dc Res_{P_i} B(p, p1) B(p, p2)/dx."""
    curve = family.curve
    p1, p2 = _s(p1), _s(p2)
    fl = family.flow
    dfl = fl.deriv()
    z1, z2 = _point_jet(family, p1), _point_jet(family, p2)
    lhs_jet = ((z1 - z2) ** -2) * Jet1(ONE, _s(dfl(p1)), "c") * Jet1(ONE, _s(dfl(p2)), "c")
    lhs = _s(lhs_jet.b)
    du = du_dc(family)
    rhs = ZERO
    for i, ch in enumerate(curve.charts):
        f1 = RationalFunction(Poly([1]), Poly([-p1, 1]) ** 2)
        f2 = RationalFunction(Poly([1]), Poly([-p2, 1]) ** 2)
        r = _s((ch.expand(f1, 2) * ch.expand(f2, 2)).coeff(0))
        rhs = rhs + du[i] * r
    return CheckReport("rauch", lhs == rhs, {"p1": p1, "p2": p2, "lhs": lhs, "rhs": rhs})


def vardy_check(family: CurveFamily, p=None, contour: ContourFunctional | None = None) -> CheckReport:
    """Fixed-x derivative of dy equals sum_i du_i/dc dy(P_i) B(., P_i).

    With a contour, dy is replaced by its primary differential on every fibre.
    """
    curve = family.curve
    if contour is None:
        dy, dy_c = curve.dy, family.dy_c
    else:
        dy, dy_c = primary_differential(curve, contour), phi_c(family, contour)
    lhs = family.variation(dy, dy_c)
    du = du_dc(family)
    rhs = RationalFunction(Poly())
    for i in range(curve.N):
        rhs = rhs + curve.dxi(i, 0) * (du[i] * _s(evaluate_differential(curve, dy, i)))
    pts = [_s(p)] if p is not None else _sample_points(curve, 2)
    vals = [(q, _s(lhs(q)), _s(rhs(q))) for q in pts]
    ok = lhs == rhs and all(a == b for _, a, b in vals)
    return CheckReport("vardy", ok, {"points": vals,
                                     "dy": "family" if contour is None else contour.label})


def phi_c(family: CurveFamily, C: ContourFunctional) -> RationalFunction:
    """d/dc of phi_C(z; c) at fixed z, for the contour C held constant along the family."""
    if not family.poles_fixed():
        raise PreconditionError("the poles of x move with c; contour derivatives need fixed poles")
    curve = family.curve
    pc = curve.poles[C.pole]
    if C.kind == "type3":
        return RationalFunction(Poly())
    xc = family.x_c
    if C.kind == "type2":
        return kernel_residue(pc, pc.function(xc, 1), pc.mu)
    # the contour held fixed is Res (x / c0)^(k/mu) B, normalised at the base fibre only;
    # its weight has derivative (k/mu) xi^k x_c / x
    P = C.k + pc.mu + 4
    ratio = pc.function(xc, P) * pc.function(curve.x, P).inverse()
    ws = (pc.xi_series(P) ** C.k) * ratio.scale(as_scalar(C.k) / pc.mu)
    return kernel_residue(pc, ws, C.k, C.scale)


def _value_jet(family: CurveFamily, f: RationalFunction, fc: RationalFunction, bj: BranchJet) -> Jet1:
    a0 = _s(bj.a.a)
    return Jet1(_s(f(a0)), _s(fc(a0)) + _s(f.deriv()(a0)) * _s(bj.a.b), "c")


def flatness_check(family: CurveFamily, C: ContourFunctional, C2: ContourFunctional) -> CheckReport:
    """d/dc <phi_C, phi_C'> = 0, with <a, b> = sum_i a(P_i) b(P_i) = sum_i f_a f_b / x'' at a_i."""
    curve = family.curve
    bjs = _branch_jets(family, 4)
    f1, f2 = primary_differential(curve, C), primary_differential(curve, C2)
    g1, g2 = phi_c(family, C), phi_c(family, C2)
    tot = Jet1(ZERO, ZERO, "c")
    for bj in bjs:
        tot = tot + _value_jet(family, f1, g1, bj) * _value_jet(family, f2, g2, bj) / bj.x2
    fp = flat_metric(curve)
    ia, ib = fp.contours.index(C), fp.contours.index(C2)
    if _s(tot.a) != fp.G[ia][ib]:
        raise InternalConsistencyError("jet metric differs from the base metric")
    d = _s(tot.b)
    return CheckReport("flatness", d.is_zero(), {"pair": (C.label, C2.label), "value": _s(tot.a),
                                                 "derivative": d})


def rmatrix_ode_check(family: CurveFamily, K: int) -> CheckReport:
    """dR/dc = [R, U'] / z - R [Gamma, U'] through z^(K-1)."""
    curve = family.curve
    N = curve.N
    R, dR = rhat_jet(family, K)
    du = du_dc(family)
    gam = [[ZERO if i == j else _s(curve.B_at(i, j)) for j in range(N)] for i in range(N)]
    comm = [[gam[i][j] * (du[j] - du[i]) for j in range(N)] for i in range(N)]
    bad = None
    for k in range(K):
        for i in range(N):
            for j in range(N):
                rhs = R[k + 1][i][j] * (du[j] - du[i])
                for l in range(N):
                    rhs = rhs - R[k][i][l] * comm[l][j]
                if rhs != dR[k][i][j] and bad is None:
                    bad = {"order": k, "i": i, "j": j, "lhs": dR[k][i][j], "rhs": rhs}
    return CheckReport("rmatrix_ode", bad is None, {"K": K, "first_mismatch": bad, "dR": dR})


def lg_deformation_check(family: CurveFamily, points=None,
                         contour: ContourFunctional | None = None) -> CheckReport:
    """Fixed-x derivative of -y dx equals sum_alpha (dt_alpha/dc) phi_alpha.

    y is defined up to a constant, so the identity is checked after d/dz:
    delta(dy) + d(sum_alpha dt_alpha phi_alpha / dx) = 0, and pointwise on d/dz of both sides.
    With a contour, dy is its primary differential on every fibre.
    """
    curve = family.curve
    fp = flat_metric(curve)
    if contour is None:
        ddy = family.variation(curve.dy, family.dy_c)
    else:
        ddy = family.variation(primary_differential(curve, contour), phi_c(family, contour))
    dts = []
    for C in fp.contours:
        v, amb = C.apply(curve, ddy)
        if amb:
            raise PreconditionError("flat-coordinate derivative along %s is log-ambiguous" % C.label)
        dts.append(v)
    comb_ = RationalFunction(Poly())
    for a, phi in enumerate(fp.dual_phi):
        if not dts[a].is_zero():
            comb_ = comb_ + phi * dts[a]
    rhs = (comb_ / curve.dx).deriv()
    total = ddy + rhs
    pts = [_s(p) for p in points] if points is not None else _sample_points(curve, 2)
    vals = [(q, _s(ddy(q)), -_s(rhs(q))) for q in pts]
    ok = total.is_zero() and all(a == b for _, a, b in vals)
    return CheckReport("lg_deformation", ok, {"dt": dts, "points": vals,
                                              "dy": "family" if contour is None else contour.label})


# exact covariance under shifts and scalings

def embed_scalar(value: Scalar, target: Tower, _gens: dict | None = None) -> Scalar:
    """Rewrite value in another tower that contains its generators.

    Every generator of value's tower is the principal square root of its radicand; its image
    is the exact root in the target whose numerical value agrees.  Only the sign choice uses
    floating point.
    """
    value = _s(value)
    src = value.tower
    gens = _gens if _gens is not None else {}
    key = id(src)
    if key not in gens:
        images = []
        for rad in src.levels():
            r = _embed_with(rad, images, target)
            g = sqrt_in_tower(r, target)
            if g is None:
                raise PreconditionError("target tower does not contain sqrt(%s)" % r)
            want = complex(_s(rad).numeric()) ** 0.5
            if abs(g.numeric() - want) > abs(g.numeric() + want):
                g = -g
            images.append(g)
        gens[key] = images
    return _embed_with(value, gens[key], target)


def _embed_with(value: Scalar, images: list, target: Tower) -> Scalar:
    out = Scalar.zero(target)
    for m, q in value.c.items():
        term = Scalar.rational(q, target)
        j = 0
        while m:
            if m & 1:
                term = term * images[j]
            m >>= 1
            j += 1
        out = out + term
    return out


def _frob_summary(curve: SpectralCurve, K: int) -> dict:
    fp = flat_metric(curve)
    R = rhat(curve, K)
    return {"u": fp.u, "eta": fp.eta_canonical, "psi": fp.psi, "gamma": fp.gamma, "R": R}


def shift_covariance_check(x: RationalFunction, dy: RationalFunction, c=1, K: int = 4) -> CheckReport:
    """x -> x + c leaves R, Gamma, eta_i and Psi unchanged and shifts every u_i by c.

    Also runs the jet version: along the shift family dR/dc = 0 with U' = Id.
    """
    c = _s(c)
    base = _frob_summary(analyze(x, dy), K)
    shifted = _frob_summary(analyze(x + c, dy), K)
    ok_u = all(b + c == s for b, s in zip(base["u"], shifted["u"]))
    same = {k: base[k] == shifted[k] for k in ("eta", "psi", "gamma", "R")}
    fam = shift_family(x, dy)
    R, dR = rhat_jet(fam, K)
    zero = all(v.is_zero() for M in dR.coeffs for row in M for v in row)
    ode = rmatrix_ode_check(fam, K).passed
    ok = ok_u and all(same.values()) and zero and ode and all(d == ONE for d in du_dc(fam))
    return CheckReport("shift_covariance", ok, {"u_shift": ok_u, "unchanged": same, "dR_zero": zero,
                                                "ode": ode})


def scaling_covariance_check(x: RationalFunction, dy: RationalFunction, lam=4, K: int = 4) -> CheckReport:
    """x -> lam x: u_i -> lam u_i, R_k -> lam^-k R_k, eta_i -> eta_i / lam (dy fixed in z).

    lam must be a rational square so that the branch signs carry over (sqrt(lam) > 0).
    Also checks the jet form along lam = 1 + eps: dR_k = -k R_k and the R-matrix ODE.
    """
    lam = _s(lam)
    root = sqrt_in_tower(lam)
    if root is None or not lam.is_rational() or lam.to_rational() <= 0:
        raise PreconditionError("scaling factor must be a positive rational square")
    base_c = analyze(x, dy)
    sc_c = analyze(x * lam, dy)
    if [c.a for c in base_c.charts] != [c.a for c in sc_c.charts]:
        raise InternalConsistencyError("scaling reordered the branch points")
    base, sc = _frob_summary(base_c, K), _frob_summary(sc_c, K)
    gens: dict = {}
    emb = lambda v: embed_scalar(v, base_c.tower, gens)
    root = abs(root.to_rational())
    ok_sign = all(emb(b.branch_sign) == a.branch_sign * root for a, b in zip(base_c.charts, sc_c.charts))
    ok_u = all(b * lam == emb(s) for b, s in zip(base["u"], sc["u"]))
    ok_R = all(emb(sc["R"][k][i][j]) == base["R"][k][i][j] / lam ** k
               for k in range(K + 1) for i in range(base_c.N) for j in range(base_c.N))
    ok_eta = all(emb(s) * lam == b for b, s in zip(base["eta"], sc["eta"]))
    fam = scaling_family(x, dy)
    R, dR = rhat_jet(fam, K)
    ok_euler = all(dR[k][i][j] == R[k][i][j] * (-k)
                   for k in range(K + 1) for i in range(base_c.N) for j in range(base_c.N))
    ode = rmatrix_ode_check(fam, K).passed
    ok = ok_sign and ok_u and ok_R and ok_eta and ok_euler and ode
    return CheckReport("scaling_covariance", ok, {"branch_sign": ok_sign, "u": ok_u, "R": ok_R, "eta_over_lambda": ok_eta,
                                                 "euler": ok_euler, "ode": ode})
