"""Frobenius data of the curve: contours, primary differentials, metric, Psi and R-hat.

Contours act on rational differentials f(z) dz.  The three genus-zero kinds are

    type1(i, k):  nu_i * Res_{inf_i} xi^k f,   xi = (x / c_i)^(1/mu_i),  k = 1..mu_i - 1
    type2(i):     Res_{inf_i} x f,                                      i != ref
    type3(i):     v.p. integral of f from inf_ref to inf_i,             i != ref

where inf_ref is the reference pole (index 0 unless chosen otherwise) and
nu_i = -1/(mu_i - 1) by default.  Applying a contour to B(p, .) gives the
primary differential phi_C(p); everything downstream is evaluated from phi_C.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .curve import PoleChart, SpectralCurve, evaluate_differential
from .errors import (AdmissibilityError, InternalConsistencyError, NonSemisimpleError,
                     PreconditionError)
from .linalg import (FormalMatrixSeries, mat_identity, mat_inverse, mat_mul, mat_transpose,
                     mat_zero)
from .poly import Poly, RationalFunction
from .scalar import Scalar, as_scalar
from .series import Laurent

__all__ = [
    "ContourFunctional", "DualContour", "FrobeniusPoint", "VPIntegral", "CheckReport",
    "contours", "canonical_data", "primary_differential", "flat_metric", "flat_coordinates",
    "three_point", "three_point_table", "dy_decomposition", "rhat", "rhat_inverse",
    "symplectic_check", "factorization_check", "vp_integral", "solve_linear", "metric_by_residues", "kernel_residue",
]

ZERO = as_scalar(0)
ONE = as_scalar(1)

TYPE1_NORMALIZATIONS = ("oriented", "literal")


def _s(c) -> Scalar:
    return as_scalar(c) if not isinstance(c, Scalar) else c


@dataclass
class CheckReport:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed


# regularised path integrals

@dataclass
class VPIntegral:
    value: Scalar
    ambiguous: bool
    dropped: list
    log_dropped: bool = False


def _poly_eval(p: Poly, v) -> Scalar:
    return _s(p(v)) if p.c else ZERO


def _poles_of(curve: SpectralCurve) -> list:
    """Candidate finite poles for the rational forms built on the curve."""
    pts = [ch.a for ch in curve.charts]
    pts += [pc.location for pc in curve.poles if pc.location is not None]
    return pts


def _partial_fractions(f: RationalFunction, points: list):
    """f = q(z) + sum_c sum_j a_{c,j} (z - c)^(-j); returns (q, {index: {j: a}})."""
    rest = f
    parts = {}
    for n, c in enumerate(points):
        pp = f.expand_at(c, 0).principal_part() if f.order_at(c) < 0 else {}
        if not pp:
            continue
        parts[n] = {-e: _s(a) for e, a in pp.items()}
        lin = Poly([-c, 1])
        for j, a in parts[n].items():
            rest = rest - RationalFunction(Poly([a]), lin ** j)
    if rest.den.degree > 0:
        raise PreconditionError("rational form has poles outside the branch points and poles of x")
    q = rest.num * rest.den.lead().inverse()
    return q, parts


def _endpoint_finite_part(curve: SpectralCurve, q_int: Poly, parts: dict, points: list,
                          pole: PoleChart):
    """Finite part of the global primitive at a pole of x, with dropped log constants."""
    dropped = []
    ambiguous = False
    lead = _s(pole.lead)
    if pole.location is None:
        total_log = ZERO
        for n, pp in parts.items():
            total_log = total_log + pp.get(1, ZERO)
        # log(z - c) = -log w + O(w); log w = (log lead - log x)/mu + O(w)
        if not total_log.is_zero():
            dropped.append({"at": "infinity", "coefficient": total_log, "log_of": lead,
                            "factor": as_scalar(-1) / pole.mu, "term": "log x"})
            ambiguous = lead != ONE
        return ZERO, ambiguous, dropped
    b = pole.location
    val = _poly_eval(q_int, b)
    for n, pp in parts.items():
        c = points[n]
        for j, a in pp.items():
            if c == b:
                if j == 1 and not a.is_zero():
                    dropped.append({"at": b, "coefficient": a, "log_of": lead,
                                    "factor": as_scalar(1) / pole.mu, "term": "log x"})
                    ambiguous = ambiguous or lead != ONE
                continue
            if j == 1:
                if not a.is_zero() and _s(b - c) != ONE:
                    dropped.append({"at": b, "coefficient": a, "log_of": _s(b - c), "factor": ONE,
                                    "term": "constant"})
                    ambiguous = True
            else:
                val = val + a * _s(b - c) ** (1 - j) / (1 - j)
    return val, ambiguous, dropped


def _poly_integral(q: Poly) -> Poly:
    return Poly([ZERO] + [_s(c) / (k + 1) for k, c in enumerate(q.c)])


def vp_integral(curve: SpectralCurve, f: RationalFunction, start: int, end: int) -> VPIntegral:
    """Regularised integral of f(z) dz from pole `start` to pole `end` of x.

    The primitive is built from partial fractions; at each endpoint terms unbounded
    in x (negative powers of the uniformiser and log x) are discarded, and
    log_dropped records that this happened.  Constants log(c) with c != 1 left
    behind by logarithmic terms are not representable exactly; they are dropped
    and the result is flagged ambiguous.
    """
    if f.is_zero() or start == end:
        return VPIntegral(ZERO, False, [])
    points = _poles_of(curve)
    q, parts = _partial_fractions(f, points)
    qi = _poly_integral(q)
    v1, a1, d1 = _endpoint_finite_part(curve, qi, parts, points, curve.poles[end])
    v0, a0, d0 = _endpoint_finite_part(curve, qi, parts, points, curve.poles[start])
    logs = any(d["term"] == "log x" for d in d0 + d1)
    return VPIntegral(v1 - v0, a0 or a1, d0 + d1, logs)


# contours

@dataclass(frozen=True)
class ContourFunctional:
    """One generalised contour: kind in {type1, type2, type3}, a pole index and k for type1."""

    kind: str
    pole: int
    k: int = 0
    reference: int = 0
    scale: Scalar = ONE

    @property
    def label(self) -> str:
        if self.kind == "type1":
            return "type1(%d,%d)" % (self.pole + 1, self.k)
        return "%s(%d)" % (self.kind, self.pole + 1)

    def _residue(self, curve: SpectralCurve, f: RationalFunction, weight) -> Scalar:
        pc = curve.poles[self.pole]
        g = f if weight is None else f * weight
        if g.is_zero():
            return ZERO
        v = pc.order_of(g) - (2 if pc.at_infinity else 0)
        if self.kind == "type1":
            fw = pc.differential(g, self.k + 1)
            ws = pc.xi_series(max(-v + self.k, 1) + 1) ** self.k
        else:
            fw = pc.differential(g, pc.mu + 1)
            ws = pc.function(curve.x, max(-v, 1) + 1)
        return _s((ws * fw).residue()) * self.scale

    def apply(self, curve: SpectralCurve, f: RationalFunction, weight: RationalFunction | None = None):
        """C[weight * f dz]; returns (value, ambiguous)."""
        if self.kind in ("type1", "type2"):
            return self._residue(curve, f, weight), False
        g = f if weight is None else f * weight
        r = vp_integral(curve, g, self.reference, self.pole)
        return r.value, r.ambiguous

    def value(self, curve: SpectralCurve, f: RationalFunction, weight=None) -> Scalar:
        v, amb = self.apply(curve, f, weight)
        if amb:
            raise PreconditionError("%s pairing is log-ambiguous" % self.label)
        return v

    def phi(self, curve: SpectralCurve) -> RationalFunction:
        """phi_C(p) = C[B(p, .)], as the coefficient of dp."""
        pc = curve.poles[self.pole]
        if self.kind == "type3":
            out = RationalFunction(Poly())
            for idx, sgn in ((self.pole, 1), (self.reference, -1)):
                loc = curve.poles[idx].location
                if loc is not None:
                    out = out + RationalFunction(Poly([as_scalar(sgn)]), Poly([-loc, 1]))
            return out
        if self.kind == "type1":
            ws = pc.xi_series(self.k + 2) ** self.k
            top = self.k
        else:
            ws = pc.function(curve.x, 1)
            top = pc.mu
        return kernel_residue(pc, ws, top, self.scale)


def kernel_residue(pc: PoleChart, ws: Laurent, top: int, scale=ONE) -> RationalFunction:
    """scale * Res_{q = pole} g(q) B(p, q) for a weight series g in the pole's uniformiser.

    Only coefficients of w^-1 .. w^-top contribute; the result is the coefficient of dp.
    """
    out = RationalFunction(Poly())
    for n in range(top):
        gcoef = _s(ws.coeff(-n - 1))
        if gcoef.is_zero():
            continue
        c = gcoef * (n + 1) * scale
        if pc.location is None:
            # Res dq/(p-q)^2 against q^(n+1) at infinity contributes -(n+1) p^n
            out = out - RationalFunction(Poly([ZERO] * n + [c]))
        else:
            out = out + RationalFunction(Poly([c]), Poly([-pc.location, 1]) ** (n + 2))
    return out


@dataclass(frozen=True)
class DualContour:
    """A Scalar-linear combination of basic contours, e.g. C*_alpha = eta_{alpha beta} C_beta."""

    terms: tuple
    label: str = ""

    def apply(self, curve, f, weight=None):
        tot, amb = ZERO, False
        for C, c in self.terms:
            if _s(c).is_zero():
                continue
            v, a = C.apply(curve, f, weight)
            tot = tot + v * c
            amb = amb or a
        return tot, amb

    def value(self, curve, f, weight=None) -> Scalar:
        v, amb = self.apply(curve, f, weight)
        if amb:
            raise PreconditionError("%s pairing is log-ambiguous" % self.label)
        return v

    def phi(self, curve) -> RationalFunction:
        out = RationalFunction(Poly())
        for C, c in self.terms:
            if not _s(c).is_zero():
                out = out + primary_differential(curve, C) * c
        return out


def _type1_scale(mu: int, normalization: str) -> Scalar:
    if normalization not in TYPE1_NORMALIZATIONS:
        raise PreconditionError("unknown type-1 normalisation %r" % normalization)
    s = as_scalar(1) / (mu - 1)
    return -s if normalization == "oriented" else s


def contours(curve: SpectralCurve, reference: int | None = None,
             type1_normalization: str | None = None) -> list:
    """The generalised contours of a genus-zero curve; their number equals N."""
    ref = curve.options.get("reference_pole", 0) if reference is None else reference
    norm = curve.options.get("type1_normalization", "oriented") if type1_normalization is None \
        else type1_normalization
    if not 0 <= ref < len(curve.poles):
        raise PreconditionError("reference pole %d out of range" % ref)
    out = []
    for pc in curve.poles:
        for k in range(1, pc.mu):
            out.append(ContourFunctional("type1", pc.index, k, ref, _type1_scale(pc.mu, norm)))
    for kind in ("type2", "type3"):
        for pc in curve.poles:
            if pc.index != ref:
                out.append(ContourFunctional(kind, pc.index, 0, ref))
    if len(out) != curve.N:
        raise InternalConsistencyError("%d contours for N = %d" % (len(out), curve.N))
    return out


def _pole_order_dz(f: RationalFunction, pc: PoleChart) -> int:
    if pc.location is None:
        return -(f.order_at_infinity() - 2)
    return -f.order_at(pc.location)


def primary_differential(curve: SpectralCurve, C) -> RationalFunction:
    """phi_C = C[B(p, .)]; checks that its poles are dominated by those of dx."""
    key = ("phi", C)
    hit = curve._cache.get(key)
    if hit is not None:
        return hit
    phi = C.phi(curve)
    if isinstance(C, ContourFunctional) and not phi.is_zero():
        for pc in curve.poles:
            if _pole_order_dz(phi, pc) > _pole_order_dz(curve.dx, pc):
                raise InternalConsistencyError("phi of %s not dominated by dx at pole %d"
                                               % (C.label, pc.index))
        for ch in curve.charts:
            if phi.order_at(ch.a) < 0:
                raise InternalConsistencyError("phi of %s singular at a branch point" % C.label)
    curve._cache[key] = phi
    return phi


# linear algebra helpers

def solve_linear(rows: list, rhs: list):
    """Exact solution of a possibly overdetermined consistent system, or None."""
    m = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for col in range(m):
        piv = next((i for i in range(r, len(aug)) if not _s(aug[i][col]).is_zero()), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = _s(aug[r][col]).inverse()
        aug[r] = [_s(x) * inv for x in aug[r]]
        for i in range(len(aug)):
            if i != r and not _s(aug[i][col]).is_zero():
                f = _s(aug[i][col])
                aug[i] = [_s(x) - f * _s(y) for x, y in zip(aug[i], aug[r])]
        piv_cols.append(col)
        r += 1
    for i in range(r, len(aug)):
        if not _s(aug[i][m]).is_zero():
            return None
    sol = [ZERO] * m
    for i, col in enumerate(piv_cols):
        sol[col] = _s(aug[i][m])
    return sol


def _sample_points(curve: SpectralCurve, count: int) -> list:
    bad = _poles_of(curve)
    out, v = [], 2
    while len(out) < count:
        for cand in (v, -v):
            s = as_scalar(cand)
            if all(s != b for b in bad):
                out.append(s)
        v += 1
    return out[:count]


def dy_decomposition(curve: SpectralCurve) -> tuple:
    """(c, lam) with dy = sum_beta c_beta phi^{C_beta} + lam dx exactly.

    Raises AdmissibilityError if dy is outside that span.
    """
    def build():
        Cs = contours(curve)
        phis = [primary_differential(curve, C) for C in Cs] + [curve.dx]
        pts = _sample_points(curve, len(phis) + 4)
        rows = [[_s(p(z)) for p in phis] for z in pts]
        rhs = [_s(curve.dy(z)) for z in pts]
        sol = solve_linear(rows, rhs)
        if sol is not None:
            recon = RationalFunction(Poly())
            for p, c in zip(phis, sol):
                if not c.is_zero():
                    recon = recon + p * c
            if recon == curve.dy:
                return tuple(sol[:-1]), sol[-1]
        raise AdmissibilityError("dy is not a linear combination of primary differentials and dx")
    return curve.cached(("dydecomp",), build)


# Frobenius point

@dataclass
class FrobeniusPoint:
    u: list
    eta_canonical: list
    gamma: list
    contours: list = field(default_factory=list)
    phi: list = field(default_factory=list)
    G: list | None = None
    eta_flat: list | None = None
    psi: list | None = None
    dual_contours: list = field(default_factory=list)
    dual_phi: list = field(default_factory=list)
    unit: tuple | None = None
    conventions: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.u)


def _conventions(curve: SpectralCurve) -> dict:
    return {
        "branch_signs": [ch.branch_sign for ch in curve.charts],
        "reference_pole": curve.options.get("reference_pole", 0),
        "type1_normalization": curve.options.get("type1_normalization", "oriented"),
    }


def canonical_data(curve: SpectralCurve) -> FrobeniusPoint:
    """u_i = x(P_i), eta_i = dy(P_i)^2 and the off-diagonal rotation coefficients B(P_i, P_j)."""
    u = curve.u
    for i in range(len(u)):
        for j in range(i):
            if u[i] == u[j]:
                raise NonSemisimpleError("u_%d = u_%d" % (j + 1, i + 1))
    eta = [evaluate_differential(curve, curve.dy, i) ** 2 for i in range(curve.N)]
    N = curve.N
    gamma = [[None if i == j else _s(curve.B_at(i, j)) for j in range(N)] for i in range(N)]
    return FrobeniusPoint(u=list(u), eta_canonical=eta, gamma=gamma, conventions=_conventions(curve))


def flat_metric(curve: SpectralCurve) -> FrobeniusPoint:
    """Complete Frobenius point: G, eta_flat = G^{-1}, dual contours, Psi."""
    def build():
        fp = canonical_data(curve)
        Cs = contours(curve)
        phis = [primary_differential(curve, C) for C in Cs]
        N = curve.N
        vals = [[_s(evaluate_differential(curve, p, i)) for i in range(N)] for p in phis]
        G = [[sum((vals[a][i] * vals[b][i] for i in range(N)), ZERO) for b in range(N)]
             for a in range(N)]
        try:
            eta = mat_inverse(G)
        except PreconditionError:
            raise AdmissibilityError("the pairing of primary differentials is degenerate") from None
        duals = [DualContour(tuple((Cs[b], eta[a][b]) for b in range(N)), "dual " + Cs[a].label)
                 for a in range(N)]
        dphis = []
        for a in range(N):
            acc = RationalFunction(Poly())
            for b in range(N):
                if not eta[a][b].is_zero():
                    acc = acc + phis[b] * eta[a][b]
            dphis.append(acc)
        psi = [[sum((eta[a][b] * vals[b][i] for b in range(N)), ZERO) for a in range(N)]
               for i in range(N)]
        if mat_mul(mat_transpose(psi), psi) != eta:
            raise InternalConsistencyError("Psi^T Psi differs from the flat metric")
        fp.contours, fp.phi, fp.G, fp.eta_flat = Cs, phis, G, eta
        fp.psi, fp.dual_contours, fp.dual_phi = psi, duals, dphis
        try:
            fp.unit = dy_decomposition(curve)
        except AdmissibilityError:
            fp.unit = None
        return fp
    return curve.cached(("flat",), build)


def metric_by_residues(curve: SpectralCurve, phis: list) -> list:
    """<phi_a, phi_b> = sum_i Res_{P_i} phi_a phi_b / dx, from chart expansions."""
    N = curve.N
    ex = [[curve.charts[i].expand(p, 2) for i in range(N)] for p in phis]
    out = []
    for a in range(len(phis)):
        row = []
        for b in range(len(phis)):
            acc = ZERO
            for i in range(N):
                # dx = zeta d zeta, so the residue is the zeta^0 coefficient of the product
                acc = acc + _s((ex[a][i] * ex[b][i]).coeff(0))
            row.append(acc)
        out.append(row)
    return out


def flat_coordinates(curve: SpectralCurve) -> list:
    """t_beta = C_beta[dy] as dicts {contour, value, ambiguous, dropped}.

    A type-3 value is flagged ambiguous whenever dy has a residue at an endpoint,
    since the discarded log x term then fixes the constant only up to a choice.
    """
    out = []
    for C in contours(curve):
        if C.kind == "type3":
            r = vp_integral(curve, curve.dy, C.reference, C.pole)
            out.append({"contour": C.label, "value": r.value, "ambiguous": r.ambiguous or r.log_dropped,
                        "dropped": r.dropped})
        else:
            v, amb = C.apply(curve, curve.dy)
            out.append({"contour": C.label, "value": v, "ambiguous": amb, "dropped": []})
    return out


def three_point(curve: SpectralCurve, a: int, b: int, c: int) -> Scalar:
    """C_{abc} = sum_i Res_{P_i} phi_a phi_b phi_c / (dx dy), dual primary differentials."""
    fp = flat_metric(curve)
    acc = ZERO
    for i in range(curve.N):
        d = _s(evaluate_differential(curve, curve.dy, i))
        if d.is_zero():
            raise AdmissibilityError("dy vanishes at P_%d" % (i + 1))
        ch = curve.charts[i]
        num = ch.expand(fp.dual_phi[a], 2) * ch.expand(fp.dual_phi[b], 2) * ch.expand(fp.dual_phi[c], 2)
        den = ch.expand(curve.dy, 2)
        acc = acc + _s((num / den).coeff(0))
    return acc


def three_point_table(curve: SpectralCurve) -> dict:
    N = curve.N
    out = {}
    for a in range(N):
        for b in range(a, N):
            for c in range(b, N):
                out[(a, b, c)] = three_point(curve, a, b, c)
    return out


# R-hat

def _dfact(n: int) -> int:
    """(2m-1)!! for n = 2m - 1 >= -1."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def rhat_inverse(curve: SpectralCurve, K: int) -> FormalMatrixSeries:
    """[R^-1(z)]^i_j = delta_ij - sum_m (2m-1)!! B^{ji}_{2m,0} z^(m+1)."""
    N = curve.N
    coeffs = [mat_identity(N)]
    for k in range(1, K + 1):
        m = k - 1
        M = mat_zero(N)
        for i in range(N):
            for j in range(N):
                M[i][j] = -_s(curve.B_coefficient(j, i, 2 * m, 0)) * _dfact(2 * m - 1)
        coeffs.append(M)
    return FormalMatrixSeries(coeffs)


def rhat(curve: SpectralCurve, K: int) -> FormalMatrixSeries:
    def build():
        R = rhat_inverse(curve, K).inverse()
        N = curve.N
        if K >= 1:
            for i in range(N):
                for j in range(N):
                    if i != j and R[1][i][j] != _s(curve.B_at(i, j)):
                        raise InternalConsistencyError("R1[%d][%d] differs from B(P_i, P_j)" % (i, j))
        return R
    return curve.cached(("rhat", K), build)


def symplectic_check(R: FormalMatrixSeries) -> CheckReport:
    prod = R * R.transpose().negate_z()
    ident = FormalMatrixSeries.identity(R.N, R.K)
    bad = prod.first_mismatch(ident)
    return CheckReport("symplectic", bad is None, {"K": R.K, "first_mismatch": bad})


def factorization_check(curve: SpectralCurve, K: int) -> CheckReport:
    """(z1 + z2) Bcheck^{ij}(z1, z2) = -sum_k [R^-1(z1)]^k_i [R^-1(z2)]^k_j to total order K."""
    N = curve.N
    Ri = rhat_inverse(curve, K)
    bad = None
    checked = 0
    for i in range(N):
        for j in range(N):
            # lhs coefficients of z1^a z2^b
            lhs = {}
            for a in range(K + 1):
                for b in range(K + 1 - a):
                    lhs[(a, b)] = ZERO
            if i == j:
                lhs[(0, 0)] = lhs[(0, 0)] - 1
            for m in range(K):
                for n in range(K - m):
                    c = _s(curve.B_coefficient(i, j, 2 * m, 2 * n)) * (_dfact(2 * m - 1) * _dfact(2 * n - 1))
                    if c.is_zero():
                        continue
                    if m + 1 + n <= K:
                        lhs[(m + 1, n)] = lhs[(m + 1, n)] + c
                    if m + n + 1 <= K:
                        lhs[(m, n + 1)] = lhs[(m, n + 1)] + c
            for (a, b), v in sorted(lhs.items()):
                rhs = ZERO
                for k in range(N):
                    rhs = rhs - Ri[a][k][i] * Ri[b][k][j]
                checked += 1
                if rhs != v and bad is None:
                    bad = {"i": i, "j": j, "orders": (a, b), "lhs": v, "rhs": rhs}
    return CheckReport("factorization", bad is None, {"K": K, "checked": checked, "first_mismatch": bad})
