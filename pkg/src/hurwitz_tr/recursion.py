"""Topological recursion at genus zero, on the basis of principal-part differentials.

Every stable correlator is stored as coefficients on products of the
differentials dxi^i_k (pole only at P_i, principal part zeta_i^(-2k-2) d zeta_i).
Index tuples are sorted tuples of pairs (i, k); only nonzero entries are kept.

The recursion kernel at P_i is expanded on the same basis:
    K_i(p0, q) = sum_k ker_k(zeta) dxi^i_k(p0),   ker_k = -zeta^(2k) / (y(zeta) - y(-zeta)),
so that one recursion step reduces to residues of products of Laurent series
in a single variable.  With this sign the recursion reproduces the closed
form for omega_{0,3} as a residue of B B B / (dx dy).
"""

from __future__ import annotations

import itertools
from math import prod

from .curve import SpectralCurve
from .errors import InternalConsistencyError, PreconditionError
from .poly import Poly, RationalFunction
from .scalar import Scalar, as_scalar
from .series import Laurent

__all__ = [
    "Correlator", "omega", "omega03_direct", "dxi_basis", "v_basis", "change_basis_to_V",
    "string_dilaton_check", "d_over_dx_matrix", "x_d_over_dx_matrix",
    "v_matrix", "local_slot_expansion", "index_tuples",
]

ZERO = as_scalar(0)


def _nz(c) -> bool:
    if isinstance(c, Scalar):
        return bool(c.c)
    return c != 0


def index_tuples(N: int, n: int, kmax: int, total: int | None = None) -> list:
    """Sorted n-tuples of (i, k) with k <= kmax and sum of k <= total."""
    idx = [(i, k) for i in range(N) for k in range(kmax + 1)]
    idx.sort()
    out = []
    for combo in itertools.combinations_with_replacement(idx, n):
        if total is not None and sum(k for _, k in combo) > total:
            continue
        out.append(combo)
    return out


class Correlator:
    """omega_{g,n} as a symmetric coefficient tensor on a basis of differentials.

    basis is "dxi" for the principal-part basis or "V" for the V^i_k basis.
    """

    def __init__(self, curve: SpectralCurve, g: int, n: int, coeffs: dict, basis: str = "dxi"):
        self.curve = curve
        self.g = g
        self.n = n
        self.coeffs = {k: v for k, v in coeffs.items() if _nz(v)}
        self.basis = basis

    @property
    def dim_bound(self) -> int:
        return 3 * self.g - 3 + self.n

    def __getitem__(self, idx) -> Scalar:
        return self.coeffs.get(tuple(sorted(idx)), ZERO)

    def items(self):
        return sorted(self.coeffs.items())

    def full_items(self):
        """Entries of the unsymmetrised tensor: every distinct ordering."""
        for key, v in self.items():
            for perm in sorted(set(itertools.permutations(key))):
                yield perm, v

    def max_k(self) -> int:
        return max((k for key in self.coeffs for _, k in key), default=0)

    def __eq__(self, other):
        if not isinstance(other, Correlator):
            return NotImplemented
        return (self.g, self.n, self.basis) == (other.g, other.n, other.basis) and \
            self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        return "Correlator(g=%d, n=%d, basis=%s, %d entries)" % (self.g, self.n, self.basis,
                                                                 len(self.coeffs))

    def to_rational(self, slot_values: dict | None = None):
        """For n = 1: the global rational form (coefficient of dz)."""
        if self.n != 1:
            raise PreconditionError("global form is only provided for one-point correlators")
        out = RationalFunction(Poly())
        for ((i, k),), v in self.items():
            f = self.curve.dxi(i, k) if self.basis == "dxi" else v_basis(self.curve, i, k)
            out = out + f * v
        return out


# local data at a chart

_MONO = -1  # index tag for the monomial zeta^(2k) standing in for B(q, p_j)


class _ChartData:
    """Expansions at chart i needed by one recursion level (budget L)."""

    def __init__(self, curve: SpectralCurve, i: int, L: int):
        self.curve = curve
        self.i = i
        self.L = L
        self.pe = 2 * L + 4
        r = 4 * L + 8
        y = curve.y_primitive_at(i, r + 1)
        dy_odd = y.odd_part().scale(as_scalar(2))
        self.inv_dy = dy_odd.inverse()
        self._E: dict = {}
        self._S: dict = {}
        self._P: dict = {}
        self.T: dict = {}

    def E(self, b) -> Laurent:
        hit = self._E.get(b)
        if hit is None:
            j, l = b
            if j == _MONO:
                hit = Laurent.monomial(as_scalar(1), 2 * l, self.pe + 2 * l + 4)
            else:
                hit = self.curve.expand_dxi(j, l, self.i, self.pe)
            self._E[b] = hit
        return hit

    def S(self, b) -> Laurent:
        """Pull-back by the involution: -E(-zeta)."""
        hit = self._S.get(b)
        if hit is None:
            hit = -self.E(b).flip()
            self._S[b] = hit
        return hit

    def P(self, k: int, b) -> Laurent:
        hit = self._P.get((k, b))
        if hit is None:
            ker = self.inv_dy.shift(2 * k).scale(as_scalar(-1))
            hit = ker * self.E(b)
            self._P[(k, b)] = hit
        return hit

    def t(self, k: int, b, b2):
        key = (k, b, b2)
        hit = self.T.get(key)
        if hit is None:
            p = self.P(k, b)
            s = self.S(b2)
            acc = ZERO
            lo = s.val
            for e, c in p.items():
                f = -1 - e
                if f < lo:
                    continue
                d = s.coeff(f)
                if _nz(d):
                    acc = acc + c * d
            # ensure the window was large enough for the residue
            if p.prec + s.val <= 0 or s.prec + p.val <= 0:
                p.coeff(-1 - s.val)
                s.coeff(-1 - p.val)
            hit = acc
            self.T[key] = hit
        return hit

    def res_ker_series(self, k: int, w: Laurent):
        ker = self.inv_dy.shift(2 * k).scale(as_scalar(-1))
        return (ker * w).coeff(-1)


def _chart_data(curve: SpectralCurve, i: int, L: int) -> _ChartData:
    key = ("chartdata", i)
    hit = curve._cache.get(key)
    if hit is None or hit.L < L:
        hit = _ChartData(curve, i, L)
        curve._cache[key] = hit
    return hit


def _bb_series(curve: SpectralCurve, i: int, prec: int) -> Laurent:
    """B(q, sigma(q)) at chart i, coefficient of d zeta^2."""
    terms = {-2: as_scalar(-1) / 4}
    for e in range(prec):
        acc = ZERO
        for l in range(e + 1):
            m = e - l
            c = curve.B_coefficient(i, i, m, l)
            acc = acc - c if l % 2 == 0 else acc + c
        terms[e] = acc
    return Laurent.from_dict(terms, prec)


def _dxi_indices(N: int, kmax: int) -> list:
    return [(j, l) for j in range(N) for l in range(kmax + 1)]


def omega(curve: SpectralCurve, g: int, n: int, *, check_symmetry: bool = False,
          total_bound: bool = True) -> Correlator:
    """Correlator omega_{g,n} by the recursion.

    Entries are computed for index tuples with every k <= 3g-3+n+1; with
    total_bound (the default) only tuples with sum of k <= 3g-3+n+1 are
    formed.  The extra level is computed and required to vanish.
    """
    if (g, n) == (0, 1):
        raise PreconditionError("omega_{0,1} is y dx; use curve.dy and curve.x")
    if (g, n) == (0, 2):
        raise PreconditionError("omega_{0,2} is the Bergman kernel; use bergman_expand")
    if g < 0 or n < 1 or 2 * g - 2 + n <= 0:
        raise PreconditionError("(g, n) = (%d, %d) is not in the stable range" % (g, n))
    key = ("omega", g, n, total_bound)
    hit = curve._cache.get(key)
    if hit is not None:
        if check_symmetry:
            _symmetry_recheck(curve, hit, total_bound)
        return hit
    D = 3 * g - 3 + n
    L = D + 1
    N = curve.N
    subs = {}

    def sub(gg, nn):
        if (gg, nn) not in subs:
            subs[(gg, nn)] = omega(curve, gg, nn, total_bound=total_bound)
        return subs[(gg, nn)]

    charts = [_chart_data(curve, i, L) for i in range(N)]
    bb = {}
    ucache: dict = {}

    def factor_basis(gg, nn, idx, i):
        """(basis entries b, coefficient X[b]) for omega_{gg,nn}(q, idx) at chart i."""
        if (gg, nn) == (0, 2):
            (j, kk), = idx
            if j != i:
                return []
            return [((_MONO, kk), as_scalar(2 * kk + 1))]
        c = sub(gg, nn)
        out = []
        for b in _dxi_indices(N, 3 * gg - 3 + nn):
            v = c[(b,) + tuple(idx)]
            if _nz(v):
                out.append((b, v))
        return out

    def entry(a0, J):
        i, k = a0
        cd = charts[i]
        val = ZERO
        if g >= 1:
            if (g - 1, n + 1) == (0, 2):
                if i not in bb:
                    bb[i] = _bb_series(curve, i, 2 * L + 2)
                val = val + cd.res_ker_series(k, bb[i])
            else:
                c = sub(g - 1, n + 1)
                basis = _dxi_indices(N, 3 * (g - 1) - 3 + n + 1)
                for b in basis:
                    for b2 in basis:
                        v = c[(b, b2) + J]
                        if _nz(v):
                            val = val + cd.t(k, b, b2) * v
        m = len(J)
        for mask in range(1 << m):
            I = tuple(J[p] for p in range(m) if mask >> p & 1)
            R = tuple(J[p] for p in range(m) if not mask >> p & 1)
            for g1 in range(g + 1):
                g2 = g - g1
                n1, n2 = len(I) + 1, len(R) + 1
                if (g1, n1) == (0, 1) or (g2, n2) == (0, 1):
                    continue
                x2 = factor_basis(g2, n2, R, i)
                if not x2:
                    continue
                ukey = (i, k, g1, tuple(sorted(I)))
                x1 = None
                for b2, v2 in x2:
                    uk = ukey + (b2,)
                    u = ucache.get(uk)
                    if u is None:
                        if x1 is None:
                            x1 = factor_basis(g1, n1, I, i)
                        u = ZERO
                        for b, v1 in x1:
                            t = cd.t(k, b, b2)
                            if _nz(t):
                                u = u + t * v1
                        ucache[uk] = u
                    if _nz(u):
                        val = val + u * v2
        return val

    coeffs = {}
    tuples = index_tuples(N, n, L, L if total_bound else None)
    for A in tuples:
        v = entry(A[0], A[1:])
        if _nz(v):
            coeffs[A] = v
    for A, v in coeffs.items():
        if any(kk > D for _, kk in A) or sum(kk for _, kk in A) > D:
            raise InternalConsistencyError(
                "omega_{%d,%d} has a nonzero coefficient %s at %s beyond the dimension bound"
                % (g, n, v, A))
    res = Correlator(curve, g, n, coeffs)
    res._entry = entry
    curve._cache[key] = res
    if check_symmetry:
        _symmetry_recheck(curve, res, total_bound)
    return res


def _symmetry_recheck(curve: SpectralCurve, corr: Correlator, total_bound: bool):
    """Recompute every entry with each slot in turn as the recursion variable."""
    entry = getattr(corr, "_entry", None)
    if entry is None:
        return
    L = corr.dim_bound + 1
    for A in index_tuples(curve.N, corr.n, L, L if total_bound else None):
        ref = corr[A]
        for p in range(1, corr.n):
            if A[p] == A[p - 1]:
                continue
            J = A[:p] + A[p + 1:]
            v = entry(A[p], J)
            if v != ref:
                raise InternalConsistencyError(
                    "omega_{%d,%d} is not symmetric at %s: %s vs %s" % (corr.g, corr.n, A, ref, v))


def omega03_direct(curve: SpectralCurve) -> Correlator:
    """omega_{0,3} as sum_i Res_{P_i} B(p1,q) B(p2,q) B(p3,q) / (dx(q) dy(q)).

    The three kernels are expanded at P_i on the columns b_l(p) of B; a product
    of columns b_l1 b_l2 b_l3 gets the residue of zeta^(l1+l2+l3) / (zeta dy/dzeta).
    Even columns are (2k+1) dxi_k; odd columns must not contribute.
    """
    lmax = 3
    acc: dict = {}
    for i, ch in enumerate(curve.charts):
        dyz = ch.expand(curve.dy, 3 * lmax + 2)
        # dx = zeta d zeta in the Airy coordinate
        den = dyz.shift(1).inverse()
        for ls in itertools.product(range(lmax + 1), repeat=3):
            r = den.shift(sum(ls)).coeff(-1)
            if not _nz(r):
                continue
            if any(l % 2 for l in ls):
                raise InternalConsistencyError("odd column survives in omega_{0,3}")
            slots = [((i, l // 2), as_scalar(l + 1)) for l in ls]
            key = tuple(sorted(s for s, _ in slots))
            v = r * prod(c for _, c in slots)
            acc[key] = acc.get(key, ZERO) + v
    # the sum over orderings of a symmetric product: each ordered triple counted once
    coeffs = {}
    for key, v in acc.items():
        nperm = len(set(itertools.permutations(key)))
        coeffs[key] = v / nperm
    return Correlator(curve, 0, 3, coeffs)


def dxi_basis(curve: SpectralCurve, i: int, k: int, order: int | None = None) -> RationalFunction:
    """dxi^i_k as a global rational differential (coefficient of dz)."""
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    return curve.dxi(i, k)


# slot operators

def _principal_to_dxi(series: Laurent, i: int, out: dict, what: str):
    for e, c in series.items():
        if e >= 0:
            break
        if e == -1:
            raise InternalConsistencyError("%s has a residue at P_%d" % (what, i))
        if e % 2:
            raise InternalConsistencyError("%s has an odd principal part at P_%d" % (what, i))
        kk = (-e - 2) // 2
        out[(i, kk)] = out.get((i, kk), ZERO) + c


def d_over_dx_matrix(curve: SpectralCurve, kmax: int) -> dict:
    """Matrix of omega -> d(omega/dx) on dxi^j_l, l <= kmax, read from principal parts."""
    def build():
        mat = {}
        for j in range(curve.N):
            for l in range(kmax + 1):
                row: dict = {}
                for i in range(curve.N):
                    e = curve.expand_dxi(j, l, i, 1)
                    f = e.shift(-1)  # divide by dx/d zeta = zeta
                    pp = Laurent(f.val, f.coeffs, 0)
                    _principal_to_dxi(pp.deriv(), i, row, "d(dxi/dx)")
                mat[(j, l)] = {k: v for k, v in row.items() if _nz(v)}
        return mat
    return curve.cached(("Dop", kmax), build)


def x_d_over_dx_matrix(curve: SpectralCurve, kmax: int) -> dict:
    """Matrix of omega -> d(x omega / dx) on the dxi span."""
    def build():
        mat = {}
        for j in range(curve.N):
            for l in range(kmax + 1):
                row: dict = {}
                for i, ch in enumerate(curve.charts):
                    e = curve.expand_dxi(j, l, i, 3)
                    # x = u + zeta^2/2, dx = zeta d zeta
                    f = e.shift(-1).scale(ch.u) + e.shift(1).scale(as_scalar(1) / 2)
                    pp = Laurent(f.val, f.coeffs, 0) if f.val < 0 else Laurent.zero(0)
                    _principal_to_dxi(pp.deriv(), i, row, "d(x dxi/dx)")
                mat[(j, l)] = {k: v for k, v in row.items() if _nz(v)}
        return mat
    return curve.cached(("XDop", kmax), build)


def _apply_slotwise(corr_coeffs: dict, n: int, mat: dict) -> dict:
    """sum_j (map in slot j) applied to a symmetric tensor stored on sorted keys."""
    full: dict = {}
    for key, v in corr_coeffs.items():
        for perm in set(itertools.permutations(key)):
            for p in range(n):
                row = mat.get(perm[p])
                if not row:
                    continue
                for tgt, c in row.items():
                    new = perm[:p] + (tgt,) + perm[p + 1:]
                    full[new] = full.get(new, ZERO) + v * c
    out = {}
    for key, v in full.items():
        s = tuple(sorted(key))
        if out.setdefault(s, v) != v:
            raise InternalConsistencyError("slot operator broke symmetry at %s" % (key,))
    return {k: v for k, v in out.items() if _nz(v)}


# V basis

def v_matrix(curve: SpectralCurve, kmax: int) -> dict:
    """{(i, k): {(j, l): a}} with V^i_k = sum a dxi^j_l, from iterating d(./dx)."""
    def build():
        D = d_over_dx_matrix(curve, kmax)
        out = {}
        for i in range(curve.N):
            cur = {(i, 0): as_scalar(1)}
            out[(i, 0)] = dict(cur)
            for k in range(1, kmax + 1):
                nxt: dict = {}
                for b, c in cur.items():
                    for tgt, d in D[b].items():
                        nxt[tgt] = nxt.get(tgt, ZERO) + c * d
                cur = {b: v for b, v in nxt.items() if _nz(v)}
                out[(i, k)] = dict(cur)
        return out
    return curve.cached(("Vmat", kmax), build)


def v_basis(curve: SpectralCurve, i: int, k: int, order: int | None = None) -> RationalFunction:
    """V^i_k as a global rational differential: V_0 = B(P_i, .), V_{k+1} = d(V_k/dx)."""
    def build():
        if k == 0:
            return curve.dxi(i, 0)
        prev = v_basis(curve, i, k - 1)
        return (prev / curve.dx).deriv()
    return curve.cached(("Vrat", i, k), build)


def _inverse_v_matrix(curve: SpectralCurve, kmax: int) -> dict:
    """{(j, l): {(i, k): c}} with dxi^j_l = sum c V^i_k; triangular solve in k."""
    def build():
        A = v_matrix(curve, kmax)
        inv: dict = {}
        for l in range(kmax + 1):
            for j in range(curve.N):
                row = A[(j, l)]
                diag = row.get((j, l), ZERO)
                if not _nz(diag):
                    raise InternalConsistencyError("V-basis change is singular at (%d, %d)" % (j, l))
                # dxi_{j,l} = (V_{j,l} - sum_{lower} a dxi_lower) / diag
                res = {(j, l): as_scalar(1) / diag}
                for b, a in row.items():
                    if b == (j, l):
                        continue
                    if b[1] >= l:
                        raise InternalConsistencyError("V-basis change is not triangular")
                    for tgt, c in inv[b].items():
                        res[tgt] = res.get(tgt, ZERO) - a * c / diag
                inv[(j, l)] = {b: v for b, v in res.items() if _nz(v)}
        return inv
    return curve.cached(("Vinv", kmax), build)


def _transform_all_slots(coeffs: dict, n: int, mat: dict) -> dict:
    """Apply the same basis change in every slot of a symmetric tensor."""
    cur = {}
    for key, v in coeffs.items():
        for perm in set(itertools.permutations(key)):
            cur[perm] = v
    for p in range(n):
        nxt: dict = {}
        for key, v in cur.items():
            for tgt, c in mat[key[p]].items():
                new = key[:p] + (tgt,) + key[p + 1:]
                nxt[new] = nxt.get(new, ZERO) + v * c
        cur = {k: v for k, v in nxt.items() if _nz(v)}
    out = {}
    for key, v in cur.items():
        s = tuple(sorted(key))
        if s in out and out[s] != v:
            raise InternalConsistencyError("basis change broke symmetry at %s" % (key,))
        out[s] = v
    return out


def change_basis_to_V(corr: Correlator) -> Correlator:
    """Coefficients of corr on products of V^{i}_{k}."""
    if corr.basis == "V":
        return corr
    kmax = max(corr.max_k(), 0)
    inv = _inverse_v_matrix(corr.curve, kmax)
    return Correlator(corr.curve, corr.g, corr.n, _transform_all_slots(corr.coeffs, corr.n, inv), "V")


def change_basis_to_dxi(corr: Correlator) -> Correlator:
    if corr.basis == "dxi":
        return corr
    kmax = max(corr.max_k(), 0)
    A = v_matrix(corr.curve, kmax)
    return Correlator(corr.curve, corr.g, corr.n, _transform_all_slots(corr.coeffs, corr.n, A), "dxi")


# pairing in one slot with a local function

def local_slot_expansion(corr: Correlator, i: int, prec: int) -> dict:
    """{rest: Laurent} with omega(q, rest) expanded at chart i in the first slot."""
    if corr.basis != "dxi":
        corr = change_basis_to_dxi(corr)
    out: dict = {}
    for key, v in corr.items():
        for p in range(len(key)):
            if p and key[p] == key[p - 1]:
                continue
            b = key[p]
            rest = key[:p] + key[p + 1:]
            e = corr.curve.expand_dxi(b[0], b[1], i, prec).scale(v)
            out[rest] = out[rest] + e if rest in out else e
    return out


def pair_slot_with_function(corr: Correlator, funcs: list) -> dict:
    """sum_i Res_{P_i} f_i(zeta) omega(zeta, rest) for local functions f_i (Laurent in zeta_i).

    Returns a symmetric coefficient dict on the remaining n-1 slots.
    """
    out: dict = {}
    pmax = 2 * corr.max_k() + 3
    for i, f in enumerate(funcs):
        loc = local_slot_expansion(corr, i, pmax)
        for rest, ser in loc.items():
            r = (f * ser).coeff(-1)
            if _nz(r):
                out[rest] = out.get(rest, ZERO) + r
    return {k: v for k, v in out.items() if _nz(v)}


def string_dilaton_check(curve: SpectralCurve, g: int, n: int) -> dict:
    """Check the string and dilaton equations relating omega_{g,n+1} and omega_{g,n}.

    string:  sum_i Res_{P_i} y omega_{g,n+1}(., J) = - sum_j d(omega_{g,n}/dx(p_j))
    dilaton: sum_i Res_{P_i} (Phi - x y) omega_{g,n+1}(., J)
             = (2g-2+n) omega_{g,n} + sum_j d(x(p_j) omega_{g,n}/dx(p_j))
    y is a local primitive of dy and Phi - x y a local primitive of -x dy.
    """
    big = omega(curve, g, n + 1)
    small = omega(curve, g, n)
    kmax = max(big.dim_bound, 1) + 1
    prec = 2 * kmax + 6
    ys, ws = [], []
    for i, ch in enumerate(curve.charts):
        y = curve.y_primitive_at(i, prec)
        dyz = ch.expand(curve.dy, prec)
        xz = Laurent.from_dict({0: ch.u, 2: as_scalar(1) / 2}, prec)
        w = (-(xz * dyz)).integrate()
        ys.append(y)
        ws.append(w)
    lhs_s = pair_slot_with_function(big, ys)
    lhs_d = pair_slot_with_function(big, ws)
    D = d_over_dx_matrix(curve, kmax)
    XD = x_d_over_dx_matrix(curve, kmax)
    rhs_s = {k: -v for k, v in _apply_slotwise(small.coeffs, n, D).items()}
    xd = _apply_slotwise(small.coeffs, n, XD)
    rhs_d: dict = {k: v * (2 * g - 2 + n) for k, v in small.coeffs.items()}
    for k, v in xd.items():
        rhs_d[k] = rhs_d.get(k, ZERO) + v
    rhs_d = {k: v for k, v in rhs_d.items() if _nz(v)}
    bad_s = _diff(lhs_s, rhs_s)
    bad_d = _diff(lhs_d, rhs_d)
    return {
        "g": g, "n": n,
        "string": not bad_s, "dilaton": not bad_d,
        "string_mismatch": bad_s[:5], "dilaton_mismatch": bad_d[:5],
        "passed": not bad_s and not bad_d,
    }


def _diff(a: dict, b: dict) -> list:
    bad = []
    for k in sorted(set(a) | set(b)):
        va, vb = a.get(k, ZERO), b.get(k, ZERO)
        if va != vb:
            bad.append((k, va, vb))
    return bad
