"""Primary and ancestor invariants from residue pairings of the correlators.

A contour C acts on a slot of omega_{g,n} through sum_i Res_{P_i} f_C omega, with f_C
a local primitive of phi_C at each branch point.  Ancestor contours are
polynomial combinations sum_beta p^beta(x) C_beta of the basic contours, fixed by
biorthogonality against the V basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .curve import SpectralCurve
from .errors import InternalConsistencyError, PreconditionError
from .frobenius import DualContour, dy_decomposition, flat_metric, primary_differential, solve_linear
from .poly import Poly, RationalFunction
from .recursion import (Correlator, change_basis_to_V, omega, pair_slot_with_function, v_basis)
from .scalar import Scalar, as_scalar
from .series import Laurent

__all__ = [
    "InvariantTable", "local_primitive", "pair_contour", "pair_form", "primary_invariants",
    "pk_polynomials", "WeightedContour", "ancestor_invariants", "ancestor_two_route",
    "canonical_contours", "pairing_lemma_check", "biorthogonality_matrix", "string_table_check",
]

ZERO = as_scalar(0)
BASES = ("flat", "dual", "canonical")


def _s(c) -> Scalar:
    return c if isinstance(c, Scalar) else as_scalar(c)


@dataclass
class InvariantTable:
    """{sorted ((alpha, k), ...): value} for fixed (g, n) in a named basis."""

    g: int
    n: int
    basis: str
    entries: dict
    conventions: dict = field(default_factory=dict)

    def __getitem__(self, key) -> Scalar:
        return self.entries.get(tuple(sorted(key)), ZERO)

    def items(self):
        return sorted(self.entries.items())

    def nonzero(self) -> dict:
        return {k: v for k, v in self.entries.items() if not _s(v).is_zero()}

    def __eq__(self, other):
        if not isinstance(other, InvariantTable):
            return NotImplemented
        return (self.g, self.n, self.basis) == (other.g, other.n, other.basis) and \
            self.nonzero() == other.nonzero()

    __hash__ = None


def local_primitive(curve: SpectralCurve, phi: RationalFunction, i: int, prec: int) -> Laurent:
    """Primitive of phi(z) dz in the Airy coordinate at P_i, zero at P_i."""
    return curve.charts[i].expand(phi, prec - 1).integrate()


def _primitives(curve: SpectralCurve, phi: RationalFunction, prec: int) -> list:
    return [local_primitive(curve, phi, i, prec) for i in range(curve.N)]


def pair_contour(corr: Correlator, C, slot: int = 0) -> dict:
    """Apply C in one slot: sum_i Res_{P_i} f_C omega; returns coefficients on the other slots.

    omega is symmetric, so the slot only matters for bookkeeping.
    """
    if not 0 <= slot < corr.n:
        raise PreconditionError("slot out of range")
    phi = primary_differential(corr.curve, C) if not isinstance(C, DualContour) else C.phi(corr.curve)
    prec = 2 * corr.max_k() + 5
    return pair_slot_with_function(corr, _primitives(corr.curve, phi, prec))


def pair_form(curve: SpectralCurve, phi: RationalFunction, form: RationalFunction) -> Scalar:
    """sum_i Res_{P_i} f form with f a local primitive of phi, for a one-point form."""
    acc = ZERO
    for i, ch in enumerate(curve.charts):
        v = form.order_at(ch.a)
        prec = max(-v, 2) + 2
        f = local_primitive(curve, phi, i, prec)
        acc = acc + _s((f * ch.expand(form, prec)).coeff(-1))
    return acc


def _pair_all_slots(corr: Correlator, mats: list) -> dict:
    """Contract every slot of the dxi tensor with mats[a] = {(j, l): value}, slot by slot."""
    by_basis: dict = {}
    for a, row in enumerate(mats):
        for b, w in row.items():
            if not _s(w).is_zero():
                by_basis.setdefault(b, []).append((a, w))
    cur = dict(corr.full_items())
    for p in range(corr.n):
        nxt: dict = {}
        for key, v in cur.items():
            for a, w in by_basis.get(key[p], ()):
                new = key[:p] + (a,) + key[p + 1:]
                nxt[new] = nxt.get(new, ZERO) + v * w
        cur = {k: v for k, v in nxt.items() if not v.is_zero()}
    return cur


def _symmetrise(full: dict) -> dict:
    out = {}
    for key, v in full.items():
        s = tuple(sorted(key))
        if s in out and out[s] != v:
            raise InternalConsistencyError("invariant table is not symmetric at %s" % (key,))
        out[s] = v
    return {k: v for k, v in out.items() if not v.is_zero()}


def canonical_contours(curve: SpectralCurve) -> list:
    """C_i = sum_beta Psi^i_beta C_beta, so that sum_j Res y_{C_i} V^j_0 = delta_ij."""
    fp = flat_metric(curve)
    return [DualContour(tuple((fp.contours[b], fp.psi[i][b]) for b in range(curve.N)), "canonical %d" % i)
            for i in range(curve.N)]


def _frame_contours(curve: SpectralCurve, basis: str) -> list:
    fp = flat_metric(curve)
    if basis == "flat":
        return fp.dual_contours
    if basis == "dual":
        return [DualContour(((C, as_scalar(1)),), C.label) for C in fp.contours]
    if basis == "canonical":
        return canonical_contours(curve)
    raise PreconditionError("unknown basis %r" % basis)


def primary_invariants(curve: SpectralCurve, g: int, n: int, basis: str = "flat") -> InvariantTable:
    """k = 0 sector: every slot paired with the frame contours of the basis.

    flat pairs with the dual contours C*_alpha (lower flat indices), dual with C_alpha,
    canonical with C_i.
    """
    corr = omega(curve, g, n)
    frame = _frame_contours(curve, basis)
    mats = []
    for C in frame:
        phi = C.phi(curve)
        mats.append({(j, l): pair_form(curve, phi, curve.dxi(j, l))
                     for j in range(curve.N) for l in range(corr.max_k() + 1)})
    full = _pair_all_slots(corr, mats)
    entries = {tuple((a, 0) for a in key): v for key, v in _symmetrise(full).items()}
    return InvariantTable(g, n, basis, entries, flat_metric(curve).conventions)


# ancestor contours

@dataclass(frozen=True)
class WeightedContour:
    """sum over (C, d) of coefficient * x^d C."""

    terms: tuple
    label: str = ""

    def apply(self, curve: SpectralCurve, f: RationalFunction):
        tot, amb = ZERO, False
        for C, d, c in self.terms:
            w = curve.x ** d if d else None
            v, a = C.apply(curve, f, w)
            tot = tot + v * c
            amb = amb or a
        return tot, amb

    def value(self, curve: SpectralCurve, f: RationalFunction) -> Scalar:
        v, amb = self.apply(curve, f)
        if amb:
            raise PreconditionError("weighted pairing %s is log-ambiguous" % self.label)
        return v

    def polynomials(self) -> dict:
        """{contour label: Poly in x}."""
        out: dict = {}
        for C, d, c in self.terms:
            cs = out.setdefault(C.label, {})
            cs[d] = cs.get(d, ZERO) + c
        return {lab: Poly([cs.get(d, ZERO) for d in range(max(cs) + 1)]) for lab, cs in out.items()}


def _weighted_table(curve: SpectralCurve, kmax: int) -> dict:
    """{(beta, d): {(j, m): C_beta[x^d V^j_m]}} for d, m <= kmax."""
    def build():
        fp = flat_metric(curve)
        out = {}
        for b, C in enumerate(fp.contours):
            for d in range(kmax + 1):
                w = curve.x ** d if d else None
                row = {}
                for j in range(curve.N):
                    for m in range(kmax + 1):
                        v, amb = C.apply(curve, v_basis(curve, j, m), w)
                        if amb:
                            raise PreconditionError("pairing of %s with V is log-ambiguous" % C.label)
                        row[(j, m)] = v
                out[(b, d)] = row
        return out
    return curve.cached(("wtable", kmax), build)


def pk_polynomials(curve: SpectralCurve, alpha: int, k_max: int, frame: str = "canonical") -> list:
    """Ancestor contours C_{alpha,k} = sum_beta p^beta_k(x) C_beta, k = 0..k_max.

    frame "canonical": sum over the pairing gives delta_{alpha j} delta_{km} against V^j_m;
    frame "flat": Psi^j_alpha delta_{km}.  The unknown coefficients of x^d C_beta (d <= k)
    are fixed by an exact solve of all conditions with m <= k_max.
    """
    fp = flat_metric(curve)
    N = curve.N
    T = _weighted_table(curve, k_max)
    cols = [(j, m) for j in range(N) for m in range(k_max + 1)]
    out = []
    for k in range(k_max + 1):
        unknowns = [(b, d) for d in range(k + 1) for b in range(N)]
        rows = [[T[u][col] for u in unknowns] for col in cols]
        if frame == "canonical":
            rhs = [as_scalar(1) if (j == alpha and m == k) else ZERO for j, m in cols]
        elif frame == "flat":
            rhs = [fp.psi[j][alpha] if m == k else ZERO for j, m in cols]
        else:
            raise PreconditionError("unknown frame %r" % frame)
        sol = solve_linear(rows, rhs)
        if sol is None:
            raise InternalConsistencyError("no ancestor contour for alpha=%d, k=%d" % (alpha, k))
        terms = tuple((fp.contours[b], d, c) for (b, d), c in zip(unknowns, sol) if not c.is_zero())
        out.append(WeightedContour(terms, "C_{%d,%d}" % (alpha, k)))
    return out


def biorthogonality_matrix(curve: SpectralCurve, k_max: int, frame: str = "canonical") -> dict:
    """{((alpha, k), (j, m)): C_{alpha,k}[V^j_m]} evaluated from the global forms."""
    out = {}
    for a in range(curve.N):
        for k, W in enumerate(pk_polynomials(curve, a, k_max, frame)):
            for j in range(curve.N):
                for m in range(k_max + 1):
                    out[((a, k), (j, m))] = W.value(curve, v_basis(curve, j, m))
    return out


def _psi_frame(curve: SpectralCurve, basis: str) -> list:
    """Matrix A[j][alpha] with <tau(e_alpha)> = sum_j A[j][alpha] <tau(canonical j)>."""
    fp = flat_metric(curve)
    N = curve.N
    if basis == "canonical":
        return [[as_scalar(1) if a == j else ZERO for a in range(N)] for j in range(N)]
    if basis == "flat":
        return fp.psi
    if basis == "dual":
        # upper indices: contract Psi with eta^{-1} = G
        return [[sum((fp.psi[j][b] * fp.G[b][a] for b in range(N)), ZERO) for a in range(N)]
                for j in range(N)]
    raise PreconditionError("unknown basis %r" % basis)


def ancestor_invariants(curve: SpectralCurve, g: int, n: int, k_max: int | None = None,
                        basis: str = "flat", route: str = "contour") -> InvariantTable:
    """<prod tau_{k_j}(e_{alpha_j})>_g.

    route "contour": every slot paired with an ancestor contour, applied to the global
    dxi forms of the correlator.  route "V": V-basis coefficients contracted with Psi.
    """
    corr = omega(curve, g, n)
    D = corr.dim_bound
    k_max = D if k_max is None else k_max
    N = curve.N
    if route == "V":
        cv = change_basis_to_V(corr)
        A = _psi_frame(curve, basis)
        full: dict = {}
        for key, v in cv.full_items():
            if any(m > k_max for _, m in key):
                continue
            for alphas in itertools.product(range(N), repeat=n):
                acc = v
                for a, (j, _) in zip(alphas, key):
                    acc = acc * A[j][a]
                if acc.is_zero():
                    continue
                label = tuple((a, m) for a, (_, m) in zip(alphas, key))
                full[label] = full.get(label, ZERO) + acc
        return InvariantTable(g, n, basis, _symmetrise(full), flat_metric(curve).conventions)
    if route != "contour":
        raise PreconditionError("unknown route %r" % route)
    kk = max(k_max, corr.max_k())
    labels = []
    mats = []
    if basis == "dual":
        A = _psi_frame(curve, basis)
    for a in range(N):
        if basis == "canonical":
            Ws = pk_polynomials(curve, a, kk, "canonical")
        elif basis == "flat":
            Ws = pk_polynomials(curve, a, kk, "flat")
        else:
            # dual frame: C_{alpha,k} = sum_j A[j][alpha] C_{j,k} in the canonical frame
            cans = [pk_polynomials(curve, j, kk, "canonical") for j in range(N)]
            Ws = [WeightedContour(tuple((C, d, c * A[j][a]) for j in range(N) for C, d, c in cans[j][k].terms),
                                  "C_{%d,%d}" % (a, k)) for k in range(kk + 1)]
        for k in range(k_max + 1):
            row = {}
            for j in range(N):
                for l in range(corr.max_k() + 1):
                    row[(j, l)] = Ws[k].value(curve, curve.dxi(j, l))
            labels.append((a, k))
            mats.append(row)
    full = _pair_all_slots(corr, mats)
    entries = {tuple(labels[c] for c in key): v for key, v in full.items()}
    return InvariantTable(g, n, basis, _symmetrise(entries), flat_metric(curve).conventions)


def ancestor_two_route(curve: SpectralCurve, g: int, n: int, basis: str = "flat") -> dict:
    a = ancestor_invariants(curve, g, n, basis=basis, route="contour")
    b = ancestor_invariants(curve, g, n, basis=basis, route="V")
    keys = sorted(set(a.nonzero()) | set(b.nonzero()))
    bad = [(k, a[k], b[k]) for k in keys if a[k] != b[k]]
    return {"g": g, "n": n, "basis": basis, "entries": len(keys), "passed": not bad,
            "mismatch": bad[:5]}


def pairing_lemma_check(curve: SpectralCurve, kmax: int = 3) -> dict:
    """sum_j Res_{P_j} y_alpha V^i_0 = Psi^i_alpha and sum_j Res y_alpha V^i_k = 0 for k >= 1."""
    fp = flat_metric(curve)
    bad = []
    for a, phi in enumerate(fp.dual_phi):
        for i in range(curve.N):
            for k in range(kmax + 1):
                val = pair_form(curve, phi, v_basis(curve, i, k))
                want = fp.psi[i][a] if k == 0 else ZERO
                if val != want:
                    bad.append((a, i, k, val, want))
    return {"passed": not bad, "mismatch": bad}


def string_table_check(curve: SpectralCurve, g: int, n: int) -> dict:
    """<tau_0(1) prod tau_{k_j}>_g against sum_j <... tau_{k_j - 1} ...>_g on the dual tables.

    The unit slot pairs with sum_beta c_beta C_beta, where dy = sum c_beta phi^{C_beta} + lam dx.
    Tables carry (-1)^{sum k} relative to psi-class conventions (V_{k+1} = d(V_k/dx)), so
    the two sides differ by the fixed sign -1; the report states it.
    """
    coeffs, _ = dy_decomposition(curve)
    big = ancestor_invariants(curve, g, n + 1, basis="dual")
    small = ancestor_invariants(curve, g, n, basis="dual")
    sign = -1
    bad = []
    keys = sorted({k[:j] + k[j + 1:] for k in big.entries for j in range(n + 1)})
    for key in keys:
        lhs = ZERO
        for b in range(curve.N):
            lhs = lhs + big[((b, 0),) + key] * coeffs[b]
        rhs = ZERO
        for j, (a, k) in enumerate(key):
            if k > 0:
                rhs = rhs + small[key[:j] + ((a, k - 1),) + key[j + 1:]]
        if lhs != rhs * sign:
            bad.append((key, lhs, rhs))
    return {"g": g, "n": n, "sign": sign, "entries": len(keys), "passed": not bad,
            "mismatch": bad[:5]}
