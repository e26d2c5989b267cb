"""Named verification checks over curve and family specs.

Every check is identified by a name and a small argument tuple so that it can be
run in a worker process; the curve text is re-parsed there and curves are cached
per process.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache

from .curve import SpectralCurve, analyze, evaluate_differential, parse_curve_spec
from .family import (CurveFamily, du_dc, family_from_spec, flatness_check, lg_deformation_check,
                     parse_family_spec, rauch_check, rmatrix_ode_check, scaling_covariance_check,
                     shift_covariance_check, vardy_check)
from .frobenius import (CheckReport, contours, factorization_check, flat_metric, metric_by_residues,
                        primary_differential, rhat, symplectic_check, three_point_table)
from .invariants import (ancestor_two_route, biorthogonality_matrix, pairing_lemma_check, string_table_check,
                         primary_invariants)
from .linalg import mat_identity, mat_eq, mat_mul, mat_transpose
from .poly import RationalFunction
from .recursion import omega, omega03_direct, string_dilaton_check
from .scalar import as_scalar

__all__ = ["BUILTIN_CURVES", "BUILTIN_FAMILIES", "load_curve_text", "curve_from_text",
           "family_from_text", "curve_tasks", "family_tasks", "run_tasks", "run_task",
           "CONVENTION_ID"]

CONVENTION_ID = ("kernel=-zeta^2k/dy;type1=-1/(mu-1)*Res(x/c)^(k/mu)B;ref-pole=0;"
                 "branch-sign=principal-sqrt(x'');dilaton=+sum d(x w/dx)")

BUILTIN_CURVES = {
    "airy": "x_num = 0 0 1\nx_den = 2\ndy_num = 1\n",
    "zinv": "x_num = 1 0 1\nx_den = 0 1\ndy_num = 1\n",
    "cubic": "x_num = 0 -3 0 1\nx_den = 3\ndy_num = 1\n",
}

BUILTIN_FAMILIES = {
    "cubic": "x_num = 0 ; 0 -3 ; 0 ; 1\nx_den = 3\ndy_num = 1\ndy_den = 1\nc0 = 1\n"
             "rauch_points = 3 5\nvardy_point = 2\n",
    "zinv": "x_num = 0 1 ; 0 ; 1\nx_den = 0 ; 1\ndy_num = 1\ndy_den = 1\nc0 = 1\n",
    "airy": "x_num = 0 2 ; 0 ; 1\nx_den = 2\ndy_num = 1\ndy_den = 1\nc0 = 0\n",
}


def load_curve_text(name_or_path: str) -> str:
    if name_or_path in BUILTIN_CURVES:
        return BUILTIN_CURVES[name_or_path]
    with open(name_or_path, encoding="utf-8") as fh:
        return fh.read()


def _options(spec: dict) -> dict:
    opts = {}
    for key in ("reference_pole", "dy_contour", "order"):
        if key in spec:
            vals = spec[key]
            if len(vals) != 1:
                raise ValueError("field %s takes one integer" % key)
            try:
                opts[key] = int(vals[0])
            except ValueError:
                raise ValueError("field %s must be an integer" % key) from None
    if "type1_normalization" in spec:
        v = " ".join(spec["type1_normalization"])
        if v not in ("oriented", "literal"):
            raise ValueError("type1_normalization must be 'oriented' or 'literal'")
        opts["type1_normalization"] = v
    return opts


@lru_cache(maxsize=16)
def curve_from_text(text: str, order: int | None = None) -> SpectralCurve:
    """Parse a curve spec.  dy_contour = k replaces dy by the k-th primary differential."""
    spec = parse_curve_spec(text)
    opts = _options(spec)
    order = order if order is not None else opts.get("order", 12)
    x = RationalFunction.from_ints(spec["x_num"], spec["x_den"])
    dy = RationalFunction.from_ints(spec["dy_num"], spec["dy_den"])
    if "dy_contour" in opts:
        probe = analyze(x, RationalFunction.from_ints([1]), order)
        _apply_options(probe, opts)
        cs = contours(probe)
        k = opts["dy_contour"]
        if not 1 <= k <= len(cs):
            raise ValueError("dy_contour must be between 1 and %d" % len(cs))
        dy = primary_differential(probe, cs[k - 1])
    curve = analyze(x, dy, order)
    _apply_options(curve, opts)
    return curve


def _apply_options(curve: SpectralCurve, opts: dict):
    if "reference_pole" in opts:
        curve.options["reference_pole"] = opts["reference_pole"]
    if "type1_normalization" in opts:
        curve.options["type1_normalization"] = opts["type1_normalization"]


def load_family_text(name_or_path: str) -> str:
    if name_or_path in BUILTIN_FAMILIES:
        return BUILTIN_FAMILIES[name_or_path]
    with open(name_or_path, encoding="utf-8") as fh:
        return fh.read()


@lru_cache(maxsize=16)
def family_from_text(text: str, c0: str | None = None) -> CurveFamily:
    spec = parse_family_spec(text)
    if c0 is not None:
        spec["c0"] = int(c0)
    return family_from_spec(spec)


def _family_points(text: str) -> dict:
    spec = parse_family_spec(text)
    out = {}
    for key in ("rauch_points", "vardy_point"):
        if key in spec:
            try:
                out[key] = [int(v) for v in spec[key].replace(",", " ").split()]
            except ValueError:
                raise ValueError("field %s must be integers" % key) from None
    return out


# curve checks

def _check_omega03(curve):
    a, b = omega(curve, 0, 3), omega03_direct(curve)
    return CheckReport("omega03_two_route", a == b, {"entries": len(a.coeffs)})


def _check_string_dilaton(curve, g, n):
    r = string_dilaton_check(curve, g, n)
    return CheckReport("string_dilaton(%d,%d)" % (g, n), r["passed"], r)


def _check_rhat(curve, K_symp=6, K_fact=4):
    R = rhat(curve, K_symp)
    N = curve.N
    r0 = mat_eq(R[0], mat_identity(N))
    r1 = all(R[1][i][j] == curve.B_at(i, j) for i in range(N) for j in range(N) if i != j)
    sym = symplectic_check(R)
    fac = factorization_check(curve, K_fact)
    return CheckReport("rhat_structure", r0 and r1 and sym.passed and fac.passed,
                       {"R0_identity": r0, "R1_offdiagonal_is_B": r1, "symplectic": sym.passed,
                        "symplectic_K": K_symp, "factorization": fac.passed, "factorization_K": K_fact})


def _check_frobenius(curve):
    fp = flat_metric(curve)
    N = curve.N
    psi_ok = mat_eq(mat_mul(mat_transpose(fp.psi), fp.psi), fp.eta_flat)
    # eta_i = dy(P_i)^2 against the residue Res_{P_i} dy dy / dx
    eta_ok = True
    for i in range(N):
        res = _res_at_branch(curve, i, curve.dy * curve.dy / curve.dx)
        eta_ok = eta_ok and res == fp.eta_canonical[i] and \
            evaluate_differential(curve, curve.dy, i) ** 2 == fp.eta_canonical[i]
    triple = three_point_table(curve)
    prim = primary_invariants(curve, 0, 3, basis="flat")
    c_ok = all(prim[tuple((x, 0) for x in key)] == v for key, v in triple.items())
    metric_ok = mat_eq(metric_by_residues(curve, [primary_differential(curve, C) for C in fp.contours]),
                       fp.G)
    count_ok = len(fp.contours) == N
    return CheckReport("frobenius_identities", psi_ok and eta_ok and c_ok and count_ok and metric_ok,
                       {"psiT_psi_eq_eta": psi_ok, "eta_i_eq_dy_squared": eta_ok,
                        "three_point_eq_pairing": c_ok, "contour_count_eq_N": count_ok,
                        "residue_metric_eq_G": metric_ok})


def _res_at_branch(curve, i, f):
    """Res_{P_i} f dz, the z-residue at the branch point."""
    return f.expand_at(curve.charts[i].a, 1).coeff(-1)


def _check_pairing(curve, kmax=3):
    lem = pairing_lemma_check(curve, kmax)
    bio = biorthogonality_matrix(curve, kmax)
    bad = [key for key, v in sorted(bio.items())
           if v != (1 if key[0] == key[1] else 0)]
    ok = lem["passed"] and not bad
    return CheckReport("pairing_lemmas", ok, {"lemma": lem["passed"], "biorthogonality": not bad,
                                              "kmax": kmax, "biorthogonality_mismatch": bad[:5]})


def _check_two_route(curve, g, n, basis="flat"):
    r = ancestor_two_route(curve, g, n, basis)
    return CheckReport("ancestor_two_route(%d,%d,%s)" % (g, n, basis), r["passed"], r)


def _check_string_table(curve, g, n):
    r = string_table_check(curve, g, n)
    return CheckReport("string_table(%d,%d)" % (g, n), r["passed"], r)


CURVE_CHECKS = {
    "omega03_two_route": _check_omega03,
    "string_dilaton": _check_string_dilaton,
    "rhat_structure": _check_rhat,
    "frobenius_identities": _check_frobenius,
    "pairing_lemmas": _check_pairing,
    "ancestor_two_route": _check_two_route,
    "string_table": _check_string_table,
}


def curve_tasks(max_weight: int = 4) -> list:
    tasks = [("omega03_two_route", ()), ("rhat_structure", ()), ("frobenius_identities", ()),
             ("pairing_lemmas", ())]
    for g, n in ((0, 3), (0, 4), (1, 1), (1, 2)):
        tasks.append(("string_dilaton", (g, n)))
    for g, n in ((0, 3), (1, 1)):
        tasks.append(("string_table", (g, n)))
    for g in range(0, max_weight // 2 + 2):
        for n in range(1, max_weight + 3):
            if 0 < 2 * g - 2 + n <= max_weight:
                tasks.append(("ancestor_two_route", (g, n)))
    return tasks


# family checks

def _f_du(fam):
    du = du_dc(fam)
    return CheckReport("du_dc", True, {"u": fam.curve.u, "du_dc": du})


def _f_rauch(fam, p1, p2):
    a, b = rauch_check(fam, p1, p2), rauch_check(fam, p2, p1)
    return CheckReport("rauch", a.passed and b.passed and a.detail["lhs"] == b.detail["lhs"], a.detail)


def _f_vardy(fam, p):
    return vardy_check(fam, p)


def _f_flat(fam, a, b):
    cs = contours(fam.curve)
    return flatness_check(fam, cs[a], cs[b])


def _f_ode(fam, K):
    r = rmatrix_ode_check(fam, K)
    return CheckReport(r.name, r.passed, {"K": K, "first_mismatch": r.detail["first_mismatch"]})


def _f_lg(fam):
    return lg_deformation_check(fam)


def _f_shift(fam, K):
    return shift_covariance_check(fam.curve.x, fam.curve.dy, 1, K)


def _f_scaling(fam, K):
    return scaling_covariance_check(fam.curve.x, fam.curve.dy, 4, K)


FAMILY_CHECKS = {
    "du_dc": _f_du, "rauch": _f_rauch, "vardy": _f_vardy, "flatness": _f_flat,
    "rmatrix_ode": _f_ode, "lg_deformation": _f_lg, "shift_covariance": _f_shift,
    "scaling_covariance": _f_scaling,
}


def _default_points(curve, count):
    from .frobenius import _sample_points
    return [int(as_scalar(p).to_rational()) for p in _sample_points(curve, count)]


def family_tasks(text: str, c0: str | None = None, K: int = 3) -> list:
    fam = family_from_text(text, c0)
    pts = _family_points(text)
    rp = pts.get("rauch_points") or _default_points(fam.curve, 2)
    vp = (pts.get("vardy_point") or _default_points(fam.curve, 1))[0]
    N = len(contours(fam.curve))
    tasks = [("du_dc", ()), ("rauch", (rp[0], rp[1])), ("vardy", (vp,))]
    tasks += [("flatness", (a, b)) for a in range(N) for b in range(N)]
    tasks += [("rmatrix_ode", (K,)), ("lg_deformation", ()), ("shift_covariance", (K,)),
              ("scaling_covariance", (K,))]
    return tasks


def run_task(kind: str, text: str, extra, name: str, args: tuple):
    """Run one check and return its encoded report (plain data, safe to pickle)."""
    from .serialize import encode
    try:
        if kind == "curve":
            target = curve_from_text(text, extra)
            rep = CURVE_CHECKS[name](target, *args)
        else:
            target = family_from_text(text, extra)
            rep = FAMILY_CHECKS[name](target, *args)
        return {"check": rep.name, "passed": bool(rep.passed), "detail": encode(rep.detail)}
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        return {"check": name, "passed": False, "error": {"type": type(exc).__name__,
                                                          "message": str(exc)}}


def run_tasks(kind: str, text: str, extra, tasks: list, workers: int = 1) -> list:
    """Results in task order, whatever the worker count."""
    if workers <= 1:
        return [run_task(kind, text, extra, n, a) for n, a in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(run_task, kind, text, extra, n, a) for n, a in tasks]
        return [f.result() for f in futs]
