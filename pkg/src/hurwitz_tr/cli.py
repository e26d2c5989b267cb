"""Command-line front end.

    hurwitz-tr analyze CURVE
    hurwitz-tr correlators CURVE --g 1 --n 1
    hurwitz-tr invariants CURVE --g 1 --n 1 --basis flat
    hurwitz-tr rmatrix CURVE --kmax 6
    hurwitz-tr frobenius CURVE
    hurwitz-tr verify CURVE | --family NAME_OR_FILE [--family-param C0]

CURVE is a spec file or one of the built-in names airy, zinv, cubic.
Exit status: 0 all checks passed, 1 a check failed, 2 bad input, 3 a precondition
of the computation failed, 4 an internal consistency error.
"""

from __future__ import annotations

import argparse
import sys

from . import errors
from .curve import compatibility_test, dominance_check
from .frobenius import (contours, dy_decomposition, flat_coordinates, flat_metric, rhat,
                        three_point_table)
from .invariants import ancestor_invariants
from .recursion import change_basis_to_V, omega
from .serialize import dumps, render_csv, render_text
from .suite import (BUILTIN_FAMILIES, CONVENTION_ID, curve_from_text, curve_tasks, family_from_text,
                    family_tasks, load_curve_text, load_family_text, run_tasks)

EXIT_FAIL, EXIT_INPUT, EXIT_PRECONDITION, EXIT_INTERNAL = 1, 2, 3, 4


def _conventions(curve) -> dict:
    return {"id": CONVENTION_ID,
            "branch_signs": [ch.branch_sign for ch in curve.charts],
            "reference_pole": curve.options.get("reference_pole", 0),
            "type1_normalization": curve.options.get("type1_normalization", "oriented"),
            "indices": "0-based branch points and contours; (i, k) means branch point i, order k"}


def _envelope(command: str, curve, result, checks=None) -> dict:
    out = {"command": command, "tower": curve.tower.describe(), "conventions": _conventions(curve),
           "result": result}
    if checks is not None:
        out["checks"] = checks
        out["passed"] = all(c["passed"] for c in checks)
    return out


def cmd_analyze(args, curve) -> dict:
    comp = compatibility_test(curve)
    result = {"curve": curve.describe(),
              "contours": [C.label for C in contours(curve)],
              "dominant": dominance_check(curve),
              "compatible": bool(comp),
              "compatibility_witness": list(comp.witness) if comp.witness else None}
    return _envelope("analyze", curve, result)


def cmd_correlators(args, curve) -> dict:
    corr = omega(curve, args.g, args.n)
    if args.form == "V":
        corr = change_basis_to_V(corr)
    result = {"g": args.g, "n": args.n, "basis": corr.basis, "entries": corr.coeffs}
    return _envelope("correlators", curve, result)


def cmd_invariants(args, curve) -> dict:
    tab = ancestor_invariants(curve, args.g, args.n, k_max=args.kmax, basis=args.basis,
                              route=args.route)
    entries = tab.entries if args.all else tab.nonzero()
    result = {"g": args.g, "n": args.n, "basis": args.basis, "route": args.route,
              "entries": entries}
    return _envelope("invariants", curve, result)


def cmd_rmatrix(args, curve) -> dict:
    K = args.kmax if args.kmax is not None else 6
    return _envelope("rmatrix", curve, {"K": K, "R": rhat(curve, K)})


def cmd_frobenius(args, curve) -> dict:
    fp = flat_metric(curve)
    coeffs, lam = dy_decomposition(curve)
    result = {"u": fp.u, "eta_canonical": fp.eta_canonical, "gamma": fp.gamma,
              "contours": [C.label for C in fp.contours], "G": fp.G, "eta_flat": fp.eta_flat,
              "psi": fp.psi, "flat_coordinates": flat_coordinates(curve),
              "three_point": three_point_table(curve),
              "dy_decomposition": {"coefficients": list(coeffs), "dx_coefficient": lam}}
    return _envelope("frobenius", curve, result)


def cmd_verify(args, text: str) -> dict:
    if args.family is not None:
        fam = family_from_text(text, args.family_param)
        tasks = family_tasks(text, args.family_param, K=args.kmax or 3)
        checks = run_tasks("family", text, args.family_param, tasks, args.workers)
        env = _envelope("verify", fam.curve, {"family": args.family, "c0": fam.c0}, checks)
        return env
    curve = curve_from_text(text, args.order)
    checks = run_tasks("curve", text, args.order, curve_tasks(), args.workers)
    return _envelope("verify", curve, {}, checks)


def _render(obj, fmt: str) -> str:
    if fmt == "json":
        return dumps(obj)
    if fmt == "csv":
        return render_csv(obj)
    return render_text(obj)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hurwitz-tr", description="Exact recursion on genus-zero curves.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, curve_required=True):
        sp.add_argument("curve", nargs=None if curve_required else "?",
                        help="curve spec file or built-in name (airy, zinv, cubic)")
        sp.add_argument("--order", type=int, default=None, help="series truncation order")
        sp.add_argument("--format", choices=("json", "text", "csv"), default="json")

    common(sub.add_parser("analyze", help="branch data, poles, contours, dominance, compatibility"))
    sp = sub.add_parser("correlators", help="omega_{g,n} coefficient tensor")
    common(sp)
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--form", choices=("dxi", "V"), default="dxi")
    sp = sub.add_parser("invariants", help="ancestor invariants")
    common(sp)
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--kmax", type=int, default=None)
    sp.add_argument("--basis", choices=("flat", "dual", "canonical"), default="flat")
    sp.add_argument("--route", choices=("contour", "V"), default="contour")
    sp.add_argument("--all", action="store_true", help="include zero entries")
    sp = sub.add_parser("rmatrix", help="R-hat matrix series")
    common(sp)
    sp.add_argument("--kmax", type=int, default=None, help="truncation order K (default 6)")
    common(sub.add_parser("frobenius", help="Frobenius data at the curve"))
    sp = sub.add_parser("verify", help="run the verification suite")
    common(sp, curve_required=False)
    sp.add_argument("--family", default=None,
                    help="family spec file or built-in name (%s)" % ", ".join(sorted(BUILTIN_FAMILIES)))
    sp.add_argument("--family-param", default=None, help="base point c0 of the family")
    sp.add_argument("--kmax", type=int, default=None, help="R-hat order for family checks (default 3)")
    sp.add_argument("--workers", type=int, default=1)
    return p


COMMANDS = {"analyze": cmd_analyze, "correlators": cmd_correlators, "invariants": cmd_invariants,
            "rmatrix": cmd_rmatrix, "frobenius": cmd_frobenius}


def _error(kind: str, exc: Exception, fmt: str) -> str:
    data = {"error": {"type": type(exc).__name__, "kind": kind, "message": str(exc)}}
    return dumps(data) if fmt == "json" else render_text(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            if args.family is not None:
                text = load_family_text(args.family)
                if args.family_param is not None:
                    int(args.family_param)
            elif args.curve is not None:
                text = load_curve_text(args.curve)
            else:
                raise ValueError("verify needs a curve or --family")
            out = cmd_verify(args, text)
            code = 0 if out["passed"] else EXIT_FAIL
        else:
            curve = curve_from_text(load_curve_text(args.curve), args.order)
            out = COMMANDS[args.command](args, curve)
            code = 0
    except (errors.PreconditionError, errors.DegeneracyError, errors.AdmissibilityError,
            errors.NonSemisimpleError, errors.TruncationDeficit, errors.SingularJacobianError) as exc:
        sys.stdout.write(_error("precondition", exc, args.format))
        return EXIT_PRECONDITION
    except errors.InternalConsistencyError as exc:
        sys.stdout.write(_error("internal", exc, args.format))
        return EXIT_INTERNAL
    except (ValueError, OSError) as exc:
        sys.stdout.write(_error("input", exc, args.format))
        return EXIT_INPUT
    sys.stdout.write(_render(out, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
