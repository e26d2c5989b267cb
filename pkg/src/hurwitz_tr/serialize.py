"""Lossless JSON encoding of exact values, plus flat text/CSV renderings."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import fields, is_dataclass

from gmpy2 import mpq

from .linalg import FormalMatrixSeries
from .poly import Poly, RationalFunction
from .scalar import QQ, Scalar, Tower
from .series import Jet1

__all__ = ["encode", "decode_scalar", "tower_from_description", "dumps", "render_text",
           "render_csv", "flatten"]


def _q(v) -> str:
    v = mpq(v)
    return str(v.numerator) if v.denominator == 1 else "%s/%s" % (v.numerator, v.denominator)


def encode(obj):
    """Plain JSON data for obj.  Irrational scalars become {"tower_coeffs": {mask: "p/q"}}."""
    if isinstance(obj, Scalar):
        if obj.is_rational():
            return _q(obj.to_rational())
        return {"tower_coeffs": obj.to_dict()}
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if type(obj).__name__ == "mpq":
        return _q(obj)
    if isinstance(obj, Jet1):
        return {"value": encode(obj.a), "derivative": encode(obj.b)}
    if isinstance(obj, Poly):
        return [encode(c) for c in obj.c]
    if isinstance(obj, RationalFunction):
        return {"num": encode(obj.num), "den": encode(obj.den)}
    if isinstance(obj, FormalMatrixSeries):
        return [encode(m) for m in obj.coeffs]
    if isinstance(obj, Tower):
        return obj.describe()
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: encode(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        if all(isinstance(k, str) for k in obj):
            return {k: encode(v) for k, v in obj.items()}
        items = sorted(obj.items(), key=lambda kv: repr(kv[0]))
        return [{"index": encode(k), "value": encode(v)} for k, v in items]
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if hasattr(obj, "label"):
        return obj.label
    raise TypeError("cannot encode %s" % type(obj).__name__)


def tower_from_description(desc: list) -> Tower:
    """Rebuild a tower from its list of radicands (each a {mask: "p/q"} map)."""
    t = QQ
    for rad in desc:
        t = t.child(Scalar(t, {int(m): mpq(v) for m, v in rad.items()}))
    return t


def decode_scalar(data, tower: Tower = QQ) -> Scalar:
    if isinstance(data, (str, int)):
        return Scalar.rational(mpq(data), tower)
    return Scalar(tower, {int(m): mpq(v) for m, v in data["tower_coeffs"].items()})


def dumps(obj) -> str:
    return json.dumps(encode(obj), indent=2, sort_keys=True) + "\n"


def _leaf(v) -> str:
    if isinstance(v, dict) and "tower_coeffs" in v:
        parts = []
        for m, q in sorted(v["tower_coeffs"].items(), key=lambda kv: int(kv[0])):
            m = int(m)
            gens = "*".join("r%d" % j for j in range(m.bit_length()) if m >> j & 1)
            parts.append(q if not gens else gens if q == "1" else "%s*%s" % (q, gens))
        return " + ".join(parts)
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    return str(v)


def flatten(data, prefix: str = "") -> list:
    """[(path, leaf string)] in a deterministic order."""
    out = []
    if isinstance(data, dict) and "tower_coeffs" not in data:
        for k in sorted(data):
            out.extend(flatten(data[k], "%s.%s" % (prefix, k) if prefix else str(k)))
    elif isinstance(data, list) and data and all(isinstance(x, dict) and set(x) == {"index", "value"}
                                                 for x in data):
        for x in data:
            out.extend(flatten(x["value"], "%s[%s]" % (prefix, json.dumps(x["index"]))))
    elif isinstance(data, list) and any(isinstance(x, (dict, list)) for x in data):
        for i, x in enumerate(data):
            out.extend(flatten(x, "%s[%d]" % (prefix, i)))
    elif isinstance(data, list):
        out.append((prefix, "[" + ", ".join(_leaf(x) for x in data) + "]"))
    else:
        out.append((prefix, _leaf(data)))
    return out


def render_text(obj) -> str:
    rows = flatten(encode(obj))
    width = max((len(p) for p, _ in rows), default=0)
    return "".join("%-*s  %s\n" % (width, p, v) for p, v in rows)


def render_csv(obj) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["path", "value"])
    for row in flatten(encode(obj)):
        w.writerow(row)
    return buf.getvalue()
