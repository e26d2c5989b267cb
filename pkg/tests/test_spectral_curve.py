from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hurwitz_tr.curve import (analyze, bergman_expand, compatibility_test, dominance_check,
                              evaluate_differential, parse_curve_spec)
from hurwitz_tr.errors import AdmissibilityError, DegeneracyError
from hurwitz_tr.frobenius import contours
from hurwitz_tr.poly import RationalFunction
from hurwitz_tr.series import Laurent

from oracles import schwarzian_over_6, scalar_to_sympy, z

RF = RationalFunction.from_ints
ZINV = RF([1, 0, 1], [0, 1])


def _series_eq_sympy(ser: Laurent, expr, var, n):
    got = sum(scalar_to_sympy(ser.coeff(k)) * var ** k for k in range(n))
    want = sp.series(expr, var, 0, n).removeO()
    return sp.simplify(sp.expand(got - want)) == 0


def test_airy_chart(airy):
    assert airy.N == 1 and airy.u == [0]
    ch = airy.charts[0]
    assert ch.a == 0 and ch.branch_sign == 1
    assert ch.zeta_series(6) == Laurent.monomial(1, 1, 6)
    assert ch.sigma_series(6) == Laurent.monomial(-1, 1, 6)


def test_zinv_branch_points(zinv):
    assert [ch.a for ch in zinv.charts] == [1, -1]
    assert zinv.u == [2, -2]
    assert zinv.mu == (1, 1)


def test_cubic_branch_points(cubic):
    assert [ch.a for ch in cubic.charts] == [1, -1]
    assert cubic.u == [Fraction(-2, 3), Fraction(2, 3)]


def test_triple_zero_is_degenerate():
    with pytest.raises(DegeneracyError):
        analyze(RF([0, 0, 0, 1]), RF([1]))


@pytest.mark.parametrize("dy", [RF([-1, 1]), RF([1], [-1, 1])])
def test_dy_must_be_regular_and_nonzero(dy):
    with pytest.raises(AdmissibilityError):
        analyze(ZINV, dy)


def test_evaluate_dz(zinv, airy):
    assert evaluate_differential(airy, airy.dy, 0) == 1
    v = evaluate_differential(zinv, zinv.dy, 0)
    assert v * v == Fraction(1, 2)
    assert abs(v.numeric() - 2 ** -0.5) < 1e-12


def test_evaluate_dx_vanishes(any_curve):
    assert all(evaluate_differential(any_curve, any_curve.dx, i) == 0 for i in range(any_curve.N))


def test_airy_diagonal_kernel_is_pure_pole(airy):
    assert all(v == 0 for v in bergman_expand(airy, 0, 0, 5).values())
    assert airy.bergman_column(0, 0) == RF([1], [0, 0, 1])


def test_bergman_symmetry(zinv, cubic):
    for curve in (zinv, cubic):
        a, b = bergman_expand(curve, 0, 1, 4), bergman_expand(curve, 1, 0, 4)
        assert all(a[(k, l)] == b[(l, k)] for k in range(4) for l in range(4))
        d = bergman_expand(curve, 0, 0, 4)
        assert all(d[(k, l)] == d[(l, k)] for k in range(4) for l in range(4))


@pytest.mark.parametrize("name,x,points", [
    ("airy", z ** 2 / 2, [0]), ("zinv", z + 1 / z, [1, -1]), ("cubic", z ** 3 / 3 - z, [1, -1])])
def test_kernel_diagonal_is_schwarzian(request, name, x, points):
    curve = request.getfixturevalue(name)
    for i, a in enumerate(points):
        assert scalar_to_sympy(curve.B_coefficient(i, i, 0, 0)) == schwarzian_over_6(x, a)


def test_kernel_between_branch_points(cubic, zinv):
    # B(P_i, P_j) = 1 / ((a_i - a_j)^2 s_i s_j) with s = dzeta/dz at the branch point
    for curve in (cubic, zinv):
        s0, s1 = curve.charts[0].branch_sign, curve.charts[1].branch_sign
        assert curve.B_at(0, 1) == (s0 * s1 * 4).inverse()


def test_chart_invariants(any_curve):
    for ch in any_curve.charts:
        n = 8
        zeta, t, sig = ch.zeta_series(n), ch.t_series(n), ch.sigma_series(n)
        assert zeta.coeff(1) == ch.branch_sign
        # x(a + t(zeta)) = u + zeta^2 / 2
        xt = any_curve.x.expand_at(ch.a, n).compose(t)
        want = Laurent(0, [ch.u, 0, Fraction(1, 2)], n)
        assert xt == want
        assert sig.compose(sig) == Laurent.monomial(1, 1, n)
        assert sig.coeff(1) == -1
        assert t.flip() == sig.compose(t)
        assert any_curve.x.expand_at(ch.a, n).compose(sig) == any_curve.x.expand_at(ch.a, n)


def test_involution_against_sympy(cubic):
    # sigma at z = 1 for x = z^3/3 - z: the other root of x(w) = x(z)
    t = sp.Symbol("t")
    other = (-(1 + t) + sp.sqrt(12 - 3 * (1 + t) ** 2)) / 2 - 1
    assert _series_eq_sympy(cubic.charts[0].sigma_series(6), other, t, 6)


def test_dominance_examples(airy):
    assert dominance_check(airy)
    assert not dominance_check(analyze(ZINV, RF([0, 0, 1])))
    assert dominance_check(analyze(ZINV, RF([1], [0, 1])))


@pytest.mark.parametrize("m,expected", [(-1, True), (0, True), (1, False), (2, False), (3, False)])
def test_zinv_compatibility(m, expected):
    dy = RF([1], [0, 1]) if m < 0 else RF([0] * m + [1])
    rep = compatibility_test(analyze(ZINV, dy))
    assert bool(rep) is expected
    assert (rep.witness is None) is expected


def test_airy_compatibility_form_vanishes(airy):
    rep = compatibility_test(airy)
    assert rep and rep.omega.is_zero()


@settings(max_examples=12, deadline=None)
@given(st.sampled_from([1, 4, 9, 2]), st.integers(-3, 3), st.integers(-3, 3))
def test_dominant_curves_are_compatible(a, b, c):
    # x = z^3/3 - a z, dy = (b + c z) dz is dominant at infinity (order 3 <= 4)
    assume(b * b != a * c * c)
    curve = analyze(RF([0, -3 * a, 0, 1], [3]), RF([b, c]), order=8)
    assert dominance_check(curve)
    assert compatibility_test(curve)


def test_contour_count_equals_N(any_curve):
    assert len(contours(any_curve)) == any_curve.N


def test_curve_text_parsing_errors():
    with pytest.raises(ValueError):
        parse_curve_spec("x_num =\ndy_num = 1\n")
    with pytest.raises(ValueError):
        parse_curve_spec("x_num = 1 a\ndy_num = 1\n")
    with pytest.raises(ValueError):
        parse_curve_spec("x_num = 1 1\n")
    spec = parse_curve_spec("# comment\nx_num = 0, 0, 1\nx_den = 2\ndy_num = 1\n")
    assert spec["x_num"] == [0, 0, 1] and spec["dy_den"] == [1]
