from __future__ import annotations

from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from hurwitz_tr.errors import (DegenerateRootError, PreconditionError, SingularJacobianError,
                               TruncationDeficit)
from hurwitz_tr.poly import Poly, RationalFunction
from hurwitz_tr.scalar import QQ, Scalar, adjoin_sqrt, as_scalar, sqrt_in_tower
from hurwitz_tr.series import Jet1, Laurent, residue, series_solve

T2, R2 = adjoin_sqrt(QQ, 2)
T23, R3 = adjoin_sqrt(T2, 3)
T_NEST, R_NEST = adjoin_sqrt(T23, 1 + R2)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def tower_elements(draw, tower=T_NEST):
    coeffs = {}
    for m in range(1 << tower.depth):
        q = draw(rationals)
        if q:
            coeffs[m] = mpq(q.numerator, q.denominator)
    return Scalar(tower, coeffs)


def _laurent(coeffs, val=0, prec=None):
    prec = val + len(coeffs) if prec is None else prec
    return Laurent(val, [as_scalar(Fraction(c)) for c in coeffs], prec)


# towers

def test_sqrt2_squares_to_radicand():
    assert R2 * R2 == 2
    assert T2.depth == 1


def test_perfect_square_adds_no_level():
    t, r = adjoin_sqrt(QQ, 4)
    assert t is QQ and r == 2


def test_sqrt_minus2_over_sqrt2():
    t, r = adjoin_sqrt(T2, -2)
    assert t.depth == 2
    assert r * r == -2
    assert (r * R2) ** 2 == -4


def test_zero_radicand_rejected():
    with pytest.raises(DegenerateRootError):
        adjoin_sqrt(QQ, 0)


def test_square_detected_in_tower():
    # 3 + 2 sqrt2 = (1 + sqrt2)^2
    root = sqrt_in_tower(3 + 2 * R2)
    assert root is not None and root * root == 3 + 2 * R2
    assert sqrt_in_tower(R2) is None


def test_nested_radical():
    assert R_NEST * R_NEST == 1 + R2
    assert abs(R_NEST.numeric() - (1 + 2 ** 0.5) ** 0.5) < 1e-12


@settings(max_examples=60, deadline=None)
@given(tower_elements(), tower_elements(), tower_elements())
def test_field_axioms(a, b, c):
    assert (a + b) - b == a
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == 1
        assert (b / a) * a == b


@settings(max_examples=40, deadline=None)
@given(tower_elements(T23), tower_elements(T23))
def test_numeric_is_a_ring_map(a, b):
    assert abs((a * b).numeric() - a.numeric() * b.numeric()) < 1e-6 * (1 + abs(a.numeric() * b.numeric()))


# series_solve

def test_series_solve_binomial():
    w = series_solve(lambda w, s: w * w - (s + 1), 1, 3)
    assert [w.coeff(k) for k in range(3)] == [1, Fraction(1, 2), Fraction(-1, 8)]


def test_series_solve_identity():
    w = series_solve(lambda w, s: w - s, 0, 5)
    assert [w.coeff(k) for k in range(5)] == [0, 1, 0, 0, 0]


def test_series_solve_bad_seed():
    with pytest.raises(PreconditionError):
        series_solve(lambda w, s: w + s, 1, 3)


def test_series_solve_singular_jacobian():
    with pytest.raises(SingularJacobianError):
        series_solve(lambda w, s: w * w - s, 0, 3)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=2, max_size=3), st.lists(st.integers(-5, 5), min_size=1, max_size=4),
       st.integers(3, 8))
def test_series_solve_round_trip(ws, qs, order):
    # F(w, s) = w + sum ws_j w^{j+2} - s q(s), root w(0) = 0 with unit Jacobian
    def F(w, s):
        acc = w
        p = w * w
        for c in ws:
            acc = acc + p * as_scalar(c)
            p = p * w
        q = Laurent(0, [as_scalar(c) for c in qs], order)
        return acc - s * q
    sol = series_solve(F, 0, order)
    back = F(sol, Laurent.monomial(as_scalar(1), 1, order))
    assert back.prec >= order and back.is_zero_to_prec()


# residue

def test_residue_simple_pole():
    assert residue(Laurent.monomial(as_scalar(1), -1, 3)) == 1


def test_residue_double_pole():
    assert residue(Laurent.monomial(as_scalar(1), -2, 3)) == 0


def test_residue_geometric():
    f = RationalFunction(Poly([1]), Poly([0, 1, -1]))
    assert residue(f.expand_at(0, 2)) == 1


def test_residue_window_excludes_minus_one():
    with pytest.raises(TruncationDeficit):
        residue(Laurent(-3, [as_scalar(1)], -1))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=1, max_size=8), st.integers(-4, 2))
def test_residue_of_exact_form_vanishes(cs, val):
    g = _laurent(cs, val)
    if g.prec - 1 > -1:
        assert residue(g.deriv()) == 0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=2, max_size=6), st.lists(st.integers(-9, 9), min_size=2, max_size=6),
       st.integers(-3, 1))
def test_residue_is_linear(a, b, val):
    fa, fb = _laurent(a, val, 2), _laurent(b, val, 2)
    assert residue(fa + fb.scale(as_scalar(3))) == residue(fa) + 3 * residue(fb)


# Laurent arithmetic

@settings(max_examples=50, deadline=None)
@given(st.integers(1, 9), st.lists(st.integers(-9, 9), min_size=1, max_size=7), st.integers(-3, 3))
def test_inverse_round_trip(lead, rest, val):
    f = _laurent([lead] + rest, val)
    prod = f * f.inverse()
    assert prod.prec == len(rest) + 1
    assert prod == Laurent.monomial(as_scalar(1), 0, prod.prec)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([1, 4, 9]), st.lists(st.integers(-9, 9), max_size=6), st.integers(-2, 2))
def test_sqrt_squares_back(lead, rest, half):
    f = _laurent([lead] + rest, 2 * half)
    r = f.sqrt()
    assert r * r == f


def test_sqrt_odd_valuation_rejected():
    with pytest.raises(PreconditionError):
        _laurent([1, 1], 1).sqrt()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=5), st.lists(st.integers(-5, 5), min_size=1, max_size=4),
       st.lists(st.integers(-5, 5), min_size=1, max_size=4))
def test_compose_associative(fc, gc, hc):
    f = _laurent(fc)
    g = _laurent([1] + gc, 1)
    h = _laurent([1] + hc, 1)
    assert f.compose(g.compose(h)) == f.compose(g).compose(h)


def test_compose_needs_positive_valuation():
    with pytest.raises(PreconditionError):
        _laurent([1, 1]).compose(_laurent([1, 1]))


def test_precision_never_padded():
    f = _laurent([1, 2, 3])
    with pytest.raises(TruncationDeficit):
        f.coeff(3)
    with pytest.raises(TruncationDeficit):
        f.truncate(5)
    assert (f * _laurent([1, 1, 1, 1, 1])).prec == 3


# dual numbers

@settings(max_examples=40, deadline=None)
@given(rationals, rationals, rationals, rationals)
def test_jet_ring_law(a, b, c, d):
    x = Jet1(as_scalar(a), as_scalar(b)) * Jet1(as_scalar(c), as_scalar(d))
    assert x.a == a * c and x.b == a * d + b * c
    eps = Jet1(as_scalar(0), as_scalar(1))
    sq = eps * eps
    assert sq.a == 0 and sq.b == 0


def test_rational_function_normalised():
    f = RationalFunction(Poly([-1, 0, 1]), Poly([-2, 2, 0, 0]))
    assert f.den == Poly([1]) and f.num == Poly([Fraction(1, 2), Fraction(1, 2)])
    g = RationalFunction(Poly([1, 1]), Poly([-2, 0, 2]))
    assert g.den == Poly([-1, 1]) and g.num == Poly([Fraction(1, 2)])
    assert g(3) == Fraction(1, 4)
