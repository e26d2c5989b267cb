from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from hurwitz_tr.frobenius import contours, flat_coordinates, flat_metric, three_point_table
from hurwitz_tr.invariants import (ancestor_invariants, ancestor_two_route, biorthogonality_matrix,
                                   local_primitive, pairing_lemma_check, pair_contour, pair_form,
                                   pk_polynomials, primary_invariants, string_table_check)
from hurwitz_tr.poly import Poly
from hurwitz_tr.recursion import omega, v_basis
from hurwitz_tr.scalar import as_scalar
from hurwitz_tr.suite import curve_from_text

from oracles import wk

P1_MIRROR = "x_num = 1 0 1\nx_den = 0 1\ndy_num = 1\ndy_den = 0 1\n"


def _stable(max_weight):
    return [(g, n) for g in range(3) for n in range(1, 7) if 0 < 2 * g - 2 + n <= max_weight]


@pytest.fixture(scope="module")
def p1():
    return curve_from_text(P1_MIRROR)


def test_pairing_lemma(any_curve):
    rep = pairing_lemma_check(any_curve, 3)
    assert rep["passed"], rep["mismatch"]


def test_pairing_ignores_primitive_constant(cubic):
    f = omega(cubic, 1, 1).to_rational()
    phi = flat_metric(cubic).phi[0]
    base = pair_form(cubic, phi, f)
    shifted = as_scalar(0)
    for i, ch in enumerate(cubic.charts):
        prim = local_primitive(cubic, phi, i, 6) + as_scalar(Fraction(7, 3))
        shifted = shifted + (prim * ch.expand(f, 6)).coeff(-1)
    assert shifted == base


def test_pair_contour_slot(zinv):
    C = contours(zinv)[0]
    corr = omega(zinv, 0, 3)
    a, b = pair_contour(corr, C, 0), pair_contour(corr, C, 2)
    assert a == b


def test_airy_primary_03_every_basis(airy):
    for basis in ("flat", "dual", "canonical"):
        assert primary_invariants(airy, 0, 3, basis).nonzero() == {((0, 0),) * 3: 1}


def test_flat_table_is_psi_contraction_of_canonical(any_curve):
    psi = flat_metric(any_curve).psi
    can = primary_invariants(any_curve, 0, 3, "canonical")
    flat = primary_invariants(any_curve, 0, 3, "flat")
    N = any_curve.N
    for al in itertools.product(range(N), repeat=3):
        acc = as_scalar(0)
        for ii in itertools.product(range(N), repeat=3):
            acc = acc + can[tuple((i, 0) for i in ii)] * psi[ii[0]][al[0]] * psi[ii[1]][al[1]] * psi[ii[2]][al[2]]
        assert flat[tuple((a, 0) for a in al)] == acc


def test_03_table_is_three_point(any_curve):
    flat = primary_invariants(any_curve, 0, 3, "flat")
    for key, v in three_point_table(any_curve).items():
        assert flat[tuple((a, 0) for a in key)] == v


def test_table_symmetry(cubic):
    tab = ancestor_invariants(cubic, 0, 4)
    for key, v in tab.nonzero().items():
        for perm in itertools.permutations(key):
            assert tab[perm] == v


def test_p0_is_constant(any_curve):
    for a in range(any_curve.N):
        for frame in ("canonical", "flat"):
            W = pk_polynomials(any_curve, a, 2, frame)[0]
            assert all(d == 0 for _, d, _ in W.terms)


def test_airy_pk(airy):
    polys = [W.polynomials()["type1(1,1)"] for W in pk_polynomials(airy, 0, 3)]
    assert polys[:3] == [Poly([1]), Poly([0, Fraction(-2, 3)]), Poly([0, 0, Fraction(4, 15)])]
    assert [p.degree for p in polys] == [0, 1, 2, 3]


def test_cubic_p1(cubic):
    r0 = cubic.charts[0].branch_sign
    W = pk_polynomials(cubic, 0, 1)[1].polynomials()
    assert W == {"type1(1,1)": Poly([-r0 / 2, -r0 * Fraction(3, 4)]),
                 "type1(1,2)": Poly([-r0 / 2, -r0 * Fraction(3, 10)])}


def test_airy_weighted_pairing_integration_by_parts(airy):
    # C[x V^1] = -3/2 C[V^0]: the weight x^{1/2} of the type-1 contour is differentiated too
    C = contours(airy)[0]
    lhs = C.value(airy, v_basis(airy, 0, 1), airy.x)
    rhs = C.value(airy, v_basis(airy, 0, 0))
    assert rhs == 1 and lhs == Fraction(-3, 2) * rhs


@pytest.mark.parametrize("frame", ["canonical", "flat"])
def test_biorthogonality(any_curve, frame):
    psi = flat_metric(any_curve).psi
    for ((a, k), (j, m)), v in biorthogonality_matrix(any_curve, 3, frame).items():
        if frame == "canonical":
            want = 1 if (a == j and k == m) else 0
        else:
            want = psi[j][a] if k == m else 0
        assert v == want


def test_airy_ancestors(airy):
    assert ancestor_invariants(airy, 1, 1).nonzero() == {((0, 1),): Fraction(-1, 24)}
    t04 = ancestor_invariants(airy, 0, 4)
    assert t04[((0, 1), (0, 0), (0, 0), (0, 0))] == -1
    assert all(v == 0 for k, v in t04.entries.items() if sum(m for _, m in k) > 1)


@pytest.mark.parametrize("g,n", _stable(4))
def test_airy_matches_witten_kontsevich(airy, g, n):
    tab = ancestor_invariants(airy, g, n)
    sign = (-1) ** (3 * g - 3 + n)
    for ks in itertools.combinations_with_replacement(range(3 * g - 2 + n), n):
        key = tuple((0, k) for k in ks)
        want = wk(g, ks) * sign if sum(ks) == 3 * g - 3 + n else 0
        assert tab[key] == want


@pytest.mark.parametrize("g,n", [(0, 4), (1, 1), (1, 2), (2, 1)])
def test_dimension_bound(any_curve, g, n):
    tab = ancestor_invariants(any_curve, g, n, k_max=3 * g - 3 + n + 1)
    assert all(sum(k for _, k in key) <= 3 * g - 3 + n for key in tab.nonzero())


def test_frozen_genus_one(zinv, cubic):
    assert ancestor_invariants(zinv, 1, 1).nonzero() == {((0, 0),): Fraction(-1, 12), ((1, 1),): Fraction(-1, 12)}
    assert ancestor_invariants(cubic, 1, 1).nonzero() == {((1, 1),): Fraction(-1, 12)}
    assert ancestor_invariants(cubic, 1, 1, basis="dual").nonzero() == {((0, 1),): Fraction(-1, 24)}


def test_p1_mirror_gromov_witten(p1):
    # x = z + 1/z with dy = dz/z: quantum cohomology of P^1 at q = 1; flat index 0 is the unit,
    # index 1 the point class.  Entries carry (-1)^{sum k}.
    assert three_point_table(p1) == {(0, 0, 0): 0, (0, 0, 1): 1, (0, 1, 1): 0, (1, 1, 1): 1}
    assert ancestor_invariants(p1, 1, 1).nonzero() == {((1, 0),): Fraction(-1, 24), ((0, 1),): Fraction(-1, 12)}
    t = ancestor_invariants(p1, 0, 4).nonzero()
    assert t[((1, 0),) * 4] == 1
    assert t[((0, 0), (0, 0), (0, 0), (1, 1))] == -1
    assert t[((0, 1), (1, 0), (1, 0), (1, 0))] == -1
    assert len(t) == 5
    assert {d["contour"]: d["ambiguous"] for d in flat_coordinates(p1)}["type3(2)"] is True


@pytest.mark.parametrize("g,n", _stable(3))
@pytest.mark.parametrize("basis", ["flat", "canonical"])
def test_two_routes(any_curve, g, n, basis):
    rep = ancestor_two_route(any_curve, g, n, basis)
    assert rep["passed"], rep["mismatch"]


@pytest.mark.parametrize("g,n", [(0, 3), (1, 1), (1, 2)])
def test_string_equation_on_tables(any_curve, g, n):
    rep = string_table_check(any_curve, g, n)
    assert rep["passed"], rep["mismatch"]
    assert rep["sign"] == -1
