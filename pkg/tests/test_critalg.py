import itertools
import math
from fractions import Fraction as F

import pytest
import sympy

from arrfrob.core import ArrangementFamily
from arrfrob.critalg import (
    MasterFunction,
    anchored_subsets,
    canonicalize,
    euler_residual,
    evaluate,
    evaluation_matrix,
    expected_critical_count,
    f_minor_value,
    identity_element,
    monomial_to_w,
    multiply,
    reduce_to_w_basis,
    residue_pairing_analytic,
    solve_critical,
    structural_pairing,
    w_value,
)
from arrfrob.osflag import CoVector


def test_f_minor_matches_sympy_det(fam_k2_n4, z_k2_n4=(F(0), F(1), F(3), F(7))):
    # oracle: det of the 3x3 matrix with rows (b_j | z_j)
    fam = fam_k2_n4
    for u in itertools.combinations(range(1, 5), 3):
        mat = sympy.Matrix(
            [
                list(map(int, fam.b[j - 1])) + [sympy.Rational(str(z_k2_n4[j - 1]))]
                for j in u
            ]
        )
        expect = sympy.Rational(mat.det())
        got = f_minor_value(fam, z_k2_n4, u)
        assert F(expect.p, expect.q) == got


def test_expected_counts():
    fam = ArrangementFamily(
        k=2,
        n=5,
        b=((1, 0), (0, 1), (1, 1), (1, 2), (2, 1)),
        a=(F(1), F(1), F(1), F(1), F(1)),
    )
    assert expected_critical_count(fam) == math.comb(4, 2)


def test_k1_frozen_roots(fam_k1_n3_unit, z_k1_n3):
    # for unit weights on z = (0, 1, 3) the critical equation is
    # 3 t^2 + 8 t + 3 = 0, so t = (-4 +- sqrt(7)) / 3
    pts = solve_critical(fam_k1_n3_unit, z_k1_n3)
    roots = sorted(p.t[0].real for p in pts)
    s7 = math.sqrt(7.0)
    assert abs(roots[0] - (-4 - s7) / 3) < 1e-12
    assert abs(roots[1] - (-4 + s7) / 3) < 1e-12
    for p in pts:
        assert abs(p.t[0].imag) < 1e-14


@pytest.mark.parametrize(
    "fixture,z",
    [
        ("fam_k1_n3", (F(0), F(1), F(3))),
        ("fam_k1_n4", (F(0), F(1), F(3), F(-2))),
        ("fam_k2_n4", (F(0), F(1), F(3), F(7))),
        ("fam_k2_n5", (F(0), F(1), F(3), F(7), F(-5))),
    ],
)
def test_counts_and_nondegeneracy(fixture, z, request):
    fam = request.getfixturevalue(fixture)
    pts = solve_critical(fam, z)
    assert len(pts) == expected_critical_count(fam)
    master = MasterFunction(fam, z)
    for p in pts:
        assert max(abs(g) for g in master.gradient(p.t)) < 1e-9
        assert abs(p.hessian) > 1e-10
        assert abs(p.hessian - master.hessian_det(p.t)) < 1e-8 * abs(p.hessian)
    assert euler_residual(fam, z, pts) < 1e-9


def test_coincident_planes_degenerate(fam_k1_n3):
    with pytest.raises((RuntimeError, ValueError)):
        solve_critical(fam_k1_n3, (F(0), F(0), F(3)))


def test_k2_clustered_spurious_roots():
    # regression: four line pairs meeting on a common vertical line give the
    # elimination resultant a multiplicity-4 root; solving must still find
    # the full critical set
    fam = ArrangementFamily(
        k=2,
        n=5,
        b=((1, 0), (0, 1), (1, 1), (1, 2), (2, 1)),
        a=(F(1, 2), F(3, 2), F(4), F(1, 4), F(1)),
    )
    z = (F(11, 5), F(-7, 3), F(-2, 5), F(-9, 4), F(4, 5))
    pts = solve_critical(fam, z)
    assert len(pts) == 6
    assert max(p.residual for p in pts) < 1e-9


def test_k3_not_solvable(fam_k3_n5):
    with pytest.raises(ValueError):
        solve_critical(fam_k3_n5, (F(0), F(1), F(2), F(3), F(4)))


def test_hessian_matches_numeric(fam_k2_n4):
    z = (F(0), F(1), F(3), F(7))
    master = MasterFunction(fam_k2_n4, z)
    t = (0.13, -0.41)
    h = 1e-6
    for m in range(2):
        for l in range(2):
            tp = list(t)
            tm = list(t)
            tp[l] += h
            tm[l] -= h
            numeric = (
                master.gradient(tuple(tp))[m] - master.gradient(tuple(tm))[m]
            ) / (2 * h)
            assert abs(master.hessian_matrix(t)[m][l] - numeric) < 1e-5


def _direct_monomial_value(fam, gens, point):
    val = complex(1)
    for g in gens:
        val *= complex(fam.a[g - 1]) / point.f_values[g - 1]
    return val


@pytest.mark.parametrize(
    "fixture,z",
    [
        ("fam_k1_n3", (F(0), F(1), F(3))),
        ("fam_k2_n4", (F(0), F(1), F(3), F(7))),
    ],
)
def test_reduction_consistent_at_critical_points(fixture, z, request):
    # the w-basis expansion of a degree-k monomial must agree with the
    # pointwise product of the generators at every critical point
    fam = request.getfixturevalue(fixture)
    pts = solve_critical(fam, z)
    for gens in itertools.combinations_with_replacement(range(1, fam.n + 1), fam.k):
        exps = {}
        for g in gens:
            exps[g] = exps.get(g, 0) + 1
        wvec = reduce_to_w_basis(fam, exps)
        for p in pts:
            direct = _direct_monomial_value(fam, gens, p)
            assert abs(evaluate(fam, wvec, p) - direct) < 1e-9 * max(
                1.0, abs(direct)
            )


@pytest.mark.parametrize(
    "fixture,z",
    [
        ("fam_k1_n4", (F(0), F(1), F(3), F(-2))),
        ("fam_k2_n5", (F(0), F(1), F(3), F(7), F(-5))),
        ("fam_k3_n5", (F(0), F(1), F(3), F(7), F(-5))),
    ],
)
def test_identity_two_routes_and_anchors(fixture, z, request):
    fam = request.getfixturevalue(fixture)
    # cross_check raises if the closed form and the reduced power disagree
    for anchor in (1, fam.n):
        identity_element(fam, z, anchor=anchor, cross_check=True)
    # the same element in two anchored charts
    id_1 = identity_element(fam, z, anchor=1)
    id_n = identity_element(fam, z, anchor=fam.n)
    assert canonicalize(fam, id_1, anchor=fam.n) == id_n


def test_identity_is_one_at_critical_points(fam_k2_n4):
    z = (F(0), F(1), F(3), F(7))
    ident = identity_element(fam_k2_n4, z)
    for p in solve_critical(fam_k2_n4, z):
        assert abs(evaluate(fam_k2_n4, ident, p) - 1) < 1e-9


def test_unit_property(fam_k2_n4):
    z = (F(0), F(1), F(3), F(7))
    fam = fam_k2_n4
    ident = identity_element(fam, z)
    for T in anchored_subsets(fam, fam.n):
        x = CoVector.basis(T)
        assert multiply(fam, z, ident, x) == canonicalize(fam, x)
        assert multiply(fam, z, x, ident) == canonicalize(fam, x)


def test_product_commutes_and_associates(fam_k2_n4):
    z = (F(0), F(1), F(3), F(7))
    fam = fam_k2_n4
    x = CoVector.basis((1, 2))
    y = CoVector.basis((1, 3)) * F(2) - CoVector.basis((2, 3))
    w = CoVector.basis((2, 3)) * F(1, 3)
    assert multiply(fam, z, x, y) == multiply(fam, z, y, x)
    lhs = multiply(fam, z, multiply(fam, z, x, y), w)
    rhs = multiply(fam, z, x, multiply(fam, z, y, w))
    assert lhs == rhs


def test_product_matches_pointwise(fam_k2_n4):
    z = (F(0), F(1), F(3), F(7))
    fam = fam_k2_n4
    pts = solve_critical(fam, z)
    x = CoVector.basis((1, 2))
    y = CoVector.basis((2, 3))
    prod = multiply(fam, z, x, y)
    for p in pts:
        direct = evaluate(fam, x, p) * evaluate(fam, y, p)
        assert abs(evaluate(fam, prod, p) - direct) < 1e-8 * max(1.0, abs(direct))


def test_structural_matches_analytic_pairing(fam_k2_n4):
    z = (F(0), F(1), F(3), F(7))
    fam = fam_k2_n4
    pts = solve_critical(fam, z)
    basis = anchored_subsets(fam, fam.n)
    for T in basis:
        for U in basis:
            x, y = CoVector.basis(T), CoVector.basis(U)
            exact = complex(structural_pairing(fam, x, y))
            analytic = residue_pairing_analytic(fam, z, x, y, points=pts)
            assert abs(exact - analytic) < 1e-8


def test_evaluation_matrix_invertible(fam_k2_n4):
    z = (F(0), F(1), F(3), F(7))
    pts = solve_critical(fam_k2_n4, z)
    mat, cond = evaluation_matrix(fam_k2_n4, pts)
    assert mat.shape == (3, 3)
    assert cond < 1e8


def test_monomial_to_w_long_and_short(fam_k1_n3, z_k1_n3):
    fam = fam_k1_n3
    pts = solve_critical(fam, z_k1_n3)
    # a 3-factor monomial for k=1 (two extra products) and the empty monomial
    long = monomial_to_w(fam, z_k1_n3, (1, 2, 3))
    for p in pts:
        direct = _direct_monomial_value(fam, (1, 2, 3), p)
        assert abs(evaluate(fam, long, p) - direct) < 1e-9
    assert monomial_to_w(fam, z_k1_n3, ()) == identity_element(fam, z_k1_n3)


def test_w_value_scales_with_minor(fam_k2_n4):
    z = (F(0), F(1), F(3), F(7))
    p = solve_critical(fam_k2_n4, z)[0]
    fam = fam_k2_n4
    val = w_value(fam, (1, 2), p)
    expect = complex(fam.minor((1, 2))) * _direct_monomial_value(fam, (1, 2), p)
    assert abs(val - expect) < 1e-12 * max(1.0, abs(expect))
