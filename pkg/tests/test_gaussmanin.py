from fractions import Fraction as F

import pytest

from arrfrob.core import sample_good_point
from arrfrob.critalg import monomial_to_w
from arrfrob.gaussmanin import (
    apply_matrix,
    check_conformal_block,
    check_flatness,
    check_symmetry_and_invariance,
    derivative_sections,
    discriminant_min,
    flow_flat_section,
    invariance_residual,
    k_operator,
    k_operator_minor_form,
    pairing_functional,
    symmetry_residual,
    weighted_euler_residual,
)
from arrfrob.osflag import (
    FlagVector,
    contravariant_pairing,
    max_abs_diff,
    singular_subspace,
    v_vector,
)


def test_operator_routes_agree(fam_k2_n4):
    z = (F(0), F(1), F(3), F(7))
    for j in range(1, 5):
        assert k_operator(fam_k2_n4, z, j) == k_operator_minor_form(fam_k2_n4, z, j)


def test_operator_routes_agree_k1(fam_k1_n4):
    z = (F(0), F(1), F(3), F(-2))
    for j in range(1, 5):
        assert k_operator(fam_k1_n4, z, j) == k_operator_minor_form(fam_k1_n4, z, j)


def test_operator_rejects_bad_fiber(fam_k1_n3):
    with pytest.raises(ValueError):
        k_operator(fam_k1_n3, (F(0), F(0), F(3)), 1)
    with pytest.raises(ValueError):
        k_operator(fam_k1_n3, (F(0), F(1), F(3)), 4)


def test_symmetry_and_invariance(fam_k2_n4):
    report = check_symmetry_and_invariance(fam_k2_n4, (F(0), F(1), F(3), F(7)))
    assert report["passed"]
    assert all(op["symmetric"] and op["invariant"] for op in report["operators"])


def test_symmetry_negative_control(fam_k2_n4):
    dim = len(fam_k2_n4.flag_index)
    mat = [[F(0)] * dim for _ in range(dim)]
    mat[0][1] = F(1)
    assert symmetry_residual(fam_k2_n4, mat) > 0
    one_corner = [[F(0)] * dim for _ in range(dim)]
    one_corner[0][0] = F(1)
    assert invariance_residual(fam_k2_n4, one_corner) > 0


@pytest.mark.parametrize("fixture", ["fam_k1_n4", "fam_k2_n4"])
def test_flatness_exact(fixture, request):
    fam = request.getfixturevalue(fixture)
    z = sample_good_point(fam, seed=5).z
    report = check_flatness(fam, z)
    assert report["passed"]
    assert report["curl_exact_zero"]
    assert report["commutator_singular_exact_zero"]


def test_weighted_euler(fam_k2_n4):
    for seed in range(3):
        z = sample_good_point(fam_k2_n4, seed=seed).z
        assert weighted_euler_residual(fam_k2_n4, z) == 0


def test_apply_matrix_matches_coordinates(fam_k1_n3, z_k1_n3):
    mat = k_operator(fam_k1_n3, z_k1_n3, 1)
    vec = v_vector(fam_k1_n3, (2,))
    image = apply_matrix(fam_k1_n3, mat, vec)
    cols = vec.to_coordinates(fam_k1_n3.flag_index)
    for p, subset in enumerate(fam_k1_n3.flag_index):
        expect = sum(mat[p][q] * cols[q] for q in range(len(cols)))
        assert image.get(subset) == expect


def test_k_operator_preserves_singular(fam_k2_n5):
    z = sample_good_point(fam_k2_n5, seed=2).z
    space = singular_subspace(fam_k2_n5)
    for j in range(1, 6):
        mat = k_operator(fam_k2_n5, z, j)
        for vec in space.basis:
            assert space.contains(apply_matrix(fam_k2_n5, mat, vec))


# ---------------------------------------------------------------------------
# transport


def _loop_path(z0, radius):
    z0 = list(z0)
    d = radius

    def shift(dx):
        out = list(z0)
        out[0] = complex(out[0]) + dx
        return tuple(out)

    return [
        tuple(z0),
        shift(d),
        shift(d + 1j * d),
        shift(1j * d),
        tuple(z0),
    ]


def test_loop_returns_start(fam_k1_n3, z_k1_n3):
    start = v_vector(fam_k1_n3, (1,))
    path = _loop_path(z_k1_n3, 0.25)
    result = flow_flat_section(fam_k1_n3, path, kappa=17.0, start=start)
    assert max_abs_diff(result.section, start) < 1e-9
    assert result.steps > 0


def test_flow_accepts_raw_coordinates(fam_k1_n3, z_k1_n3):
    start = v_vector(fam_k1_n3, (1,))
    path = [z_k1_n3, (F(1, 2), F(1), F(3))]
    a = flow_flat_section(fam_k1_n3, path, kappa=3.0, start=start)
    b = flow_flat_section(
        fam_k1_n3,
        path,
        kappa=3.0,
        start=start.to_coordinates(fam_k1_n3.flag_index),
    )
    assert max_abs_diff(a.section, b.section) == 0.0


def test_guard_trips_on_discriminant_crossing(fam_k1_n3):
    start = v_vector(fam_k1_n3, (1,))
    with pytest.raises(RuntimeError, match="discriminant"):
        flow_flat_section(
            fam_k1_n3, [(0, 1, 3), (2, 1, 3)], kappa=5.0, start=start
        )


def test_flow_needs_two_waypoints(fam_k1_n3, z_k1_n3):
    with pytest.raises(ValueError):
        flow_flat_section(
            fam_k1_n3, [z_k1_n3], kappa=1.0, start=FlagVector.zero()
        )
    with pytest.raises(ValueError):
        flow_flat_section(
            fam_k1_n3, [z_k1_n3, z_k1_n3], kappa=0, start=FlagVector.zero()
        )


def test_extras_quadrature(fam_k1_n3, z_k1_n3):
    path = [z_k1_n3, (F(1, 2), F(1), F(3))]
    result = flow_flat_section(
        fam_k1_n3,
        path,
        kappa=2.0,
        start=FlagVector.zero(),
        extras=(lambda s, z, zdot, flag: 1.0,),
    )
    assert abs(result.extras[0] - 1.0) < 1e-10


def test_trajectory_format(fam_k1_n3, z_k1_n3):
    path = [z_k1_n3, (F(1, 2), F(1), F(3))]
    result = flow_flat_section(
        fam_k1_n3, path, kappa=2.0, start=v_vector(fam_k1_n3, (1,)), record=True
    )
    assert len(result.trajectory) == result.steps + 1
    row = result.trajectory[0]
    assert row["s"] == 0.0
    assert len(row["z"]) == 3 and all(len(pair) == 2 for pair in row["z"])
    assert len(row["I"]) == len(fam_k1_n3.flag_index)
    assert result.trajectory[-1]["s"] == pytest.approx(1.0)


def test_pairing_functional(fam_k2_n4):
    import numpy as np

    u = v_vector(fam_k2_n4, (1, 2))
    w = v_vector(fam_k2_n4, (2, 3)) * F(3, 2)
    fixed = pairing_functional(fam_k2_n4, u)
    coords = np.array(
        [complex(c) for c in w.to_coordinates(fam_k2_n4.flag_index)]
    )
    assert abs(
        fixed @ coords - complex(contravariant_pairing(u, w, fam_k2_n4))
    ) < 1e-12


def test_conformal_section_is_flat_under_transport(fam_k1_n3, z_k1_n3):
    from arrfrob.frobenius import period_map

    fam = fam_k1_n3
    z1 = (F(1, 2), F(3, 2), F(7, 2))
    q0 = period_map(fam, z_k1_n3)
    q1 = period_map(fam, z1)
    result = flow_flat_section(
        fam,
        [z_k1_n3, (F(1, 2), F(1), F(3)), z1],
        kappa=complex(fam.weight_sum) / fam.k,
        start=q0,
    )
    assert max_abs_diff(result.section, q1) < 1e-9


def test_discriminant_min(fam_k1_n3, z_k1_n3):
    assert discriminant_min(fam_k1_n3, z_k1_n3) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# conformal block and derivative sections


@pytest.mark.parametrize("fixture", ["fam_k1_n4", "fam_k2_n4", "fam_k3_n5"])
def test_conformal_block(fixture, request):
    fam = request.getfixturevalue(fixture)
    for seed in range(2):
        z = sample_good_point(fam, seed=seed).z
        assert check_conformal_block(fam, z)


def test_derivative_sections_routes_agree(fam_k2_n4):
    fam = fam_k2_n4
    z = sample_good_point(fam, seed=7).z
    for directions in [(1,), (3,), (1, 2), (2, 2), (4, 1)]:
        symbolic, algebraic = derivative_sections(fam, z, directions)
        assert symbolic == algebraic


def test_derivative_sections_vanish_past_degree(fam_k2_n4):
    z = sample_good_point(fam_k2_n4, seed=9).z
    symbolic, algebraic = derivative_sections(fam_k2_n4, z, (1, 2, 3))
    assert symbolic.is_zero()
    assert algebraic.is_zero()


def test_first_derivative_is_scaled_image(fam_k1_n3, z_k1_n3):
    from arrfrob.frobenius import alpha_structural

    fam = fam_k1_n3
    symbolic, algebraic = derivative_sections(fam, z_k1_n3, (2,))
    wvec = monomial_to_w(fam, z_k1_n3, (2,))
    expect = alpha_structural(fam, wvec) * (F(fam.k) / fam.weight_sum)
    assert symbolic == expect
