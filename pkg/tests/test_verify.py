import numpy as np
import pytest

from trielast.mesh import build_unit_square_mesh
from trielast.verify import (check_div_inclusion, check_hdiv_conformity,
                             discrete_infsup_estimate, outer_product_triple_determinant,
                             local_divergence_rank, rigid_motion_orthogonality,
                             run_all)

EXPECTED_RANK_NULLITY = {3: (9, 0), 4: (17, 1), 5: (27, 3)}


def random_triangle(rng, min_area=0.05):
    while True:
        v = rng.uniform(0.0, 1.0, size=(3, 2))
        d1, d2 = v[1] - v[0], v[2] - v[0]
        area = 0.5 * (d1[0] * d2[1] - d1[1] * d2[0])
        if area < -min_area:
            return v[[0, 2, 1]]
        if area > min_area:
            return v


# ---------------------------------------------------------------- conformity

@pytest.mark.parametrize("k", [3, 4, 5])
def test_conformity_on_level2(k):
    report = check_hdiv_conformity(build_unit_square_mesh(2), k)
    assert report.passed
    assert report.metric <= 1e-12


def test_conformity_negative_controls():
    mesh = build_unit_square_mesh(2)
    flipped = check_hdiv_conformity(mesh, 3, corrupt="flux-sign")
    assert not flipped.passed
    assert flipped.metric > 1e-3
    swapped = check_hdiv_conformity(mesh, 3, corrupt="bubble-direction")
    assert not swapped.passed


def test_conformity_reports_worst_pair():
    mesh = build_unit_square_mesh(2)
    report = check_hdiv_conformity(mesh, 3, corrupt="flux-sign")
    assert report.detail["worst_edge"] in mesh.interior_edges()
    assert report.detail["worst_function"] is not None


# ---------------------------------------------------------------- div inclusion

@pytest.mark.parametrize("k", [3, 4, 5])
def test_div_inclusion(k):
    report = check_div_inclusion(build_unit_square_mesh(2), k)
    assert report.passed
    assert report.metric <= 1e-12


def test_div_inclusion_negative_control():
    report = check_div_inclusion(build_unit_square_mesh(1), 3,
                                 projection_degree=1)
    assert not report.passed
    assert report.metric > 1e-3


# ---------------------------------------------------------------- local rank

@pytest.mark.parametrize("k", [3, 4, 5])
def test_local_divergence_rank_on_random_triangles(k):
    rng = np.random.default_rng(100 + k)
    for _ in range(10):
        tri = random_triangle(rng)
        assert local_divergence_rank(k, tri) == EXPECTED_RANK_NULLITY[k]


def test_local_divergence_rank_rejects_degenerate():
    with pytest.raises(ValueError):
        local_divergence_rank(3, np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))


# ---------------------------------------------------------------- rigid motions

@pytest.mark.parametrize("k", [3, 4, 5])
def test_rigid_motion_orthogonality(k):
    rng = np.random.default_rng(7)
    for _ in range(5):
        report = rigid_motion_orthogonality(k, random_triangle(rng))
        assert report.passed


def test_rigid_motion_negative_control():
    rng = np.random.default_rng(8)
    report = rigid_motion_orthogonality(3, random_triangle(rng), non_bubble=True)
    assert not report.passed


# ---------------------------------------------------------------- inf-sup

def test_infsup_positive_and_stable():
    betas = [discrete_infsup_estimate(build_unit_square_mesh(level), 3)
             for level in (1, 2, 3)]
    assert all(b > 0 for b in betas)
    assert betas[2] / betas[0] >= 0.5


def test_infsup_k4_level1():
    assert discrete_infsup_estimate(build_unit_square_mesh(1), 4) > 0


def test_infsup_dense_cap():
    with pytest.raises(ValueError, match="dense cap"):
        discrete_infsup_estimate(build_unit_square_mesh(5), 3)


# ------------------------------------------------- outer-product determinant

def test_outer_product_determinant_unit_vectors():
    assert outer_product_triple_determinant((1.0, 0.0), (0.0, 1.0)) == pytest.approx(1.0)


def test_outer_product_determinant_hand_example():
    # (a1 b2 - a2 b1)^3 = (4 - 6)^3 = -8, cross-checked against the
    # explicit 3x3 determinant computed by outer_product_triple_determinant itself
    assert outer_product_triple_determinant((1.0, 2.0), (3.0, 4.0)) == pytest.approx(-8.0)


def test_outer_product_determinant_parallel_vectors():
    assert outer_product_triple_determinant((2.0, 1.0), (4.0, 2.0)) == pytest.approx(0.0, abs=1e-12)


def test_outer_product_determinant_identity_on_random_pairs():
    rng = np.random.default_rng(9)
    for _ in range(100):
        v1, v2 = rng.normal(size=2), rng.normal(size=2)
        expected = (v1[0] * v2[1] - v1[1] * v2[0]) ** 3
        assert outer_product_triple_determinant(v1, v2) == pytest.approx(expected, rel=1e-10, abs=1e-14)


# ---------------------------------------------------------------- aggregate

def test_run_all_passes():
    report = run_all(3, 2)
    assert report["passed"]
    names = [c["name"] for c in report["checks"]]
    assert names == ["hdiv-conformity", "div-inclusion", "local-divergence-rank",
                     "rigid-motion-orthogonality", "outer-product-determinant",
                     "discrete-infsup"]


def test_run_all_reports_nullity_for_k5():
    report = run_all(5, 1, rank_samples=5)
    rank_check = report["checks"][2]
    assert rank_check["detail"]["expected_nullity"] == 3
    assert rank_check["detail"]["observed"] == [[27, 3]] or \
        rank_check["detail"]["observed"] == [(27, 3)]


def test_run_all_negative_control_fails():
    report = run_all(3, 1, corrupt="conformity")
    assert not report["passed"]
