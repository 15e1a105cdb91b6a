import json

import numpy as np
import pytest

from trielast.analysis import (default_solution, exact_fields,
                               polynomial_solution, run_study)
from trielast.assembly import ComplianceTensor


@pytest.fixture(scope="module")
def k3_table():
    return run_study(3, 3)


# ---------------------------------------------------------------- exact fields

def test_displacement_at_center():
    sol = default_solution()
    u, sigma, f = exact_fields(sol, [0.5, 0.5])
    assert np.allclose(u[0], [0.0625, 1.0])


def test_displacement_vanishes_on_boundary():
    sol = default_solution()
    rng = np.random.default_rng(2)
    t = rng.uniform(0, 1, size=12)
    boundary = np.concatenate([
        np.column_stack([t, np.zeros_like(t)]),
        np.column_stack([t, np.ones_like(t)]),
        np.column_stack([np.zeros_like(t), t]),
        np.column_stack([np.ones_like(t), t]),
    ])
    u = sol.displacement(boundary)
    assert np.abs(u).max() <= 1e-15


def central_difference_divergence(stress, pts, h=1e-5):
    dx = np.array([h, 0.0])
    dy = np.array([0.0, h])
    ds_dx = (stress(pts + dx) - stress(pts - dx)) / (2 * h)
    ds_dy = (stress(pts + dy) - stress(pts - dy)) / (2 * h)
    return np.stack([ds_dx[:, 0] + ds_dy[:, 1], ds_dx[:, 1] + ds_dy[:, 2]], axis=-1)


def test_load_matches_finite_difference_divergence():
    # the hand-coded derivatives must agree with a finite-difference
    # oracle before any error table can be trusted
    sol = default_solution(0.5, 1.0)
    rng = np.random.default_rng(42)
    pts = rng.uniform(0.05, 0.95, size=(20, 2))
    fd = central_difference_divergence(sol.stress, pts)
    f = sol.load(pts)
    assert np.abs(f - fd).max() <= 1e-6 * np.abs(f).max()


def test_load_matches_fd_for_other_constants():
    sol = default_solution(1.3, 0.7)
    rng = np.random.default_rng(43)
    pts = rng.uniform(0.05, 0.95, size=(20, 2))
    fd = central_difference_divergence(sol.stress, pts)
    assert np.abs(sol.load(pts) - fd).max() <= 1e-6 * np.abs(sol.load(pts)).max()


def test_compliance_of_stress_is_strain():
    sol = default_solution(0.5, 1.0)
    comp = ComplianceTensor(0.5, 1.0)
    rng = np.random.default_rng(3)
    pts = rng.uniform(0.1, 0.9, size=(10, 2))
    h = 1e-6
    dx, dy = np.array([h, 0]), np.array([0, h])
    du_dx = (sol.displacement(pts + dx) - sol.displacement(pts - dx)) / (2 * h)
    du_dy = (sol.displacement(pts + dy) - sol.displacement(pts - dy)) / (2 * h)
    eps = np.stack([du_dx[:, 0], 0.5 * (du_dy[:, 0] + du_dx[:, 1]), du_dy[:, 1]],
                   axis=-1)
    assert np.allclose(comp.apply(sol.stress(pts)), eps, atol=1e-8)


def test_polynomial_solution_consistency():
    sol = polynomial_solution(0.5, 1.0, scale=2.0)
    rng = np.random.default_rng(4)
    pts = rng.uniform(0.05, 0.95, size=(20, 2))
    fd = central_difference_divergence(sol.stress, pts)
    assert np.abs(sol.load(pts) - fd).max() <= 1e-6 * max(np.abs(sol.load(pts)).max(), 1)
    u = sol.displacement(np.array([[0.5, 0.5]]))
    assert np.allclose(u, 2.0 * 0.0625)


# ---------------------------------------------------------------- studies

def test_regression_table_values(k3_table):
    # frozen output of this implementation (deterministic pipeline)
    reports = k3_table.reports
    expected = [
        (0.067168010775999848, 0.19799900112756902, 2.0073796290956776),
        (0.016411380298504925, 0.038008115283302356, 0.46982610419196635),
        (0.0021716652012362509, 0.0028826519645408226, 0.062421726190477381),
    ]
    for rep, (eu, es, ed) in zip(reports, expected):
        assert rep.err_u == pytest.approx(eu, rel=1e-7)
        assert rep.err_sigma == pytest.approx(es, rel=1e-7)
        assert rep.err_div == pytest.approx(ed, rel=1e-7)


def test_dims_recorded(k3_table):
    assert [(r.dim_v, r.dim_sigma) for r in k3_table.reports] == [
        (24, 50), (96, 163), (384, 587)]


def test_divergence_identity_on_study(k3_table):
    for rep in k3_table.reports:
        assert rep.div_identity <= 1e-9 * rep.load_norm


def test_residuals_within_contract(k3_table):
    for rep in k3_table.reports:
        assert rep.residual <= 1e-10


def test_orders_are_log2_ratios(k3_table):
    orders = k3_table.orders()
    assert orders[0]["err_u"] is None
    r0, r1 = k3_table.reports[0], k3_table.reports[1]
    assert orders[1]["err_u"] == pytest.approx(np.log2(r0.err_u / r1.err_u))


# ---------------------------------------------------------------- output formats

def test_text_format_has_blank_orders_on_first_level(k3_table):
    lines = k3_table.to_text().splitlines()
    assert len(lines) == 4
    first = lines[1].split()
    # level, three errors, two dims: order columns are blank
    assert len(first) == 6


def test_csv_format(k3_table):
    lines = k3_table.to_csv().splitlines()
    assert lines[0] == "level,u_err,u_order,sigma_err,sigma_order,div_err,div_order,dim_v,dim_sigma"
    row1 = lines[1].split(",")
    assert row1[0] == "1"
    assert row1[2] == "" and row1[4] == "" and row1[6] == ""
    assert int(row1[7]) == 24 and int(row1[8]) == 50


def test_json_format(k3_table):
    data = json.loads(k3_table.to_json())
    assert data["k"] == 3
    assert data["mu"] == 0.5 and data["lambda"] == 1.0
    assert data["rows"][0]["u_order"] is None
    assert data["rows"][2]["dim_sigma"] == 587


def test_csv_deterministic_across_runs(k3_table):
    again = run_study(3, 3)
    assert again.to_csv() == k3_table.to_csv()


def test_galerkin_exactness_for_polynomial_solution():
    # k=5 contains the cubic stress and quartic displacement exactly
    sol = polynomial_solution(0.5, 1.0)
    table = run_study(5, 1, solution=sol)
    rep = table.reports[0]
    assert rep.err_u <= 1e-10
    assert rep.err_sigma <= 1e-9
    assert rep.err_div <= 1e-9
