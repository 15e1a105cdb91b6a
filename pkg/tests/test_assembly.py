
import numpy as np
import pytest
import scipy.io


from trielast.analysis import default_solution
from trielast.assembly import (ComplianceTensor, assemble, compliance_apply)
from trielast.mesh import build_unit_square_mesh
from trielast.spaces import DisplacementSpace, StressSpace


@pytest.fixture(scope="module")
def level1_setup():
    mesh = build_unit_square_mesh(1)
    return mesh, StressSpace(mesh, 3), DisplacementSpace(mesh, 3)


def zero_load(x):
    return np.zeros_like(x)


# ---------------------------------------------------------------- compliance

def test_compliance_identity_example():
    comp = ComplianceTensor(0.5, 1.0)
    identity = np.array([1.0, 0.0, 1.0])
    assert np.allclose(comp.apply(identity), identity / 3.0)


def test_compliance_traceless():
    comp = ComplianceTensor(0.7, 2.3)
    tau = np.array([1.0, 0.4, -1.0])  # traceless
    assert np.allclose(comp.apply(tau), tau / (2 * 0.7))


def test_compliance_inverts_material_law():
    # A(sigma_exact) equals the symmetric gradient of u_exact
    sol = default_solution(0.5, 1.0)
    comp = ComplianceTensor(0.5, 1.0)
    rng = np.random.default_rng(5)
    pts = rng.uniform(0.1, 0.9, size=(30, 2))
    h = 1e-6
    dx = np.array([h, 0.0])
    dy = np.array([0.0, h])
    du_dx = (sol.displacement(pts + dx) - sol.displacement(pts - dx)) / (2 * h)
    du_dy = (sol.displacement(pts + dy) - sol.displacement(pts - dy)) / (2 * h)
    eps = np.stack([du_dx[:, 0], 0.5 * (du_dy[:, 0] + du_dx[:, 1]), du_dy[:, 1]],
                   axis=-1)
    assert np.allclose(compliance_apply(comp, sol.stress(pts)), eps, atol=1e-8)


def test_compliance_rejects_nonpositive_constants():
    with pytest.raises(ValueError):
        ComplianceTensor(0.0, 1.0)
    with pytest.raises(ValueError):
        ComplianceTensor(1.0, -2.0)


def test_compliance_is_spd_on_symmetric_matrices():
    comp = ComplianceTensor(0.8, 1.7)
    # eigenvalues of the weighted bilinear matrix are positive
    eig = np.linalg.eigvalsh(comp.bilinear_matrix())
    assert np.all(eig > 0)


# ---------------------------------------------------------------- assembly

def test_mass_block_symmetric(level1_setup):
    mesh, stress, disp = level1_setup
    system = assemble(mesh, stress, disp, ComplianceTensor(0.5, 1.0), zero_load)
    m = system.m.toarray()
    assert np.abs(m - m.T).max() <= 1e-13 * np.abs(m).max()


def test_mass_block_positive_definite(level1_setup):
    mesh, stress, disp = level1_setup
    system = assemble(mesh, stress, disp, ComplianceTensor(0.5, 1.0), zero_load)
    eig = np.linalg.eigvalsh(system.m.toarray())
    assert eig[0] > 0.0
    assert system.m.shape == (50, 50)


def test_coupling_block_full_row_rank(level1_setup):
    mesh, stress, disp = level1_setup
    system = assemble(mesh, stress, disp, ComplianceTensor(0.5, 1.0), zero_load)
    b = system.b.toarray()
    assert b.shape == (24, 50)
    assert np.linalg.matrix_rank(b, tol=1e-10) == 24


def test_compliance_scaling_scales_mass_exactly(level1_setup):
    mesh, stress, disp = level1_setup
    base = assemble(mesh, stress, disp, ComplianceTensor(0.5, 1.0), zero_load)
    # scaling both constants by c scales the compliance map by 1/c
    scaled = assemble(mesh, stress, disp, ComplianceTensor(1.0, 2.0), zero_load)
    assert np.allclose(scaled.m.toarray(), 0.5 * base.m.toarray(), rtol=0, atol=1e-15)
    assert np.allclose(scaled.b.toarray(), base.b.toarray())


def test_zero_load_gives_zero_rhs_and_solution(level1_setup):
    from trielast.solver import solve
    mesh, stress, disp = level1_setup
    system = assemble(mesh, stress, disp, ComplianceTensor(0.5, 1.0), zero_load)
    assert np.all(system.f == 0.0)
    result = solve(system)
    assert np.allclose(result.stress, 0.0)
    assert np.allclose(result.displacement, 0.0)


def test_mismatched_mesh_rejected():
    mesh1 = build_unit_square_mesh(1)
    mesh2 = build_unit_square_mesh(1)
    stress = StressSpace(mesh1, 3)
    disp = DisplacementSpace(mesh2, 3)
    with pytest.raises(ValueError, match="different mesh"):
        assemble(mesh2, stress, disp, ComplianceTensor(0.5, 1.0), zero_load)


def test_mismatched_degree_rejected():
    mesh = build_unit_square_mesh(1)
    stress = StressSpace(mesh, 3)
    disp = DisplacementSpace(mesh, 4)
    with pytest.raises(ValueError, match="degrees differ"):
        assemble(mesh, stress, disp, ComplianceTensor(0.5, 1.0), zero_load)


def test_full_matrix_is_symmetric_indefinite(level1_setup):
    mesh, stress, disp = level1_setup
    sol = default_solution(0.5, 1.0)
    system = assemble(mesh, stress, disp, ComplianceTensor(0.5, 1.0), sol.load)
    k = system.matrix().toarray()
    assert np.abs(k - k.T).max() <= 1e-13 * np.abs(k).max()
    eig = np.linalg.eigvalsh(k)
    assert eig[0] < 0 < eig[-1]
    rhs = system.rhs()
    assert np.all(rhs[:system.dim_stress] == 0.0)


def test_chunked_assembly_matches_single_chunk(monkeypatch):
    import trielast.assembly as asm
    mesh = build_unit_square_mesh(2)
    stress = StressSpace(mesh, 3)
    disp = DisplacementSpace(mesh, 3)
    sol = default_solution(0.5, 1.0)
    comp = ComplianceTensor(0.5, 1.0)
    whole = assemble(mesh, stress, disp, comp, sol.load)
    monkeypatch.setattr(asm, "ASSEMBLY_CHUNK", 3)
    parts = assemble(mesh, stress, disp, comp, sol.load)
    scale = np.abs(whole.m.toarray()).max()
    assert np.abs((whole.m - parts.m).toarray()).max() <= 1e-14 * scale
    assert np.abs((whole.b - parts.b).toarray()).max() <= 1e-14
    assert np.allclose(whole.f, parts.f)


def test_matrix_market_dump_round_trip(tmp_path, level1_setup):
    mesh, stress, disp = level1_setup
    sol = default_solution(0.5, 1.0)
    system = assemble(mesh, stress, disp, ComplianceTensor(0.5, 1.0), sol.load)
    path = tmp_path / "system.mtx"
    system.dump_matrix_market(str(path))
    loaded = scipy.io.mmread(str(path))
    assert np.abs((loaded.tocsc() - system.matrix()).toarray()).max() < 1e-15
