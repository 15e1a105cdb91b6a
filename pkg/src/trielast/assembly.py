"""Assembly of the stress-displacement saddle-point system.

The discrete problem couples the weighted stress mass matrix M, the
divergence block B and the load vector F into

    [[M, B^T], [B, 0]] [sigma; u] = [0; F].

The displacement boundary condition is natural in this formulation:
no row of the system is modified, the stress space carries no essential
constraint.  All element integrands except the load are polynomial and
integrated exactly with a degree-2k rule; the load uses degree 2k+4 by
default so its consistency error stays below the discretization error.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.io
import scipy.sparse as sparse

from .backends import get_kernels
from .elements import displacement_modes, scalar_basis
from .mesh import geometry_arrays
from .quadrature import triangle_rule

# Frobenius weight on (a11, a12, a22) components
FROBENIUS_WEIGHT = np.diag([1.0, 2.0, 1.0])

ASSEMBLY_CHUNK = 2048


class ComplianceTensor:
    """Isotropic plane compliance A tau = (tau - c tr(tau) I) / (2 mu)
    with c = lambda / (2 mu + 2 lambda)."""

    def __init__(self, mu, lam):
        if mu <= 0.0 or lam <= 0.0:
            raise ValueError("Lame constants must be positive, got mu={}, lambda={}".format(mu, lam))
        self.mu = mu
        self.lam = lam

    def matrix(self):
        """Action on (a11, a12, a22) component vectors."""
        c = self.lam / (2.0 * self.mu + 2.0 * self.lam)
        return np.array([
            [1.0 - c, 0.0, -c],
            [0.0, 1.0, 0.0],
            [-c, 0.0, 1.0 - c],
        ]) / (2.0 * self.mu)

    def bilinear_matrix(self):
        """Matrix of (A sigma) : tau in component coordinates."""
        return FROBENIUS_WEIGHT @ self.matrix()

    def apply(self, tau):
        """Apply to symmetric matrices in (a11, a12, a22) form,
        broadcasting over leading axes."""
        tau = np.asarray(tau, dtype=float)
        return tau @ self.matrix().T


def compliance_apply(compliance, tau):
    return compliance.apply(tau)


@dataclass
class SaddleSystem:
    """Assembled blocks; ``matrix`` and ``rhs`` give the full symmetric
    indefinite system."""

    m: sparse.csr_matrix
    b: sparse.csr_matrix
    f: np.ndarray
    dim_stress: int
    dim_displacement: int

    def matrix(self):
        return sparse.bmat([[self.m, self.b.T], [self.b, None]], format="csc")

    def rhs(self):
        return np.concatenate([np.zeros(self.dim_stress), self.f])

    def dump_matrix_market(self, path):
        """Write the full system in Matrix Market coordinate format."""
        scipy.io.mmwrite(path, self.matrix().tocoo(), symmetry="symmetric")


class ReferenceTensors:
    """Degree-2k reference integrals shared by every element.

    ``smass`` is the scalar mass per stress slot pair, ``dref`` the
    slot-gradient / displacement-mode moments, ``gref`` the
    slot-gradient pair moments.
    """

    def __init__(self, k, snode):
        basis = scalar_basis(k)
        modes = displacement_modes(k - 1)
        rule = triangle_rule(2 * k)
        w = 0.5 * rule.weights
        svals = basis.values(rule.points)
        sgrads = basis.ref_grads(rule.points)
        pvals = modes.values(rule.points[:, 1:])
        node_mass = np.einsum("q,qa,qb->ab", w, svals, svals)
        self.smass = node_mass[np.ix_(snode, snode)]
        dref = np.einsum("q,qna,qm->anm", w, sgrads, pvals)
        self.dref = np.ascontiguousarray(dref[:, snode, :])
        gref = np.einsum("q,qna,qmb->nmab", w, sgrads, sgrads)
        self.gref = np.ascontiguousarray(gref[np.ix_(snode, snode)])


@lru_cache(maxsize=None)
def _reference_tensors(k, snode_key):
    return ReferenceTensors(k, np.array(snode_key))


def reference_tensors(k, snode):
    return _reference_tensors(k, tuple(int(s) for s in snode))


def element_wmats(dirs, nmat):
    """Per-slot matrices mapping reference scalar gradients to the slot
    divergence: direction matrix times N^T, shape (ne, ns, 2, 2)."""
    sym = np.empty(dirs.shape[:2] + (2, 2))
    sym[..., 0, 0] = dirs[..., 0]
    sym[..., 0, 1] = dirs[..., 1]
    sym[..., 1, 0] = dirs[..., 1]
    sym[..., 1, 1] = dirs[..., 2]
    return np.einsum("eicb,eab->eica", sym, nmat)


def physical_points(mesh, bary):
    """Quadrature points mapped to every triangle, shape (ne, nq, 2)."""
    verts = mesh.points[mesh.triangles]
    return np.einsum("qv,evx->eqx", bary, verts)


def displacement_dofs(disp_space):
    """(ne, 2*nm) global displacement dofs, component-major rows."""
    ne, nloc = disp_space.mesh.num_triangles, disp_space.n_local
    return np.arange(ne * nloc, dtype=np.int64).reshape(ne, nloc)


def assemble(mesh, stress_space, disp_space, compliance, load,
             load_degree=None, kernels=None):
    """Assemble the saddle system for a body load ``load`` mapping
    (n, 2) points to (n, 2) values."""
    if stress_space.mesh is not mesh or disp_space.mesh is not mesh:
        raise ValueError("spaces were built on a different mesh")
    if stress_space.k != disp_space.k:
        raise ValueError("stress and displacement degrees differ")
    k = stress_space.k
    if load_degree is None:
        load_degree = 2 * k + 4
    kern = kernels or get_kernels()

    det, nmat, _ = geometry_arrays(mesh)
    sqdet = np.sqrt(det)
    ref = reference_tensors(k, stress_space.local_snode)
    cmat = compliance.bilinear_matrix()
    dirs = stress_space.element_dirs
    sdof = stress_space.element_dofs
    vdof = displacement_dofs(disp_space)
    wmats = element_wmats(dirs, nmat)

    load_rule = triangle_rule(load_degree)
    pw = (0.5 * load_rule.weights)[:, None] * disp_space.modes.values(load_rule.points[:, 1:])
    xq = physical_points(mesh, load_rule.points)
    fq = np.asarray(load(xq.reshape(-1, 2)), dtype=float).reshape(xq.shape)

    ne = mesh.num_triangles
    dim_s, dim_v = stress_space.dim, disp_space.dim
    m_parts, b_parts = [], []
    f_global = np.zeros(dim_v)
    for lo in range(0, ne, ASSEMBLY_CHUNK):
        hi = min(lo + ASSEMBLY_CHUNK, ne)
        sl = slice(lo, hi)
        m_blocks = kern.stress_mass_blocks(det[sl], dirs[sl], cmat, ref.smass)
        b_blocks = kern.coupling_blocks(sqdet[sl], wmats[sl], ref.dref)
        f_blocks = kern.load_blocks(sqdet[sl], fq[sl], pw)
        ns = m_blocks.shape[1]
        rows = np.repeat(sdof[sl], ns, axis=1).ravel()
        cols = np.tile(sdof[sl], (1, ns)).ravel()
        m_parts.append(sparse.coo_matrix(
            (m_blocks.ravel(), (rows, cols)), shape=(dim_s, dim_s)).tocsr())
        nv = b_blocks.shape[1]
        rows = np.repeat(vdof[sl], ns, axis=1).ravel()
        cols = np.tile(sdof[sl], (1, nv)).ravel()
        b_parts.append(sparse.coo_matrix(
            (b_blocks.ravel(), (rows, cols)), shape=(dim_v, dim_s)).tocsr())
        f_global[vdof[sl].ravel()] = f_blocks.ravel()

    m = m_parts[0]
    for part in m_parts[1:]:
        m = m + part
    b = b_parts[0]
    for part in b_parts[1:]:
        b = b + part
    return SaddleSystem(m, b, f_global, dim_s, dim_v)
