"""Global degree-of-freedom maps for the stress and displacement spaces.

Stress unknowns are numbered vertex block, edge-flux block, edge-bubble
block, volume block, each in entity order; displacement unknowns are
element-contiguous.  The stress dimension is

    3|V| + 2(k-1)|E| + (3(k-1) + 3(k-1)(k-2)/2)|K|

and the displacement dimension is k(k+1)|K|.
"""

from dataclasses import dataclass

import numpy as np

from . import elements
from .elements import (CANONICAL_DIRECTIONS, EDGE_BUBBLE, EDGE_FLUX, VERTEX,
                       VOLUME, StressBasisFunction, edge_matrix_frame,
                       local_stress_layout, scalar_basis, sym_apply)
from .mesh import element_geometry

SUPPORTED_DEGREES = (3, 4, 5)


def _check_supported(k):
    if k not in SUPPORTED_DEGREES:
        raise ValueError(
            "unsupported degree k={}; this build covers k in {}".format(
                k, SUPPORTED_DEGREES))


@dataclass(frozen=True)
class DofMap:
    """Dimension bookkeeping for one field."""

    dim: int
    counts: dict


class StressSpace:
    """Global basis of the enriched stress space on a mesh.

    Besides the per-function descriptors, the space carries flat
    per-element arrays used by the assembly kernels:

    - ``local_snode``: (nloc,) local scalar Lagrange node per slot,
      identical for every element;
    - ``element_dofs``: (nt, nloc) global dof per element slot;
    - ``element_dirs``: (nt, nloc, 3) constant symmetric matrix factor
      per slot in (a11, a12, a22) form.
    """

    def __init__(self, mesh, k):
        _check_supported(k)
        self.mesh = mesh
        self.k = k
        self.basis = scalar_basis(k)
        self.local_snode, self.local_kinds = local_stress_layout(k)
        nv, ne, nt = mesh.num_vertices, mesh.num_edges, mesh.num_triangles
        n_en = k - 1                      # nodes per edge
        n_in = (k - 1) * (k - 2) // 2     # nodes per element interior
        self.frames = np.array([
            edge_matrix_frame(mesh.tangents[e], mesh.normals[e]).as_array()
            for e in range(ne)])
        edge_sides = np.array([len(adj) for adj in mesh.edge_tri])
        bubble_base = 3 * nv + 2 * n_en * ne + n_en * np.concatenate(
            [[0], np.cumsum(edge_sides)[:-1]])
        volume_base = 3 * nv + 2 * n_en * ne + n_en * int(edge_sides.sum())
        self.dim = volume_base + 3 * n_in * nt

        nloc = len(self.local_snode)
        self.element_dofs = np.empty((nt, nloc), dtype=np.int64)
        self.element_dirs = np.empty((nt, nloc, 3))
        for t in range(nt):
            tri = mesh.triangles[t]
            col = 0
            for v in range(3):
                for d in range(3):
                    self.element_dofs[t, col] = 3 * tri[v] + d
                    self.element_dirs[t, col] = CANONICAL_DIRECTIONS[d]
                    col += 1
            flux_cols, bubble_cols = [], []
            for i in range(3):
                ge = mesh.tri_edges[t, i]
                aligned = tri[(i + 1) % 3] == mesh.edges[ge, 0]
                side = mesh.edge_tri[ge].index(t)
                for j in range(1, k):
                    gj = j if aligned else k - j
                    for d in (1, 2):
                        flux_cols.append((3 * nv + 2 * n_en * ge + 2 * (gj - 1) + d - 1,
                                          self.frames[ge, d]))
                    bubble_cols.append((bubble_base[ge] + edge_sides[ge] * (gj - 1) + side,
                                        self.frames[ge, 0]))
            for dof, direction in flux_cols + bubble_cols:
                self.element_dofs[t, col] = dof
                self.element_dirs[t, col] = direction
                col += 1
            for m in range(n_in):
                for d in range(3):
                    self.element_dofs[t, col] = volume_base + 3 * n_in * t + 3 * m + d
                    self.element_dirs[t, col] = CANONICAL_DIRECTIONS[d]
                    col += 1

        self.counts = {
            VERTEX: 3 * nv,
            EDGE_FLUX: 2 * n_en * ne,
            EDGE_BUBBLE: n_en * int(edge_sides.sum()),
            VOLUME: 3 * n_in * nt,
        }
        self._vertex_tris = [[] for _ in range(nv)]
        for t in range(nt):
            for v in mesh.triangles[t]:
                self._vertex_tris[v].append(t)
        self.functions = self._build_descriptors(bubble_base, volume_base)

    def _build_descriptors(self, bubble_base, volume_base):
        mesh, k = self.mesh, self.k
        nv, ne, nt = mesh.num_vertices, mesh.num_edges, mesh.num_triangles
        funcs = []
        for v in range(nv):
            for d in range(3):
                funcs.append(StressBasisFunction(
                    len(funcs), VERTEX, v, CANONICAL_DIRECTIONS[d],
                    tuple(self._vertex_tris[v])))
        for e in range(ne):
            for gj in range(1, k):
                for d in (1, 2):
                    funcs.append(StressBasisFunction(
                        len(funcs), EDGE_FLUX, (e, gj), self.frames[e, d],
                        mesh.edge_tri[e]))
        for e in range(ne):
            for gj in range(1, k):
                for side, t in enumerate(mesh.edge_tri[e]):
                    funcs.append(StressBasisFunction(
                        len(funcs), EDGE_BUBBLE, (e, gj), self.frames[e, 0], (t,)))
        n_in = (k - 1) * (k - 2) // 2
        for t in range(nt):
            for m in range(n_in):
                for d in range(3):
                    funcs.append(StressBasisFunction(
                        len(funcs), VOLUME, (t, m), CANONICAL_DIRECTIONS[d], (t,)))
        assert len(funcs) == self.dim
        return funcs

    @property
    def dofmap(self):
        return DofMap(self.dim, dict(self.counts))

    def n_local(self):
        return len(self.local_snode)

    def eval_basis(self, index, t, x):
        """Value (a11, a12, a22) and divergence (2,) of global basis
        function ``index`` at physical points ``x`` inside triangle ``t``."""
        func = self.functions[index]
        if t not in func.support:
            raise ValueError(
                "basis function {} is not supported on triangle {}".format(index, t))
        geom = element_geometry(self.mesh, t)
        bary = geom.to_barycentric(x)
        if np.any(bary < -1e-10):
            raise ValueError("points outside triangle {}".format(t))
        slots = np.nonzero(self.element_dofs[t] == index)[0]
        assert len(slots) == 1
        slot = slots[0]
        ln = self.local_snode[slot]
        phi = self.basis.values(bary)[:, ln]
        grad = self.basis.physical_grads(bary, geom)[:, ln]
        direction = self.element_dirs[t, slot]
        value = phi[:, None] * direction[None, :]
        div = sym_apply(np.broadcast_to(direction, (len(bary), 3)), grad)
        if value.shape[0] == 1:
            return value[0], div[0]
        return value, div


class DisplacementSpace:
    """Discontinuous P_{k-1} vector space, two components per scalar mode.

    Element ``t`` owns the contiguous dofs [t*k(k+1), (t+1)*k(k+1)); the
    first k(k+1)/2 of them are component 0, the rest component 1, each in
    scalar mode order.  Modes are the L2-orthonormal reference modes
    scaled by 1/sqrt(det_b), so the mass matrix is the identity.
    """

    def __init__(self, mesh, k):
        _check_supported(k)
        self.mesh = mesh
        self.k = k
        self.modes = elements.displacement_modes(k - 1)
        self.n_scalar = len(self.modes)
        self.n_local = 2 * self.n_scalar
        self.dim = self.n_local * mesh.num_triangles

    @property
    def dofmap(self):
        return DofMap(self.dim, {"per-element": self.n_local})

    def function(self, index):
        t, rem = divmod(index, self.n_local)
        c, m = divmod(rem, self.n_scalar)
        return elements.DisplacementBasisFunction(index, t, c, m)

    def eval_basis(self, index, t, x):
        """Vector value of basis function ``index`` at physical points in
        triangle ``t``; zero off its owning element."""
        func = self.function(index)
        x = np.atleast_2d(x)
        out = np.zeros((len(x), 2))
        if func.element == t:
            geom = element_geometry(self.mesh, t)
            ref = geom.to_barycentric(x)[:, 1:]
            vals = self.modes.values(ref)[:, func.mode] / np.sqrt(geom.det_b)
            out[:, func.component] = vals
        return out if len(out) > 1 else out[0]


def build_stress_space(mesh, k):
    """Stress space with its dof map; dimension matches
    3|V| + 2(k-1)|E| + (3(k-1) + 3(k-1)(k-2)/2)|K|."""
    space = StressSpace(mesh, k)
    return space, space.dofmap


def build_displacement_space(mesh, k):
    """Displacement space with its dof map; dimension k(k+1)|K|."""
    space = DisplacementSpace(mesh, k)
    return space, space.dofmap
