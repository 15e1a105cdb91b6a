"""Element-level bases.

Scalar Lagrange bases of degree k on a triangle (via a nodal Vandermonde
solve in barycentric monomials), rank-one matrix frames attached to
edges, the four classes of symmetric-matrix stress basis functions, and
the discontinuous vector modes used for the displacement.

Symmetric 2x2 matrices are stored as (a11, a12, a22) triples; the
Frobenius product carries a factor 2 on the off-diagonal slot.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import cholesky, solve_triangular

# canonical symmetric basis [[1,0],[0,0]], [[0,1],[1,0]], [[0,0],[0,1]]
CANONICAL_DIRECTIONS = np.eye(3)

# gradients of (lambda0, lambda1, lambda2) on the reference triangle
REF_BARY_GRADS = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])

MIN_DEGREE = 3


def frobenius(a, b):
    """Frobenius product of symmetric matrices in (a11, a12, a22) form."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 0] + 2.0 * a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]


def sym_apply(m, v):
    """Apply [[m1, m2], [m2, m3]] to a 2-vector, broadcasting over leading axes."""
    m = np.asarray(m)
    v = np.asarray(v)
    return np.stack([
        m[..., 0] * v[..., 0] + m[..., 1] * v[..., 1],
        m[..., 1] * v[..., 0] + m[..., 2] * v[..., 1],
    ], axis=-1)


def _check_degree(k):
    if k < MIN_DEGREE:
        raise ValueError("the element family needs degree k >= 3, got k={}".format(k))


class LagrangeNodeSet:
    """Nodes of the degree-k Lagrange element in a fixed local order:
    3 vertices, then k-1 interior nodes per local edge, then the
    (k-1)(k-2)/2 interior nodes.

    Local edge i runs from vertex (i+1)%3 to vertex (i+2)%3; its j-th
    node (j = 1..k-1) has barycentric weight j/k on the end vertex.
    Interior node (l, m) has barycentric weights (l/k, m/k, (k-l-m)/k).
    """

    def __init__(self, k):
        _check_degree(k)
        self.k = k
        bary = [np.eye(3)[i] for i in range(3)]
        edge_nodes = []
        for i in range(3):
            a, b = (i + 1) % 3, (i + 2) % 3
            for j in range(1, k):
                lam = np.zeros(3)
                lam[a] = (k - j) / k
                lam[b] = j / k
                bary.append(lam)
                edge_nodes.append(3 + i * (k - 1) + (j - 1))
        interior_nodes = []
        for l in range(1, k - 1):
            for m in range(1, k - l):
                bary.append(np.array([l / k, m / k, (k - l - m) / k]))
                interior_nodes.append(len(bary) - 1)
        self.barycentric = np.array(bary)
        self.vertex_nodes = [0, 1, 2]
        self.edge_nodes = [[3 + i * (k - 1) + j for j in range(k - 1)] for i in range(3)]
        self.interior_nodes = interior_nodes

    def __len__(self):
        return len(self.barycentric)

    def physical(self, geometry):
        return geometry.to_physical(self.barycentric)


def lagrange_nodes(k, geometry=None):
    """Node set of the degree-k Lagrange element; physical positions if
    ``geometry`` is given."""
    nodes = LagrangeNodeSet(k)
    if geometry is None:
        return nodes
    return nodes, nodes.physical(geometry)


def _bary_exponents(k):
    """Exponent triples of all barycentric monomials of total degree k."""
    return np.array([(a, b, k - a - b) for a in range(k, -1, -1)
                     for b in range(k - a, -1, -1)])


class ScalarBasis:
    """Nodal (Kronecker) basis of P_k on the reference triangle.

    Coefficients over homogeneous barycentric monomials are obtained
    from one Vandermonde solve per degree and reused for every
    evaluation.
    """

    def __init__(self, k):
        _check_degree(k)
        self.k = k
        self.nodes = LagrangeNodeSet(k)
        self.exponents = _bary_exponents(k)
        vandermonde = self._monomials(self.nodes.barycentric)
        self.coef = np.linalg.solve(vandermonde, np.eye(len(self.nodes)))

    def __len__(self):
        return len(self.nodes)

    def _monomials(self, bary):
        bary = np.atleast_2d(bary)
        e = self.exponents
        return (bary[:, None, 0] ** e[:, 0] * bary[:, None, 1] ** e[:, 1]
                * bary[:, None, 2] ** e[:, 2])

    def _monomial_bary_grads(self, bary):
        bary = np.atleast_2d(bary)
        e = self.exponents
        out = np.zeros((len(bary), len(e), 3))
        for d in range(3):
            ed = e.copy()
            ed[:, d] = np.maximum(ed[:, d] - 1, 0)
            mono = (bary[:, None, 0] ** ed[:, 0] * bary[:, None, 1] ** ed[:, 1]
                    * bary[:, None, 2] ** ed[:, 2])
            out[:, :, d] = e[:, d] * mono
        return out

    def values(self, bary):
        """Basis values at barycentric points, shape (npts, nbasis)."""
        return self._monomials(bary) @ self.coef

    def bary_grads(self, bary):
        """Derivatives w.r.t. the three barycentric variables,
        shape (npts, nbasis, 3)."""
        dm = self._monomial_bary_grads(bary)
        return np.einsum("pmd,mb->pbd", dm, self.coef)

    def ref_grads(self, bary):
        """Gradients in reference coordinates, shape (npts, nbasis, 2)."""
        return self.bary_grads(bary) @ REF_BARY_GRADS

    def physical_grads(self, bary, geometry):
        """Gradients in physical coordinates, shape (npts, nbasis, 2)."""
        return self.bary_grads(bary) @ geometry.barycentric_gradients()


@lru_cache(maxsize=None)
def scalar_basis(k):
    return ScalarBasis(k)


def _validate_barycentric(bary):
    bary = np.asarray(bary, dtype=float)
    if bary.shape[-1] != 3:
        raise ValueError("barycentric points need 3 components")
    if np.any(bary < -1e-12) or np.any(np.abs(bary.sum(axis=-1) - 1.0) > 1e-12):
        raise ValueError("invalid barycentric coordinates: {}".format(bary))
    return np.atleast_2d(bary)


def eval_scalar_basis(k, node, bary, geometry=None):
    """Value and gradient of one nodal basis function.

    The gradient is physical when ``geometry`` is given, otherwise it is
    taken on the reference triangle.
    """
    bary = _validate_barycentric(bary)
    basis = scalar_basis(k)
    values = basis.values(bary)[:, node]
    if geometry is None:
        grads = basis.ref_grads(bary)[:, node]
    else:
        grads = basis.physical_grads(bary, geometry)[:, node]
    if values.shape[0] == 1:
        return values[0], grads[0]
    return values, grads


@dataclass(frozen=True)
class EdgeMatrixFrame:
    """Orthonormal symmetric-matrix triple attached to an edge.

    ``t_e`` is the rank-one tangent outer product t t^T carrying the
    edge bubbles; ``t_perp1`` = n n^T and ``t_perp2`` = (t n^T + n t^T)/sqrt(2)
    complete it to a Frobenius-orthonormal triple.
    """

    t_e: np.ndarray
    t_perp1: np.ndarray
    t_perp2: np.ndarray

    def as_array(self):
        return np.array([self.t_e, self.t_perp1, self.t_perp2])


def edge_matrix_frame(tangent, normal):
    t1, t2 = tangent
    n1, n2 = normal
    s = np.sqrt(2.0)
    return EdgeMatrixFrame(
        t_e=np.array([t1 * t1, t1 * t2, t2 * t2]),
        t_perp1=np.array([n1 * n1, n1 * n2, n2 * n2]),
        t_perp2=np.array([s * t1 * n1, (t1 * n2 + t2 * n1) / s, s * t2 * n2]),
    )


VERTEX = "vertex"
VOLUME = "volume"
EDGE_FLUX = "edge-flux"
EDGE_BUBBLE = "edge-bubble"


@dataclass(frozen=True)
class StressBasisFunction:
    """Descriptor of one global stress basis function.

    ``node`` is the global scalar Lagrange node key: a vertex id for the
    vertex class, (edge id, j) for the edge classes with j = 1..k-1
    counted along the global edge orientation, (triangle id, local
    interior index) for the volume class.  ``direction`` is the constant
    symmetric matrix factor in (a11, a12, a22) form and ``support`` the
    triangles the function is nonzero on.
    """

    index: int
    kind: str
    node: object
    direction: np.ndarray
    support: tuple


@dataclass(frozen=True)
class DisplacementBasisFunction:
    """One discontinuous vector mode: scalar mode ``mode`` of P_{k-1} on
    triangle ``element``, in component ``component``."""

    index: int
    element: int
    component: int
    mode: int


class DisplacementModes:
    """L2-orthonormal scalar modes of P_degree on the reference triangle.

    Built by Gram-Schmidt (Cholesky) of graded monomials against the
    reference mass matrix; scaling a mode by 1/sqrt(det_b) makes the set
    orthonormal in the L2 product of any affine image, which keeps the
    coupling block of the saddle system well-scaled.  The monomials are
    centered at the centroid, which keeps the orthonormality near
    machine precision up to degree 4.
    """

    def __init__(self, degree):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.degree = degree
        self.exponents = np.array([(a - b, b) for a in range(degree + 1)
                                   for b in range(a + 1)])
        from .quadrature import triangle_rule
        rule = triangle_rule(max(2 * degree, 1))
        mono = self._monomials(rule.points[:, 1:])
        mass = np.einsum("q,qm,qn->mn", 0.5 * rule.weights, mono, mono)
        n = len(self.exponents)
        lower = cholesky(mass, lower=True)
        coef = solve_triangular(lower, np.eye(n), lower=True)
        # one re-orthogonalization pass squares the rounding error away
        gram = coef @ mass @ coef.T
        lower = cholesky(gram, lower=True)
        self.coef = solve_triangular(lower, coef, lower=True)

    def __len__(self):
        return len(self.exponents)

    def _monomials(self, ref_points):
        p = np.atleast_2d(ref_points)
        e = self.exponents
        return ((p[:, None, 0] - 1.0 / 3.0) ** e[:, 0]
                * (p[:, None, 1] - 1.0 / 3.0) ** e[:, 1])

    def values(self, ref_points):
        """Mode values at reference points (n, 2), shape (npts, nmodes)."""
        return self._monomials(ref_points) @ self.coef.T


@lru_cache(maxsize=None)
def displacement_modes(degree):
    return DisplacementModes(degree)


def local_stress_layout(k):
    """Fixed element-local layout of stress basis slots.

    Returns (snode, kinds) where ``snode[i]`` is the local scalar node
    of slot i and ``kinds[i]`` one of the four classes.  Slots run:
    vertices x (T1, T2, T3), then per local edge: nodes x 2 flux
    directions, then per local edge: nodes x bubble, then interior
    nodes x (T1, T2, T3).
    """
    nodes = LagrangeNodeSet(k)
    snode = []
    kinds = []
    for v in range(3):
        for _ in range(3):
            snode.append(v)
            kinds.append(VERTEX)
    for i in range(3):
        for ln in nodes.edge_nodes[i]:
            for _ in range(2):
                snode.append(ln)
                kinds.append(EDGE_FLUX)
    for i in range(3):
        for ln in nodes.edge_nodes[i]:
            snode.append(ln)
            kinds.append(EDGE_BUBBLE)
    for ln in nodes.interior_nodes:
        for _ in range(3):
            snode.append(ln)
            kinds.append(VOLUME)
    return np.array(snode), kinds
