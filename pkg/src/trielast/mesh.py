"""Triangulations of the unit square with uniform red refinement.

The level-1 grid is the unit square cut by its north-east diagonal, the
one from (0, 0) to (1, 1), into two right triangles.  Each refinement
splits every triangle into four congruent half-sized children through
the edge midpoints.  Meshes are immutable once built.
"""

import json

import numpy as np


class Mesh:
    """Triangulation with oriented edges and element adjacency.

    Attributes
    ----------
    points : (nv, 2) float array
        Vertex coordinates.
    triangles : (nt, 3) int array
        Vertex indices per triangle, counterclockwise.
    tri_edges : (nt, 3) int array
        Global edge index opposite each local vertex.
    edges : (ne, 2) int array
        Vertex indices per edge, lower index first.
    edge_tri : list of tuples
        Adjacent triangle indices per edge (1 on the boundary, 2 inside),
        ascending.
    tangents, normals : (ne, 2) float arrays
        Unit edge frames; the tangent points from the lower-indexed
        vertex to the higher, the normal is the tangent rotated -90deg.
    level : int
    """

    def __init__(self, points, triangles, level):
        self.points = np.asarray(points, dtype=float)
        self.triangles = np.asarray(triangles, dtype=np.int64)
        self.level = level
        self._build_edges()
        self._build_frames()
        self.points.setflags(write=False)
        self.triangles.setflags(write=False)

    def _build_edges(self):
        tris = self.triangles
        # local edge i sits opposite local vertex i
        pairs = np.stack([tris[:, [1, 2]], tris[:, [2, 0]], tris[:, [0, 1]]], axis=1)
        pairs = np.sort(pairs.reshape(-1, 2), axis=1)
        self.edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
        self.tri_edges = inverse.reshape(-1, 3)
        adj = [[] for _ in range(len(self.edges))]
        for t in range(len(tris)):
            for le in range(3):
                adj[self.tri_edges[t, le]].append(t)
        self.edge_tri = [tuple(sorted(a)) for a in adj]
        self.edges.setflags(write=False)
        self.tri_edges.setflags(write=False)

    def _build_frames(self):
        vec = self.points[self.edges[:, 1]] - self.points[self.edges[:, 0]]
        length = np.linalg.norm(vec, axis=1)
        self.tangents = vec / length[:, None]
        self.normals = np.column_stack([self.tangents[:, 1], -self.tangents[:, 0]])
        self.edge_lengths = length
        for a in (self.tangents, self.normals, self.edge_lengths):
            a.setflags(write=False)

    @property
    def num_vertices(self):
        return len(self.points)

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def num_triangles(self):
        return len(self.triangles)

    def interior_edges(self):
        return [e for e, adj in enumerate(self.edge_tri) if len(adj) == 2]

    def boundary_edges(self):
        return [e for e, adj in enumerate(self.edge_tri) if len(adj) == 1]

    def to_json(self):
        """Debug dump of points, triangles and edges."""
        return json.dumps({
            "level": self.level,
            "points": self.points.tolist(),
            "triangles": self.triangles.tolist(),
            "edges": self.edges.tolist(),
            "edge_triangles": [list(a) for a in self.edge_tri],
        })


class ElementGeometry:
    """Affine map data of one triangle.

    ``b`` maps reference coordinates to physical ones, x = b xhat + x0,
    and the rows of its inverse are the barycentric gradients n1, n2
    with n0 = -n1 - n2.  ``det_b`` equals twice the triangle area.
    """

    def __init__(self, b, x0):
        det = b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]
        if det <= 0.0:
            raise ValueError("degenerate or negatively oriented triangle, det={}".format(det))
        self.b = b
        self.x0 = x0
        self.det_b = det
        self.inv_b = np.array([[b[1, 1], -b[0, 1]], [-b[1, 0], b[0, 0]]]) / det
        self.n1 = self.inv_b[0].copy()
        self.n2 = self.inv_b[1].copy()
        self.n0 = -self.n1 - self.n2

    @property
    def area(self):
        return 0.5 * self.det_b

    def barycentric_gradients(self):
        """Gradients of (lambda0, lambda1, lambda2) as a (3, 2) array."""
        return np.array([self.n0, self.n1, self.n2])

    def to_physical(self, bary):
        """Map barycentric points (n, 3) to physical coordinates (n, 2)."""
        bary = np.atleast_2d(bary)
        verts = np.array([self.x0, self.x0 + self.b[:, 0], self.x0 + self.b[:, 1]])
        return bary @ verts

    def to_barycentric(self, x):
        """Map physical points (n, 2) to barycentric coordinates (n, 3)."""
        x = np.atleast_2d(x)
        ref = (x - self.x0) @ self.inv_b.T
        return np.column_stack([1.0 - ref[:, 0] - ref[:, 1], ref[:, 0], ref[:, 1]])


def element_geometry(mesh, t):
    """Geometry of triangle ``t`` in ``mesh``."""
    v = mesh.points[mesh.triangles[t]]
    b = np.column_stack([v[1] - v[0], v[2] - v[0]])
    return ElementGeometry(b, v[0].copy())


def geometry_arrays(mesh):
    """Vectorized affine-map data for all triangles.

    Returns (det, nmat, x0): det has shape (nt,) and equals twice the
    areas, nmat is (nt, 2, 2) with the barycentric gradients n1, n2 as
    rows, x0 is (nt, 2).
    """
    v = mesh.points[mesh.triangles]
    b0 = v[:, 1] - v[:, 0]
    b1 = v[:, 2] - v[:, 0]
    det = b0[:, 0] * b1[:, 1] - b0[:, 1] * b1[:, 0]
    if np.any(det <= 0.0):
        raise ValueError("mesh contains degenerate or flipped triangles")
    nmat = np.empty((len(det), 2, 2))
    nmat[:, 0, 0] = b1[:, 1]
    nmat[:, 0, 1] = -b1[:, 0]
    nmat[:, 1, 0] = -b0[:, 1]
    nmat[:, 1, 1] = b0[:, 0]
    nmat /= det[:, None, None]
    return det, nmat, v[:, 0].copy()


def build_unit_square_mesh(level):
    """Uniformly refined triangulation of [0,1]^2.

    Level 1 is the two-triangle north-east cut; level l has 2*4^(l-1)
    triangles.  Vertices of level l are a prefix of those of level l+1.
    """
    if level < 1:
        raise ValueError("level must be >= 1, got {}".format(level))
    points = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    triangles = np.array([[0, 1, 2], [0, 2, 3]])
    mesh = Mesh(points, triangles, 1)
    for lvl in range(2, level + 1):
        mesh = _refine(mesh, lvl)
    return mesh


def _refine(mesh, new_level):
    """Red refinement: four congruent children per triangle."""
    midpoints = 0.5 * (mesh.points[mesh.edges[:, 0]] + mesh.points[mesh.edges[:, 1]])
    points = np.vstack([mesh.points, midpoints])
    nv = mesh.num_vertices
    t = mesh.triangles
    m = nv + mesh.tri_edges  # midpoint vertex ids per local edge
    children = np.concatenate([
        np.stack([t[:, 0], m[:, 2], m[:, 1]], axis=1),
        np.stack([t[:, 1], m[:, 0], m[:, 2]], axis=1),
        np.stack([t[:, 2], m[:, 1], m[:, 0]], axis=1),
        np.stack([m[:, 0], m[:, 1], m[:, 2]], axis=1),
    ])
    return Mesh(points, children, new_level)
