"""Executable certification of the element family's structural properties.

Five checks, all at desk scale:

- normal-flux continuity of every stress basis function across interior
  edges (H(div) conformity);
- inclusion of stress divergences in the displacement space;
- rank and nullity of the local divergence map on the element bubble
  space (built independently from barycentric products, not from the
  global basis);
- L2-orthogonality of bubble divergences to rigid motions;
- a discrete inf-sup lower bound via a dense generalized eigenproblem.

Each check returns a small report object; ``run_all`` aggregates them
into a JSON-ready dictionary.  Negative controls are available through
the ``corrupt`` hooks and must make the checks fail.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .assembly import (FROBENIUS_WEIGHT, displacement_dofs, element_wmats,
                       reference_tensors)
from .backends import get_kernels
from .elements import displacement_modes, sym_apply
from .mesh import ElementGeometry, build_unit_square_mesh, geometry_arrays
from .quadrature import edge_rule, triangle_rule
from .spaces import DisplacementSpace, StressSpace

INFSUP_DENSE_CAP = 3000

CONFORMITY_TOL = 1e-12
INCLUSION_TOL = 1e-12
RIGID_TOL = 1e-12
RANK_TOL = 1e-10
DETERMINANT_TOL = 1e-10


@dataclass
class CheckReport:
    name: str
    passed: bool
    metric: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed),
                "metric": float(self.metric), "tolerance": self.tolerance,
                "detail": self.detail}


def _corrupted_space(space, mode):
    """Apply a negative-control corruption to a built stress space.

    ``flux-sign`` flips the sign of one edge-flux function's restriction
    to the second element sharing the first interior edge, breaking the
    normal-flux match of a continuous function.  ``bubble-direction``
    replaces one edge bubble's tangent outer product by the normal one,
    giving it a spurious flux.
    """
    mesh = space.mesh
    interior = mesh.interior_edges()
    if not interior:
        raise ValueError("mesh has no interior edge to corrupt")
    edge = interior[0]
    dirs = space.element_dirs.copy()
    if mode == "flux-sign":
        target_kind, t = "edge-flux", mesh.edge_tri[edge][1]
    elif mode == "bubble-direction":
        target_kind, t = "edge-bubble", mesh.edge_tri[edge][0]
    else:
        raise ValueError("unknown corruption {!r}".format(mode))
    for slot in range(space.n_local()):
        func = space.functions[space.element_dofs[t, slot]]
        if func.kind == target_kind and func.node[0] == edge:
            if mode == "flux-sign":
                dirs[t, slot] = -dirs[t, slot]
            else:
                dirs[t, slot] = space.frames[edge, 1]
            break
    else:
        raise AssertionError("no slot of kind {} on edge {}".format(target_kind, edge))
    return dirs


def check_hdiv_conformity(mesh, k, corrupt=None):
    """Max jump of the normal flux sigma.n over interior edges, all
    stress basis functions and Gauss points, relative to the flux scale."""
    space = StressSpace(mesh, k)
    dirs = space.element_dirs if corrupt is None else _corrupted_space(space, corrupt)
    basis = space.basis
    rule = edge_rule(2 * k)
    s = rule.points
    worst = (0.0, None, None)
    scale = 0.0
    for edge in mesh.interior_edges():
        normal = mesh.normals[edge]
        lo, hi = mesh.edges[edge]
        jumps = {}
        for side, t in enumerate(mesh.edge_tri[edge]):
            tri = mesh.triangles[t]
            bary = np.zeros((len(s), 3))
            bary[:, list(tri).index(lo)] = 1.0 - s
            bary[:, list(tri).index(hi)] = s
            phi = basis.values(bary)[:, space.local_snode]
            flux = sym_apply(dirs[t][None, :, :], normal[None, None, :])
            flux = phi[:, :, None] * flux
            scale = max(scale, float(np.abs(flux).max()))
            sign = 1.0 if side == 0 else -1.0
            for slot in range(space.n_local()):
                gdof = space.element_dofs[t, slot]
                jumps[gdof] = jumps.get(gdof, 0.0) + sign * flux[:, slot, :]
        for gdof, jump in jumps.items():
            m = float(np.abs(jump).max())
            if m > worst[0]:
                worst = (m, edge, int(gdof))
    metric = worst[0] / max(scale, 1.0)
    return CheckReport("hdiv-conformity", metric <= CONFORMITY_TOL, metric,
                       CONFORMITY_TOL,
                       {"worst_edge": worst[1], "worst_function": worst[2],
                        "flux_scale": scale})


def check_div_inclusion(mesh, k, projection_degree=None):
    """Residual of projecting each basis function's divergence onto the
    displacement polynomial space, relative to the largest divergence
    norm.  Projecting onto a lower degree is the negative control."""
    if projection_degree is None:
        projection_degree = k - 1
    space = StressSpace(mesh, k)
    modes = displacement_modes(k - 1)
    keep = np.nonzero(modes.exponents.sum(axis=1) <= projection_degree)[0]
    rule = triangle_rule(2 * k)
    w = 0.5 * rule.weights
    det, nmat, _ = geometry_arrays(mesh)
    sgrads = space.basis.ref_grads(rule.points)[:, space.local_snode, :]
    pvals = modes.values(rule.points[:, 1:])[:, keep]
    wmats = element_wmats(space.element_dirs, nmat)
    div = np.einsum("eica,qia->eqic", wmats, sgrads)
    norms2 = np.einsum("e,q,eqic->ei", det, w, div ** 2)
    coef = np.einsum("q,eqic,qm->eicm", w, div, pvals) * np.sqrt(det)[:, None, None, None]
    # residual evaluated pointwise to avoid cancellation in the norms
    proj = np.einsum("eicm,qm->eqic", coef, pvals) / np.sqrt(det)[:, None, None, None]
    resid2 = np.einsum("e,q,eqic->ei", det, w, (div - proj) ** 2)
    ref = float(np.sqrt(norms2.max()))
    metric = float(np.sqrt(max(resid2.max(), 0.0))) / max(ref, 1.0)
    worst = np.unravel_index(int(resid2.argmax()), resid2.shape)
    return CheckReport("div-inclusion", metric <= INCLUSION_TOL, metric,
                       INCLUSION_TOL,
                       {"worst_element": int(worst[0]),
                        "worst_slot": int(worst[1]),
                        "projection_degree": projection_degree})


def _bubble_divergences(k, geom, rule):
    """Divergence values of the local bubble stress family on one triangle.

    The family spans lambda_{i+1} lambda_{i+2} p T_i over the three edge
    indices i, with p running over the barycentric monomials of degree
    <= k-2 and T_i the unit tangent outer product of edge i.  Returns
    (div values (nq, nb, 2), labels).
    """
    verts = np.array([geom.x0, geom.x0 + geom.b[:, 0], geom.x0 + geom.b[:, 1]])
    grads = geom.barycentric_gradients()
    lam = rule.points
    # homogeneous degree-(k-2) barycentric monomials: a basis of P_{k-2}
    exps = [(a, b, k - 2 - a - b) for a in range(k - 2, -1, -1)
            for b in range(k - 2 - a, -1, -1)]
    divs = []
    labels = []
    for i in range(3):
        j1, j2 = (i + 1) % 3, (i + 2) % 3
        tangent = verts[j2] - verts[j1]
        tangent = tangent / np.linalg.norm(tangent)
        tmat = np.array([tangent[0] ** 2, tangent[0] * tangent[1], tangent[1] ** 2])
        bub = lam[:, j1] * lam[:, j2]
        grad_bub = lam[:, j1, None] * grads[j2] + lam[:, j2, None] * grads[j1]
        for e in exps:
            p = lam[:, 0] ** e[0] * lam[:, 1] ** e[1] * lam[:, 2] ** e[2]
            grad_p = np.zeros((len(lam), 2))
            for d in range(3):
                if e[d] > 0:
                    ed = list(e)
                    ed[d] -= 1
                    mono = lam[:, 0] ** ed[0] * lam[:, 1] ** ed[1] * lam[:, 2] ** ed[2]
                    grad_p += e[d] * mono[:, None] * grads[d]
            grad_scalar = p[:, None] * grad_bub + bub[:, None] * grad_p
            divs.append(sym_apply(tmat[None, :], grad_scalar))
            labels.append((i, e))
    return np.stack(divs, axis=1), labels


def local_divergence_rank(k, vertices):
    """Numerical rank and nullity of the divergence map on the local
    bubble stress space of the triangle with the given vertices."""
    vertices = np.asarray(vertices, dtype=float)
    b = np.column_stack([vertices[1] - vertices[0], vertices[2] - vertices[0]])
    geom = ElementGeometry(b, vertices[0].copy())
    rule = triangle_rule(2 * k)
    w = 0.5 * rule.weights
    div, _ = _bubble_divergences(k, geom, rule)
    modes = displacement_modes(k - 1)
    pvals = modes.values(rule.points[:, 1:])
    # columns of d are exactly the mode coefficients of each divergence
    d = np.einsum("q,qbc,qm->cmb", w, div, pvals) * np.sqrt(geom.det_b)
    d = d.reshape(-1, div.shape[1])
    col = np.linalg.norm(d, axis=0)
    sv = np.linalg.svd(d / col[None, :], compute_uv=False)
    rank = int(np.sum(sv > RANK_TOL * sv[0]))
    return rank, d.shape[1] - rank


def rigid_motion_orthogonality(k, vertices, non_bubble=False):
    """Largest normalized inner product of bubble divergences against the
    rigid motions (1,0), (0,1), (-y,x) on the triangle.

    With ``non_bubble`` a stress with nonzero boundary flux replaces the
    first bubble; the check then fails generically."""
    vertices = np.asarray(vertices, dtype=float)
    b = np.column_stack([vertices[1] - vertices[0], vertices[2] - vertices[0]])
    geom = ElementGeometry(b, vertices[0].copy())
    rule = triangle_rule(2 * k + 2)
    w = 0.5 * rule.weights
    div, _ = _bubble_divergences(k, geom, rule)
    if non_bubble:
        # lambda_1^2 T_1 has nonzero flux on two edges
        grads = geom.barycentric_gradients()
        lam1 = rule.points[:, 1]
        tangent = (geom.b[:, 1] - geom.b[:, 0])
        tangent = tangent / np.linalg.norm(tangent)
        tmat = np.array([tangent[0] ** 2, tangent[0] * tangent[1], tangent[1] ** 2])
        bad = sym_apply(tmat[None, :], 2.0 * lam1[:, None] * grads[1][None, :])
        div = np.concatenate([bad[:, None, :], div], axis=1)
    xq = geom.to_physical(rule.points)
    rigid = np.stack([
        np.broadcast_to([1.0, 0.0], (len(xq), 2)),
        np.broadcast_to([0.0, 1.0], (len(xq), 2)),
        np.column_stack([-xq[:, 1], xq[:, 0]]),
    ])
    ip = np.einsum("q,qbc,rqc->br", w, div, rigid) * geom.det_b
    div_norm = np.sqrt(np.einsum("q,qbc->b", w, div ** 2) * geom.det_b)
    rig_norm = np.sqrt(np.einsum("q,rqc->r", w, rigid ** 2) * geom.det_b)
    metric = float(np.abs(ip / (div_norm[:, None] * rig_norm[None, :])).max())
    return CheckReport("rigid-motion-orthogonality", metric <= RIGID_TOL,
                       metric, RIGID_TOL, {"non_bubble": non_bubble})


def discrete_infsup_estimate(mesh, k, kernels=None):
    """Smallest generalized singular value of the divergence coupling,
    measured in the H(div) norm on stresses and L2 on displacements.

    Dense computation on purpose; raises once dim exceeds the desk-scale
    cap."""
    space = StressSpace(mesh, k)
    disp = DisplacementSpace(mesh, k)
    if space.dim > INFSUP_DENSE_CAP:
        raise ValueError(
            "stress dimension {} exceeds dense cap {}".format(space.dim, INFSUP_DENSE_CAP))
    kern = kernels or get_kernels()
    det, nmat, _ = geometry_arrays(mesh)
    ref = reference_tensors(k, space.local_snode)
    dirs = space.element_dirs
    wmats = element_wmats(dirs, nmat)
    mass_blocks = kern.stress_mass_blocks(det, dirs, FROBENIUS_WEIGHT, ref.smass)
    divg_blocks = kern.div_gram_blocks(det, wmats, ref.gref)
    x = np.zeros((space.dim, space.dim))
    sdof = space.element_dofs
    for e in range(mesh.num_triangles):
        idx = np.ix_(sdof[e], sdof[e])
        x[idx] += mass_blocks[e] + divg_blocks[e]
    b_blocks = kern.coupling_blocks(np.sqrt(det), wmats, ref.dref)
    bmat = np.zeros((disp.dim, space.dim))
    vdof = displacement_dofs(disp)
    for e in range(mesh.num_triangles):
        bmat[np.ix_(vdof[e], sdof[e])] += b_blocks[e]
    # displacement mass; identity by construction but assembled honestly
    rule = triangle_rule(2 * k)
    pv = disp.modes.values(rule.points[:, 1:])
    nloc = np.einsum("q,qm,qn->mn", 0.5 * rule.weights, pv, pv)
    n = np.zeros((disp.dim, disp.dim))
    for e in range(mesh.num_triangles):
        for c in range(2):
            lo = vdof[e, c * disp.n_scalar]
            sl = slice(lo, lo + disp.n_scalar)
            n[sl, sl] = nloc
    cf = scipy.linalg.cho_factor(x)
    g = bmat @ scipy.linalg.cho_solve(cf, bmat.T)
    eig = scipy.linalg.eigh(g, n, eigvals_only=True)
    return float(np.sqrt(max(eig[0], 0.0)))


def outer_product_triple_determinant(v1, v2):
    """Determinant of the 3x3 component matrix of the outer products
    v1 v1^T, v2 v2^T, (v1+v2)(v1+v2)^T; equals (a1 b2 - a2 b1)^3."""
    a1, a2 = v1
    b1, b2 = v2
    m = np.array([
        [a1 * a1, b1 * b1, (a1 + b1) ** 2],
        [a2 * a2, b2 * b2, (a2 + b2) ** 2],
        [a1 * a2, b1 * b2, (a1 + b1) * (a2 + b2)],
    ])
    return float(np.linalg.det(m))


def _random_triangles(count, seed=0, min_area=0.05):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        v = rng.uniform(0.0, 1.0, size=(3, 2))
        d1, d2 = v[1] - v[0], v[2] - v[0]
        area = 0.5 * (d1[0] * d2[1] - d1[1] * d2[0])
        if area < -min_area:
            v = v[[0, 2, 1]]
            area = -area
        if area > min_area:
            out.append(v)
    return out


def run_all(k, level, corrupt=None, rank_samples=20, seed=0):
    """Run every check on the level-``level`` unit-square mesh.

    ``corrupt`` in {None, 'conformity', 'div-inclusion'} switches on a
    negative control that must fail.
    """
    mesh = build_unit_square_mesh(level)
    reports = []
    reports.append(check_hdiv_conformity(
        mesh, k, corrupt="flux-sign" if corrupt == "conformity" else None))
    reports.append(check_div_inclusion(
        mesh, k, projection_degree=k - 2 if corrupt == "div-inclusion" else None))

    expected_rank = k * k + k - 3
    expected_nullity = (k - 2) * (k - 3) // 2
    ranks = {local_divergence_rank(k, tri) for tri in _random_triangles(rank_samples, seed)}
    rank_ok = ranks == {(expected_rank, expected_nullity)}
    reports.append(CheckReport(
        "local-divergence-rank", rank_ok, float(len(ranks)), 1.0,
        {"observed": sorted(ranks), "expected_rank": expected_rank,
         "expected_nullity": expected_nullity, "samples": rank_samples}))

    worst = 0.0
    for tri in _random_triangles(5, seed + 1):
        worst = max(worst, rigid_motion_orthogonality(k, tri).metric)
    reports.append(CheckReport("rigid-motion-orthogonality",
                               worst <= RIGID_TOL, worst, RIGID_TOL, {}))

    rng = np.random.default_rng(seed + 2)
    det_worst = 0.0
    for _ in range(200):
        v1, v2 = rng.normal(size=2), rng.normal(size=2)
        det = outer_product_triple_determinant(v1, v2)
        expected = (v1[0] * v2[1] - v1[1] * v2[0]) ** 3
        det_worst = max(det_worst, abs(det - expected) / max(abs(expected), 1e-30))
    reports.append(CheckReport("outer-product-determinant", det_worst <= DETERMINANT_TOL,
                               det_worst, DETERMINANT_TOL, {"pairs": 200}))

    beta = discrete_infsup_estimate(mesh, k)
    reports.append(CheckReport("discrete-infsup", beta > 0.0, beta, 0.0,
                               {"level": level}))

    return {
        "k": k,
        "level": level,
        "corrupt": corrupt,
        "passed": all(r.passed for r in reports),
        "checks": [r.to_dict() for r in reports],
    }
