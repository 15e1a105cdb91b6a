"""Manufactured solutions, error norms and convergence studies.

The default exact displacement is

    u = (e^{x-y} x (1-x) y (1-y),  sin(pi x) sin(pi y)),

which vanishes on the boundary of the unit square; stress and load
follow from the material law, sigma = 2 mu eps(u) + lambda tr(eps(u)) I
and f = div sigma, with all derivatives hand-coded (the tests
cross-check them against finite differences).
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .assembly import ComplianceTensor, assemble, displacement_dofs, element_wmats
from .backends import get_kernels
from .elements import scalar_basis
from .mesh import build_unit_square_mesh, geometry_arrays
from .quadrature import triangle_rule
from .solver import solve
from .spaces import DisplacementSpace, StressSpace
from . import assembly as _assembly


@dataclass
class ManufacturedSolution:
    """Closed-form fields; each callable maps (n, 2) points to arrays."""

    displacement: callable
    stress: callable
    load: callable
    mu: float
    lam: float
    description: str = ""


def _stress_from_strain(e11, e12, e22, mu, lam):
    tr = e11 + e22
    return np.stack([2.0 * mu * e11 + lam * tr,
                     2.0 * mu * e12,
                     2.0 * mu * e22 + lam * tr], axis=-1)


def default_solution(mu=0.5, lam=1.0):
    """The exponential/trigonometric benchmark solution."""

    def parts(x):
        px, py = x[..., 0], x[..., 1]
        ex = np.exp(px - py)
        g, dg = px * (1.0 - px), 1.0 - 2.0 * px
        h, dh = py * (1.0 - py), 1.0 - 2.0 * py
        sx, cx = np.sin(np.pi * px), np.cos(np.pi * px)
        sy, cy = np.sin(np.pi * py), np.cos(np.pi * py)
        return ex, g, dg, h, dh, sx, cx, sy, cy

    def displacement(x):
        ex, g, _, h, _, sx, _, sy, _ = parts(x)
        return np.stack([ex * g * h, sx * sy], axis=-1)

    def gradients(x):
        ex, g, dg, h, dh, sx, cx, sy, cy = parts(x)
        u1x = ex * (g + dg) * h
        u1y = ex * g * (dh - h)
        u2x = np.pi * cx * sy
        u2y = np.pi * sx * cy
        return u1x, u1y, u2x, u2y

    def stress(x):
        u1x, u1y, u2x, u2y = gradients(x)
        return _stress_from_strain(u1x, 0.5 * (u1y + u2x), u2y, mu, lam)

    def load(x):
        ex, g, dg, h, dh, sx, cx, sy, cy = parts(x)
        u1xx = ex * (g + 2.0 * dg - 2.0) * h
        u1yy = ex * g * (h - 2.0 * dh - 2.0)
        u1xy = ex * (g + dg) * (dh - h)
        u2xx = -np.pi ** 2 * sx * sy
        u2yy = -np.pi ** 2 * sx * sy
        u2xy = np.pi ** 2 * cx * cy
        f1 = (2.0 * mu + lam) * u1xx + mu * u1yy + (lam + mu) * u2xy
        f2 = (lam + mu) * u1xy + mu * u2xx + (2.0 * mu + lam) * u2yy
        return np.stack([f1, f2], axis=-1)

    return ManufacturedSolution(displacement, stress, load, mu, lam,
                                "exp/sin benchmark")


def polynomial_solution(mu=0.5, lam=1.0, scale=1.0):
    """Degree-4 displacement with both components c x(1-x) y(1-y); its
    stress is cubic, so the k=5 spaces contain the exact solution."""

    def gh(x):
        px, py = x[..., 0], x[..., 1]
        return (px * (1.0 - px), 1.0 - 2.0 * px,
                py * (1.0 - py), 1.0 - 2.0 * py)

    def displacement(x):
        g, _, h, _ = gh(x)
        w = scale * g * h
        return np.stack([w, w], axis=-1)

    def stress(x):
        g, dg, h, dh = gh(x)
        ux = scale * dg * h
        uy = scale * g * dh
        return _stress_from_strain(ux, 0.5 * (uy + ux), uy, mu, lam)

    def load(x):
        g, dg, h, dh = gh(x)
        wxx = -2.0 * scale * h
        wyy = -2.0 * scale * g
        wxy = scale * dg * dh
        f1 = (2.0 * mu + lam) * wxx + mu * wyy + (lam + mu) * wxy
        f2 = (lam + mu) * wxy + mu * wxx + (2.0 * mu + lam) * wyy
        return np.stack([f1, f2], axis=-1)

    return ManufacturedSolution(displacement, stress, load, mu, lam,
                                "polynomial degree-4 field")


@dataclass
class ErrorReport:
    """Per-level errors in the table's column order plus solver and
    divergence-identity diagnostics."""

    level: int
    err_u: float
    err_sigma: float
    err_div: float
    dim_v: int
    dim_sigma: int
    residual: float
    div_identity: float
    load_norm: float


@dataclass
class ConvergenceTable:
    k: int
    mu: float
    lam: float
    reports: list = field(default_factory=list)

    def orders(self):
        """log2 error ratios of successive levels; None on the first."""
        cols = ("err_u", "err_sigma", "err_div")
        out = []
        for i, rep in enumerate(self.reports):
            if i == 0:
                out.append({c: None for c in cols})
            else:
                prev = self.reports[i - 1]
                out.append({c: math.log2(getattr(prev, c) / getattr(rep, c))
                            for c in cols})
        return out

    def rows(self):
        for rep, orders in zip(self.reports, self.orders()):
            yield (rep.level, rep.err_u, orders["err_u"], rep.err_sigma,
                   orders["err_sigma"], rep.err_div, orders["err_div"],
                   rep.dim_v, rep.dim_sigma)

    def to_text(self):
        header = ("level", "|u-u_h|_0", "order", "|sig-sig_h|_0", "order",
                  "|div(sig-sig_h)|_0", "order", "dim V_h", "dim Sig_h")
        lines = ["{:>5} {:>14} {:>6} {:>14} {:>6} {:>18} {:>6} {:>8} {:>9}".format(*header)]
        for lvl, eu, ou, es, os_, ed, od, dv, ds in self.rows():
            lines.append("{:>5d} {:>14.6e} {:>6} {:>14.6e} {:>6} {:>18.6e} {:>6} {:>8d} {:>9d}".format(
                lvl, eu, _fmt_order(ou), es, _fmt_order(os_), ed, _fmt_order(od), dv, ds))
        return "\n".join(lines) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["level", "u_err", "u_order", "sigma_err", "sigma_order",
                         "div_err", "div_order", "dim_v", "dim_sigma"])
        for lvl, eu, ou, es, os_, ed, od, dv, ds in self.rows():
            writer.writerow([lvl, "{:.8e}".format(eu), _fmt_order(ou, ""),
                             "{:.8e}".format(es), _fmt_order(os_, ""),
                             "{:.8e}".format(ed), _fmt_order(od, ""), dv, ds])
        return buf.getvalue()

    def to_json(self):
        rows = []
        for lvl, eu, ou, es, os_, ed, od, dv, ds in self.rows():
            rows.append({"level": lvl, "u_err": eu, "u_order": ou,
                         "sigma_err": es, "sigma_order": os_,
                         "div_err": ed, "div_order": od,
                         "dim_v": dv, "dim_sigma": ds})
        return json.dumps({"k": self.k, "mu": self.mu, "lambda": self.lam,
                           "rows": rows}, indent=2) + "\n"


def _fmt_order(value, blank=""):
    return blank if value is None else "{:.2f}".format(value)


def exact_fields(solution, points):
    """(u, sigma, f) of a manufactured solution at (n, 2) points."""
    points = np.atleast_2d(points)
    return (solution.displacement(points), solution.stress(points),
            solution.load(points))


def compute_errors(mesh, k, stress_space, disp_space, stress_coef, disp_coef,
                   solution, residual=0.0, quad_degree=None, kernels=None):
    """L2 errors of a discrete solution against the exact fields.

    Norms use elementwise quadrature at degree 2k+4; the divergence
    error pairs the analytic divergence of the discrete stress with the
    exact load.  Also evaluates the divergence identity
    |div sigma_h - P_h f| against |f|.
    """
    kern = kernels or get_kernels()
    if quad_degree is None:
        quad_degree = 2 * k + 4
    rule = triangle_rule(quad_degree)
    w = 0.5 * rule.weights
    basis = scalar_basis(k)
    det, nmat, _ = geometry_arrays(mesh)
    sqdet = np.sqrt(det)

    snode = stress_space.local_snode
    svals = np.ascontiguousarray(basis.values(rule.points)[:, snode])
    sgrads = np.ascontiguousarray(basis.ref_grads(rule.points)[:, snode, :])
    pvals = disp_space.modes.values(rule.points[:, 1:])
    xq = _assembly.physical_points(mesh, rule.points)

    u_ex, sig_ex, f_ex = exact_fields(solution, xq.reshape(-1, 2))
    u_ex = u_ex.reshape(xq.shape)
    sig_ex = sig_ex.reshape(xq.shape[:2] + (3,))
    f_ex = f_ex.reshape(xq.shape)

    vdof = displacement_dofs(disp_space)
    nm = disp_space.n_scalar
    # mode scaling 1/sqrt(det_b) folded into the coefficients
    vcoef = disp_coef[vdof].reshape(-1, 2, nm) / sqdet[:, None, None]
    u_h = kern.displacement_values(np.ascontiguousarray(vcoef), pvals)

    scoef = np.ascontiguousarray(stress_coef[stress_space.element_dofs])
    sig_h = kern.stress_values(scoef, stress_space.element_dirs, svals)
    wmats = element_wmats(stress_space.element_dirs, nmat)
    div_h = kern.stress_divergence_values(scoef, wmats, sgrads)

    def l2(values, weight=None):
        sq = values ** 2 if weight is None else values ** 2 * weight
        return math.sqrt(float(np.einsum("e,q,eq->", det, w, sq.sum(axis=-1))))

    frob = np.array([1.0, 2.0, 1.0])
    err_u = l2(u_ex - u_h)
    err_sigma = l2(sig_ex - sig_h, frob)
    err_div = l2(f_ex - div_h)

    # local L2 projection of f onto the displacement space
    fproj_coef = np.einsum("q,eqc,qm->ecm", w, f_ex, pvals) * sqdet[:, None, None]
    fproj = kern.displacement_values(
        np.ascontiguousarray(fproj_coef / sqdet[:, None, None]), pvals)
    div_identity = l2(fproj - div_h)
    load_norm = l2(f_ex)

    return ErrorReport(mesh.level, err_u, err_sigma, err_div,
                       disp_space.dim, stress_space.dim,
                       residual, div_identity, load_norm)


def run_study(k, max_level, mu=0.5, lam=1.0, solution=None, kernels=None,
              dump_system=None):
    """One solve per level on the uniformly refined unit square."""
    if solution is None:
        solution = default_solution(mu, lam)
    compliance = ComplianceTensor(mu, lam)
    table = ConvergenceTable(k, mu, lam)
    for level in range(1, max_level + 1):
        mesh = build_unit_square_mesh(level)
        stress_space = StressSpace(mesh, k)
        disp_space = DisplacementSpace(mesh, k)
        system = assemble(mesh, stress_space, disp_space, compliance,
                          solution.load, kernels=kernels)
        if dump_system is not None and level == max_level:
            system.dump_matrix_market(dump_system)
        result = solve(system)
        report = compute_errors(mesh, k, stress_space, disp_space,
                                result.stress, result.displacement, solution,
                                residual=result.residual, kernels=kernels)
        table.reports.append(report)
    return table
