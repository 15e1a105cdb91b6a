"""Conforming mixed finite elements for planar linear elasticity.

Symmetric stresses are approximated by the continuous P_k space
enriched with edge-supported H(div) bubbles, displacements by
discontinuous P_{k-1} vectors, for k = 3, 4, 5.  The package assembles
and solves the resulting saddle-point systems, reproduces convergence
studies on the unit square, and numerically certifies the stability
properties of the element pair.
"""

from .analysis import (ConvergenceTable, ErrorReport, ManufacturedSolution,
                       compute_errors, default_solution, exact_fields,
                       polynomial_solution, run_study)
from .assembly import ComplianceTensor, SaddleSystem, assemble, compliance_apply
from .backends import backend_name, get_kernels
from .elements import (DisplacementBasisFunction, EdgeMatrixFrame,
                       LagrangeNodeSet, StressBasisFunction, edge_matrix_frame,
                       eval_scalar_basis, lagrange_nodes)
from .mesh import ElementGeometry, Mesh, build_unit_square_mesh, element_geometry
from .quadrature import QuadratureRule, edge_rule, triangle_rule
from .solver import SolveResult, SolverError, solve
from .spaces import (DisplacementSpace, DofMap, StressSpace,
                     build_displacement_space, build_stress_space)

__version__ = "0.1.0"

__all__ = [
    "ComplianceTensor", "ConvergenceTable", "DisplacementBasisFunction",
    "DisplacementSpace", "DofMap", "EdgeMatrixFrame", "ElementGeometry",
    "ErrorReport", "LagrangeNodeSet", "ManufacturedSolution", "Mesh",
    "QuadratureRule", "SaddleSystem", "SolveResult", "SolverError",
    "StressBasisFunction", "StressSpace", "assemble", "backend_name",
    "build_displacement_space", "build_stress_space",
    "build_unit_square_mesh", "compliance_apply", "compute_errors",
    "default_solution", "edge_matrix_frame", "edge_rule", "element_geometry",
    "eval_scalar_basis", "exact_fields", "get_kernels", "lagrange_nodes",
    "polynomial_solution", "run_study", "solve", "triangle_rule",
]
