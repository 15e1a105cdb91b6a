"""Sparse direct solution of the assembled saddle system.

The full symmetric indefinite matrix is factored by SuperLU (scipy's
``splu``) with its default COLAMD column ordering and threshold partial
pivoting on the unsymmetric factorization of the whole matrix; the zero
displacement block is never perturbed.  Output is deterministic for a
fixed system.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import splu

RESIDUAL_TOL = 1e-10
PIVOT_RTOL = 1e-14


class SolverError(RuntimeError):
    pass


@dataclass
class SolveResult:
    stress: np.ndarray
    displacement: np.ndarray
    residual: float

    def __iter__(self):
        return iter((self.stress, self.displacement))


def solve(system, rtol=RESIDUAL_TOL):
    """Solve for (stress, displacement) coefficients.

    Raises SolverError on singular or numerically rank-deficient
    factors (reporting the pivot position) and when the relative
    residual exceeds ``rtol``.
    """
    matrix = system.matrix()
    rhs = system.rhs()
    if matrix.shape[0] != len(rhs):
        raise SolverError("system dimensions are inconsistent")
    try:
        lu = splu(matrix)
    except RuntimeError as exc:
        raise SolverError("sparse factorization failed: {}".format(exc)) from exc
    pivots = np.abs(lu.U.diagonal())
    if pivots.min() < PIVOT_RTOL * pivots.max():
        raise SolverError(
            "numerically rank-deficient system: pivot {} of {} is {:.3e}".format(
                int(pivots.argmin()), len(pivots), float(pivots.min())))
    z = lu.solve(rhs)
    rhs_norm = np.linalg.norm(rhs)
    res_norm = np.linalg.norm(matrix @ z - rhs)
    residual = res_norm / rhs_norm if rhs_norm > 0.0 else res_norm
    if residual > rtol:
        raise SolverError(
            "direct solve residual {:.3e} exceeds tolerance {:.1e}".format(residual, rtol))
    ns = system.dim_stress
    return SolveResult(z[:ns], z[ns:], float(residual))
