"""Quadrature rules on the reference triangle and the unit interval.

Triangle rules are built by collapsing a tensor-product Gauss-Legendre x
Gauss-Jacobi grid through the Duffy map, so any polynomial degree is
available without hard-coded tables and all weights are positive.
"""

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

MAX_TRIANGLE_DEGREE = 24


class QuadratureRule:
    """Points and weights exact for polynomials up to ``degree``.

    Triangle rules store barycentric points of shape (n, 3) and weights
    that sum to 1; integrals are scaled by the element measure at the
    use site.  Edge rules store points in (0, 1) with weights summing
    to 1, scaled by the edge length at the use site.
    """

    def __init__(self, points, weights, degree):
        self.points = np.asarray(points, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.degree = int(degree)

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        return "QuadratureRule(n={}, degree={})".format(len(self), self.degree)


def triangle_rule(degree):
    """Rule integrating all polynomials of total degree <= ``degree``
    exactly on a triangle.

    Uses the Duffy substitution x = u(1-v), y = v on the reference
    triangle (0,0), (1,0), (0,1): Gauss-Legendre in u and Gauss-Jacobi
    with weight (1-v) in v absorb the Jacobian.
    """
    if degree < 1 or degree > MAX_TRIANGLE_DEGREE:
        raise ValueError(
            "triangle rule degree must be in [1, {}], got {}".format(
                MAX_TRIANGLE_DEGREE, degree))
    n = (degree + 2) // 2
    xu, wu = roots_legendre(n)
    xv, wv = roots_jacobi(n, 1, 0)
    # map both 1D rules from [-1, 1] to [0, 1]; the Jacobi weight
    # (1-t) on [-1,1] becomes 2(1-v), hence the extra 1/4
    u = 0.5 * (xu + 1.0)
    wu = 0.5 * wu
    v = 0.5 * (xv + 1.0)
    wv = 0.25 * wv
    uu, vv = np.meshgrid(u, v, indexing="ij")
    x = (uu * (1.0 - vv)).ravel()
    y = vv.ravel()
    w = np.outer(wu, wv).ravel()
    bary = np.column_stack([1.0 - x - y, x, y])
    # reference-triangle measure is 1/2; normalize so weights sum to 1
    return QuadratureRule(bary, w / w.sum(), degree)


def edge_rule(degree):
    """Gauss-Legendre rule on (0, 1) exact for degree <= ``degree``."""
    if degree < 1:
        raise ValueError("edge rule degree must be >= 1, got {}".format(degree))
    n = (degree + 2) // 2
    x, w = roots_legendre(n)
    return QuadratureRule(0.5 * (x + 1.0), 0.5 * w, 2 * n - 1)
