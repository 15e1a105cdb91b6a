import math

import numpy as np
import pytest

from trielast.quadrature import MAX_TRIANGLE_DEGREE, edge_rule, triangle_rule


def triangle_monomial_integral(a, b, c):
    """Exact integral of lambda0^a lambda1^b lambda2^c over the reference
    triangle: 2A * a! b! c! / (a+b+c+2)! with A = 1/2."""
    return (math.factorial(a) * math.factorial(b) * math.factorial(c)
            / math.factorial(a + b + c + 2))


def rule_integral(rule, a, b, c):
    lam = rule.points
    vals = lam[:, 0] ** a * lam[:, 1] ** b * lam[:, 2] ** c
    return 0.5 * float(rule.weights @ vals)


@pytest.mark.parametrize("degree", range(1, MAX_TRIANGLE_DEGREE + 1))
def test_triangle_rule_monomial_exactness(degree):
    rule = triangle_rule(degree)
    for total in range(degree + 1):
        for a in range(total + 1):
            for b in range(total - a + 1):
                c = total - a - b
                exact = triangle_monomial_integral(a, b, c)
                got = rule_integral(rule, a, b, c)
                assert got == pytest.approx(exact, rel=1e-13), (a, b, c)


def test_triangle_rule_weights_positive_and_normalized():
    for degree in (1, 4, 9, 12):
        rule = triangle_rule(degree)
        assert np.all(rule.weights > 0.0)
        assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)
        assert np.allclose(rule.points.sum(axis=1), 1.0, atol=1e-14)


def test_degree_one_is_single_point_at_centroid():
    rule = triangle_rule(1)
    assert len(rule) == 1
    assert rule.weights[0] == pytest.approx(1.0)
    assert np.allclose(rule.points[0], [1 / 3, 1 / 3, 1 / 3], atol=1e-15)


def test_bubble_integral_matches_factorial_formula():
    # lambda0*lambda1*lambda2 integrates to 1/120
    rule = triangle_rule(3)
    assert rule_integral(rule, 1, 1, 1) == pytest.approx(1.0 / 120.0, rel=1e-13)


def test_degree_ten_high_monomial():
    # x^6 y^4 on the reference triangle (x = lambda1, y = lambda2)
    rule = triangle_rule(10)
    assert rule_integral(rule, 0, 6, 4) == pytest.approx(
        triangle_monomial_integral(0, 6, 4), rel=1e-13)


def test_triangle_rule_rejects_unsupported_degrees():
    with pytest.raises(ValueError):
        triangle_rule(0)
    with pytest.raises(ValueError):
        triangle_rule(MAX_TRIANGLE_DEGREE + 1)


def test_edge_rule_midpoint():
    rule = edge_rule(1)
    assert len(rule) == 1
    assert rule.points[0] == pytest.approx(0.5)
    assert rule.weights[0] == pytest.approx(1.0)


def test_edge_rule_two_point_gauss_nodes():
    rule = edge_rule(3)
    assert len(rule) == 2
    # classical nodes +-1/sqrt(3) mapped to (0, 1)
    expected = 0.5 * (1.0 + np.array([-1.0, 1.0]) / np.sqrt(3.0))
    assert np.allclose(np.sort(rule.points), expected, atol=1e-15)


@pytest.mark.parametrize("degree", range(1, 16))
def test_edge_rule_exactness(degree):
    rule = edge_rule(degree)
    for p in range(degree + 1):
        got = float(rule.weights @ rule.points ** p)
        assert got == pytest.approx(1.0 / (p + 1), rel=1e-13), p


def test_edge_rule_quartic_example():
    rule = edge_rule(4)
    assert float(rule.weights @ rule.points ** 4) == pytest.approx(0.2, rel=1e-14)


def test_edge_rule_rejects_zero_degree():
    with pytest.raises(ValueError):
        edge_rule(0)
