import math

import numpy as np
import pytest
from scipy.special import gamma

from ridgekit.polycore import MultiIndexPolynomial, monomials_up_to
from ridgekit.quadrature import (NODE_CAP, NodeCapError, ball_sup_grid,
                                 ball_volume, build_ball_rule,
                                 build_sphere_rule, inner_product, lq_norm,
                                 sphere_surface)

WEIGHT_SUM_TOL = 1e-12
EXACTNESS_TOL = 1e-10


def beta_moment_ball(k, d):
    """Independent oracle for the ball monomial moment via Gamma functions:
    zero when any exponent is odd, otherwise a surface Beta integral divided
    by |k| + d for the radial part."""
    if any(e % 2 for e in k):
        return 0.0
    num = 2.0 * np.prod([gamma((e + 1) / 2.0) for e in k])
    surface = num / gamma((sum(k) + d) / 2.0)
    return surface / (sum(k) + d)


def beta_moment_sphere(k, m):
    if any(e % 2 for e in k):
        return 0.0
    num = 2.0 * np.prod([gamma((e + 1) / 2.0) for e in k])
    return num / gamma((sum(k) + m) / 2.0)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_ball_weights_sum_to_volume(d):
    rule = build_ball_rule(d, 8)
    assert abs(rule.weights.sum() - ball_volume(d)) < WEIGHT_SUM_TOL


@pytest.mark.parametrize("d", [2, 3, 4])
def test_sphere_weights_sum_to_surface(d):
    rule = build_sphere_rule(d - 1, 8)  # S^(d-1) in R^d
    assert abs(rule.weights.sum() - sphere_surface(d)) < WEIGHT_SUM_TOL


@pytest.mark.parametrize("d,degree", [(1, 10), (2, 9), (3, 8), (4, 6)])
def test_ball_monomial_exactness_against_beta_oracle(d, degree):
    rule = build_ball_rule(d, degree)
    for k in monomials_up_to(d, degree):
        value = float(np.sum(rule.weights * np.prod(rule.nodes ** np.array(k), axis=1)))
        assert abs(value - beta_moment_ball(k, d)) < EXACTNESS_TOL, k


@pytest.mark.parametrize("m,degree", [(2, 10), (3, 8), (4, 6)])
def test_sphere_monomial_exactness_against_beta_oracle(m, degree):
    rule = build_sphere_rule(m - 1, degree)
    for k in monomials_up_to(m, degree):
        if sum(k) > degree:
            continue
        value = float(np.sum(rule.weights * np.prod(rule.nodes ** np.array(k), axis=1)))
        assert abs(value - beta_moment_sphere(k, m)) < EXACTNESS_TOL, k


def test_sphere_nodes_on_unit_sphere():
    rule = build_sphere_rule(2, 7)
    assert rule.nodes.shape[1] == 3
    assert np.max(np.abs(np.linalg.norm(rule.nodes, axis=1) - 1.0)) < 1e-12


def test_refinement_stability():
    # integrating a fixed polynomial with rules of increasing exactness must
    # return the same value once the degree is covered
    rng = np.random.default_rng(3)
    p = MultiIndexPolynomial(2, {k: rng.standard_normal() for k in monomials_up_to(2, 4)})
    values = []
    for exactness in (4, 6, 10, 16):
        rule = build_ball_rule(2, exactness)
        values.append(float(np.sum(rule.weights * p.eval_many(rule.nodes))))
    assert max(abs(v - values[0]) for v in values) < EXACTNESS_TOL


def test_node_cap_error():
    with pytest.raises(NodeCapError):
        build_ball_rule(6, 200, node_cap=10_000)


def test_inner_product_symmetry_and_positivity():
    rule = build_ball_rule(2, 6)
    rng = np.random.default_rng(4)
    p = MultiIndexPolynomial(2, {k: rng.standard_normal() for k in monomials_up_to(2, 2)})
    q = MultiIndexPolynomial(2, {k: rng.standard_normal() for k in monomials_up_to(2, 2)})
    assert abs(inner_product(p, q, rule) - inner_product(q, p, rule)) < 1e-13
    assert inner_product(p, p, rule) > 0


def test_lq_norm_constant_function():
    rule = build_ball_rule(3, 4)
    one = MultiIndexPolynomial.constant(3, 1.0)
    assert abs(lq_norm(one, rule, 2) - math.sqrt(ball_volume(3))) < 1e-12
    assert abs(lq_norm(one, rule, 1) - ball_volume(3)) < 1e-12
    assert abs(lq_norm(one, rule, math.inf) - 1.0) < 1e-12


def test_lq_norm_monomial_oracle():
    # ||x||_{L^2(B^1)} = sqrt(2/3) on [-1, 1]
    rule = build_ball_rule(1, 6)
    p = MultiIndexPolynomial.monomial((1,))
    assert abs(lq_norm(p, rule, 2) - math.sqrt(2.0 / 3.0)) < 1e-12


def test_ball_sup_grid_deterministic_and_inside():
    g1 = ball_sup_grid(3, 500)
    g2 = ball_sup_grid(3, 500)
    assert np.array_equal(g1, g2)
    assert np.max(np.linalg.norm(g1, axis=1)) <= 1.0 + 1e-12
    assert np.all(g1[0] == 0.0)


def test_rule_json_round_trip():
    from ridgekit.quadrature import QuadratureRule
    rule = build_ball_rule(2, 4)
    clone = QuadratureRule.from_json_dict(rule.to_json_dict())
    assert np.array_equal(clone.nodes, rule.nodes)
    assert np.array_equal(clone.weights, rule.weights)
    assert clone.exactness_degree == rule.exactness_degree
