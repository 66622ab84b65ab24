import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss

from snnw.errors import ConfigurationError, NumericalError
from snnw.quadrature import Axis, box_rule, gauss_composite, gauss_legendre, integrate


@pytest.mark.parametrize("n", range(1, 33))
def test_nodes_and_weights_match_reference(n):
    x, w = gauss_legendre(n)
    xr, wr = leggauss(n)
    np.testing.assert_allclose(x, xr, atol=1e-14)
    np.testing.assert_allclose(w, wr, atol=1e-14)


def test_cubic_exact_with_two_points():
    rule = gauss_composite([(0.0, 1.0, 1, 2)])
    assert integrate(rule, lambda x: x[:, 0] ** 3) == pytest.approx(0.25, abs=1e-16)


def test_node_counts():
    assert box_rule([(0.0, 2.0)], 100, 10).size == 1000
    assert box_rule([(0, 1), (0, 1)], 16, 4).size == 4096


def test_weight_sum_and_interior_nodes():
    rule = box_rule([(0.0, 1.0), (0.0, 1.0)], 16, 4)
    assert integrate(rule, lambda x: np.ones(len(x))) == pytest.approx(1.0, abs=1e-14)
    assert (rule.nodes > 0).all() and (rule.nodes < 1).all()
    rule = gauss_composite([(-1.0, 3.0, 7, 5), (2.0, 2.5, 3, 6)])
    assert rule.weights.sum() == pytest.approx(2.0, rel=1e-14)
    assert rule.volume == pytest.approx(2.0)


def test_whole_periods_vanish():
    rule = box_rule([(0.0, 2.0)], 100, 10)
    assert abs(integrate(rule, lambda x: np.sin(3 * np.pi * x[:, 0]))) < 1e-12


def test_degree_19_polynomial_exact():
    rng = np.random.default_rng(0)
    c = rng.normal(size=20)
    P = np.polynomial.Polynomial(c)
    exact = P.integ()(1.5) - P.integ()(-0.5)
    rule = gauss_composite([(-0.5, 1.5, 1, 10)])
    assert integrate(rule, lambda x: P(x[:, 0])) == pytest.approx(exact, rel=1e-12)


def test_tensor_product_structure():
    rule = gauss_composite([(0, 1, 2, 3), (0, 2, 1, 4)])
    x1, w1 = gauss_composite([(0, 1, 2, 3)]).nodes[:, 0], gauss_composite([(0, 1, 2, 3)]).weights
    x2, w2 = gauss_composite([(0, 2, 1, 4)]).nodes[:, 0], gauss_composite([(0, 2, 1, 4)]).weights
    np.testing.assert_array_equal(rule.weights, np.outer(w1, w2).ravel())
    np.testing.assert_array_equal(rule.nodes[:, 0], np.repeat(x1, 4))
    np.testing.assert_array_equal(rule.nodes[:, 1], np.tile(x2, 6))


def test_refinement_reduces_error():
    def g(x):
        return np.exp(np.sin(5 * x[:, 0]))

    ref = integrate(box_rule([(0.0, 1.0)], 64, 32), g)

    def err(n_sub):
        return abs(integrate(box_rule([(0.0, 1.0)], n_sub, 2), g) - ref)

    errors = [err(n) for n in (2, 4, 8, 16)]
    assert all(a > b for a, b in zip(errors, errors[1:]))


def test_nodes_are_symmetric():
    x, w = gauss_legendre(7)
    np.testing.assert_allclose(x, -x[::-1], atol=1e-16)
    np.testing.assert_array_equal(w, w[::-1])
    assert x[3] == 0.0


@pytest.mark.parametrize("args", [(1.0, 0.0, 1, 2), (0.0, 1.0, 0, 2), (0.0, 1.0, 1, 0), (0.0, 1.0, 1, 33)])
def test_invalid_axes(args):
    with pytest.raises(ConfigurationError):
        Axis(*args)


def test_non_finite_integrand_reports_location():
    rule = box_rule([(0.0, 1.0)], 1, 3)
    with pytest.raises(NumericalError, match="node"), np.errstate(divide="ignore"):
        integrate(rule, lambda x: 1.0 / (x[:, 0] - rule.nodes[1, 0]))
