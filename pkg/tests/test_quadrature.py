import math

import numpy as np
import pytest

from salemcount.core.config import QuadratureScheme, QuadratureSpec
from salemcount.core.error_handling import InputError, ToleranceNotMet
from salemcount.core.quadrature import (
    adaptive,
    cell_assignments,
    integrate_box,
    integrate_symmetric,
    simplex_map,
    tensor_rule,
    unit_rule,
)


@pytest.mark.parametrize("scheme", list(QuadratureScheme))
def test_unit_rule_integrates_smooth_functions(scheme):
    nodes, weights = unit_rule(40, scheme)
    assert len(nodes) == 40
    assert weights.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.dot(weights, np.exp(nodes)) == pytest.approx(math.e - 1, abs=1e-9)
    with pytest.raises(ValueError):
        nodes[0] = 0.5


def test_gauss_legendre_exact_degree():
    nodes, weights = unit_rule(3)
    assert np.dot(weights, nodes**5) == pytest.approx(1 / 6, abs=1e-15)


@pytest.mark.parametrize("scheme", list(QuadratureScheme))
def test_single_node_is_midpoint(scheme):
    nodes, weights = unit_rule(1, scheme)
    assert nodes.tolist() == [0.5] and weights.tolist() == [1.0]
    with pytest.raises(InputError):
        unit_rule(0)


def test_tensor_rule_shape():
    pts, w = tensor_rule(5, 3)
    assert pts.shape == (125, 3)
    assert w.sum() == pytest.approx(1.0)
    pts0, w0 = tensor_rule(5, 0)
    assert pts0.shape == (1, 0) and w0.tolist() == [1.0]


def test_simplex_map_orders_points_and_measures_volume():
    u, w = tensor_rule(6, 3)
    x, jac = simplex_map(np.asarray(u), -1.0, 1.0)
    assert np.all(np.diff(x, axis=1) >= 0)
    assert np.all((x >= -1) & (x <= 1))
    assert np.dot(w, jac) == pytest.approx(8 / 6)


def test_cell_assignments_partition_box():
    groups = cell_assignments([(0.0, 2.0), (1.0, 3.0)])
    assert len(groups) == 4
    assert {(0.0, 1.0): [0], (1.0, 2.0): [1]} in groups
    assert {(1.0, 2.0): [0, 1]} in groups


def test_symmetric_vandermonde_is_exact():
    def vdm(x):
        return np.abs(x[:, 0] - x[:, 1])

    assert integrate_symmetric(vdm, [(-1.0, 1.0)] * 2, 4) == pytest.approx(8 / 3, abs=1e-14)
    assert integrate_symmetric(vdm, [(0.0, 1.0)] * 2, 4) == pytest.approx(1 / 3, abs=1e-14)


def test_symmetric_kink_at_breakpoint():
    def f(x):
        return np.abs(x[:, 0] - 0.3)

    exact = (1.3**2 + 0.7**2) / 2
    assert integrate_symmetric(f, [(-1.0, 1.0)], 4, extra_breaks=[0.3]) == pytest.approx(exact, abs=1e-14)


def test_reversed_box_flips_sign():
    def one(x):
        return np.ones(x.shape[0])

    assert integrate_symmetric(one, [(1.0, 0.0)], 4) == pytest.approx(-1.0)


def test_chunking_does_not_change_result():
    def f(x):
        return np.prod(1 + x, axis=1)

    full = integrate_symmetric(f, [(-1.0, 1.0)] * 3, 8)
    chunked = integrate_symmetric(f, [(-1.0, 1.0)] * 3, 8, chunk_size=7)
    assert chunked == pytest.approx(full, rel=1e-14)


def test_integrate_box_converges():
    def f(x):
        return np.cos(x[:, 0]) * np.cos(x[:, 1])

    value = integrate_box(f, [(0.0, 1.0)] * 2, QuadratureSpec(nodes=32, abs_tol=1e-12))
    assert value == pytest.approx(math.sin(1.0) ** 2, abs=1e-12)


def test_adaptive_raises_when_budget_exhausted():
    calls = []

    def oscillating(n):
        calls.append(n)
        return float(n % 2 + n)

    with pytest.raises(ToleranceNotMet):
        adaptive(oscillating, QuadratureSpec(nodes=16, abs_tol=1e-12), label="test")
    assert calls == [4, 8, 16]


@pytest.mark.parametrize("nodes,expected_calls", [(2, [1, 2]), (3, [2, 3]), (4, [3, 4]), (5, [4, 5])])
def test_adaptive_small_budgets_compare_two_rules(nodes, expected_calls):
    calls = []

    def constant(n):
        calls.append(n)
        return 1.0

    assert adaptive(constant, QuadratureSpec(nodes=nodes)) == 1.0
    assert calls == expected_calls


@pytest.mark.parametrize("nodes", [3, 4])
def test_integrate_box_low_node_budget(nodes):
    def f(x):
        return x[:, 0] * x[:, 1]

    value = integrate_box(f, [(0.0, 1.0), (0.0, 2.0)], QuadratureSpec(nodes=nodes))
    assert value == pytest.approx(1.0, abs=1e-12)
