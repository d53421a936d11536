import math

import pytest

import permot


def test_lattice_and_support():
    body = permot.ConvexBody.interval(-1.0, 1.0)
    assert body.support([2.0]) == pytest.approx(2.0)
    points = permot.lattice_points(body, 2)
    assert [p[0] for p in points] == [-2.0, -1.0, 0.0, 1.0, 2.0]
    assert body.volume == pytest.approx(2.0)
    assert body.invariant_r == pytest.approx(1.0)


def test_log_permanent_worked_value():
    rows = [[math.log(1.0), math.log(2.0)], [math.log(3.0), math.log(4.0)]]
    assert permot.log_permanent(rows) == pytest.approx(math.log(10.0), rel=1e-12)
    m = permot.marginal_matrix(rows)
    assert m[0][0] == pytest.approx(0.4)
    assert m[0][1] == pytest.approx(0.6)


def test_assignment_and_w1():
    sigma, total, normalized = permot.min_cost_assignment([[0.0, 2.0], [3.0, 1.0]])
    assert sigma == [0, 1]
    assert total == pytest.approx(1.0)
    assert normalized == pytest.approx(0.5)
    assert permot.wasserstein1([[0.0], [1.0]], [[1.0], [0.0]]) == pytest.approx(0.0)


def test_envelope_matches_obstacle_problem():
    body = permot.ConvexBody.interval(-1.0, 1.0)
    xs, values = permot.envelope_1d(lambda x: x * x, body, -3.0, 3.0, 601)
    at_one = min(zip(xs, values), key=lambda t: abs(t[0] - 1.0))[1]
    assert at_one == pytest.approx(0.75, abs=0.03)


def test_solver_identity_map():
    body = permot.ConvexBody.interval(0.0, 1.0)
    xs, phi, residual = permot.solve_ma_1d(0.0, lambda x: 1.0, lambda x: 0.0, body, 0.0, 1.0, 401)
    assert residual <= 1e-8
    # phi' = x: central slope near the middle
    h = xs[1] - xs[0]
    i = len(xs) // 2
    slope = (phi[i + 1] - phi[i - 1]) / (2 * h)
    assert slope == pytest.approx(xs[i], abs=1e-4)


def test_transport_map_estimator():
    body = permot.ConvexBody.interval(0.0, 1.0)
    estimates = permot.transport_map(body, 8, [0.5], samples=60, seed=3)
    value, stderr = estimates[0]
    assert abs(value - 0.5) < 0.1
    assert stderr >= 0.0


def test_invalid_input_is_typed():
    with pytest.raises(permot.InvalidInput):
        permot.ConvexBody.interval(0.5, 2.0)  # origin outside
