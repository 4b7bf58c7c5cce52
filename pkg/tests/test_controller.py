import numpy as np
import pytest

from src.lti.errors import DimensionError, InsufficientHistoryError, InvalidParameterError
from src.oco import (
    CostWeights,
    DisturbanceHistory,
    EstimatorMemory,
    FirGains,
    OcoController,
    estimate_disturbance,
    fir_output,
    ideal_cost,
    ideal_cost_gradient,
    opgd_update,
)
from tests.conftest import GAIN_K, PLANT_A, PLANT_B

A, B, K = [[PLANT_A]], [[PLANT_B]], [[GAIN_K]]


def _random_problem(rng):
    n_x, n_u, H = (int(v) for v in rng.integers(1, 4, size=3))
    A = rng.standard_normal((n_x, n_x))
    A *= rng.uniform(0.2, 0.95) / np.max(np.abs(np.linalg.eigvals(A)))
    B = rng.standard_normal((n_x, n_u))
    K = 0.2 * rng.standard_normal((n_u, n_x))
    L = rng.standard_normal((n_x, n_x))
    weights = CostWeights(L @ L.T, np.eye(n_u) * rng.uniform(0.05, 2.0))
    window = rng.standard_normal((2 * H, n_x))
    gains = FirGains(rng.standard_normal((n_u, n_x * H)), H)
    return gains, window, K, A, B, weights


def _central_difference(gains, window, K, A, B, weights, eps=1e-6):
    fd = np.zeros_like(gains.M)
    for idx in np.ndindex(*gains.M.shape):
        step = np.zeros_like(gains.M)
        step[idx] = eps
        plus, _ = ideal_cost(FirGains(gains.M + step, gains.H), window, K, A, B, weights)
        minus, _ = ideal_cost(FirGains(gains.M - step, gains.H), window, K, A, B, weights)
        fd[idx] = (plus - minus) / (2 * eps)
    return fd


# ──────────────────────────── Estimation and FIR output ────────────────────────────
def test_estimate_disturbance_example():
    mem = EstimatorMemory(np.array([1.0]), np.array([2.0]))
    w_hat, mem = estimate_disturbance(mem, [1.15], A, B)
    assert w_hat[0] == pytest.approx(0.05, abs=1e-12)
    assert mem.x_prev[0] == 1.15


def test_estimate_disturbance_at_rest_is_zero():
    w_hat, _ = estimate_disturbance(EstimatorMemory.zeros(1, 1), [0.0], A, B)
    assert w_hat[0] == 0.0


@pytest.mark.parametrize(
    "M, H, W, expected",
    [
        ([[2.0]], 1, [3.0], 6.0),
        ([[1.0, -1.0]], 2, [4.0, 1.0], 3.0),
    ],
)
def test_fir_output_examples(M, H, W, expected):
    assert fir_output(FirGains(M, H), np.array(W))[0] == pytest.approx(expected)


def test_fir_output_reads_history_newest_first():
    hist = DisturbanceHistory(1, 2)
    hist.push([1.0])
    hist.push([4.0])
    assert fir_output(FirGains([[1.0, -1.0]], 2), hist)[0] == pytest.approx(3.0)


def test_history_starts_at_zero_and_keeps_capacity():
    hist = DisturbanceHistory(2, 3)
    np.testing.assert_array_equal(hist.window(3), np.zeros((3, 2)))
    for k in range(5):
        hist.push([k, -k])
    np.testing.assert_array_equal(hist.window(3)[:, 0], [2.0, 3.0, 4.0])
    np.testing.assert_array_equal(hist.stacked(2), [4.0, -4.0, 3.0, -3.0])
    with pytest.raises(InsufficientHistoryError):
        hist.stacked(4)
    with pytest.raises(DimensionError):
        hist.push([1.0])


def test_fir_gains_validation():
    with pytest.raises(InvalidParameterError):
        FirGains([[1.0]], 0)
    with pytest.raises(DimensionError):
        FirGains([[1.0, 2.0, 3.0]], 2)
    gains = FirGains([[1.0, 2.0, -3.0, 4.0]], 2)
    assert (gains.n_u, gains.n_x) == (1, 2)
    np.testing.assert_array_equal(gains.block(1), [[-3.0, 4.0]])
    assert gains.norm == 10.0


# ──────────────────────────── Ideal cost ────────────────────────────
def test_ideal_cost_scalar_example(weights):
    g, rollout = ideal_cost(FirGains.zeros(1, 1, 1), np.ones((2, 1)), K, A, B, weights)
    assert rollout.x_tilde[-1, 0] == pytest.approx(1.0)
    assert rollout.u_tilde[-1, 0] == pytest.approx(-0.15)
    assert g == pytest.approx(1.00225, abs=1e-12)


def test_ideal_cost_gradient_scalar_example(weights):
    grad = ideal_cost_gradient(FirGains.zeros(1, 1, 1), np.ones((2, 1)), K, A, B, weights)
    assert grad.shape == (1, 1)
    assert grad[0, 0] == pytest.approx(0.17045, abs=1e-12)


def test_gradient_matches_central_differences(rng):
    for _ in range(100):
        gains, window, K_, A_, B_, weights = _random_problem(rng)
        grad = ideal_cost_gradient(gains, window, K_, A_, B_, weights)
        fd = _central_difference(gains, window, K_, A_, B_, weights)
        scale = max(1.0, np.abs(grad).max())
        np.testing.assert_allclose(grad, fd, rtol=1e-6, atol=1e-6 * scale)


def test_ideal_cost_is_convex_in_gains(rng):
    for _ in range(50):
        gains, window, K_, A_, B_, weights = _random_problem(rng)
        other = FirGains(rng.standard_normal(gains.M.shape), gains.H)
        mid = FirGains(0.5 * (gains.M + other.M), gains.H)
        g1, _ = ideal_cost(gains, window, K_, A_, B_, weights)
        g2, _ = ideal_cost(other, window, K_, A_, B_, weights)
        gm, _ = ideal_cost(mid, window, K_, A_, B_, weights)
        assert gm <= 0.5 * (g1 + g2) + 1e-9 * max(1.0, g1 + g2)


def test_gradient_vanishes_at_scalar_minimizer(weights):
    window = np.array([[0.7], [-1.3]])

    def g(m):
        return ideal_cost(FirGains([[m]], 1), window, K, A, B, weights)[0]

    # g is a quadratic in m; recover its vertex from three samples
    g0, g1, gm1 = g(0.0), g(1.0), g(-1.0)
    a, b = 0.5 * (g1 + gm1) - g0, 0.5 * (g1 - gm1)
    m_star = -b / (2 * a)
    grad = ideal_cost_gradient(FirGains([[m_star]], 1), window, K, A, B, weights)
    assert grad[0, 0] == pytest.approx(0.0, abs=1e-9)


def test_ideal_cost_needs_full_window(weights):
    with pytest.raises(InsufficientHistoryError):
        ideal_cost(FirGains.zeros(1, 1, 2), np.ones((3, 1)), K, A, B, weights)
    with pytest.raises(DimensionError):
        ideal_cost(FirGains.zeros(1, 1, 1), np.ones((2, 2)), K, A, B, weights)


# ──────────────────────────── Projected gradient step ────────────────────────────
def test_opgd_projection_examples():
    zero = np.zeros((1, 1))
    np.testing.assert_allclose(opgd_update(FirGains([[3.0]], 1), zero, 1.0, 1.5).M, [[1.5]])
    np.testing.assert_allclose(opgd_update(FirGains([[2.0, -2.0]], 1), np.zeros((1, 2)), 1.0, 2.0).M, [[1.0, -1.0]])


def test_opgd_inactive_constraint_is_plain_step():
    gains = FirGains([[0.5, -0.25]], 2)
    grad = np.array([[1.0, 2.0]])
    updated = opgd_update(gains, grad, 0.1, 10.0)
    np.testing.assert_array_equal(updated.M, gains.M - 0.1 * grad)
    np.testing.assert_array_equal(opgd_update(gains, grad, 0.1).M, updated.M)


def test_opgd_projection_is_idempotent_and_bounded(rng):
    for _ in range(50):
        n_u, n_x, H = (int(v) for v in rng.integers(1, 4, size=3))
        beta = rng.uniform(0.1, 3.0)
        gains = FirGains(5.0 * rng.standard_normal((n_u, n_x * H)), H)
        grad = rng.standard_normal(gains.M.shape)
        once = opgd_update(gains, grad, 0.3, beta)
        twice = opgd_update(once, np.zeros_like(grad), 1.0, beta)
        assert once.norm <= beta * (1 + 1e-12)
        np.testing.assert_allclose(twice.M, once.M, rtol=1e-12, atol=1e-15)


def test_opgd_with_zero_beta_gives_zero_gains():
    updated = opgd_update(FirGains([[1.0, -2.0]], 1), np.ones((1, 2)), 0.5, 0.0)
    np.testing.assert_array_equal(updated.M, np.zeros((1, 2)))


@pytest.mark.parametrize("eta", [0.0, -1e-3])
def test_opgd_rejects_nonpositive_learning_rate(eta):
    with pytest.raises(InvalidParameterError):
        opgd_update(FirGains([[1.0]], 1), [[1.0]], eta, 1.0)


def test_opgd_rejects_bad_inputs():
    with pytest.raises(DimensionError):
        opgd_update(FirGains([[1.0]], 1), [[1.0, 2.0]], 0.1)
    with pytest.raises(InvalidParameterError):
        opgd_update(FirGains([[1.0]], 1), [[1.0]], 0.1, -1.0)


# ──────────────────────────── Cost weights ────────────────────────────
def test_cost_weights_validation():
    assert CostWeights([[1.0]], [[0.1]]).stage_cost([2.0], [3.0]) == pytest.approx(4.9)
    CostWeights(np.zeros((2, 2)), np.eye(1))
    with pytest.raises(InvalidParameterError):
        CostWeights([[1.0]], [[0.0]])
    with pytest.raises(InvalidParameterError):
        CostWeights([[-1.0]], [[1.0]])
    with pytest.raises(InvalidParameterError):
        CostWeights([[1.0, 1.0], [0.0, 1.0]], [[1.0]])
    with pytest.raises(DimensionError):
        CostWeights([[1.0, 0.0]], [[1.0]])


# ──────────────────────────── Controller ────────────────────────────
def test_controller_keeps_gains_frozen_until_history_fills(weights):
    controller = OcoController(A, B, K, 2, 1e-2, weights)
    for t, x in enumerate([1.0, 0.5]):
        step = controller.act([x], t)
        assert step.gains_norm == 0.0
        assert step.u_oco[0] == 0.0
        assert step.u[0] == pytest.approx(-GAIN_K * x)
    controller.act([0.3], 2)
    assert controller.gains.norm > 0.0


def test_controller_without_learning_is_state_feedback(weights):
    controller = OcoController(A, B, K, 1, 0.0, weights)
    for t, x in enumerate([2.0, -1.0, 4.0]):
        step = controller.act([x], t)
        assert step.u[0] == pytest.approx(-GAIN_K * x)
        assert step.u_base[0] == step.u[0]
    assert controller.gains.norm == 0.0


def test_controller_respects_beta(weights):
    controller = OcoController(A, B, K, 1, 1.0, weights, beta=0.2)
    for t in range(20):
        step = controller.act([10.0 * (-1) ** t], t)
        assert step.gains_norm <= 0.2 * (1 + 1e-12)


def test_controller_rejects_bad_setup(weights):
    with pytest.raises(DimensionError):
        OcoController(A, B, [[0.1, 0.2]], 1, 1e-3, weights)
    with pytest.raises(InvalidParameterError):
        OcoController(A, B, K, 1, -1e-3, weights)
    with pytest.raises(DimensionError):
        OcoController(A, B, K, 2, 1e-3, weights, initial_gains=FirGains([[1.0]], 1))
