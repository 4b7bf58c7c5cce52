from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, replace
from typing import Optional, Tuple, Union

import numpy as np

from ..lti.errors import DimensionError, InsufficientHistoryError, InvalidParameterError
from ..lti.norms import matrix_inf_norm

logger = logging.getLogger("RobustOco.controller")


def _vec(v) -> np.ndarray:
    return np.atleast_1d(np.asarray(v, dtype=float)).reshape(-1)


def _mat(M) -> np.ndarray:
    return np.atleast_2d(np.asarray(M, dtype=float))


# ──────────────────────────── Controller state ────────────────────────────
@dataclass(frozen=True, eq=False)
class FirGains:
    """Stacked FIR coefficients M = [M^[0] ... M^[H-1]], shape (n_u, n_x * H)."""

    M: np.ndarray
    H: int

    def __post_init__(self):
        M = _mat(self.M)
        if self.H < 1:
            raise InvalidParameterError(f"Learning horizon must be >= 1, got {self.H}.")
        if M.shape[1] % self.H != 0:
            raise DimensionError(f"M has {M.shape[1]} columns, not a multiple of H={self.H}.")
        object.__setattr__(self, "M", M)

    @classmethod
    def zeros(cls, n_u: int, n_x: int, H: int) -> "FirGains":
        return cls(np.zeros((n_u, n_x * H)), H)

    @property
    def n_u(self) -> int:
        return self.M.shape[0]

    @property
    def n_x(self) -> int:
        return self.M.shape[1] // self.H

    def block(self, i: int) -> np.ndarray:
        return self.M[:, i * self.n_x : (i + 1) * self.n_x]

    @property
    def norm(self) -> float:
        return matrix_inf_norm(self.M)


class DisturbanceHistory:
    """Ring buffer of the most recent disturbance estimates, zero before t = 0."""

    def __init__(self, n_x: int, capacity: int):
        if capacity < 1:
            raise InvalidParameterError(f"History capacity must be >= 1, got {capacity}.")
        self.n_x = n_x
        self.capacity = capacity
        self._buffer: deque = deque((np.zeros(n_x) for _ in range(capacity)), maxlen=capacity)

    def push(self, w_hat) -> None:
        w_hat = _vec(w_hat)
        if w_hat.shape[0] != self.n_x:
            raise DimensionError(f"Estimate has length {w_hat.shape[0]}, expected {self.n_x}.")
        self._buffer.append(w_hat.copy())

    def stacked(self, H: int) -> np.ndarray:
        """W_t = [w_t; w_{t-1}; ...; w_{t-H+1}]."""
        if H > self.capacity:
            raise InsufficientHistoryError(f"Need {H} estimates, buffer holds {self.capacity}.")
        newest_first = list(self._buffer)[::-1][:H]
        return np.concatenate(newest_first)

    def window(self, n: int) -> np.ndarray:
        """Last n estimates, oldest first, shape (n, n_x)."""
        if n > self.capacity:
            raise InsufficientHistoryError(f"Need {n} estimates, buffer holds {self.capacity}.")
        return np.array(list(self._buffer)[-n:])

    def __len__(self) -> int:
        return self.capacity


@dataclass(frozen=True, eq=False)
class EstimatorMemory:
    x_prev: np.ndarray
    u_prev: np.ndarray

    @classmethod
    def zeros(cls, n_x: int, n_u: int) -> "EstimatorMemory":
        return cls(np.zeros(n_x), np.zeros(n_u))

    def with_input(self, u) -> "EstimatorMemory":
        return replace(self, u_prev=_vec(u).copy())


@dataclass(frozen=True, eq=False)
class CostWeights:
    """Quadratic stage cost x'Qx + u'Ru with Q >= 0 and R > 0."""

    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        Q, R = _mat(self.Q), _mat(self.R)
        for name, W in (("Q", Q), ("R", R)):
            if W.shape[0] != W.shape[1]:
                raise DimensionError(f"{name} must be square, got {W.shape}.")
            if not np.allclose(W, W.T, rtol=0.0, atol=1e-12):
                raise InvalidParameterError(f"{name} must be symmetric.")
        if np.linalg.eigvalsh(Q).min() < -1e-12:
            raise InvalidParameterError("Q must be positive semidefinite.")
        if np.linalg.eigvalsh(R).min() <= 0:
            raise InvalidParameterError("R must be positive definite.")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)

    def stage_cost(self, x, u) -> float:
        x, u = _vec(x), _vec(u)
        return float(x @ self.Q @ x + u @ self.R @ u)


@dataclass(frozen=True, eq=False)
class IdealRollout:
    """Ideal states and inputs for τ = t-H ... t (row k is τ = t-H+k)."""

    x_tilde: np.ndarray
    u_tilde: np.ndarray


# ──────────────────────────── Operations ────────────────────────────
def estimate_disturbance(mem: EstimatorMemory, x_t, A, B) -> Tuple[np.ndarray, EstimatorMemory]:
    """w_hat_t = x_t - A x_{t-1} - B u_{t-1}.

    The returned memory holds x_t; the caller records u_t with `with_input`.
    """
    x_t = _vec(x_t)
    w_hat = x_t - _mat(A) @ mem.x_prev - _mat(B) @ mem.u_prev
    return w_hat, replace(mem, x_prev=x_t.copy())


def fir_output(gains: FirGains, hist: Union[DisturbanceHistory, np.ndarray]) -> np.ndarray:
    W = hist.stacked(gains.H) if isinstance(hist, DisturbanceHistory) else _vec(hist)
    if W.shape[0] != gains.M.shape[1]:
        raise DimensionError(f"Stacked history has length {W.shape[0]}, gains expect {gains.M.shape[1]}.")
    return gains.M @ W


def _history_window(gains: FirGains, hist) -> np.ndarray:
    needed = 2 * gains.H
    window = hist.window(needed) if isinstance(hist, DisturbanceHistory) else _mat(hist)
    if window.shape[0] < needed:
        raise InsufficientHistoryError(f"Ideal cost needs {needed} estimates, got {window.shape[0]}.")
    window = window[-needed:]
    if window.shape[1] != gains.n_x:
        raise DimensionError(f"Estimates have length {window.shape[1]}, gains expect {gains.n_x}.")
    return window


def _rollout(gains: FirGains, hist, K, A, B, sensitivities: bool):
    """Ideal rollout from x̃_{t-H} = 0, optionally with d(x̃, ũ)/dM.

    `window[j]` is w_hat_{t-2H+1+j}; the stacked history at τ = t-H+k uses
    rows H-1+k down to k.
    """
    H = gains.H
    M = gains.M
    A, B, K = _mat(A), _mat(B), _mat(K)
    n_u, n_x = gains.n_u, gains.n_x
    window = _history_window(gains, hist)

    def stacked(k: int) -> np.ndarray:
        return window[H - 1 + k - np.arange(H)].reshape(-1)

    eye_u = np.eye(n_u)
    xs = np.zeros((H + 1, n_x))
    us = np.zeros((H + 1, n_u))

    W = stacked(0)
    us[0] = M @ W
    Sx = np.zeros((n_x, n_u, n_x * H))
    Su = np.einsum("ab,c->abc", eye_u, W) if sensitivities else None

    for k in range(1, H + 1):
        xs[k] = A @ xs[k - 1] + B @ us[k - 1] + window[H + k - 2]
        W = stacked(k)
        us[k] = -K @ xs[k] + M @ W
        if sensitivities:
            Sx = np.einsum("ij,jab->iab", A, Sx) + np.einsum("ij,jab->iab", B, Su)
            Su = -np.einsum("ij,jab->iab", K, Sx) + np.einsum("ab,c->abc", eye_u, W)

    return IdealRollout(xs, us), Sx, Su


def ideal_cost(gains: FirGains, hist, K, A, B, weights: CostWeights) -> Tuple[float, IdealRollout]:
    """Cost of the last ideal state/input after H steps with static gains M."""
    rollout, _, _ = _rollout(gains, hist, K, A, B, sensitivities=False)
    return weights.stage_cost(rollout.x_tilde[-1], rollout.u_tilde[-1]), rollout


def ideal_cost_gradient(gains: FirGains, hist, K, A, B, weights: CostWeights) -> np.ndarray:
    """Exact gradient of the ideal cost; the rollout is affine in M."""
    rollout, Sx, Su = _rollout(gains, hist, K, A, B, sensitivities=True)
    x, u = rollout.x_tilde[-1], rollout.u_tilde[-1]
    grad = 2.0 * np.einsum("i,iab->ab", weights.Q @ x, Sx) + 2.0 * np.einsum("i,iab->ab", weights.R @ u, Su)
    return grad


def opgd_update(gains: FirGains, grad, eta: float, beta: Optional[float] = None) -> FirGains:
    """Gradient step followed by radial projection onto {||M||_inf <= beta}."""
    if eta <= 0:
        raise InvalidParameterError(f"Learning rate must be positive, got {eta}.")
    grad = _mat(grad)
    if grad.shape != gains.M.shape:
        raise DimensionError(f"Gradient has shape {grad.shape}, gains have {gains.M.shape}.")
    M_step = gains.M - eta * grad
    if beta is None:
        return FirGains(M_step, gains.H)
    if beta < 0:
        raise InvalidParameterError(f"beta must be nonnegative, got {beta}.")
    size = matrix_inf_norm(M_step)
    if size <= beta:
        return FirGains(M_step, gains.H)
    return FirGains(beta * (M_step / size), gains.H)


# ──────────────────────────── Controller ────────────────────────────
@dataclass(frozen=True, eq=False)
class ControlStep:
    w_hat: np.ndarray
    u_base: np.ndarray
    u_oco: np.ndarray
    u: np.ndarray
    gains_norm: float


class OcoController:
    """Disturbance-action controller u = -K x + sum_i M^[i] w_hat_{t-i}.

    Per step: estimate w_hat_t, store it, take one projected gradient step on
    the ideal cost (once t >= H and eta > 0), then act with the updated gains.
    """

    def __init__(
        self,
        A,
        B,
        K,
        H: int,
        eta: float,
        weights: CostWeights,
        beta: Optional[float] = None,
        initial_gains: Optional[FirGains] = None,
    ):
        self.A, self.B, self.K = _mat(A), _mat(B), _mat(K)
        n_x, n_u = self.B.shape
        if self.K.shape != (n_u, n_x):
            raise DimensionError(f"K has shape {self.K.shape}, expected ({n_u}, {n_x}).")
        if eta < 0:
            raise InvalidParameterError(f"Learning rate must be nonnegative, got {eta}.")
        self.H = H
        self.eta = eta
        self.beta = beta
        self.weights = weights
        self.gains = initial_gains if initial_gains is not None else FirGains.zeros(n_u, n_x, H)
        if self.gains.M.shape != (n_u, n_x * H):
            raise DimensionError(f"Initial gains have shape {self.gains.M.shape}, expected ({n_u}, {n_x * H}).")
        self.history = DisturbanceHistory(n_x, 2 * H)
        self.memory = EstimatorMemory.zeros(n_x, n_u)

    def act(self, x_t, t: int) -> ControlStep:
        w_hat, memory = estimate_disturbance(self.memory, x_t, self.A, self.B)
        self.history.push(w_hat)

        if self.eta > 0 and t >= self.H:
            grad = ideal_cost_gradient(self.gains, self.history, self.K, self.A, self.B, self.weights)
            self.gains = opgd_update(self.gains, grad, self.eta, self.beta)

        u_base = -self.K @ _vec(x_t)
        u_oco = fir_output(self.gains, self.history)
        u = u_base + u_oco
        self.memory = memory.with_input(u)
        return ControlStep(w_hat, u_base, u_oco, u, self.gains.norm)
