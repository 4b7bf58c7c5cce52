from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..lti.errors import DimensionError, InvalidParameterError
from ..lti.norms import signal_inf_norm, vector_norm
from ..lti.statespace import StateSpace, ss_step
from ..oco.controller import FirGains, OcoController
from ..robust.interconnection import InterconnectionP
from .configs import DisturbanceSpec, ExperimentConfig

logger = logging.getLogger("RobustOco.simulation")

TRAJECTORY_SIGNALS = ("x", "u", "u_base", "u_oco", "w_hat", "d", "p", "q", "v")


def generate_disturbance(spec: DisturbanceSpec, T: int, n_u: int = 1) -> np.ndarray:
    """d_t for t = 0 .. T, shape (T + 1, n_u)."""
    spec.validate(T)
    if spec.kind == "file":
        values = spec.values[: T + 1]
        if values.shape[1] != n_u:
            raise DimensionError(f"Disturbance file has {values.shape[1]} channels, plant has {n_u} inputs.")
        return values.copy()

    d = np.full((T + 1, n_u), float(spec.amplitude))
    if spec.kind == "square":
        d[spec.switch_time + 1 :] *= -1.0
    return d


# ──────────────────────────── Results ────────────────────────────
@dataclass
class SimulationResult:
    """Recorded closed-loop signals, one row per step t = 0 .. len - 1."""

    x: np.ndarray
    u: np.ndarray
    u_base: np.ndarray
    u_oco: np.ndarray
    w_hat: np.ndarray
    d: np.ndarray
    p: np.ndarray
    q: np.ndarray
    v: np.ndarray
    cost: np.ndarray
    m_norm: np.ndarray
    T: int
    diverged: bool = False
    t_div: Optional[int] = None
    gains: List[FirGains] = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return self.cost.shape[0]

    @property
    def total_cost(self) -> float:
        """J_T = sum_t c_t over the recorded steps."""
        return float(self.cost.sum())

    @property
    def avg_cost(self) -> float:
        return self.total_cost / self.T

    def window_mean_cost(self, start: int, stop: int) -> float:
        return float(self.cost[start : stop + 1].mean())

    def to_frame(self) -> pd.DataFrame:
        """Columns t, x, u, ..., cost, m_norm; vector signals expand to x0, x1, ..."""
        columns = {"t": np.arange(len(self))}
        for name in TRAJECTORY_SIGNALS:
            values = getattr(self, name)
            if values.shape[1] == 1:
                columns[name] = values[:, 0]
            else:
                for i in range(values.shape[1]):
                    columns[f"{name}{i}"] = values[:, i]
        columns["cost"] = self.cost
        columns["m_norm"] = self.m_norm
        return pd.DataFrame(columns)


# ──────────────────────────── Closed loop ────────────────────────────
def simulate(config: ExperimentConfig) -> SimulationResult:
    """Run the plant G(I + Δ) in closed loop with the OCO controller.

    Per step: estimate, learn, act; then p = u + d, q = Δ p, v = p + q and the
    nominal plant advances with v. The run stops after the first step where x,
    u, w_hat, v or the gain norm exceeds the divergence threshold, so every
    recorded value stays finite.
    """
    plant = config.plant
    A, B = plant.A, plant.B
    n_x, n_u, T = config.n_x, config.n_u, config.T
    d = generate_disturbance(config.disturbance, T, n_u)

    controller = OcoController(
        A,
        B,
        config.K,
        config.H,
        config.eta,
        config.weights,
        beta=config.beta,
        initial_gains=FirGains(config.initial_gains, config.H) if config.initial_gains is not None else None,
    )
    uncertainty = config.uncertainty
    unc_state = uncertainty.zero_state() if uncertainty is not None else None

    rec = {name: np.zeros((T + 1, n_x if name in ("x", "w_hat") else n_u)) for name in TRAJECTORY_SIGNALS}
    cost = np.zeros(T + 1)
    m_norm = np.zeros(T + 1)
    gains: List[FirGains] = []

    x = np.zeros(n_x)
    diverged, t_div = False, None
    for t in range(T + 1):
        step = controller.act(x, t)
        p = step.u + d[t]
        if uncertainty is not None:
            unc_state, q = ss_step(uncertainty, unc_state, p)
        else:
            q = np.zeros(n_u)
        v = p + q

        for name, value in (
            ("x", x),
            ("u", step.u),
            ("u_base", step.u_base),
            ("u_oco", step.u_oco),
            ("w_hat", step.w_hat),
            ("d", d[t]),
            ("p", p),
            ("q", q),
            ("v", v),
        ):
            rec[name][t] = value
        cost[t] = config.weights.stage_cost(x, step.u)
        m_norm[t] = step.gains_norm
        gains.append(controller.gains)

        size = float(np.max([vector_norm(x), vector_norm(step.u), vector_norm(step.w_hat), vector_norm(v), step.gains_norm]))
        if not np.isfinite(size) or not np.isfinite(cost[t]) or size > config.divergence_threshold:
            diverged, t_div = True, t
            logger.info(f"{config.name}: diverged at t={t} (largest signal {size:.3e}).")
            break
        x = A @ x + B @ v

    n = (t_div if diverged else T) + 1
    result = SimulationResult(
        **{name: values[:n] for name, values in rec.items()},
        cost=cost[:n],
        m_norm=m_norm[:n],
        T=T,
        diverged=diverged,
        t_div=t_div,
        gains=gains,
    )
    if not diverged:
        logger.debug(f"{config.name}: J_T={result.total_cost:.6g}, max ||x||={signal_inf_norm(result.x):.6g}")
    return result


# ──────────────────────────── LFT form ────────────────────────────
def simulate_lft(
    P: InterconnectionP,
    uncertainty: Optional[StateSpace],
    gain_trace: Union[FirGains, Sequence[FirGains]],
    d,
) -> np.ndarray:
    """Close Γ = diag(Δ, M_LTV) around P and return the x output, shape (len(d), n_x).

    Γ has feedthrough (D_Δ and M_t^[0]), so each step solves the algebraic loop
    (I - Γ_D P_D11) g = Γ_D (C_1 ξ + P_D12 d) + γ_free for g = [q; u_oco].
    """
    d = np.asarray(d, dtype=float).reshape(-1, P.n_u)
    steps = d.shape[0]
    trace = [gain_trace] * steps if isinstance(gain_trace, FirGains) else list(gain_trace)
    if len(trace) < steps:
        raise InvalidParameterError(f"Gain trace has {len(trace)} entries, disturbance has {steps} samples.")
    n_x, n_u = P.n_x, P.n_u
    H = trace[0].H
    if uncertainty is None:
        uncertainty = StateSpace.static(np.zeros((n_u, n_u)))

    sys = P.sys
    n_z = n_u + n_x
    C1, C2 = sys.C[:n_z], sys.C[n_z:]
    D11, D12 = sys.D[:n_z, : 2 * n_u], sys.D[:n_z, 2 * n_u :]
    D21, D22 = sys.D[n_z:, : 2 * n_u], sys.D[n_z:, 2 * n_u :]
    B1, B2 = sys.B[:, : 2 * n_u], sys.B[:, 2 * n_u :]

    xi = np.zeros(sys.n_s)
    x_delta = np.zeros(uncertainty.n_s)
    w_past = np.zeros((H, n_x))  # row i holds w_hat_{t-1-i}
    out = np.zeros((steps, n_x))
    gamma_D = np.zeros((2 * n_u, n_z))
    gamma_D[:n_u, :n_u] = uncertainty.D

    for t in range(steps):
        gains = trace[t]
        gamma_D[n_u:, n_u:] = gains.block(0)
        fir_tail = sum((gains.block(i) @ w_past[i - 1] for i in range(1, H)), np.zeros(n_u))
        gamma_free = np.r_[uncertainty.C @ x_delta, fir_tail]

        lhs = np.eye(2 * n_u) - gamma_D @ D11
        g = np.linalg.solve(lhs, gamma_D @ (C1 @ xi + D12 @ d[t]) + gamma_free)
        z = C1 @ xi + D11 @ g + D12 @ d[t]
        out[t] = C2 @ xi + D21 @ g + D22 @ d[t]

        p, w_hat = z[:n_u], z[n_u:]
        x_delta = uncertainty.A @ x_delta + uncertainty.B @ p
        xi = sys.A @ xi + B1 @ g + B2 @ d[t]
        w_past = np.vstack([w_hat, w_past[:-1]])
    return out
