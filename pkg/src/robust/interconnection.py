from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..lti.errors import DimensionError, NotStabilizingError
from ..lti.statespace import StateSpace, spectral_radius

logger = logging.getLogger("RobustOco.interconnection")


def reconstruction_estimator(A: np.ndarray, B: np.ndarray) -> StateSpace:
    """Estimator w_hat_t = x_t - A x_{t-1} - B u_{t-1} in general LTI form.

    Inputs are [x; u], the output is w_hat. The state holds -A x_{t-1} - B u_{t-1}.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    n_x, n_u = B.shape
    return StateSpace(
        np.zeros((n_x, n_x)),
        np.hstack([-A, -B]),
        np.eye(n_x),
        np.hstack([np.eye(n_x), np.zeros((n_x, n_u))]),
    )


# ──────────────────────────── Interconnection ────────────────────────────
@dataclass(frozen=True, eq=False)
class InterconnectionP:
    """LTI part of the upper LFT around Γ = diag(Δ, M_LTV).

    Inputs are ordered [q, u_oco, d] and outputs [p, w_hat, x]; the state is
    the plant state followed by the estimator state.
    """

    sys: StateSpace
    n_x: int
    n_u: int
    n_e: int

    @property
    def _upper_rows(self) -> slice:
        return slice(0, self.n_u + self.n_x)

    @property
    def _x_rows(self) -> slice:
        return slice(self.n_u + self.n_x, self.n_u + 2 * self.n_x)

    @property
    def _gamma_cols(self) -> slice:
        return slice(0, 2 * self.n_u)

    @property
    def _d_cols(self) -> slice:
        return slice(2 * self.n_u, 3 * self.n_u)

    @property
    def p11(self) -> StateSpace:
        """(q, u_oco) -> (p, w_hat)."""
        return self.sys.subsystem(self._upper_rows, self._gamma_cols)

    @property
    def p12(self) -> StateSpace:
        """d -> (p, w_hat)."""
        return self.sys.subsystem(self._upper_rows, self._d_cols)

    @property
    def p21(self) -> StateSpace:
        """(q, u_oco) -> x."""
        return self.sys.subsystem(self._x_rows, self._gamma_cols)

    @property
    def p22(self) -> StateSpace:
        """d -> x."""
        return self.sys.subsystem(self._x_rows, self._d_cols)

    def block(self, output: str, input: str) -> StateSpace:
        """Single channel of P, e.g. block("p", "q")."""
        rows = {
            "p": slice(0, self.n_u),
            "w_hat": slice(self.n_u, self.n_u + self.n_x),
            "x": self._x_rows,
        }
        cols = {
            "q": slice(0, self.n_u),
            "u_oco": slice(self.n_u, 2 * self.n_u),
            "d": self._d_cols,
        }
        if output not in rows or input not in cols:
            raise KeyError(f"Unknown channel pair ({output!r}, {input!r}).")
        return self.sys.subsystem(rows[output], cols[input])


def build_interconnection(plant: StateSpace, K, estimator: StateSpace) -> InterconnectionP:
    """Assemble P from the nominal plant (A, B), state feedback K and estimator E(z)."""
    A, B = plant.A, plant.B
    n_x, n_u = plant.n_s, plant.n_in
    K = np.atleast_2d(np.asarray(K, dtype=float))
    if K.shape != (n_u, n_x):
        raise DimensionError(f"K has shape {K.shape}, expected ({n_u}, {n_x}).")
    if estimator.n_in != n_x + n_u or estimator.n_out != n_x:
        raise DimensionError(
            f"Estimator must map [x; u] ({n_x + n_u} inputs) to w_hat ({n_x} outputs), "
            f"got {estimator.n_in} -> {estimator.n_out}."
        )

    n_e = estimator.n_s
    Be1, Be2 = estimator.B[:, :n_x], estimator.B[:, n_x:]
    De1, De2 = estimator.D[:, :n_x], estimator.D[:, n_x:]
    Ae, Ce = estimator.A, estimator.C
    I_x, I_u = np.eye(n_x), np.eye(n_u)

    A_p = np.block(
        [
            [A - B @ K, np.zeros((n_x, n_e))],
            [Be1 - Be2 @ K, Ae],
        ]
    )
    B_p = np.block(
        [
            [B, B, B],
            [np.zeros((n_e, n_u)), Be2, np.zeros((n_e, n_u))],
        ]
    )
    C_p = np.block(
        [
            [-K, np.zeros((n_u, n_e))],
            [De1 - De2 @ K, Ce],
            [I_x, np.zeros((n_x, n_e))],
        ]
    )
    D_p = np.block(
        [
            [np.zeros((n_u, n_u)), I_u, I_u],
            [np.zeros((n_x, n_u)), De2, np.zeros((n_x, n_u))],
            [np.zeros((n_x, 3 * n_u))],
        ]
    )
    sys = StateSpace(A_p, B_p, C_p, D_p)

    rho = spectral_radius(sys)
    if rho >= 1.0:
        raise NotStabilizingError(rho)
    logger.debug(f"Built P with {sys.n_s} states, spectral radius {rho:.6g}.")
    return InterconnectionP(sys=sys, n_x=n_x, n_u=n_u, n_e=n_e)
