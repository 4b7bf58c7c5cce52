"""Time-varying FIR map w_hat -> u_oco defined by a recorded gain sequence."""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

import numpy as np

from ..lti.errors import DimensionError, InvalidParameterError
from ..lti.norms import matrix_inf_norm
from .controller import FirGains

GainTrace = Sequence[FirGains]


def _check_trace(trace: GainTrace) -> Tuple[int, int, int]:
    if len(trace) == 0:
        raise InvalidParameterError("Gain trace is empty.")
    H, shape = trace[0].H, trace[0].M.shape
    for t, gains in enumerate(trace):
        if gains.H != H or gains.M.shape != shape:
            raise DimensionError(f"Gain trace entry {t} has shape {gains.M.shape}, expected {shape}.")
    return H, trace[0].n_u, trace[0].n_x


def mltv_norm(trace: GainTrace) -> float:
    """Induced l_inf norm of the time-varying FIR map: max_t ||M_t||_inf."""
    _check_trace(trace)
    return max(matrix_inf_norm(g.M) for g in trace)


def apply_mltv(
    trace: GainTrace, w_hat, initial_window: Optional[np.ndarray] = None
) -> np.ndarray:
    """u_t = M_t [w_t; ...; w_{t-H+1}] for t = 0 .. len(trace)-1.

    `initial_window` holds w_{-H+1} .. w_{-1}, oldest first; zero by default.
    """
    H, n_u, n_x = _check_trace(trace)
    w_hat = np.asarray(w_hat, dtype=float).reshape(len(trace), n_x)
    if initial_window is None:
        initial_window = np.zeros((H - 1, n_x))
    initial_window = np.asarray(initial_window, dtype=float).reshape(H - 1, n_x)

    full = np.vstack([initial_window, w_hat])
    lags = np.arange(H)
    out = np.empty((len(trace), n_u))
    for t, gains in enumerate(trace):
        out[t] = gains.M @ full[t + H - 1 - lags].reshape(-1)
    return out


def worst_case_input(trace: GainTrace) -> Tuple[np.ndarray, np.ndarray]:
    """Unit-amplitude input whose response attains mltv_norm(trace).

    Picks t0 and the row of M_{t0} with the largest absolute sum and aligns the
    signs of the window ending at t0 with that row. Returns (w_hat, initial_window)
    in the layout `apply_mltv` expects.
    """
    H, _, n_x = _check_trace(trace)
    norms = np.array([matrix_inf_norm(g.M) for g in trace])
    t0 = int(np.argmax(norms))
    M0 = trace[t0].M
    row = int(np.argmax(np.abs(M0).sum(axis=1)))
    signs = np.sign(M0[row])
    signs[signs == 0] = 1.0

    full = np.zeros((len(trace) + H - 1, n_x))
    for i in range(H):
        full[t0 + H - 1 - i] = signs[i * n_x : (i + 1) * n_x]
    return full[H - 1 :], full[: H - 1]


def observed_gain(trace: GainTrace, w_hat, initial_window: Optional[np.ndarray] = None) -> Optional[float]:
    """||u||_inf / ||w_hat||_inf over the finite window, None for a zero input."""
    size = np.abs(np.asarray(w_hat, dtype=float)).max(initial=0.0)
    if initial_window is not None:
        size = max(size, np.abs(np.asarray(initial_window, dtype=float)).max(initial=0.0))
    if size == 0:
        return None
    return float(np.abs(apply_mltv(trace, w_hat, initial_window)).max() / size)
