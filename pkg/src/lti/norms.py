from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidParameterError, NormNotConvergedError, UnstableSystemError
from .statespace import StateSpace, spectral_radius

logger = logging.getLogger("RobustOco.norms")

DEFAULT_TOL = 1e-9
MAX_HORIZON = 1_000_000
# Squaring stops once ||A^L|| drops below this contraction factor.
_CONTRACTION = 0.5
_MAX_SQUARINGS = 40

NormSelector = Union[int, float, str]


@dataclass(frozen=True)
class NormResult:
    """Certified upper value of an induced norm; the exact norm lies in [lower_bound, value]."""

    value: float
    truncation_horizon: int = 0
    tail_bound: float = 0.0

    def __post_init__(self):
        if self.value < 0 or self.tail_bound < 0:
            raise InvalidParameterError("Norm value and tail bound must be nonnegative.")

    @property
    def lower_bound(self) -> float:
        return max(0.0, self.value - self.tail_bound)


def _ord(p: NormSelector) -> float:
    if p in (1, 2):
        return float(p)
    if p in ("inf", "∞") or (isinstance(p, float) and math.isinf(p)):
        return np.inf
    raise InvalidParameterError(f"Unsupported norm selector {p!r}; use 1, 2 or inf.")


def vector_norm(v, p: NormSelector = np.inf) -> float:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size == 0:
        return 0.0
    return float(np.linalg.norm(v, ord=_ord(p)))


def matrix_inf_norm(M) -> float:
    """Induced inf->inf matrix norm: the largest absolute row sum."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0.0
    return float(np.abs(M).sum(axis=1).max())


def signal_norm(seq, p: NormSelector = np.inf) -> float:
    """l_p norm of a finite sequence with samples along axis 0."""
    seq = np.asarray(seq, dtype=float)
    if seq.size == 0:
        return 0.0
    seq = seq.reshape(seq.shape[0], -1)
    order = _ord(p)
    per_sample = np.linalg.norm(seq, ord=order, axis=1)
    if math.isinf(order):
        return float(per_sample.max())
    return float(np.sum(per_sample**order) ** (1.0 / order))


def signal_inf_norm(seq) -> float:
    return signal_norm(seq, np.inf)


def _geometric_tail_constant(sys: StateSpace, max_horizon: int) -> float:
    """S with sum_{m>=0} ||C A^m X|| <= S ||X|| for any X.

    Finds L = 2^j <= max_horizon with ||A^L|| <= 1/2 by repeated squaring
    (or the last power before the cap), then
    sum_m ||C A^m|| <= sum_{s<L} ||C A^s|| / (1 - ||A^L||).
    """
    power = sys.A.copy()
    L = 1
    for _ in range(_MAX_SQUARINGS):
        if matrix_inf_norm(power) <= _CONTRACTION or 2 * L > max_horizon:
            break
        power = power @ power
        L *= 2
    contraction = matrix_inf_norm(power)
    if contraction >= 1.0:
        return math.inf

    head = 0.0
    CA = sys.C.copy()
    for _ in range(L):
        head += matrix_inf_norm(CA)
        CA = CA @ sys.A
    return head / (1.0 - contraction)


def induced_linf_norm(sys: StateSpace, tol: float = DEFAULT_TOL, max_horizon: int = MAX_HORIZON) -> NormResult:
    """Induced l_inf -> l_inf norm of a stable LTI system.

    Equals the largest row-wise l1 norm of the impulse response. Samples are
    summed until the certified tail bound drops below tol / 2; the returned
    value is the truncated sum plus that tail, so it never undershoots the
    exact norm. Raises NormNotConvergedError when max_horizon samples are not
    enough.
    """
    if tol <= 0:
        raise InvalidParameterError(f"tol must be positive, got {tol}.")
    if max_horizon < 1:
        raise InvalidParameterError(f"max_horizon must be positive, got {max_horizon}.")
    rho = spectral_radius(sys)
    if rho >= 1.0:
        raise UnstableSystemError(rho)

    rows = np.abs(sys.D).sum(axis=1)
    if sys.is_static:
        return NormResult(float(rows.max()) if rows.size else 0.0, truncation_horizon=1, tail_bound=0.0)

    tail_constant = _geometric_tail_constant(sys, max_horizon)

    def _tail(X: np.ndarray) -> float:
        size = matrix_inf_norm(X)
        return 0.0 if size == 0.0 else tail_constant * size

    X = sys.B.copy()
    horizon = 1
    tail = _tail(X)
    while tail >= tol / 2:
        if horizon >= max_horizon or math.isinf(tail):
            raise NormNotConvergedError(horizon, tail, tol)
        rows += np.abs(sys.C @ X).sum(axis=1)
        X = sys.A @ X
        horizon += 1
        tail = _tail(X)

    value = float(rows.max()) + tail if rows.size else 0.0
    logger.debug(f"Induced norm {value:.12g} after {horizon} samples (tail {tail:.3e}).")
    return NormResult(value, truncation_horizon=horizon, tail_bound=float(tail))
