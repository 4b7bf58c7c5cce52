from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd
from scipy import optimize

from ..lti.errors import InvalidParameterError
from ..lti.norms import DEFAULT_TOL, induced_linf_norm
from ..lti.statespace import StateSpace
from .interconnection import InterconnectionP

logger = logging.getLogger("RobustOco.small_gain")

LOG_SCALE_RANGE = (-6.0, 6.0)
GRID_POINTS = 25
STRICTNESS_MARGIN = 1e-6
DEFAULT_BISECTION_TOL = 1e-3
DEFAULT_BETA_CAP = 1e4


@dataclass(frozen=True)
class ScaleSearchResult:
    d1: float
    d2: float
    scaled_norm: float

    def __post_init__(self):
        if self.d1 <= 0 or self.d2 <= 0:
            raise InvalidParameterError("D-scales must be positive.")


@dataclass(frozen=True)
class BisectionStep:
    beta: float
    scaled_norm: float
    d2: float
    feasible: bool


@dataclass
class StabilityReport:
    """Outcome of the stability-bound search for one uncertainty level δ.

    `beta_star` is None when the condition still holds at `beta_cap`.
    """

    delta_bound: float
    beta_star: Optional[float]
    scales: ScaleSearchResult
    certified: bool
    beta_cap: float = DEFAULT_BETA_CAP
    trace: List[BisectionStep] = field(default_factory=list, repr=False)

    @property
    def unbounded(self) -> bool:
        return self.beta_star is None

    def trace_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(s.beta, s.scaled_norm, s.d2, s.feasible) for s in self.trace],
            columns=["beta", "scaled_norm", "d2", "feasible"],
        )


# ──────────────────────────── Scaled small gain ────────────────────────────
def _scalings(P: InterconnectionP, delta: float, beta: float, d1: float, d2: float):
    left = np.diag(np.r_[np.full(P.n_u, 1.0 / d1), np.full(P.n_x, 1.0 / d2)])
    right = np.diag(np.r_[np.full(P.n_u, d1 * delta), np.full(P.n_u, d2 * beta)])
    return left, right


def scaled_p11(P: InterconnectionP, delta: float, beta: float, d1: float, d2: float) -> StateSpace:
    left, right = _scalings(P, delta, beta, d1, d2)
    return P.p11.scaled_io(left, right)


def scaled_norm(
    P: InterconnectionP, delta: float, beta: float, d1: float = 1.0, d2: float = 1.0, tol: float = DEFAULT_TOL
) -> float:
    """||diag(I/d1, I/d2) P11 diag(d1 δ I, d2 β I)|| in the induced l_inf sense."""
    if d1 <= 0 or d2 <= 0:
        raise InvalidParameterError(f"D-scales must be positive, got d1={d1}, d2={d2}.")
    if delta < 0 or beta < 0:
        raise InvalidParameterError(f"delta and beta must be nonnegative, got {delta}, {beta}.")
    return induced_linf_norm(scaled_p11(P, delta, beta, d1, d2), tol=tol).value


def small_gain_holds(P: InterconnectionP, gamma_norm: float, tol: float = DEFAULT_TOL) -> bool:
    """Unscaled test ||P11|| * ||Γ|| < 1."""
    return induced_linf_norm(P.p11, tol=tol).value * gamma_norm < 1.0


def optimize_scales(
    P: InterconnectionP, delta: float, beta: float, tol: float = DEFAULT_TOL
) -> ScaleSearchResult:
    """Minimize the scaled norm over d2 with d1 = 1.

    A common factor on (d1, d2) cancels in P̃11, so only the ratio matters. A
    coarse log-spaced grid seeds a bounded scalar search around its best point.
    """

    def objective(log_d2: float) -> float:
        return scaled_norm(P, delta, beta, 1.0, 10.0**log_d2, tol)

    grid = np.linspace(*LOG_SCALE_RANGE, GRID_POINTS)
    values = np.array([objective(s) for s in grid])
    i = int(np.argmin(values))
    best_log, best_value = float(grid[i]), float(values[i])

    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, GRID_POINTS - 1)]
    refined = optimize.minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-4})
    if refined.success and refined.fun < best_value:
        best_log, best_value = float(refined.x), float(refined.fun)

    # d2 = 1 is a grid point; prefer it on ties.
    unit_value = float(values[int(np.argmin(np.abs(grid)))])
    if unit_value <= best_value + tol:
        best_log, best_value = 0.0, unit_value

    result = ScaleSearchResult(d1=1.0, d2=10.0**best_log, scaled_norm=best_value)
    logger.debug(f"delta={delta:.6g} beta={beta:.6g}: d2={result.d2:.4g}, scaled norm {best_value:.6g}")
    return result


def max_beta(
    P: InterconnectionP,
    delta: float,
    tol: float = DEFAULT_BISECTION_TOL,
    beta_cap: float = DEFAULT_BETA_CAP,
    norm_tol: float = DEFAULT_TOL,
) -> StabilityReport:
    """Largest FIR bound β <= beta_cap certified by the scaled small gain condition."""
    if delta < 0:
        raise InvalidParameterError(f"delta must be nonnegative, got {delta}.")
    if tol <= 0 or beta_cap <= 0:
        raise InvalidParameterError("tol and beta_cap must be positive.")

    trace: List[BisectionStep] = []

    def check(beta: float):
        scales = optimize_scales(P, delta, beta, norm_tol)
        feasible = scales.scaled_norm <= 1.0 - STRICTNESS_MARGIN
        trace.append(BisectionStep(beta, scales.scaled_norm, scales.d2, feasible))
        logger.debug(f"beta={beta:.6g} scaled norm {scales.scaled_norm:.6g} feasible={feasible}")
        return feasible, scales

    feasible, scales = check(0.0)
    if not feasible:
        logger.info(f"delta={delta:.6g}: small gain fails already at beta=0.")
        return StabilityReport(delta, 0.0, scales, False, beta_cap, trace)

    lo, lo_scales = 0.0, scales
    hi = min(1.0, beta_cap)
    while True:
        feasible, scales = check(hi)
        if not feasible:
            break
        lo, lo_scales = hi, scales
        if hi >= beta_cap:
            logger.info(f"delta={delta:.6g}: condition holds at beta_cap={beta_cap:.6g} (unbounded).")
            return StabilityReport(delta, None, lo_scales, True, beta_cap, trace)
        hi = min(2.0 * hi, beta_cap)

    while hi - lo > tol * max(lo, tol):
        mid = 0.5 * (lo + hi)
        feasible, scales = check(mid)
        if feasible:
            lo, lo_scales = mid, scales
        else:
            hi = mid

    logger.info(f"delta={delta:.6g}: beta*={lo:.6g} (d2={lo_scales.d2:.4g}, scaled norm {lo_scales.scaled_norm:.6g})")
    return StabilityReport(delta, lo, lo_scales, True, beta_cap, trace)


def gain_bound(
    P: InterconnectionP, delta: float, beta: float, scales: ScaleSearchResult, tol: float = DEFAULT_TOL
) -> float:
    """Bound on ||x|| / ||d|| from the small gain argument on the scaled P.

    ||P22|| + ||P̃21|| ||P̃12|| / (1 - ||P̃11||), with ||Γ̃|| <= 1; infinite when
    the scaled condition fails.
    """
    left, right = _scalings(P, delta, beta, scales.d1, scales.d2)
    n11 = induced_linf_norm(P.p11.scaled_io(left, right), tol=tol).value
    if n11 >= 1.0:
        return math.inf
    n12 = induced_linf_norm(P.p12.scaled_io(left, np.eye(P.n_u)), tol=tol).value
    n21 = induced_linf_norm(P.p21.scaled_io(np.eye(P.n_x), right), tol=tol).value
    n22 = induced_linf_norm(P.p22, tol=tol).value
    return n22 + n21 * n12 / (1.0 - n11)
