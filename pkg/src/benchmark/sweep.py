from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from ..lti.errors import InvalidParameterError
from .configs import ExperimentConfig
from .simulation import simulate

logger = logging.getLogger("RobustOco.sweep")

DIVERGED = "diverged"


@dataclass(frozen=True)
class SweepRow:
    beta: float
    avg_cost: Optional[float]
    diverged: bool
    t_div: Optional[int] = None


def _run_one(config: ExperimentConfig, beta: float) -> SweepRow:
    result = simulate(config.with_beta(beta))
    return SweepRow(
        beta=beta,
        avg_cost=None if result.diverged else result.avg_cost,
        diverged=result.diverged,
        t_div=result.t_div,
    )


def beta_sweep(config: ExperimentConfig, betas: Sequence[float], max_workers: Optional[int] = None) -> pd.DataFrame:
    """Average per-step cost J_T / T of the constrained controller for each β.

    Runs are independent and fan out over a thread pool; rows come back in the
    order of `betas`. `avg_cost` is NaN for diverged runs.
    """
    betas = [float(b) for b in betas]
    if not betas:
        raise InvalidParameterError("beta_sweep needs at least one beta.")
    if any(b < 0 or not np.isfinite(b) for b in betas):
        raise InvalidParameterError(f"Sweep betas must be finite and nonnegative, got {betas}.")

    rows: Dict[int, SweepRow] = {}
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = {pool.submit(_run_one, config, b): i for i, b in enumerate(betas)}
        for done, future in enumerate(as_completed(futures)):
            i = futures[future]
            rows[i] = future.result()
            logger.info(
                f"beta={betas[i]:.6g}: " + (DIVERGED if rows[i].diverged else f"avg cost {rows[i].avg_cost:.6g}"),
                extra={"run_id": config.name, "run_idx": done, "total_runs": len(betas)},
            )

    ordered = [rows[i] for i in range(len(betas))]
    return pd.DataFrame(
        {
            "beta": [r.beta for r in ordered],
            "avg_cost": [np.nan if r.avg_cost is None else r.avg_cost for r in ordered],
            "diverged": [r.diverged for r in ordered],
        }
    )
