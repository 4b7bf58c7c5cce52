import logging
import time
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd
from rich.console import Console

from ..lti.norms import NormResult, induced_linf_norm
from ..lti.statespace import StateSpace
from ..robust.interconnection import build_interconnection, reconstruction_estimator
from ..robust.small_gain import StabilityReport, max_beta
from .configs import ExperimentConfig
from .simulation import SimulationResult, simulate
from .sweep import beta_sweep
from .utils import (
    _get_divider,
    norm_table,
    plot_simulation,
    plot_sweep,
    print_table,
    stability_table,
    write_bisection_csv,
    write_summary,
    write_sweep_csv,
    write_trajectory_csv,
)


class ExperimentRunner:
    """
    Runs experiments from a loaded config and writes their artifacts.

    Every public method completes the requested computation or raises; stability
    verdicts (divergence, an uncertified bound) are results, not errors.
    """

    def __init__(self, logger: logging.Logger, console: Optional[Console] = None):
        self.logger = logger
        self.console = console

    def _prepare(self, out_dir: Optional[Path]) -> Optional[Path]:
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
        return out_dir

    def run_simulation(self, config: ExperimentConfig, out_dir: Path, plot: bool = False) -> SimulationResult:
        extra = {"run_id": config.name}
        self.logger.info(_get_divider(title=f"Simulate: {config.name}"))
        self.logger.info(
            f"T={config.T}, H={config.H}, eta={config.eta:g}, beta={config.beta if config.beta is not None else 'none'}, "
            f"uncertainty={'yes' if config.uncertainty is not None else 'no'}",
            extra=extra,
        )
        started = time.perf_counter()
        result = simulate(config)
        duration = time.perf_counter() - started

        self._prepare(out_dir)
        write_trajectory_csv(result, out_dir)
        write_summary(result, out_dir)
        if plot:
            plot_simulation(result, out_dir, config.name)
        self._log_summary(config, result, duration, out_dir)
        return result

    def run_sweep(
        self, config: ExperimentConfig, betas: Sequence[float], out_dir: Path, plot: bool = False
    ) -> pd.DataFrame:
        self.logger.info(_get_divider(title=f"Beta sweep: {config.name} ({len(betas)} values)"))
        table = beta_sweep(config, betas)
        self._prepare(out_dir)
        path = write_sweep_csv(table, out_dir)
        if plot and (~table["diverged"]).any():
            plot_sweep(table, out_dir)
        n_div = int(table["diverged"].sum())
        self.logger.info(f"{n_div}/{len(table)} runs diverged. Table saved to {path}", extra={"run_id": config.name})
        return table

    def run_stability_bound(
        self, config: ExperimentConfig, tol: Optional[float] = None, out_dir: Optional[Path] = None
    ) -> StabilityReport:
        self.logger.info(_get_divider(title=f"Stability bound: {config.name}"))
        P = build_interconnection(config.plant, config.K, reconstruction_estimator(config.plant.A, config.plant.B))
        delta = config.uncertainty_bound()
        self.logger.info(f"Uncertainty bound delta={delta:.6g}", extra={"run_id": config.name})
        report = max_beta(P, delta, tol=tol if tol is not None else config.stability_tol, beta_cap=config.beta_cap)

        print_table(stability_table(report), self.console)
        if self._prepare(out_dir) is not None:
            path = write_bisection_csv(report, out_dir)
            self.logger.info(f"Bisection trace saved to {path}", extra={"run_id": config.name})
        return report

    def run_norm(self, sys: StateSpace, tol: Optional[float] = None) -> NormResult:
        result = induced_linf_norm(sys, tol=tol) if tol is not None else induced_linf_norm(sys)
        print_table(norm_table(result), self.console)
        return result

    def _log_summary(self, config: ExperimentConfig, result: SimulationResult, duration: float, out_dir: Path):
        extra = {"run_id": config.name}
        self.logger.info(_get_divider(title=f"{config.name} Summary", char="-", length=60))
        self.logger.info(f"J_T:      {result.total_cost:.6g}", extra=extra)
        self.logger.info(f"avg cost: {result.avg_cost:.6g}", extra=extra)
        if result.diverged:
            self.logger.warning(f"Diverged at t={result.t_div}", extra=extra)
        else:
            self.logger.info("Diverged: no", extra=extra)
        self.logger.info(f"Timing:   {duration:.2f} seconds", extra=extra)
        self.logger.info(f"Output:   {out_dir}", extra=extra)
        self.logger.info(_get_divider(char="=", length=60))
