# benchmark/__init__.py

from pathlib import Path

from .configs import DisturbanceSpec, ExperimentConfig, load_system, parse_matrix, parse_system
from .logger import LogColors, get_experiment_logger
from .runner import ExperimentRunner
from .simulation import SimulationResult, generate_disturbance, simulate, simulate_lft
from .sweep import DIVERGED, SweepRow, beta_sweep

EXPERIMENT_CONFIG_DIR = Path(__file__).parent / "experiment_configs"

__all__ = [
    "DIVERGED",
    "EXPERIMENT_CONFIG_DIR",
    "DisturbanceSpec",
    "ExperimentConfig",
    "ExperimentRunner",
    "LogColors",
    "SimulationResult",
    "SweepRow",
    "beta_sweep",
    "generate_disturbance",
    "get_experiment_logger",
    "load_system",
    "parse_matrix",
    "parse_system",
    "simulate",
    "simulate_lft",
]
