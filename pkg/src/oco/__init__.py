from .controller import (
    ControlStep,
    CostWeights,
    DisturbanceHistory,
    EstimatorMemory,
    FirGains,
    IdealRollout,
    OcoController,
    estimate_disturbance,
    fir_output,
    ideal_cost,
    ideal_cost_gradient,
    opgd_update,
)
from .mltv import apply_mltv, mltv_norm, observed_gain, worst_case_input

__all__ = [
    "ControlStep",
    "CostWeights",
    "DisturbanceHistory",
    "EstimatorMemory",
    "FirGains",
    "IdealRollout",
    "OcoController",
    "apply_mltv",
    "estimate_disturbance",
    "fir_output",
    "ideal_cost",
    "ideal_cost_gradient",
    "mltv_norm",
    "observed_gain",
    "opgd_update",
    "worst_case_input",
]
