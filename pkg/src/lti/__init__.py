# lti/__init__.py

from . import errors
from .norms import (
    NormResult,
    induced_linf_norm,
    matrix_inf_norm,
    signal_inf_norm,
    signal_norm,
    vector_norm,
)
from .statespace import (
    StateSpace,
    SystemState,
    TransferFunctionSiso,
    impulse_response,
    scale,
    series,
    spectral_radius,
    ss_step,
    ss_sub,
    tf_to_ss,
)

__all__ = [
    "errors",
    "NormResult",
    "StateSpace",
    "SystemState",
    "TransferFunctionSiso",
    "impulse_response",
    "induced_linf_norm",
    "matrix_inf_norm",
    "scale",
    "series",
    "signal_inf_norm",
    "signal_norm",
    "spectral_radius",
    "ss_step",
    "ss_sub",
    "tf_to_ss",
    "vector_norm",
]
