# robust/__init__.py

from .interconnection import InterconnectionP, build_interconnection, reconstruction_estimator
from .small_gain import (
    BisectionStep,
    ScaleSearchResult,
    StabilityReport,
    gain_bound,
    max_beta,
    optimize_scales,
    scaled_norm,
    scaled_p11,
    small_gain_holds,
)

__all__ = [
    "BisectionStep",
    "InterconnectionP",
    "ScaleSearchResult",
    "StabilityReport",
    "build_interconnection",
    "gain_bound",
    "max_beta",
    "optimize_scales",
    "reconstruction_estimator",
    "scaled_norm",
    "scaled_p11",
    "small_gain_holds",
]
