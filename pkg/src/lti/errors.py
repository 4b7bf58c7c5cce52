from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

# ──────────────────────────── Error Types ────────────────────────────


class RobustOcoError(Exception):
    pass


class DimensionError(RobustOcoError, ValueError):
    pass


class NonFiniteError(RobustOcoError, ValueError):
    pass


class ImproperTransferFunctionError(RobustOcoError, ValueError):
    pass


class InsufficientHistoryError(RobustOcoError, ValueError):
    pass


class InvalidParameterError(RobustOcoError, ValueError):
    pass


class UnstableSystemError(RobustOcoError):
    def __init__(self, spectral_radius: float, what: str = "system"):
        self.spectral_radius = spectral_radius
        super().__init__(f"Unstable {what}: spectral radius {spectral_radius:.6g} >= 1 (infinite induced norm).")


class NormNotConvergedError(RobustOcoError):
    def __init__(self, horizon: int, tail_bound: float, tol: float):
        self.horizon = horizon
        self.tail_bound = tail_bound
        super().__init__(
            f"Induced norm did not converge within {horizon} samples: tail bound {tail_bound:.3e} exceeds tol/2 = {tol / 2:.3e}."
        )


class NotStabilizingError(UnstableSystemError):
    def __init__(self, spectral_radius: float):
        super().__init__(spectral_radius, what="closed loop, baseline not stabilizing")


class ConfigError(RobustOcoError):
    def __init__(self, message: str, path: Optional[Union[str, Path]] = None, key: Optional[str] = None):
        self.path = path
        self.key = key
        prefix = ""
        if path is not None:
            prefix += f"{path}: "
        if key is not None:
            prefix += f"[{key}] "
        super().__init__(f"{prefix}{message}".strip())
