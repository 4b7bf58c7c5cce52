# src/benchmark/configs.py
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import yaml

from ..lti.errors import ConfigError, DimensionError, InvalidParameterError, NotStabilizingError, RobustOcoError
from ..lti.norms import induced_linf_norm
from ..lti.statespace import StateSpace, TransferFunctionSiso, spectral_radius, ss_sub, tf_to_ss
from ..oco.controller import CostWeights

DISTURBANCE_KINDS = ("square", "constant", "file")

_SECTION_KEYS: Dict[str, set] = {
    "name": set(),
    "plant": {"num", "den", "A", "B", "C", "D"},
    "uncertainty": {"num", "den", "A", "B", "C", "D", "subtract_gain", "delta"},
    "controller": {"K", "H", "eta", "beta", "initial_gains"},
    "cost": {"Q", "R"},
    "simulation": {"T", "divergence_threshold"},
    "disturbance": {"kind", "amplitude", "switch_time", "values", "path"},
    "sweep": {"betas"},
    "stability": {"tol", "beta_cap"},
}


# ────────────────────────────── Parsing ──────────────────────────────
def parse_matrix(value: Any, key: str = "matrix") -> np.ndarray:
    """Scalar, nested list, or bracket text "[1 0; 0 1]" -> 2-D float array."""
    if isinstance(value, str):
        text = value.strip()
        if text.startswith("["):
            text = text[1:]
        if text.endswith("]"):
            text = text[:-1]
        rows = [r for r in text.split(";") if r.strip()]
        try:
            parsed = [[float(tok) for tok in re.split(r"[,\s]+", r.strip()) if tok] for r in rows]
        except ValueError as e:
            raise ConfigError(f"cannot parse matrix {value!r}: {e}", key=key) from e
        if len({len(r) for r in parsed}) > 1:
            raise ConfigError(f"ragged matrix {value!r}", key=key)
        return np.atleast_2d(np.array(parsed, dtype=float))
    try:
        return np.atleast_2d(np.asarray(value, dtype=float))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"cannot parse matrix {value!r}: {e}", key=key) from e


def _parse_vector(value: Any, key: str) -> List[float]:
    return parse_matrix(value, key).reshape(-1).tolist()


def parse_system(section: Dict[str, Any], key: str) -> StateSpace:
    """A system section holds either `num`/`den` or a realization `A`, `B`, `C`, `D`."""
    if "num" in section or "den" in section:
        if not {"num", "den"} <= section.keys():
            raise ConfigError("transfer function needs both num and den", key=key)
        tf = TransferFunctionSiso(tuple(_parse_vector(section["num"], f"{key}.num")), tuple(_parse_vector(section["den"], f"{key}.den")))
        return tf_to_ss(tf)
    if "D" in section and not {"A", "B", "C"} & section.keys():
        return StateSpace.static(parse_matrix(section["D"], f"{key}.D"))
    missing = {"A", "B", "C"} - section.keys()
    if missing:
        raise ConfigError(f"realization is missing {sorted(missing)}", key=key)
    A = parse_matrix(section["A"], f"{key}.A")
    B = parse_matrix(section["B"], f"{key}.B")
    C = parse_matrix(section["C"], f"{key}.C")
    D = parse_matrix(section["D"], f"{key}.D") if "D" in section else np.zeros((C.shape[0], B.shape[1]))
    return StateSpace(A, B, C, D)


# ────────────────────────────── Configs ──────────────────────────────
@dataclass
class DisturbanceSpec:
    """Input disturbance d_t, t = 0 .. T.

    `square` holds +amplitude through `switch_time` and -amplitude afterwards,
    `constant` holds amplitude, `file` replays `values` (or the text file at `path`).
    """

    kind: str = "square"
    amplitude: float = 100.0
    switch_time: int = 500
    values: Optional[np.ndarray] = None
    path: Optional[Path] = None

    def __post_init__(self):
        if self.kind not in DISTURBANCE_KINDS:
            raise InvalidParameterError(f"Unknown disturbance kind {self.kind!r}; use one of {DISTURBANCE_KINDS}.")
        if self.kind == "file":
            if self.values is None and self.path is None:
                raise InvalidParameterError("File disturbance needs `values` or `path`.")
            if self.values is None:
                self.values = np.loadtxt(self.path, delimiter=",", ndmin=2)
            self.values = np.asarray(self.values, dtype=float)
            if self.values.ndim == 1:
                self.values = self.values[:, None]

    def validate(self, T: int) -> None:
        if self.kind == "square" and not 0 < self.switch_time < T:
            raise InvalidParameterError(f"Square disturbance needs 0 < switch_time < T, got {self.switch_time} (T={T}).")
        if self.kind == "file" and self.values.shape[0] < T + 1:
            raise InvalidParameterError(f"Disturbance file has {self.values.shape[0]} samples, need T+1 = {T + 1}.")


@dataclass
class ExperimentConfig:
    """One closed-loop experiment: nominal plant, uncertainty, OCO controller and run settings."""

    plant: StateSpace
    K: np.ndarray
    weights: CostWeights
    H: int = 1
    eta: float = 5e-4
    beta: Optional[float] = None
    T: int = 1000
    disturbance: DisturbanceSpec = field(default_factory=DisturbanceSpec)
    divergence_threshold: float = 1e9
    uncertainty: Optional[StateSpace] = None
    delta: Optional[float] = None
    initial_gains: Optional[np.ndarray] = None
    betas: List[float] = field(default_factory=list)
    stability_tol: float = 1e-3
    beta_cap: float = 1e4
    name: str = "experiment"

    def __post_init__(self):
        self.K = np.atleast_2d(np.asarray(self.K, dtype=float))
        n_x, n_u = self.plant.n_s, self.plant.n_in
        if self.plant.is_static:
            raise InvalidParameterError("Plant must have at least one state.")
        if self.K.shape != (n_u, n_x):
            raise DimensionError(f"K has shape {self.K.shape}, expected ({n_u}, {n_x}).")
        if self.T < 1:
            raise InvalidParameterError(f"T must be >= 1, got {self.T}.")
        if self.H < 1:
            raise InvalidParameterError(f"H must be >= 1, got {self.H}.")
        if self.eta < 0:
            raise InvalidParameterError(f"eta must be >= 0 (0 freezes the learner), got {self.eta}.")
        if self.beta is not None and self.beta < 0:
            raise InvalidParameterError(f"beta must be >= 0, got {self.beta}.")
        if self.divergence_threshold <= 0:
            raise InvalidParameterError(f"divergence_threshold must be > 0, got {self.divergence_threshold}.")
        if self.delta is not None and self.delta < 0:
            raise InvalidParameterError(f"delta must be >= 0, got {self.delta}.")
        if any(b < 0 for b in self.betas):
            raise InvalidParameterError(f"Sweep betas must be nonnegative, got {self.betas}.")
        if self.weights.Q.shape != (n_x, n_x) or self.weights.R.shape != (n_u, n_u):
            raise DimensionError(f"Q/R have shapes {self.weights.Q.shape}/{self.weights.R.shape}, expected ({n_x}, {n_x})/({n_u}, {n_u}).")
        if self.uncertainty is not None and (self.uncertainty.n_in, self.uncertainty.n_out) != (n_u, n_u):
            raise DimensionError(f"Uncertainty must be {n_u}x{n_u}, got {self.uncertainty.n_out}x{self.uncertainty.n_in}.")
        if self.initial_gains is not None:
            self.initial_gains = np.atleast_2d(np.asarray(self.initial_gains, dtype=float))
            if self.initial_gains.shape != (n_u, n_x * self.H):
                raise DimensionError(f"initial_gains has shape {self.initial_gains.shape}, expected ({n_u}, {n_x * self.H}).")
        self.disturbance.validate(self.T)

        rho = spectral_radius(self.plant.A - self.plant.B @ self.K)
        if rho >= 1.0:
            raise NotStabilizingError(rho)

    @property
    def n_x(self) -> int:
        return self.plant.n_s

    @property
    def n_u(self) -> int:
        return self.plant.n_in

    def uncertainty_bound(self) -> float:
        """δ: the explicit bound if given, else ||Δ|| of the realized uncertainty, else 0."""
        if self.delta is not None:
            return self.delta
        if self.uncertainty is None:
            return 0.0
        return induced_linf_norm(self.uncertainty).value

    def with_beta(self, beta: Optional[float]) -> "ExperimentConfig":
        return replace(self, beta=beta)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: Optional[Union[str, Path]] = None) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("top level must be a mapping of sections", path=path)
        for section, body in data.items():
            if section not in _SECTION_KEYS:
                raise ConfigError(f"unknown section {section!r}", path=path, key=section)
            if section == "name":
                continue
            if not isinstance(body, dict):
                raise ConfigError("section must be a mapping", path=path, key=section)
            unknown = set(body) - _SECTION_KEYS[section]
            if unknown:
                raise ConfigError(f"unknown keys {sorted(unknown)}", path=path, key=section)
        for required in ("plant", "controller"):
            if required not in data:
                raise ConfigError("missing required section", path=path, key=required)

        try:
            plant = parse_system(data["plant"], "plant")

            uncertainty, delta = None, None
            unc = dict(data.get("uncertainty") or {})
            if unc:
                subtract_gain = float(unc.pop("subtract_gain", 0.0))
                delta = unc.pop("delta", None)
                delta = float(delta) if delta is not None else None
                if unc:
                    uncertainty = parse_system(unc, "uncertainty")
                    if subtract_gain:
                        uncertainty = ss_sub(uncertainty, subtract_gain)

            ctrl = data["controller"]
            if "K" not in ctrl:
                raise ConfigError("missing gain K", path=path, key="controller.K")
            beta = ctrl.get("beta")
            cost = data.get("cost") or {}
            sim = data.get("simulation") or {}
            dist = dict(data.get("disturbance") or {})
            if "values" in dist:
                dist["values"] = np.asarray(dist["values"], dtype=float)
            if "path" in dist:
                dist["path"] = Path(dist["path"])
                if path is not None and not dist["path"].is_absolute():
                    dist["path"] = Path(path).parent / dist["path"]
            stab = data.get("stability") or {}
            sweep_betas = (data.get("sweep") or {}).get("betas")
            n_x, n_u = plant.n_s, plant.n_in

            return cls(
                plant=plant,
                K=parse_matrix(ctrl["K"], "controller.K"),
                weights=CostWeights(
                    parse_matrix(cost.get("Q", np.eye(n_x).tolist()), "cost.Q"),
                    parse_matrix(cost.get("R", np.eye(n_u).tolist()), "cost.R"),
                ),
                H=int(ctrl.get("H", 1)),
                eta=float(ctrl.get("eta", 5e-4)),
                beta=float(beta) if beta is not None else None,
                T=int(sim.get("T", 1000)),
                disturbance=DisturbanceSpec(**dist),
                divergence_threshold=float(sim.get("divergence_threshold", 1e9)),
                uncertainty=uncertainty,
                delta=delta,
                initial_gains=parse_matrix(ctrl["initial_gains"], "controller.initial_gains")
                if "initial_gains" in ctrl
                else None,
                betas=_parse_vector(sweep_betas, "sweep.betas") if sweep_betas is not None else [],
                stability_tol=float(stab.get("tol", 1e-3)),
                beta_cap=float(stab.get("beta_cap", 1e4)),
                name=str(data.get("name", Path(path).stem if path else "experiment")),
            )
        except ConfigError as e:
            if e.path is None and path is not None:
                raise ConfigError(str(e), path=path) from e
            raise
        except (RobustOcoError, TypeError, ValueError) as e:
            raise ConfigError(str(e), path=path) from e

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """Load an experiment from a YAML file; every failure surfaces as ConfigError."""
        path = Path(path)
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}", path=path) from e
        except yaml.YAMLError as e:
            raise ConfigError(f"invalid YAML: {e}", path=path) from e
        return cls.from_dict(data, path=path)


def load_system(path: Union[str, Path], section: str = "plant") -> StateSpace:
    """Read a single system section from a YAML file (uncertainty honors `subtract_gain`)."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}", path=path) from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML: {e}", path=path) from e
    if not isinstance(data, dict) or not isinstance(data.get(section), dict):
        raise ConfigError("missing system section", path=path, key=section)

    body = dict(data[section])
    unknown = set(body) - _SECTION_KEYS.get(section, _SECTION_KEYS["uncertainty"])
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", path=path, key=section)
    subtract_gain = float(body.pop("subtract_gain", 0.0))
    body.pop("delta", None)
    try:
        sys = parse_system(body, section)
        return ss_sub(sys, subtract_gain) if subtract_gain else sys
    except ConfigError as e:
        raise ConfigError(str(e), path=path) from e
    except (RobustOcoError, TypeError, ValueError) as e:
        raise ConfigError(str(e), path=path, key=section) from e
