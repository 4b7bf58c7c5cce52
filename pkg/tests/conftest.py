import numpy as np
import pytest

from src.benchmark import EXPERIMENT_CONFIG_DIR, ExperimentConfig
from src.lti import StateSpace, TransferFunctionSiso, ss_sub, tf_to_ss
from src.oco import CostWeights
from src.robust import build_interconnection, reconstruction_estimator

PLANT_A, PLANT_B, GAIN_K = 0.9, 0.1, 0.15
F_NUM = (0.1185, 0.1145)
F_DEN = (1.0, -1.672, 0.9048)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def plant():
    return StateSpace([[PLANT_A]], [[PLANT_B]], [[1.0]], [[0.0]])


@pytest.fixture
def actuator():
    return tf_to_ss(TransferFunctionSiso(F_NUM, F_DEN))


@pytest.fixture
def uncertainty(actuator):
    return ss_sub(actuator, 1.0)


@pytest.fixture
def estimator():
    return reconstruction_estimator([[PLANT_A]], [[PLANT_B]])


@pytest.fixture
def interconnection(plant, estimator):
    return build_interconnection(plant, [[GAIN_K]], estimator)


@pytest.fixture
def weights():
    return CostWeights([[1.0]], [[0.1]])


@pytest.fixture
def load_experiment():
    def _load(name: str) -> ExperimentConfig:
        return ExperimentConfig.from_file(EXPERIMENT_CONFIG_DIR / f"{name}.yaml")

    return _load
