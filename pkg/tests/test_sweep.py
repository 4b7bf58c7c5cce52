from dataclasses import replace

import numpy as np
import pytest

from src.benchmark import beta_sweep, simulate
from src.lti.errors import InvalidParameterError


@pytest.mark.parametrize("name", ["c_oco_beta1p5_perfect", "c_oco_beta1p5_imperfect"])
def test_zero_beta_recovers_state_feedback(load_experiment, name):
    config = load_experiment(name)
    table = beta_sweep(config, [0.0])
    frozen = simulate(replace(config, eta=0.0, beta=None))
    assert not table["diverged"][0]
    assert table["avg_cost"][0] == frozen.avg_cost


def test_inactive_constraint_recovers_unconstrained_run(load_experiment):
    config = load_experiment("u_oco_perfect")
    unconstrained = simulate(config)
    assert unconstrained.m_norm.max() < 8.0
    table = beta_sweep(config, [8.0])
    assert table["avg_cost"][0] == unconstrained.avg_cost


def test_perfect_model_cost_improves_with_beta(load_experiment):
    config = load_experiment("u_oco_perfect")
    betas = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0]
    table = beta_sweep(config, betas)
    assert not table["diverged"].any()
    costs = table["avg_cost"].to_numpy()
    assert np.all(costs[1:] <= costs[:-1] * 1.05)
    assert costs[-1] < costs[0]


def test_imperfect_model_has_a_stability_edge(load_experiment):
    config = load_experiment("beta_sweep")
    table = beta_sweep(config, config.betas)
    assert table["beta"].to_list() == config.betas

    stable_region = table[table["beta"] <= 1.5]
    assert not stable_region["diverged"].any()
    assert stable_region["avg_cost"].notna().all()

    beyond = table[table["beta"] > 1.5]
    assert beyond["diverged"].any()
    assert table.loc[table["diverged"], "avg_cost"].isna().all()


def test_sweep_rejects_bad_betas(load_experiment):
    config = load_experiment("u_oco_perfect")
    with pytest.raises(InvalidParameterError):
        beta_sweep(config, [])
    with pytest.raises(InvalidParameterError):
        beta_sweep(config, [1.0, -0.5])
