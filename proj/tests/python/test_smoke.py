"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import riskmarket as rm


def test_asset_payoff_and_basis():
    basis = np.array([[1.0, 1.0], [1.0, -1.0]])
    assert rm.verify_basis(basis)
    assert not rm.verify_basis(np.array([[1.0, 2.0], [2.0, 4.0]]))
    x = rm.asset_payoff(np.array([1.0, 0.5]), basis)
    assert np.allclose(x, [1.5, 0.5])
    s = rm.recover_shares(x, basis)
    assert np.allclose(s, [1.0, 0.5])


def test_entropic_risk_matches_closed_form():
    measure = rm.EntropicRisk(1.0, np.array([0.5, 0.5]))
    value = measure.risk(np.array([1.0, -1.0]))
    assert value == pytest.approx(math.log(math.cosh(1.0)), abs=1e-12)
    assert rm.gross_risk(2.0, np.array([1.0, -1.0]), measure) == pytest.approx(
        value - 2.0, abs=1e-12
    )


def test_penalty_oracle_agrees_with_entropic():
    belief = np.array([0.6, 0.4])
    theta = 1.0
    measure = rm.EntropicRisk(theta, belief)
    x = np.array([0.7, -0.3])

    def kl_alpha(q):
        q = np.maximum(q, 1e-300)
        return float(np.sum(q * np.log(q / belief))) / theta

    value, argmax, converged = rm.penalty_risk_oracle(x, kl_alpha, 1e-4)
    assert converged
    assert value == pytest.approx(measure.risk(x), abs=1e-4)
    assert argmax.sum() == pytest.approx(1.0, abs=1e-9)


def test_lmsr_cost_and_price():
    lmsr = rm.LMSRCost(1.0, 3)
    assert lmsr.cost(np.zeros(3)) == pytest.approx(math.log(3.0), abs=1e-12)
    p = lmsr.price(np.array([0.4, -0.2, 0.0]))
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    assert rm.incremental_cost(lmsr, np.zeros(3), np.zeros(3)) == 0.0


def test_analytic_log_pool():
    pool = rm.analytic_log_pool([np.array([0.8, 0.2])], [1.0], 1.0)
    assert np.allclose(pool, [2.0 / 3.0, 1.0 / 3.0], atol=1e-12)


def test_gaussian_map_preset():
    summary, trace, inventory = rm.run_preset("gaussian_map")
    assert summary["converged"]
    assert summary["final_price"][0] == pytest.approx(0.5, abs=1e-8)
    assert inventory[0] == pytest.approx(0.5, abs=1e-8)
    assert summary["duality_gap"] >= -1e-9
    s_star, mu_map = rm.gaussian_map_closed_form(1.0, 1.0, 1.0, 1.0)
    assert s_star == pytest.approx(0.5, abs=1e-15)
    assert mu_map == pytest.approx(0.5, abs=1e-15)


def test_opinion_pool_market_from_dict():
    config = {
        "outcome_space": {"size": 2},
        "basis": "arrow_debreu",
        "cost": {"type": "lmsr", "theta0": 1.0},
        "agents": [
            {
                "risk": {"type": "entropic", "theta": 1.0, "belief": [0.8, 0.2]},
                "mode": "exact",
            }
        ],
        "seed": 3,
    }
    summary, trace, _ = rm.run(config)
    assert summary["converged"]
    assert summary["final_price"][0] == pytest.approx(2.0 / 3.0, abs=1e-5)
    # the objective column is non-increasing
    assert (np.diff(trace["objective"]) <= 1e-9).all()


def test_logistic_market_agrees_with_reference():
    features, labels = rm.make_synthetic_dataset(30, 2, seed=4)
    w_ref = rm.reference_logistic_solver(features, labels, 0.1)
    config = {
        "basis": "linear",
        "cost": {
            "type": "logistic",
            "lambda": 0.1,
            "dataset": {"synthetic": {"m": 30, "k": 2, "seed": 4}},
        },
        "agents": [
            {
                "risk": {"type": "quadratic", "mu": [0.0, 0.0], "scale": 0.1},
                "mode": "gradient_step",
                "mask": [i == k for i in range(2)],
            }
            for k in range(2)
        ],
        "stop": {"eps": 1e-10},
    }
    summary, _, inventory = rm.run(config)
    assert summary["converged"]
    assert np.max(np.abs(inventory - w_ref)) <= 1e-4


def test_config_errors_are_value_errors():
    with pytest.raises(ValueError, match="cost.theta0"):
        rm.run({"basis": "arrow_debreu", "outcome_space": {"size": 2},
                "cost": {"type": "lmsr", "theta0": -1.0}, "agents": []})


def test_presets_listing():
    names = rm.preset_names()
    assert len(names) == 5
    assert "opinion_pool_fig1" in names
