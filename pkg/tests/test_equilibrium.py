from __future__ import annotations

import numpy as np
import pytest

from pgt import catalog
from pgt.construct import construct_rosenthal, table_potential
from pgt.criteria import oracle_finite_potential
from pgt.equilibrium import better_response_dynamics, grid_game, minimize_potential, verify_nash
from pgt.game import expand_congestion_game


def _p(*vals):
    return tuple((float(v),) for v in vals)


def test_coordination_minimizer_is_nash():
    g = catalog.coordination()
    _, table = oracle_finite_potential(g)
    phi = table_potential(g, table)
    x, val = minimize_potential(g, phi)
    assert x == _p(0, 0)
    # potential gap equals the cost gap for the deviating player
    assert phi(_p(1, 0)) - val == g.cost(0, _p(1, 0)) - g.cost(0, _p(0, 0))
    rep = verify_nash(g, x)
    assert rep.passed and rep.exhaustive


def test_congestion_minimizer_splits_players():
    g = catalog.two_link_network()
    phi = construct_rosenthal(g)
    x, val = minimize_potential(expand_congestion_game(g), phi)
    assert val == 2.0 and x[0] != x[1]


def test_constant_potential_ties_break_lexicographically():
    g = catalog.random_finite_game(np.random.default_rng(0), 3, 2)
    x, val = minimize_potential(g, lambda x: 1.0)
    assert x == next(iter(g.profiles())) and val == 1.0


def test_continuous_minimization_uses_a_grid():
    g = catalog.cournot(2)
    grid = grid_game(g, resolution=5)
    assert grid.shape == (5, 5)
    x, _ = minimize_potential(g, lambda x: (x[0][0] - 5) ** 2 + x[1][0] ** 2, resolution=5)
    assert x == _p(5, 0)


def test_pennies_has_no_pure_equilibrium():
    g = catalog.matching_pennies()
    for x in g.profiles():
        rep = verify_nash(g, x)
        assert rep.verdict == "fail" and rep.witness["gain"] == 2.0


def test_single_profile_game_is_trivially_nash():
    g = catalog.random_finite_game(np.random.default_rng(1), 2, 1)
    assert verify_nash(g, next(iter(g.profiles()))).passed


def test_pennies_dynamics_cycle():
    res = better_response_dynamics(catalog.matching_pennies(), _p(0, 0))
    assert res.outcome == "cycle_detected"
    assert res.steps == 4 and len(res.cycle) == 5 and res.cycle[0] == res.cycle[-1]


def test_coordination_dynamics_converge_quickly():
    g = catalog.coordination()
    res = better_response_dynamics(g, _p(0, 1))
    assert res.outcome == "converged" and res.steps <= 2
    res = better_response_dynamics(g, _p(0, 0))
    assert res.outcome == "converged" and res.steps == 0


def test_budget_exhaustion():
    res = better_response_dynamics(catalog.matching_pennies(), _p(0, 0), max_steps=2)
    assert res.outcome == "budget_exhausted" and res.steps == 2


@pytest.mark.parametrize("rule", ["lexicographic", "random"])
def test_dynamics_on_potential_games_descend(rule):
    rng = np.random.default_rng(21)
    for k in range(30):
        g = catalog.random_potential_game(rng, 3, 3)
        _, table = oracle_finite_potential(g)
        phi = table_potential(g, table)
        res = better_response_dynamics(g, next(iter(g.profiles())), phi=phi, seed=k, rule=rule)
        assert res.outcome == "converged"
        assert all(d < 0 for d in res.phi_deltas)
        assert res.phi_deltas == pytest.approx(res.cost_deltas)
        assert verify_nash(g, res.trajectory[-1]).passed


def test_cycle_implies_oracle_failure():
    rng = np.random.default_rng(5)
    cycles = 0
    for _ in range(60):
        g = catalog.random_finite_game(rng, 2, 3)
        res = better_response_dynamics(g, next(iter(g.profiles())))
        if res.outcome == "cycle_detected":
            cycles += 1
            assert not oracle_finite_potential(g)[0].passed
    assert cycles > 0


def test_minimizer_of_oracle_potential_is_nash_on_random_games():
    rng = np.random.default_rng(9)
    for _ in range(30):
        g = catalog.random_potential_game(rng, 2, 3)
        _, table = oracle_finite_potential(g)
        x, _ = minimize_potential(g, table_potential(g, table))
        assert verify_nash(g, x).passed


def test_dynamics_trajectory_export():
    res = better_response_dynamics(catalog.coordination(), _p(0, 1))
    doc = res.to_dict()
    assert doc["outcome"] == "converged"
    assert doc["trajectory"][1]["deviator"] in (0, 1)
    assert "cost_delta" in doc["trajectory"][1]
