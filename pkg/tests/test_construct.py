from __future__ import annotations

import json

import numpy as np
import pytest

from pgt import catalog
from pgt import expr as ex
from pgt.construct import (ConstructionError, PotentialFn, construct_from_pairs, construct_from_reverse_path,
                           construct_rosenthal, export_potential, potential_difference_along_path,
                           potential_from_dict, rosenthal_value, table_potential, verify_exact_potential,
                           verify_gradient_match)
from pgt.criteria import oracle_finite_potential
from pgt.game import expand_congestion_game, sample_strategies
from pgt.paths import h_path

ENV = {"a": 10.0, "b": 1.0, "c": 2.0}


def _p(*vals):
    return tuple((float(v),) for v in vals)


def test_reverse_path_potential_values():
    g = catalog.cournot(3)
    phi = construct_from_reverse_path(g)
    assert phi(_p(0, 0, 0)) == 0.0
    assert phi(_p(1, 2, 3)) == pytest.approx(23.0, abs=1e-12)
    assert phi(_p(1, 2, 3)) == pytest.approx(h_path(g, _p(0, 0, 0), _p(1, 2, 3)), abs=1e-12)
    assert phi.method == "theorem5" and phi.normalization == "phi(0)=0"


def test_pair_potential_matches_closed_form_for_four_firms():
    g = catalog.cournot(4)
    phi = construct_from_pairs(g)
    closed = ex.compile_expression(ex.parse_expression(catalog.cournot_potential_text(4), [1] * 4), ENV)
    assert phi(_p(0, 0, 0, 0)) == 0.0
    for x in sample_strategies(g, 300, seed=9):
        assert abs(phi(x) - closed(x)) <= 1e-9 * (1 + abs(closed(x)))
        assert abs(ex.compile_expression(phi.expr, ENV)(x) - closed(x)) <= 1e-9 * (1 + abs(closed(x)))


def test_pair_potential_deviation_formula():
    g = catalog.cournot(4)
    phi = construct_from_pairs(g)
    a, b, c = 10.0, 1.0, 2.0
    rng = np.random.default_rng(1)
    for _ in range(200):
        x = rng.uniform(-4, 4, 4)
        y1 = rng.uniform(-4, 4)
        moved = x.copy()
        moved[0] += y1
        expected = (a - b * x.sum()) * y1 - b * x[0] * y1 - b * y1 ** 2 - c * y1
        got = phi(_p(*moved)) - phi(_p(*x))
        assert abs(got - expected) <= 1e-9 * (1 + abs(expected))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_constructors_agree_up_to_a_constant(n):
    g = catalog.cournot(n)
    p5, p8 = construct_from_reverse_path(g), construct_from_pairs(g)
    diffs = [p5(x) - p8(x) for x in sample_strategies(g, 300, seed=n)]
    assert max(diffs) - min(diffs) <= 1e-9
    assert verify_exact_potential(g, p8).passed
    assert verify_gradient_match(g, p5).passed


def test_construction_gate():
    with pytest.raises(ConstructionError):
        construct_from_pairs(catalog.cournot(3, lo=0.0))
    with pytest.raises(ConstructionError):
        construct_from_reverse_path(catalog.matching_pennies())


def test_rosenthal_sums():
    edges = {"e1": (1.0, 2.0), "e2": (1.0, 2.0)}
    assert rosenthal_value(edges, {"e1": 2}) == 3.0
    assert rosenthal_value(edges, {"e1": 1, "e2": 1}) == 2.0
    assert rosenthal_value(edges, {}) == 0.0
    phi = construct_rosenthal(catalog.two_link_network())
    assert phi(_p(1, 1)) == 3.0 and phi(_p(1, 2)) == 2.0


@pytest.mark.parametrize("augmented", [False, True])
def test_rosenthal_is_exact_and_matches_oracle(augmented):
    for g in (catalog.two_link_network(), catalog.three_route_network()):
        phi = construct_rosenthal(g, augmented)
        big = expand_congestion_game(g, augmented)
        rep = verify_exact_potential(big, phi, budget=10 ** 6)
        assert rep.passed and rep.exhaustive
        orep, table = oracle_finite_potential(big)
        assert orep.passed
        gap = phi.table - table
        assert gap.max() - gap.min() <= 1e-12


def test_augmented_normalization():
    g = catalog.two_link_network()
    phi = construct_rosenthal(g, augmented=True)
    assert phi(_p(0, 0)) == 0.0


def test_zero_potential_fails_on_pennies():
    g = catalog.matching_pennies()
    rep = verify_exact_potential(g, lambda x: 0.0)
    assert rep.verdict == "fail" and rep.exhaustive


def test_gradient_match_sensitivity():
    g = catalog.cournot(4)
    base = ex.parse_expression(catalog.cournot_potential_text(4), [1] * 4)
    assert verify_gradient_match(g, base).passed
    assert verify_gradient_match(g, ex.Add(base, ex.Num(42.0))).passed
    rep = verify_gradient_match(g, ex.Add(base, ex.Pow(ex.Var(1, 1), 3.0)))
    assert rep.verdict == "fail"
    w = rep.witness
    assert abs(w["dphi"] - w["df"]) == pytest.approx(3 * w["x"][0][0] ** 2, rel=1e-9)
    assert verify_gradient_match(catalog.matching_pennies(), base).verdict == "inapplicable"


def test_difference_along_path():
    g = catalog.cournot(3)
    phi = construct_from_pairs(g)
    rng = np.random.default_rng(2)
    for _ in range(100):
        z = _p(*rng.uniform(-4, 4, 3))
        y = _p(*rng.uniform(-4, 4, 3))
        dphi, h = potential_difference_along_path(g, phi, z, y)
        assert abs(dphi - h) <= 1e-9 * (1 + abs(h))
    assert potential_difference_along_path(g, phi, _p(1, 2, 3), _p(0, 0, 0)) == (0.0, 0.0)


def test_oracle_potential_difference_along_path():
    g = catalog.random_potential_game(np.random.default_rng(8), 3, 3)
    _, table = oracle_finite_potential(g)
    phi = table_potential(g, table)
    for z in g.profiles():
        for w in list(g.profiles())[::5]:
            y = tuple((b[0] - a[0],) for a, b in zip(z, w))
            dphi, h = potential_difference_along_path(g, phi, z, y)
            assert dphi == h


def test_export_round_trip():
    g = catalog.cournot(4)
    phi = construct_from_pairs(g)
    doc = json.loads(json.dumps(export_potential(phi)))
    back = potential_from_dict(doc, g)
    for x in sample_strategies(g, 50, seed=0):
        assert back(x) == pytest.approx(phi(x), abs=1e-9)
    ros = construct_rosenthal(catalog.two_link_network(), augmented=True)
    back = potential_from_dict(json.loads(json.dumps(export_potential(ros))), catalog.two_link_network())
    assert isinstance(back, PotentialFn)
    np.testing.assert_array_equal(back.table, ros.table)
