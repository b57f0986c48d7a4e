from __future__ import annotations

import numpy as np
import pytest

from pgt import catalog
from pgt.criteria import oracle_finite_potential
from pgt.construct import table_potential
from pgt.expr import compile_expression, parse_expression
from pgt.game import Box, ExprCosts, GameSpec
from pgt.ordinal import (ConvexityCertificate, OrdinalCandidate, check_assumption1,
                         check_concave_subgradient_certificate, check_cross_partial_signs,
                         check_strong_convexity_certificate, estimate_constants, verify_ordinal_potential)
from pgt.report import band


def _expr_game(exprs, space):
    n = len(exprs)
    return GameSpec([space] * n, ExprCosts(tuple(parse_expression(e, [1] * n) for e in exprs), {}))


UNIT = catalog.two_player_power_game(1.0)
TEN = catalog.two_player_power_game(10.0)


def test_assumption1_on_power_game():
    rep = check_assumption1(UNIT)
    assert rep.verdict == "pass"
    assert "every f_i is an ordinal potential function" in rep.notes


def test_assumption1_fails_on_pennies():
    rep = check_assumption1(catalog.matching_pennies(), budget=10 ** 4)
    assert rep.verdict == "fail" and rep.exhaustive
    assert rep.witness["df_i"] * rep.witness["df_j"] < 0


def test_assumption1_identical_costs():
    g = _expr_game(["pow(x[1][1] - x[2][1], 2)"] * 2, Box((-1.0,), (1.0,)))
    assert check_assumption1(g).verdict == "pass"


def test_assumption1_pass_gives_ordinal_costs():
    # each cost is itself an ordinal potential on the same samples
    for i in range(2):
        fi = compile_expression(UNIT.costs.exprs[i])
        assert verify_ordinal_potential(UNIT, fi, mode="ordinal").verdict == "pass"


def test_cross_partial_signs():
    assert check_cross_partial_signs(UNIT).verdict == "pass"
    assert check_cross_partial_signs(_expr_game(["pow(x[1][1], 2)", "pow(x[2][1], 4)"],
                                                Box((-1.0,), (1.0,)))).verdict == "pass"
    bad = _expr_game(["x[1][1]*x[2][1]", "-x[1][1]*x[2][1]"], Box((-1.0,), (1.0,)))
    rep = check_cross_partial_signs(bad)
    assert rep.verdict == "fail" and (rep.witness["d2f_i"], rep.witness["d2f_j"]) == (1.0, -1.0)
    crit = check_cross_partial_signs(bad, mode="critical")
    assert crit.verdict == "fail" and crit.witness["product"] == -1.0


def test_cross_partial_signs_inapplicable():
    assert check_cross_partial_signs(catalog.matching_pennies()).verdict == "inapplicable"


def test_ordinal_potential_power_game():
    phi = compile_expression(parse_expression("pow(x[1][1] + x[2][1], 6)", [1, 1]))
    assert verify_ordinal_potential(UNIT, phi, mode="ordinal").verdict == "pass"


def test_generalized_potential_scaled_power():
    phi = compile_expression(catalog.scaled_power_candidate().phi)
    assert verify_ordinal_potential(TEN, phi, mode="generalized").verdict == "pass"


def test_exact_implies_ordinal_on_random_potential_games():
    rng = np.random.default_rng(12)
    for _ in range(20):
        g = catalog.random_potential_game(rng, 3, 3)
        _, table = oracle_finite_potential(g)
        phi = table_potential(g, table)
        for mode in ("ordinal", "generalized"):
            rep = verify_ordinal_potential(g, phi, mode=mode, budget=10 ** 4)
            assert rep.verdict == "pass" and rep.exhaustive


def test_dead_band_soundness_and_replay():
    rng = np.random.default_rng(3)
    tol = 1e-9
    seen = 0
    for _ in range(40):
        g = catalog.random_finite_game(rng, 2, 3)
        phi = table_potential(g, rng.integers(-3, 4, size=g.shape))
        rep = verify_ordinal_potential(g, phi, mode="ordinal", budget=10 ** 4, tol=tol)
        if rep.verdict != "fail":
            continue
        seen += 1
        w = rep.witness
        x, i, a = w["x"], w["player"], w["x_i_prime"]
        x2 = tuple(a if k == i else x[k] for k in range(len(x)))
        df = g.cost(i, x2) - g.cost(i, x)
        dp = phi(x2) - phi(x)
        assert (df, dp) == (w["df"], w["dphi"])
        assert abs(df) > band(tol, g.cost(i, x), g.cost(i, x2))
        assert abs(dp) > band(tol, phi(x), phi(x2))
        assert (df < 0) != (dp < 0)
    assert seen > 10


def test_concave_subgradient_example_passes_and_fails():
    rep = check_concave_subgradient_certificate(UNIT, catalog.sqrt_candidate(8, 384))
    assert rep.verdict == "pass" and rep.method == "theorem11"
    assert any("generalized ordinal" in n for n in rep.notes)
    low = check_concave_subgradient_certificate(UNIT, catalog.sqrt_candidate(1, 384))
    assert low.verdict == "fail" and low.witness["condition"] == "domination"
    assert low.details["sub_verdicts"]["domination"] == "fail"


def test_scaled_subgradient_example_and_monotonicity():
    cand = catalog.scaled_power_candidate()
    rep = check_concave_subgradient_certificate(TEN, cand)
    assert rep.verdict == "pass" and rep.method == "theorem12"
    assert rep.residual_max <= 1e-9
    phi = compile_expression(cand.phi)
    assert verify_ordinal_potential(TEN, phi, mode="generalized").verdict == "pass"


def test_candidate_json_round_trip():
    cand = catalog.scaled_power_candidate()
    back = OrdinalCandidate.from_dict(cand.to_dict(), [1, 1])
    assert back == cand
    with pytest.raises(ValueError):
        OrdinalCandidate.from_dict({"phi": "x[1][1]", "alphas": ["1"]}, [1, 1])


def test_strong_convexity_certificate_quadratic_pair():
    g, cand = catalog.bilinear_quadratic(2)
    rep = check_strong_convexity_certificate(g, cand, ConvexityCertificate((2.0, 2.0), 2.0))
    assert rep.details["condition_b"] == "pass"
    assert rep.details["sub_verdicts"]["strong_convexity"] == "pass"
    # grad(phi) has Hessian [[2, 1], [1, 2]], so its true Lipschitz constant is 3 > 2
    assert rep.verdict == "fail" and rep.details["sub_verdicts"]["lipschitz"] == "fail"
    cert, _ = estimate_constants(g, cand.phi, budget=2000)
    assert cert.lipschitz == pytest.approx(3.0, abs=0.05)
    assert min(cert.etas) == pytest.approx(2.0, abs=1e-6)


def test_scalar_condition_fails_regardless_of_samples():
    g, cand = catalog.bilinear_quadratic(2)
    rep = check_strong_convexity_certificate(g, cand, ConvexityCertificate((2.0, 2.0), 5.0), budget=1)
    assert rep.verdict == "fail" and rep.witness["condition"] == "condition_b"


def test_one_player_strong_convexity_passes():
    g = _expr_game(["pow(x[1][1], 2)"], Box((-3.0,), (3.0,)))
    cand = OrdinalCandidate(g.costs.exprs[0])
    rep = check_strong_convexity_certificate(g, cand, ConvexityCertificate((2.0,), 2.0))
    assert rep.verdict == "pass"


def test_zero_eta_is_inapplicable():
    g, cand = catalog.bilinear_quadratic(2)
    rep = check_strong_convexity_certificate(g, cand, ConvexityCertificate((0.0, 2.0), 1.0))
    assert rep.verdict == "inapplicable"
