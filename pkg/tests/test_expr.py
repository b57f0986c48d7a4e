from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pgt import expr as ex
from _gen import DIMS, central_difference, random_expression, random_point

COURNOT_F1 = "(a - b*(x[1][1]+x[2][1]+x[3][1]))*x[1][1] - c*x[1][1]"
ENV = {"a": 10.0, "b": 1.0, "c": 2.0}
X123 = ((1.0,), (2.0,), (3.0,))


def test_parse_cournot_cost_structure():
    e = ex.parse_expression(COURNOT_F1, [1, 1, 1])
    assert isinstance(e, ex.Sub)
    assert ex.free_params(e) == {"a", "b", "c"}
    assert ex.variables(e) == {ex.Var(1, 1), ex.Var(2, 1), ex.Var(3, 1)}


def test_parse_variable_leaf():
    assert ex.parse_expression("x[1][1]") == ex.Var(1, 1)


def test_parse_pow_and_aggregate():
    e = ex.parse_expression("pow(x[1][1]+x[2][1], 0.4)", [1, 1])
    assert e == ex.Pow(ex.Add(ex.Var(1, 1), ex.Var(2, 1)), 0.4)
    assert ex.parse_expression("xbar[1]", [1, 1]) == ex.Agg(1)


def test_precedence():
    assert ex.evaluate_expression(ex.parse_expression("1 + 2*3 - 4/2"), ()) == 5.0
    assert ex.evaluate_expression(ex.parse_expression("-pow(2, 2)"), ()) == -4.0
    assert ex.evaluate_expression(ex.parse_expression("2 - 3 - 4"), ()) == -5.0


def test_syntax_error_reports_offset():
    with pytest.raises(ex.ExprSyntaxError) as info:
        ex.parse_expression("x[1][1] + * 2", [1])
    assert info.value.offset == 10


def test_unknown_variable():
    with pytest.raises(ex.UnknownVariableError):
        ex.parse_expression("x[3][1]", [1, 1])
    with pytest.raises(ex.UnknownVariableError):
        ex.parse_expression("x[1][2]", [1, 1])


def test_evaluate_cournot_cost():
    e = ex.parse_expression(COURNOT_F1, [1, 1, 1])
    assert ex.evaluate_expression(e, X123, ENV) == 2.0
    assert ex.compile_expression(e, ENV)(X123) == 2.0


def test_evaluate_trivial_cases():
    assert ex.evaluate_expression(ex.parse_expression("7"), ((3.0,),)) == 7.0
    assert ex.evaluate_expression(ex.parse_expression("x[1][1]*0"), ((5.0,),)) == 0.0


def test_domain_errors():
    with pytest.raises(ex.DomainError):
        ex.evaluate_expression(ex.parse_expression("sqrt(x[1][1])"), ((-1.0,),))
    with pytest.raises(ex.DomainError):
        ex.evaluate_expression(ex.parse_expression("pow(x[1][1], 0.5)"), ((-1.0,),))
    with pytest.raises(ex.DomainError):
        ex.evaluate_expression(ex.parse_expression("1/x[1][1]"), ((0.0,),))


def test_derivative_of_square():
    d = ex.differentiate_expression(ex.parse_expression("pow(x[1][1], 2)"), 1, 1)
    for v in (-2.0, 0.5, 3.0):
        assert ex.evaluate_expression(d, ((v,),)) == pytest.approx(2 * v)


def test_derivative_of_cournot_cost():
    e = ex.parse_expression(COURNOT_F1, [1, 1, 1])
    d = ex.differentiate_expression(e, 1, 1)
    assert ex.evaluate_expression(d, X123, ENV) == pytest.approx(1.0, abs=1e-12)
    fd = central_difference(ex.compile_expression(e, ENV), X123, 0, 0)
    assert fd == pytest.approx(1.0, abs=1e-6)


def test_derivative_of_other_player_variable_is_zero():
    assert ex.differentiate_expression(ex.parse_expression("x[1][1]"), 2, 1) == ex.ZERO


def test_aggregate_derivative_is_one_for_every_player():
    e = ex.parse_expression("pow(xbar[1], 2)", [1, 1, 1])
    for i in (1, 2, 3):
        d = ex.differentiate_expression(e, i, 1)
        assert ex.evaluate_expression(d, X123) == pytest.approx(12.0)


def test_symbolic_matches_finite_difference_on_random_expressions():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        e = random_expression(rng)
        fn = ex.compile_expression(e, {"a": 1.3})
        x = random_point(rng)
        for i, d in enumerate(DIMS):
            for k in range(d):
                sym = ex.compile_expression(ex.differentiate_expression(e, i + 1, k + 1), {"a": 1.3})(x)
                fd = central_difference(fn, x, i, k)
                worst = max(worst, abs(sym - fd) / (1 + abs(sym)))
    assert worst <= 1e-5


def test_compiled_matches_interpreted():
    rng = np.random.default_rng(5)
    for _ in range(100):
        e = random_expression(rng)
        x = random_point(rng)
        u = ex.evaluate_expression(e, x, {"a": -0.7})
        v = ex.compile_expression(e, {"a": -0.7})(x)
        assert math.isclose(u, v, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_print_parse_round_trip(seed):
    e = random_expression(np.random.default_rng(seed))
    assert ex.parse_expression(ex.to_text(e), DIMS) == e


def test_round_trip_negative_literals_and_nesting():
    for src in ("-3*x[1][1]", "x[1][1] - (x[2][1] - 1)", "-(-x[1][1])", "x[1][1]/(x[2][1]*x[3][1])",
                "pow(-x[1][1], 3)", "x[1][1] - -2"):
        e = ex.parse_expression(src, DIMS)
        assert ex.parse_expression(ex.to_text(e), DIMS) == e


def test_restrict_zeroes_dropped_players():
    e = ex.parse_expression(COURNOT_F1, [1, 1, 1])
    r = ex.restrict(e, frozenset({1, 2}), 3)
    assert ex.evaluate_expression(r, X123, ENV) == ex.evaluate_expression(e, ((1.0,), (2.0,), (0.0,)), ENV)


def test_fold_aggregates_recognizes_explicit_sum():
    e = ex.parse_expression("(x[1][1] + x[2][1])*x[1][1]", [1, 1])
    assert ex.Agg(1) in ex.variables(ex.fold_aggregates(e, 2))
