"""Ready-made games used throughout the tests and demos."""

from __future__ import annotations

import numpy as np

from .expr import parse_expression
from .game import AllSpace, Box, ExprCosts, Finite, GameSpec, TableCosts, game_from_dict
from .ordinal import OrdinalCandidate


def cournot(n: int, a: float = 10.0, b: float = 1.0, c: float = 2.0, lo: float = -10.0,
            hi: float = 10.0, use_xbar: bool = False, unbounded: bool = False) -> GameSpec:
    """N-firm Cournot costs f_i = (a - b * sum_j x_j) x_i - c x_i on [lo, hi] each."""
    total = "xbar[1]" if use_xbar else "(" + " + ".join(f"x[{k}][1]" for k in range(1, n + 1)) + ")"
    exprs = [f"(a - b*{total})*x[{i}][1] - c*x[{i}][1]" for i in range(1, n + 1)]
    dims = [1] * n
    spaces = [AllSpace(1) if unbounded else Box((lo,), (hi,)) for _ in range(n)]
    return GameSpec(spaces, ExprCosts(tuple(parse_expression(e, dims) for e in exprs),
                                      {"a": a, "b": b, "c": c}))


def cournot_potential_text(n: int) -> str:
    """Closed form sum_i (a - b(x_1 + ... + x_i)) x_i - c x_i."""
    terms = []
    for i in range(1, n + 1):
        partial = " + ".join(f"x[{k}][1]" for k in range(1, i + 1))
        terms.append(f"(a - b*({partial}))*x[{i}][1] - c*x[{i}][1]")
    return " + ".join(terms)


def _table_game(tables, points=None) -> GameSpec:
    tables = [np.asarray(t, dtype=float) for t in tables]
    shape = tables[0].shape
    if points is None:
        points = [[(float(k),) for k in range(m)] for m in shape]
    return GameSpec([Finite(tuple(p)) for p in points], TableCosts(tuple(tables)))


def matching_pennies() -> GameSpec:
    """Actions H = 0, T = 1; player 1 pays 1 when the coins match, player 2 when they differ."""
    f1 = [[1, -1], [-1, 1]]
    return _table_game([f1, np.negative(f1)])


def signed_pennies() -> GameSpec:
    """f_1 = x_1 x_2, f_2 = -x_1 x_2 on {-1, 0, 1}: matching pennies on the +-1 corners."""
    pts = ((-1.0,), (0.0,), (1.0,))
    exprs = (parse_expression("x[1][1]*x[2][1]"), parse_expression("-x[1][1]*x[2][1]"))
    return GameSpec([Finite(pts), Finite(pts)], ExprCosts(exprs, {}))


def coordination() -> GameSpec:
    f = -np.array([[2, 0], [0, 1]])
    return _table_game([f, f])


def random_finite_game(rng: np.random.Generator, players: int, actions: int,
                       low: int = -5, high: int = 5) -> GameSpec:
    shape = (actions,) * players
    return _table_game([rng.integers(low, high + 1, size=shape) for _ in range(players)])


def random_potential_game(rng: np.random.Generator, players: int, actions: int,
                          low: int = -5, high: int = 5) -> GameSpec:
    """f_i = phi + d_i(x_-i) with integer phi and dummy terms, so phi is an exact potential."""
    shape = (actions,) * players
    phi = rng.integers(low, high + 1, size=shape)
    tables = []
    for i in range(players):
        dummy_shape = tuple(1 if p == i else actions for p in range(players))
        tables.append(phi + rng.integers(low, high + 1, size=dummy_shape))
    return _table_game(tables)


def perturb(g: GameSpec, rng: np.random.Generator, size: int = 1) -> GameSpec:
    """Add +-size to one random entry of one random player's table."""
    tables = [t.copy() for t in g.cost_tables()]
    i = int(rng.integers(len(tables)))
    idx = tuple(int(rng.integers(m)) for m in tables[i].shape)
    tables[i][idx] += size if rng.random() < 0.5 else -size
    return GameSpec(g.spaces, TableCosts(tuple(tables)))


def congestion(players: int, edges: dict[str, list[float]], routes: list[list[str]],
               origin_loop_cost: list[float] | None = None) -> GameSpec:
    doc = {"players": players,
           "costs": {"kind": "congestion", "edges": [{"id": k, "cost": v} for k, v in edges.items()],
                     "routes": routes}}
    if origin_loop_cost is not None:
        doc["costs"]["origin_loop_cost"] = origin_loop_cost
    return game_from_dict(doc)


def two_link_network(players: int = 2) -> GameSpec:
    """Two parallel single-edge routes with C_e(k) = k."""
    costs = [float(k) for k in range(1, players + 1)]
    return congestion(players, {"e1": costs, "e2": list(costs)}, [["e1"], ["e2"]],
                      [0.0] * players)


def three_route_network() -> GameSpec:
    """Three players, three routes sharing a middle edge."""
    return congestion(3, {"a": [1, 3, 6], "b": [2, 3, 4], "m": [1, 2, 5], "c": [4, 4, 4]},
                      [["a", "m"], ["b", "m"], ["c"]], [0, 0, 0])


def two_player_power_game(hi: float) -> GameSpec:
    """f_1 = (x_1 + x_2)^2, f_2 = (x_1 + x_2)^6 on (0, hi] each."""
    space = Box((0.0,), (hi,), open_lo=True)
    exprs = (parse_expression("pow(x[1][1] + x[2][1], 2)"), parse_expression("pow(x[1][1] + x[2][1], 6)"))
    return GameSpec([space, space], ExprCosts(exprs, {}))


def sqrt_candidate(a: float, b: float) -> OrdinalCandidate:
    return OrdinalCandidate(parse_expression(f"{a!r}*sqrt(x[1][1]) + {b!r}*sqrt(x[2][1])"))


def scaled_power_candidate() -> OrdinalCandidate:
    """phi = 2 (x_1 + x_2)^0.4 with the matching positive gradient scalings."""
    return OrdinalCandidate.from_dict({
        "phi": "2*pow(x[1][1] + x[2][1], 0.4)",
        "alphas": ["4/(10*pow(x[1][1] + x[2][1], 1.6))", "4/(30*pow(x[1][1] + x[2][1], 5.6))"],
    }, [1, 1])


def bilinear_quadratic(n: int = 2, lo: float = -1.0, hi: float = 1.0) -> tuple[GameSpec, OrdinalCandidate]:
    """f_i = x_i^2 + sum_{j != i} x_i x_j with phi = sum x_i^2 + sum_{i<j} x_i x_j."""
    dims = [1] * n
    exprs = []
    for i in range(1, n + 1):
        cross = " + ".join(f"x[{i}][1]*x[{j}][1]" for j in range(1, n + 1) if j != i)
        exprs.append(parse_expression(f"pow(x[{i}][1], 2)" + (f" + {cross}" if cross else ""), dims))
    squares = " + ".join(f"pow(x[{i}][1], 2)" for i in range(1, n + 1))
    cross = " + ".join(f"x[{i}][1]*x[{j}][1]" for i in range(1, n + 1) for j in range(i + 1, n + 1))
    phi = parse_expression(squares + (f" + {cross}" if cross else ""), dims)
    space = Box((lo,), (hi,))
    return GameSpec([space] * n, ExprCosts(tuple(exprs), {})), OrdinalCandidate(phi)
