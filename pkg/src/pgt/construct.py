"""Potential-function constructors and verifiers."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Mapping

import numpy as np

from . import expr as ex
from .criteria import symmetric_gate
from .game import (CongestionNetwork, ExprCosts, Finite, GameSpec, TableCosts, GameSpecError, Profile, _loads,
                   as_profile, congestion_routing, expand_congestion_game, sample_strategies,
                   unilateral_deviations)
from .paths import _set, h_pair_to, h_path
from .report import TestReport, Tracker, band, inapplicable

__all__ = [
    "PotentialFn", "ConstructionError", "construct_from_reverse_path", "construct_from_pairs",
    "construct_rosenthal", "rosenthal_value", "verify_exact_potential", "verify_gradient_match",
    "potential_difference_along_path", "export_potential", "potential_from_dict", "table_potential",
]


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PotentialFn:
    """Callable candidate potential with provenance.

    ``expr`` is set for expression-backed potentials and ``table`` (with the
    game whose finite spaces index it) for tabulated ones.
    """

    evaluator: Callable[[Profile], float]
    method: str
    normalization: str = ""
    expr: ex.Expr | None = None
    table: np.ndarray | None = None
    game: GameSpec | None = None

    def __call__(self, x: Any) -> float:
        if not (isinstance(x, tuple) and all(isinstance(a, tuple) for a in x)):
            x = as_profile(x)
        return self.evaluator(x)


def _restrict_sum(f: ex.Expr, hi: int, lo: int, n: int) -> ex.Expr:
    """f with players 1..hi kept minus f with players 1..lo kept (all others zero)."""
    return ex.sub(ex.restrict(f, frozenset(range(1, hi + 1)), n),
                  ex.restrict(f, frozenset(range(1, lo + 1)), n))


def _symbolic_prefix_potential(g: GameSpec) -> ex.Expr:
    n = g.players
    phi: ex.Expr = ex.ZERO
    for i, f in enumerate(g.costs.exprs, start=1):
        phi = ex.add(phi, _restrict_sum(f, i, i - 1, n))
    return phi


def _symbolic_reverse_potential(g: GameSpec) -> ex.Expr:
    # -h_P(z, -z): player i steps from z_i to 0 with players < i already at 0
    n = g.players
    phi: ex.Expr = ex.ZERO
    for i, f in enumerate(g.costs.exprs, start=1):
        keep_before = frozenset(range(i, n + 1))
        keep_after = frozenset(range(i + 1, n + 1))
        phi = ex.add(phi, ex.sub(ex.restrict(f, keep_before, n), ex.restrict(f, keep_after, n)))
    return phi


def _gate(g: GameSpec) -> None:
    reason = symmetric_gate(g)
    if reason:
        raise ConstructionError(reason)


def construct_from_reverse_path(g: GameSpec) -> PotentialFn:
    """phi(z) = -h_P(z, -z), so phi(0) = 0."""
    _gate(g)

    def phi(z: Profile) -> float:
        return -h_path(g, z, tuple(tuple(-v for v in a) for a in z))

    sym = _symbolic_reverse_potential(g) if isinstance(g.costs, ExprCosts) else None
    return PotentialFn(phi, "theorem5", "phi(0)=0", expr=sym)


def construct_from_pairs(g: GameSpec) -> PotentialFn:
    """phi(0) = 0 plus an h_P prefix over the first two (even N) or three (odd N)
    players plus h_ij over the remaining consecutive pairs with the earlier
    players held at z and the later ones at 0.  A one-player game gets
    phi = f_1 - f_1(0).
    """
    _gate(g)
    n = g.players
    zero = g.zero
    head = min(n, 2 if n % 2 == 0 else 3)

    def phi(z: Profile) -> float:
        prefix = z[:head] + zero[head:]
        total = h_path(g, zero, prefix)
        for a in range(head, n, 2):
            base = z[:a] + zero[a:]
            total += h_pair_to(g, a, a + 1, base, z[a], z[a + 1])
        return total

    sym = _symbolic_prefix_potential(g) if isinstance(g.costs, ExprCosts) else None
    return PotentialFn(phi, "theorem8", "phi(0)=0", expr=sym)


# --------------------------------------------------------------------------
# congestion

def rosenthal_value(edges: Mapping[str, tuple[float, ...]], loads: Mapping[str, int]) -> float:
    """sum_e sum_{k=1}^{v_e} C_e(k)."""
    return float(sum(sum(edges[e][:v]) for e, v in loads.items()))


def construct_rosenthal(g: GameSpec, augmented: bool = False) -> PotentialFn:
    """Rosenthal potential on route profiles; tabulated on the expanded game too.

    With ``augmented`` the sum runs over real, artificial and loop edges and
    the constant ``-sum_k C_0(k)`` is added, so everyone on the loop gives 0.
    """
    net = g.costs
    if not isinstance(net, CongestionNetwork):
        raise ConstructionError("construct_rosenthal needs congestion costs")
    n = g.players
    _, route_of, edges = congestion_routing(net, n, augmented)
    shift = -sum(edges["~loop"]) if augmented else 0.0

    def phi(x: Profile) -> float:
        routes = [route_of[int(round(a[0]))] for a in x]
        return rosenthal_value(edges, _loads(routes)) + shift

    big = expand_congestion_game(g, augmented)
    table = np.empty(big.shape)
    for idx in itertools.product(*(range(m) for m in big.shape)):
        table[idx] = phi(big.profile_at(idx))
    norm = "phi(all on origin loop)=0" if augmented else "phi(empty loading)=0"
    return PotentialFn(phi, "rosenthal", norm, table=table, game=big)


def table_potential(g: GameSpec, table: np.ndarray, method: str = "oracle",
                    normalization: str = "phi(lex-first)=0") -> PotentialFn:
    table = np.asarray(table, dtype=float)
    if table.shape != g.shape:
        raise ConstructionError(f"table shape {table.shape} != game shape {g.shape}")
    return PotentialFn(lambda x: float(table[g.indices(x)]), method, normalization, table=table, game=g)


# --------------------------------------------------------------------------
# verification

def verify_exact_potential(g: GameSpec, phi: PotentialFn | Callable, budget: int = 500, seed: int = 0,
                           tol: float = 1e-9, radius: float = 10.0) -> TestReport:
    """f_i(x_i', x_-i) - f_i(x) == phi(x_i', x_-i) - phi(x) over all/sampled unilateral deviations."""
    items, exhaustive = unilateral_deviations(g, budget, seed, radius)
    t = Tracker()
    for i, x, a in items:
        x2 = _set(x, i, a)
        df = g.cost(i, x2) - g.cost(i, x)
        dp = phi(x2) - phi(x)
        res = abs(df - dp)
        t.see(res, lambda i=i, x=x, a=a, df=df, dp=dp: {
            "player": i, "x": x, "x_i_prime": a, "df": df, "dphi": dp}, res <= band(tol, df, dp))
    return t.report("exact", exhaustive)


def verify_gradient_match(g: GameSpec, phi: ex.Expr | PotentialFn, budget: int = 500, seed: int = 0,
                          tol: float = 1e-9, radius: float = 10.0) -> TestReport:
    """Symbolic d f_i / d x_ik == d phi / d x_ik at sampled points."""
    if isinstance(phi, PotentialFn):
        phi = phi.expr
    if not isinstance(g.costs, ExprCosts) or phi is None:
        return inapplicable("gradient", "needs expression costs and an expression potential")
    env = g.params
    pairs = []
    for i, f in enumerate(g.costs.exprs):
        for k in range(1, g.dims[i] + 1):
            pairs.append((i, k, ex.compile_expression(ex.differentiate_expression(f, i + 1, k), env),
                          ex.compile_expression(ex.differentiate_expression(phi, i + 1, k), env)))
    t = Tracker()
    for x in sample_strategies(g, budget, seed, radius):
        for i, k, df, dp in pairs:
            try:
                u, v = df(x), dp(x)
            except (ArithmeticError, ValueError):
                t.abstentions += 1
                continue
            res = abs(u - v)
            t.see(res, lambda i=i, k=k, x=x, u=u, v=v: {"player": i, "coord": k, "x": x,
                                                        "df": u, "dphi": v}, res <= band(tol, u, v))
    return t.report("gradient", False)


def potential_difference_along_path(g: GameSpec, phi: PotentialFn | Callable, z: Any, y: Any
                                    ) -> tuple[float, float]:
    """(phi(z+y) - phi(z), h_P(z, y)); a potential makes the two agree."""
    z = as_profile(z)
    y = as_profile(y)
    target = tuple(tuple(u + v for u, v in zip(a, b)) for a, b in zip(z, y))
    return phi(target) - phi(z), h_path(g, z, y)


# --------------------------------------------------------------------------
# JSON

def export_potential(phi: PotentialFn) -> dict:
    doc: dict[str, Any] = {"method": phi.method, "normalization": phi.normalization}
    if phi.expr is not None:
        doc["expr"] = ex.to_text(phi.expr)
    if phi.table is not None:
        doc["table"] = phi.table.tolist()
        if phi.game is not None:
            doc["points"] = [[list(p) for p in s.points] for s in phi.game.spaces]
    return doc


def potential_from_dict(doc: Mapping[str, Any], g: GameSpec) -> PotentialFn:
    """Rebuild a potential from exported JSON (``expr``/``phi`` text or ``table``)."""
    method = doc.get("method", "user")
    norm = doc.get("normalization", "")
    text = doc.get("expr", doc.get("phi"))
    if text is not None:
        e = ex.parse_expression(text, g.dims)
        missing = ex.free_params(e) - set(g.params)
        if missing:
            raise GameSpecError(f"potential uses unbound parameters {sorted(missing)}")
        fn = ex.compile_expression(e, g.params)
        return PotentialFn(fn, method, norm, expr=e)
    if "table" in doc:
        table = np.asarray(doc["table"], dtype=float)
        if g.is_finite and table.shape == g.shape:
            return table_potential(g, table, method, norm)
        if "points" in doc:
            spaces = [Finite(tuple(map(tuple, pts))) for pts in doc["points"]]
            host = GameSpec(spaces, TableCosts(tuple(np.zeros(table.shape) for _ in spaces)))
            return table_potential(host, table, method, norm)
        raise GameSpecError("potential table does not match the game's action counts")
    raise GameSpecError("potential JSON needs 'expr' or 'table'")
