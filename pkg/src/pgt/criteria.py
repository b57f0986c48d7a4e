"""Exact-potential criteria.

Every checker returns a :class:`~pgt.report.TestReport`.  Finite games
are enumerated exhaustively when the relevant index set fits in
``budget``; otherwise (and always for continuous games) a seeded sample
is checked and the verdict is labelled ``(sampled)``.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterator

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import expr as ex
from .game import (AllSpace, ExprCosts, GameSpec, Profile, detect_abnormal,
                   sample_strategies)
from .paths import _add, _set, enumerate_four_cycles, h_pair_to, h_path, is_four_cycle_exhaustive
from .report import FAIL, PASS, TestReport, Tracker, band, inapplicable

__all__ = [
    "symmetric_gate", "test_four_cycles", "test_pairwise", "test_hp_decomposition",
    "test_cross_hessian", "oracle_finite_potential", "find_aggregative_witness",
    "OracleSizeError", "ORACLE_LIMIT",
]

ORACLE_LIMIT = 10 ** 6


def symmetric_gate(g: GameSpec) -> str | None:
    """None when the zero-symmetric or whole-space case applies, else the reason it does not."""
    if all(isinstance(s, AllSpace) for s in g.spaces):
        return None
    if all(s.contains_zero and s.symmetric for s in g.spaces):
        return None
    bad = [i for i, s in enumerate(g.spaces) if not (s.contains_zero and s.symmetric)]
    return (f"needs every action set symmetric and containing 0 (or every space unbounded); "
            f"player(s) {bad} violate it")


def _cycle_residual(g: GameSpec, q) -> tuple[float, float]:
    total, scale = 0.0, 0.0
    for e, i in enumerate(q.deviators):
        a, b = g.cost(i, q.steps[e]), g.cost(i, q.steps[e + 1])
        total += b - a
        scale = max(scale, abs(a), abs(b))
    return total, scale


def test_four_cycles(g: GameSpec, budget: int = 500, seed: int = 0, tol: float = 1e-9,
                     radius: float = 10.0) -> TestReport:
    """I(Q, f) = 0 on every simple closed 4-cycle."""
    t = Tracker()
    for q in enumerate_four_cycles(g, budget, seed, radius):
        val, scale = _cycle_residual(g, q)
        t.see(abs(val), lambda q=q, val=val: {"cycle": q.to_dict(), "I": val},
              abs(val) <= tol * (1.0 + scale))
    return t.report("cycle4", is_four_cycle_exhaustive(g, budget))


test_four_cycles.__test__ = False


# --------------------------------------------------------------------------
# pairwise and h_P criteria

def _pairwise_items(g: GameSpec, budget: int, seed: int, radius: float
                    ) -> tuple[Iterator[tuple[int, int, Profile, tuple, tuple]], bool]:
    """(i, j, z, z_i', z_j') with targets z' = z + y; exhaustive for small finite games."""
    pairs = list(itertools.combinations(range(g.players), 2))
    if not pairs:
        return iter(()), True
    if g.is_finite:
        if sum(g.n_profiles * g.spaces[i].size * g.spaces[j].size for i, j in pairs) <= budget:
            def every():
                for i, j in pairs:
                    for z in g.profiles():
                        for a in g.spaces[i].points:
                            for b in g.spaces[j].points:
                                yield i, j, z, a, b
            return every(), True
        rng = np.random.default_rng([int(seed), 2])

        def drawn():
            for k in range(budget):
                i, j = pairs[k % len(pairs)]
                idx = [int(rng.integers(s.size)) for s in g.spaces]
                z = g.profile_at(idx)
                a = g.spaces[i].points[int(rng.integers(g.spaces[i].size))]
                b = g.spaces[j].points[int(rng.integers(g.spaces[j].size))]
                yield i, j, z, a, b
        return drawn(), False

    base = sample_strategies(g, budget, seed, radius)
    alt = sample_strategies(g, budget + 1, seed + 1, radius)[::-1]

    def sampled():
        for k, z in enumerate(base):
            i, j = pairs[k % len(pairs)]
            w = alt[k % len(alt)]
            yield i, j, z, w[i], w[j]
    return sampled(), False


def test_pairwise(g: GameSpec, budget: int = 500, seed: int = 0, tol: float = 1e-9,
                  radius: float = 10.0) -> TestReport:
    """h_ij(z_i,z_j,y_i,y_j; z_rest) = h_ij(0,0,z_i+y_i,z_j+y_j; z_rest) - h_ij(0,0,z_i,z_j; z_rest)."""
    reason = symmetric_gate(g)
    if reason:
        return inapplicable("pairwise", reason)
    items, exhaustive = _pairwise_items(g, budget, seed, radius)
    t = Tracker()
    for i, j, z, a, b in items:
        zi, zj = z[i], z[j]
        y_i = tuple(u - v for u, v in zip(a, zi))
        y_j = tuple(u - v for u, v in zip(b, zj))
        ai, aj = _add(zi, y_i), _add(zj, y_j)
        zero = _set(_set(z, i, (0.0,) * len(zi)), j, (0.0,) * len(zj))
        lhs = h_pair_to(g, i, j, z, ai, aj)
        rhs = h_pair_to(g, i, j, zero, ai, aj) - h_pair_to(g, i, j, zero, zi, zj)
        res = abs(lhs - rhs)
        t.see(res, lambda i=i, j=j, z=z, y_i=y_i, y_j=y_j, lhs=lhs, rhs=rhs: {
            "i": i, "j": j, "z": z, "y_i": y_i, "y_j": y_j, "lhs": lhs, "rhs": rhs},
              res <= band(tol, lhs, rhs))
    return t.report("pairwise", exhaustive)


test_pairwise.__test__ = False


def _hp_items(g: GameSpec, budget: int, seed: int, radius: float):
    if g.is_finite and g.n_profiles ** 2 <= budget:
        def every():
            for z in g.profiles():
                for w in g.profiles():
                    yield z, w
        return every(), True
    if g.is_finite:
        zs = sample_strategies(g, budget, seed)
        rng = np.random.default_rng([int(seed), 3])
        ws = [g.profile_at([int(rng.integers(s.size)) for s in g.spaces]) for _ in zs]
        return zip(zs, ws), False
    zs = sample_strategies(g, budget, seed, radius)
    ws = sample_strategies(g, budget + 1, seed + 1, radius)[::-1]
    return zip(zs, ws), False


def test_hp_decomposition(g: GameSpec, budget: int = 500, seed: int = 0, tol: float = 1e-9,
                          radius: float = 10.0) -> TestReport:
    """h_P(z, y) = h_P(0, z+y) - h_P(0, z) over all or sampled (z, y)."""
    reason = symmetric_gate(g)
    if reason:
        return inapplicable("hp", reason)
    items, exhaustive = _hp_items(g, budget, seed, radius)
    zero = g.zero
    t = Tracker()
    for z, w in items:
        y = tuple(tuple(u - v for u, v in zip(a, b)) for a, b in zip(w, z))
        target = tuple(_add(a, b) for a, b in zip(z, y))
        lhs = h_path(g, z, y)
        rhs = h_path(g, zero, target) - h_path(g, zero, z)
        res = abs(lhs - rhs)
        t.see(res, lambda z=z, y=y, lhs=lhs, rhs=rhs: {"z": z, "y": y, "lhs": lhs, "rhs": rhs},
              res <= band(tol, lhs, rhs))
    return t.report("hp", exhaustive)


test_hp_decomposition.__test__ = False


# --------------------------------------------------------------------------
# second-order criterion

def test_cross_hessian(g: GameSpec, budget: int = 500, seed: int = 0, tol: float = 1e-9,
                       radius: float = 10.0) -> TestReport:
    """d2 f_i / dx_jq dx_ip == d2 f_j / dx_ip dx_jq at sampled points, all i != j and (p, q)."""
    if not isinstance(g.costs, ExprCosts):
        return inapplicable("hessian", "needs expression costs")
    if not g.is_convex:
        return inapplicable("hessian", "needs convex (box or unbounded) action spaces")
    env = g.params
    f = g.costs.exprs
    blocks = []
    for i, j in itertools.combinations(range(g.players), 2):
        for p in range(1, g.dims[i] + 1):
            for q in range(1, g.dims[j] + 1):
                a = ex.differentiate_expression(ex.differentiate_expression(f[i], i + 1, p), j + 1, q)
                b = ex.differentiate_expression(ex.differentiate_expression(f[j], j + 1, q), i + 1, p)
                blocks.append((i, j, p, q, ex.compile_expression(a, env), ex.compile_expression(b, env),
                               ex.to_text(a), ex.to_text(b)))
    xs = sample_strategies(g, budget, seed, radius)
    t = Tracker()
    for x in xs:
        for i, j, p, q, fa, fb, ta, tb in blocks:
            try:
                u, v = fa(x), fb(x)
            except (ArithmeticError, ValueError):
                t.abstentions += 1
                continue
            res = abs(u - v)
            t.see(res, lambda i=i, j=j, p=p, q=q, x=x, u=u, v=v, ta=ta, tb=tb: {
                "i": i, "j": j, "p": p, "q": q, "x": x, "d2f_i": u, "d2f_j": v,
                "d2f_i_expr": ta, "d2f_j_expr": tb}, res <= band(tol, u, v))
    return t.report("hessian", False)


test_cross_hessian.__test__ = False


# --------------------------------------------------------------------------
# brute-force oracle

class OracleSizeError(ValueError):
    pass


def _integer_tables(tables) -> list[np.ndarray] | None:
    out = []
    for t in tables:
        if not np.all(np.isfinite(t)) or not np.all(t == np.round(t)) or np.abs(t).max(initial=0) > 2 ** 50:
            return None
        out.append(np.round(t).astype(np.int64))
    return out


def _integrate(tables) -> np.ndarray:
    """phi(x) = h_P(first, x - first) in index space: sum of cost increments along the canonical path."""
    n = len(tables)
    shape = tables[0].shape
    phi = np.zeros(shape, dtype=tables[0].dtype)
    for i, F in enumerate(tables):
        after = F[(slice(None),) * (i + 1) + (0,) * (n - i - 1)]
        before = F[(slice(None),) * i + (0,) * (n - i)]
        step = after - np.expand_dims(before, i)
        phi = phi + step.reshape(step.shape + (1,) * (n - i - 1))
    return phi


def _spread(tables, phi) -> tuple[float, tuple | None]:
    """Max over (i, x_-i, a, a') of |dF_i - dphi|, with its lexicographically first location."""
    best, where = 0, None
    for i, F in enumerate(tables):
        D = F - phi
        rng = D.max(axis=i) - D.min(axis=i)
        m = rng.max()
        if m > best:
            flat = int(np.argmax(rng))
            rest = np.unravel_index(flat, rng.shape)
            line = D[rest[:i] + (slice(None),) + rest[i:]]
            a, b = sorted((int(np.argmin(line)), int(np.argmax(line))))
            best, where = m, (i, tuple(int(v) for v in rest), a, b)
    return best, where


def _least_squares(tables) -> np.ndarray:
    """Least-squares phi over all unilateral-deviation equations, pinned at the first profile."""
    shape = tables[0].shape
    size = int(np.prod(shape))
    ids = np.arange(size).reshape(shape)
    rows, cols, rhs = [], [], []
    for i, F in enumerate(tables):
        for a, b in itertools.combinations(range(shape[i]), 2):
            ia = np.take(ids, a, axis=i).ravel()
            ib = np.take(ids, b, axis=i).ravel()
            rows.append(ia)
            cols.append(ib)
            rhs.append((np.take(F, b, axis=i) - np.take(F, a, axis=i)).ravel())
    if not rows:
        return np.zeros(shape)
    src = np.concatenate(rows)
    dst = np.concatenate(cols)
    d = np.concatenate(rhs).astype(float)
    m = len(d)
    A = sp.csr_matrix((np.r_[-np.ones(m), np.ones(m)], (np.r_[np.arange(m), np.arange(m)], np.r_[src, dst])),
                      shape=(m, size))
    L = (A.T @ A).tocsc()[1:, 1:]
    b = (A.T @ d)[1:]
    phi = np.zeros(size)
    if size > 1:
        phi[1:] = spla.spsolve(L, b)
    return phi.reshape(shape)


def oracle_finite_potential(g: GameSpec, tol: float = 1e-9) -> tuple[TestReport, np.ndarray | None]:
    """Brute-force exact-potential decision for a finite game.

    Integer-valued costs are integrated exactly along canonical paths and
    every deviation equation is checked in integer arithmetic.  Other costs
    get a least-squares potential and the threshold ``tol * (1 + max|f|)``.
    On pass the table is normalized to 0 at the first profile.
    """
    if not g.is_finite:
        return inapplicable("oracle", "needs a finite game"), None
    if g.n_profiles > ORACLE_LIMIT:
        raise OracleSizeError(f"{g.n_profiles} profiles exceed the oracle limit {ORACLE_LIMIT}")
    tables = g.cost_tables()
    ints = _integer_tables(tables)
    if ints is not None:
        phi = _integrate(ints)
        residual, where = _spread(ints, phi)
        ok = residual == 0
        solver, threshold = "exact-integer", 0.0
        phi = phi.astype(float)
    else:
        phi = _least_squares(tables)
        residual, where = _spread(tables, phi)
        threshold = tol * (1.0 + max(float(np.abs(t).max(initial=0)) for t in tables))
        ok = residual <= threshold
        solver = "least-squares"
    phi = phi - phi.flat[0]
    equations = sum(g.n_profiles // m * math.comb(m, 2) for m in g.shape)
    witness = None
    if where is not None:
        i, rest, a, b = where
        idx = list(rest[:i]) + [a] + list(rest[i:])
        witness = {"player": i, "x": g.profile_at(idx), "x_i_prime": g.spaces[i].points[b],
                   "residual": float(residual)}
    report = TestReport(PASS if ok else FAIL, "oracle", float(residual), witness, equations, True,
                        details={"solver": solver, "threshold": threshold})
    return report, (phi if ok else None)


def find_aggregative_witness(g: GameSpec, samples: int = 500, seed: int = 0, tol: float = 1e-9,
                             radius: float = 10.0) -> TestReport:
    """Search for y with h_P(0, y) != 0 in a non-abnormal aggregative game."""
    if not g.aggregative:
        return inapplicable("aggregative-witness", "costs are not aggregative")
    if not g.contains(g.zero):
        return inapplicable("aggregative-witness", "0 is not a joint strategy")
    if detect_abnormal(g, samples, seed, tol).verdict == "abnormal":
        return inapplicable("aggregative-witness", "game is abnormal")
    zero = g.zero
    t = Tracker()
    note = ("h_P(0,0) = 0 always, so the nonvanishing claim is read as "
            "'h_P(0, .) is not identically zero'")
    for y in sample_strategies(g, samples, seed, radius):
        v = h_path(g, zero, y)
        t.count += 1
        if abs(v) > band(tol, v, 0.0):
            return TestReport(PASS, "aggregative-witness", abs(v), {"y": y, "h_P(0,y)": v},
                              t.count, False, notes=[note])
    return TestReport(FAIL, "aggregative-witness", 0.0, {"samples": t.count}, t.count, False, notes=[note])
