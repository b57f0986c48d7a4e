"""Seeded random expressions that stay finite on [-1, 1]^n."""

from __future__ import annotations

import numpy as np

from pgt import expr as ex

DIMS = (2, 1, 1)


def _leaf(rng: np.random.Generator) -> ex.Expr:
    r = rng.random()
    if r < 0.55:
        i = int(rng.integers(1, len(DIMS) + 1))
        return ex.Var(i, int(rng.integers(1, DIMS[i - 1] + 1)))
    if r < 0.75:
        return ex.Param("a")
    return ex.Num(float(rng.integers(-3, 4)))


def random_expression(rng: np.random.Generator, depth: int = 4) -> ex.Expr:
    if depth == 0 or rng.random() < 0.2:
        return _leaf(rng)
    op = rng.integers(7)
    u = random_expression(rng, depth - 1)
    if op == 0:
        return ex.Add(u, random_expression(rng, depth - 1))
    if op == 1:
        return ex.Sub(u, random_expression(rng, depth - 1))
    if op == 2:
        return ex.Mul(u, random_expression(rng, depth - 1))
    if op == 3:
        # denominator bounded away from zero
        return ex.Div(u, ex.Add(ex.Num(2.0), ex.Pow(random_expression(rng, depth - 1), 2.0)))
    if op == 4:
        return ex.Neg(u)
    if op == 5:
        return ex.Pow(u, float(rng.integers(0, 4)))
    return ex.Sqrt(ex.Add(ex.Num(1.0), ex.Pow(u, 2.0)))


def random_point(rng: np.random.Generator) -> tuple[tuple[float, ...], ...]:
    return tuple(tuple(float(v) for v in rng.uniform(-1, 1, d)) for d in DIMS)


def central_difference(fn, x, i: int, k: int, h: float = 1e-6) -> float:
    def shifted(s):
        y = [list(a) for a in x]
        y[i][k] += s
        return tuple(tuple(a) for a in y)
    return (fn(shifted(h)) - fn(shifted(-h))) / (2 * h)
