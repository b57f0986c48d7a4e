"""Deviation paths and the difference quantities built on them.

``path_integral`` sums each step's deviator cost change; ``h_path`` is
that sum along the canonical path that moves players 1..N in turn from
``z`` to ``z + y``; ``h_pair`` is the two-step version for a player pair.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .game import Action, GameSpec, Profile, _key, as_profile, sample_strategies


class PathError(ValueError):
    """An intermediate profile left the joint action set, or a path is malformed."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step


def _add(a: Action, b: Sequence[float]) -> Action:
    return tuple(u + v for u, v in zip(a, b))


def _set(x: Profile, i: int, a: Action) -> Profile:
    return x[:i] + (a,) + x[i + 1:]


@dataclass(frozen=True)
class DeviationPath:
    steps: tuple[Profile, ...]
    deviators: tuple[int, ...]

    def __post_init__(self):
        if len(self.deviators) != len(self.steps) - 1:
            raise PathError("need exactly one deviator per step")
        for e, i in enumerate(self.deviators):
            a, b = self.steps[e], self.steps[e + 1]
            if any(_key(a[p]) != _key(b[p]) for p in range(len(a)) if p != i):
                raise PathError(f"players other than {i} changed", e)

    @property
    def length(self) -> int:
        return len(self.deviators)

    @property
    def closed(self) -> bool:
        return len(self.steps) > 1 and self._k(0) == self._k(-1)

    @property
    def simple(self) -> bool:
        inner = [self._k(t) for t in range(1, len(self.steps))]
        return len(set(inner)) == len(inner)

    def _k(self, t: int) -> tuple:
        return tuple(_key(a) for a in self.steps[t])

    def reversed(self) -> DeviationPath:
        return DeviationPath(self.steps[::-1], self.deviators[::-1])

    def __add__(self, other: DeviationPath) -> DeviationPath:
        if self._k(-1) != other._k(0):
            raise PathError("concatenated paths must meet")
        return DeviationPath(self.steps + other.steps[1:], self.deviators + other.deviators)

    def to_dict(self) -> dict:
        return {"steps": [[list(a) for a in x] for x in self.steps], "deviators": list(self.deviators)}


def canonical_path(z, y, g: GameSpec | None = None) -> DeviationPath:
    """Path z -> (z_1+y_1, z_-1) -> ... -> z+y; every player takes one (possibly empty) step."""
    z = as_profile(z)
    y = as_profile(y)
    if len(z) != len(y):
        raise PathError("z and y need one entry per player")
    steps = [z]
    x = z
    for i in range(len(z)):
        x = _set(x, i, _add(z[i], y[i]))
        if g is not None and not g.spaces[i].contains(x[i]):
            raise PathError(f"player {i} action {x[i]} leaves its action space", i)
        steps.append(x)
    if g is not None and not g.contains(z):
        raise PathError(f"start profile {z} is outside the joint action set", 0)
    return DeviationPath(tuple(steps), tuple(range(len(z))))


def path_integral(g: GameSpec, q: DeviationPath) -> float:
    total = 0.0
    for e, i in enumerate(q.deviators):
        total += g.cost(i, q.steps[e + 1]) - g.cost(i, q.steps[e])
    return total


def h_path(g: GameSpec, z, y) -> float:
    return path_integral(g, canonical_path(z, y, g))


@dataclass(frozen=True)
class PairDeviation:
    """Arguments of ``h_ij``; ``z`` is a full profile carrying z_i, z_j and the rest."""

    i: int
    j: int
    z: Profile
    y_i: Action
    y_j: Action

    def __post_init__(self):
        if not 0 <= self.i < self.j < len(self.z):
            raise PathError(f"need 0 <= i < j < N, got i={self.i}, j={self.j}")
        object.__setattr__(self, "z", as_profile(self.z))
        object.__setattr__(self, "y_i", tuple(float(v) for v in np.ravel(self.y_i)))
        object.__setattr__(self, "y_j", tuple(float(v) for v in np.ravel(self.y_j)))

    @property
    def z_i(self) -> Action:
        return self.z[self.i]

    @property
    def z_j(self) -> Action:
        return self.z[self.j]

    def path(self) -> DeviationPath:
        x0 = self.z
        x1 = _set(x0, self.i, _add(self.z_i, self.y_i))
        x2 = _set(x1, self.j, _add(self.z_j, self.y_j))
        return DeviationPath((x0, x1, x2), (self.i, self.j))


def h_pair(g: GameSpec, d: PairDeviation) -> float:
    """f_i(z_i+y_i, z_j) - f_i(z_i, z_j) + f_j(z_j+y_j, z_i+y_i) - f_j(z_j, z_i+y_i)."""
    q = d.path()
    for p in (d.i, d.j):
        for x in q.steps:
            if not g.spaces[p].contains(x[p]):
                raise PathError(f"player {p} action {x[p]} leaves its action space")
    if not g.contains(d.z):
        raise PathError(f"base profile {d.z} is outside the joint action set")
    return path_integral(g, q)


def h_pair_to(g: GameSpec, i: int, j: int, z: Profile, ai: Action, aj: Action) -> float:
    """Unchecked ``h_ij`` with absolute targets ``ai = z_i + y_i`` and ``aj = z_j + y_j``."""
    x1 = _set(z, i, ai)
    x2 = _set(x1, j, aj)
    return g.cost(i, x1) - g.cost(i, z) + g.cost(j, x2) - g.cost(j, x1)


# --------------------------------------------------------------------------
# four-cycles

def four_cycle(z: Profile, i: int, j: int, a2: Action, b2: Action) -> DeviationPath:
    """z -> (a2, z_-i) -> (a2, b2, z_-ij) -> (z_i, b2, z_-ij) -> z."""
    x1 = _set(z, i, a2)
    x2 = _set(x1, j, b2)
    x3 = _set(z, j, b2)
    return DeviationPath((z, x1, x2, x3, z), (i, j, i, j))


def count_four_cycles(g: GameSpec) -> int:
    shape = g.shape
    total = 0
    for i, j in itertools.combinations(range(g.players), 2):
        rest = math.prod(m for p, m in enumerate(shape) if p not in (i, j))
        total += math.comb(shape[i], 2) * math.comb(shape[j], 2) * rest
    return total


def _decode_cycle(g: GameSpec, index: int) -> DeviationPath:
    shape = g.shape
    for i, j in itertools.combinations(range(g.players), 2):
        others = [p for p in range(g.players) if p not in (i, j)]
        rest_shape = [shape[p] for p in others]
        na, nb = math.comb(shape[i], 2), math.comb(shape[j], 2)
        block = na * nb * math.prod(rest_shape)
        if index >= block:
            index -= block
            continue
        nrest = math.prod(rest_shape)
        ka, rem = divmod(index, nb * nrest)
        kb, kr = divmod(rem, nrest)
        a, a2 = next(itertools.islice(itertools.combinations(range(shape[i]), 2), ka, None))
        b, b2 = next(itertools.islice(itertools.combinations(range(shape[j]), 2), kb, None))
        idx = [0] * g.players
        idx[i], idx[j] = a, b
        for p, v in zip(others, np.unravel_index(kr, rest_shape) if others else ()):
            idx[p] = int(v)
        z = g.profile_at(idx)
        return four_cycle(z, i, j, g.spaces[i].points[a2], g.spaces[j].points[b2])
    raise IndexError("cycle index out of range")


def _all_cycles(g: GameSpec) -> Iterator[DeviationPath]:
    shape = g.shape
    for i, j in itertools.combinations(range(g.players), 2):
        others = [p for p in range(g.players) if p not in (i, j)]
        for a, a2 in itertools.combinations(range(shape[i]), 2):
            for b, b2 in itertools.combinations(range(shape[j]), 2):
                for rest in itertools.product(*(range(shape[p]) for p in others)):
                    idx = [0] * g.players
                    idx[i], idx[j] = a, b
                    for p, v in zip(others, rest):
                        idx[p] = v
                    yield four_cycle(g.profile_at(idx), i, j,
                                     g.spaces[i].points[a2], g.spaces[j].points[b2])


def enumerate_four_cycles(g: GameSpec, budget: int, seed: int = 0,
                          radius: float = 10.0) -> Iterator[DeviationPath]:
    """Simple closed 4-cycles in lexicographic (i, j, a<a', b<b', rest) order.

    Finite games are enumerated exhaustively when the count fits in
    ``budget``; otherwise ``budget`` distinct cycles are drawn uniformly and
    emitted in the same order.  Continuous games always get sampled cycles.
    """
    if budget <= 0 or g.players < 2:
        return
    if g.is_finite:
        total = count_four_cycles(g)
        if total <= budget:
            yield from _all_cycles(g)
            return
        rng = np.random.default_rng([int(seed), 1])
        for k in np.sort(rng.choice(total, size=budget, replace=False)):
            yield _decode_cycle(g, int(k))
        return
    base = sample_strategies(g, budget, seed, radius)
    alt = sample_strategies(g, budget + 1, seed + 1, radius)[::-1]
    pairs = list(itertools.combinations(range(g.players), 2))
    for k, z in enumerate(base):
        i, j = pairs[k % len(pairs)]
        a2, b2 = alt[k % len(alt)][i], alt[k % len(alt)][j]
        if _key(a2) == _key(z[i]) or _key(b2) == _key(z[j]):
            continue
        yield four_cycle(z, i, j, a2, b2)


def is_four_cycle_exhaustive(g: GameSpec, budget: int) -> bool:
    return g.is_finite and (g.players < 2 or count_four_cycles(g) <= budget)
