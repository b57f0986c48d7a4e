"""Nash equilibria through potentials: minimization, verification, improvement dynamics."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .game import Finite, GameSpec, Profile, as_profile, sample_strategies
from .paths import _set
from .report import TestReport, Tracker, band, jsonable

__all__ = ["grid_game", "minimize_potential", "verify_nash", "DynamicsResult",
           "better_response_dynamics"]


def grid_game(g: GameSpec, resolution: int = 11, radius: float = 10.0) -> GameSpec:
    """Finite restriction of a continuous game to an evenly spaced grid per coordinate."""
    spaces = []
    for s in g.spaces:
        if s.is_finite:
            spaces.append(s)
            continue
        lo, hi = s.sampling_bounds(radius)
        axes = [np.linspace(a, b, resolution) for a, b in zip(lo, hi)]
        spaces.append(Finite(tuple(tuple(float(v) for v in p) for p in itertools.product(*axes))))
    return GameSpec(spaces, g.costs)


def minimize_potential(g: GameSpec, phi: Callable, resolution: int = 11,
                       radius: float = 10.0) -> tuple[Profile, float]:
    """Lexicographically first global minimizer of ``phi`` over the joint grid.

    Continuous games are restricted to a ``resolution``-point grid per
    coordinate first, so the result is then only approximate.
    """
    if not g.is_finite:
        g = grid_game(g, resolution, radius)
    table = getattr(phi, "table", None)
    host = getattr(phi, "game", None)
    if table is not None and host is not None and table.shape == g.shape and host.spaces == g.spaces:
        k = int(np.argmin(table))
        idx = np.unravel_index(k, table.shape)
        return g.profile_at(idx), float(table[idx])
    best, best_x = np.inf, None
    for x in g.profiles():
        v = phi(x)
        if v < best:
            best, best_x = v, x
    if best_x is None:
        raise ValueError("empty action grid")
    return best_x, float(best)


def verify_nash(g: GameSpec, x: Any, budget: int = 500, seed: int = 0, tol: float = 1e-9,
                radius: float = 10.0) -> TestReport:
    """No unilateral deviation lowers a player's cost by more than the tolerance band."""
    x = as_profile(x)
    if not g.contains(x):
        raise ValueError(f"{x} is not a joint strategy of the game")
    if g.is_finite and sum(s.size - 1 for s in g.spaces) <= budget:
        moves = [(i, a) for i, s in enumerate(g.spaces) for a in s.points if a != x[i]]
        exhaustive = True
    else:
        exhaustive = False
        moves = []
        alt = sample_strategies(g, budget, seed, radius)
        for i, s in enumerate(g.spaces):
            moves.extend((i, y[i]) for y in alt)
    t = Tracker()
    for i, a in moves:
        f0 = g.cost(i, x)
        f1 = g.cost(i, _set(x, i, a))
        gain = f0 - f1
        t.see(max(gain, 0.0), lambda i=i, a=a, gain=gain: {"player": i, "x_i_prime": a, "gain": gain},
              gain <= band(tol, f0, f1))
    return t.report("nash", exhaustive)


@dataclass
class DynamicsResult:
    outcome: str
    trajectory: list[Profile]
    deviators: list[int]
    cost_deltas: list[float]
    phi_deltas: list[float] | None
    cycle: list[Profile] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.deviators)

    def to_dict(self) -> dict:
        rows = [{"profile": self.trajectory[0]}]
        for k, i in enumerate(self.deviators):
            row = {"profile": self.trajectory[k + 1], "deviator": i, "cost_delta": self.cost_deltas[k]}
            if self.phi_deltas is not None:
                row["phi_delta"] = self.phi_deltas[k]
            rows.append(row)
        return jsonable({"outcome": self.outcome, "steps": self.steps, "trajectory": rows,
                         "cycle": self.cycle, "notes": self.notes})


def better_response_dynamics(g: GameSpec, start: Any, max_steps: int = 1000, seed: int = 0,
                             phi: Callable | None = None, tol: float = 1e-9,
                             rule: str = "lexicographic") -> DynamicsResult:
    """Follow strictly improving unilateral deviations until none is left.

    ``lexicographic`` takes the first improving (player, action) in index
    order; ``random`` picks uniformly among them with a seeded generator.
    Revisiting a profile closes an improvement cycle, which rules out any
    generalized ordinal potential.
    """
    if not g.is_finite:
        raise ValueError("better-response dynamics needs a finite game")
    if rule not in ("lexicographic", "random"):
        raise ValueError(f"unknown rule {rule!r}")
    rng = np.random.default_rng([int(seed), 5])
    x = as_profile(start)
    if not g.contains(x):
        raise ValueError(f"{x} is not a joint strategy of the game")
    traj, devs, dcost = [x], [], []
    dphi = [] if phi is not None else None
    seen = {g.indices(x): 0}
    for _ in range(max_steps):
        moves = []
        for i, s in enumerate(g.spaces):
            f0 = g.cost(i, x)
            for a in s.points:
                if a == x[i]:
                    continue
                f1 = g.cost(i, _set(x, i, a))
                if f0 - f1 > band(tol, f0, f1):
                    moves.append((i, a, f1 - f0))
                    if rule == "lexicographic":
                        break
            if moves and rule == "lexicographic":
                break
        if not moves:
            return DynamicsResult("converged", traj, devs, dcost, dphi)
        i, a, delta = moves[int(rng.integers(len(moves)))] if rule == "random" else moves[0]
        nxt = _set(x, i, a)
        if dphi is not None:
            dphi.append(phi(nxt) - phi(x))
        devs.append(i)
        dcost.append(delta)
        traj.append(nxt)
        x = nxt
        key = g.indices(x)
        if key in seen:
            cycle = traj[seen[key]:]
            return DynamicsResult("cycle_detected", traj, devs, dcost, dphi, cycle,
                                  ["an improvement cycle exists, so no generalized ordinal potential does"])
        seen[key] = len(traj) - 1
    return DynamicsResult("budget_exhausted", traj, devs, dcost, dphi)
