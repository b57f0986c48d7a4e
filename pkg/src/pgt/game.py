"""Declarative games: action spaces, cost models, loading, sampling.

A joint strategy (profile) is a tuple with one action per player, and an
action is a tuple of floats.  Finite action spaces list their points
explicitly; table costs are indexed by position in those point lists.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterator, Mapping, Sequence, Union

import jsonschema
import numpy as np

from . import expr as ex
from .report import TestReport, band

__all__ = [
    "Action", "Profile", "Finite", "Box", "AllSpace", "ActionSpace",
    "ExprCosts", "TableCosts", "CongestionNetwork", "GameSpec", "GameSpecError",
    "as_profile", "load_game_spec", "game_from_dict", "game_to_dict",
    "evaluate_cost", "sample_strategies", "detect_abnormal",
    "expand_congestion_game", "augmentation_constant", "unilateral_deviations",
]

Action = tuple[float, ...]
Profile = tuple[Action, ...]

KEY_DECIMALS = 9
CORNER_CAP = 2 ** 10
OPEN_MARGIN = 1e-3


class GameSpecError(ValueError):
    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def _key(a: Sequence[float]) -> Action:
    return tuple(round(float(v), KEY_DECIMALS) + 0.0 for v in a)


def as_profile(x: Any) -> Profile:
    """Normalize scalars / lists / arrays into a profile of float tuples."""
    out = []
    for a in x:
        if np.ndim(a) == 0:
            out.append((float(a),))
        else:
            out.append(tuple(float(v) for v in np.ravel(a)))
    return tuple(out)


# --------------------------------------------------------------------------
# action spaces

@dataclass(frozen=True)
class Finite:
    points: tuple[Action, ...]

    def __post_init__(self):
        pts = tuple(tuple(float(v) for v in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise GameSpecError("finite action space needs at least one point")
        if len({len(p) for p in pts}) != 1:
            raise GameSpecError("finite points must share one dimension")
        if len({_key(p) for p in pts}) != len(pts):
            raise GameSpecError("finite points must be distinct")

    kind = "finite"
    is_finite = True
    is_convex = False

    @cached_property
    def _index(self) -> dict[Action, int]:
        return {_key(p): k for k, p in enumerate(self.points)}

    @property
    def dim(self) -> int:
        return len(self.points[0])

    @property
    def size(self) -> int:
        return len(self.points)

    def index(self, a: Sequence[float]) -> int:
        try:
            return self._index[_key(a)]
        except KeyError:
            raise GameSpecError(f"action {tuple(a)} is not in the finite space") from None

    def contains(self, a: Sequence[float]) -> bool:
        return len(a) == self.dim and _key(a) in self._index

    @property
    def contains_zero(self) -> bool:
        return self.contains((0.0,) * self.dim)

    @property
    def symmetric(self) -> bool:
        return all(self.contains(tuple(-v for v in p)) for p in self.points)


@dataclass(frozen=True)
class Box:
    lo: Action
    hi: Action
    open_lo: bool = False

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or not lo:
            raise GameSpecError("box lo/hi must be nonempty and of equal length")
        if any(a > b for a, b in zip(lo, hi)):
            raise GameSpecError("box needs lo <= hi componentwise")
        if not all(math.isfinite(v) for v in lo + hi):
            raise GameSpecError("box bounds must be finite; use kind 'all' for R^n")

    kind = "box"
    is_finite = False
    is_convex = True

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, a: Sequence[float]) -> bool:
        if len(a) != self.dim:
            return False
        for v, lo, hi in zip(a, self.lo, self.hi):
            slack = 1e-12 * (1.0 + max(abs(lo), abs(hi)))
            if v > hi + slack:
                return False
            if self.open_lo and v <= lo:
                return False
            if v < lo - slack:
                return False
        return True

    @property
    def contains_zero(self) -> bool:
        return self.contains((0.0,) * self.dim)

    @property
    def symmetric(self) -> bool:
        return not self.open_lo and all(lo == -hi for lo, hi in zip(self.lo, self.hi))

    def sampling_bounds(self, radius: float) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array(self.lo)
        hi = np.array(self.hi)
        if self.open_lo:
            lo = lo + OPEN_MARGIN * (hi - lo)
        return lo, hi


@dataclass(frozen=True)
class AllSpace:
    dim: int

    kind = "all"
    is_finite = False
    is_convex = True
    contains_zero = True
    symmetric = True

    def contains(self, a: Sequence[float]) -> bool:
        return len(a) == self.dim and all(math.isfinite(v) for v in a)

    def sampling_bounds(self, radius: float) -> tuple[np.ndarray, np.ndarray]:
        return np.full(self.dim, -float(radius)), np.full(self.dim, float(radius))


ActionSpace = Union[Finite, Box, AllSpace]


# --------------------------------------------------------------------------
# cost models

@dataclass(frozen=True)
class ExprCosts:
    exprs: tuple[ex.Expr, ...]
    params: Mapping[str, float] = field(default_factory=dict)

    kind = "expr"


@dataclass(frozen=True, eq=False)
class TableCosts:
    tables: tuple[np.ndarray, ...]

    kind = "table"

    def __post_init__(self):
        object.__setattr__(self, "tables", tuple(np.asarray(t, dtype=float) for t in self.tables))


@dataclass(frozen=True)
class CongestionNetwork:
    """Common origin-destination congestion network.

    ``edges`` maps an edge id to its cost table ``C_e(1..N)``; a route is a
    nonempty tuple of edge ids; ``origin_loop_cost`` is ``C_0(1..N)`` for the
    self-loop at the origin used by the augmented game.
    """

    edges: Mapping[str, tuple[float, ...]]
    routes: tuple[tuple[str, ...], ...]
    origin_loop_cost: tuple[float, ...] | None = None

    kind = "congestion"

    @property
    def n_routes(self) -> int:
        return len(self.routes)

    def max_abs_cost(self) -> float:
        return max((abs(v) for t in self.edges.values() for v in t), default=0.0)


Costs = Union[ExprCosts, TableCosts, CongestionNetwork]


def _loads(routes: Sequence[Sequence[str]]) -> dict[str, int]:
    v: dict[str, int] = {}
    for r in routes:
        for e in r:
            v[e] = v.get(e, 0) + 1
    return v


class GameSpec:
    """Immutable N-player game ``(players, {f_i, K_i})``.

    Players are 0-based in the Python API.  ``cost(i, x)`` skips membership
    checks; :func:`evaluate_cost` is the checked entry point.
    """

    def __init__(self, spaces: Sequence[ActionSpace], costs: Costs):
        self._spaces = tuple(spaces)
        self._costs = costs
        n = len(self._spaces)
        if n == 0:
            raise GameSpecError("a game needs at least one player", "players")
        if isinstance(costs, ExprCosts):
            if len(costs.exprs) != n:
                raise GameSpecError(f"expected {n} cost expressions, got {len(costs.exprs)}", "costs.exprs")
            missing = set().union(*(ex.free_params(e) for e in costs.exprs)) - set(costs.params)
            if missing:
                raise GameSpecError(f"unbound parameters {sorted(missing)}", "params")
            for k, e in enumerate(costs.exprs):
                for v in ex.variables(e):
                    if isinstance(v, ex.Var) and (v.player > n or v.coord > self.dims[v.player - 1]):
                        raise GameSpecError(f"{ex.to_text(v)} exceeds the game dimensions", f"costs.exprs[{k}]")
                    if isinstance(v, ex.Agg) and (len(set(self.dims)) != 1 or v.coord > self.dims[0]):
                        raise GameSpecError("xbar needs a common action dimension", f"costs.exprs[{k}]")
            self._fns = [ex.compile_expression(e, costs.params) for e in costs.exprs]
        elif isinstance(costs, TableCosts):
            if len(costs.tables) != n:
                raise GameSpecError(f"expected {n} cost tables, got {len(costs.tables)}", "costs.tables")
            if not all(s.is_finite for s in self._spaces):
                raise GameSpecError("table costs need finite action spaces", "spaces")
            shape = self.shape
            for k, t in enumerate(costs.tables):
                if t.shape != shape:
                    raise GameSpecError(f"table shape {t.shape} != action counts {shape}", f"costs.tables[{k}]")
                if not np.all(np.isfinite(t)):
                    raise GameSpecError("table values must be finite", f"costs.tables[{k}]")
        elif isinstance(costs, CongestionNetwork):
            if costs.n_routes == 0:
                raise GameSpecError("congestion network needs at least one route", "costs.routes")
            for eid, table in costs.edges.items():
                if len(table) != n:
                    raise GameSpecError(f"edge {eid!r} needs exactly {n} cost entries", "costs.edges")
                if not all(math.isfinite(v) for v in table):
                    raise GameSpecError(f"edge {eid!r} has non-finite cost", "costs.edges")
            for k, r in enumerate(costs.routes):
                if not r:
                    raise GameSpecError("routes must be nonempty", f"costs.routes[{k}]")
                unknown = [e for e in r if e not in costs.edges]
                if unknown:
                    raise GameSpecError(f"unknown edges {unknown}", f"costs.routes[{k}]")
            if costs.origin_loop_cost is not None and len(costs.origin_loop_cost) != n:
                raise GameSpecError(f"origin_loop_cost needs exactly {n} entries", "costs.origin_loop_cost")
            for s in self._spaces:
                if not (s.is_finite and s.dim == 1 and s.size == costs.n_routes):
                    raise GameSpecError("congestion players choose among the routes", "spaces")
        else:
            raise GameSpecError(f"unknown cost model {type(costs).__name__}", "costs")

    # -- structure -------------------------------------------------------
    @property
    def spaces(self) -> tuple[ActionSpace, ...]:
        return self._spaces

    @property
    def costs(self) -> Costs:
        return self._costs

    @property
    def players(self) -> int:
        return len(self._spaces)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self._spaces)

    @property
    def params(self) -> Mapping[str, float]:
        return self._costs.params if isinstance(self._costs, ExprCosts) else {}

    @property
    def is_finite(self) -> bool:
        return all(s.is_finite for s in self._spaces)

    @property
    def is_convex(self) -> bool:
        return all(s.is_convex for s in self._spaces)

    @property
    def contains_zero(self) -> bool:
        return all(s.contains_zero for s in self._spaces)

    @property
    def aggregative(self) -> bool:
        if not isinstance(self._costs, ExprCosts) or len(set(self.dims)) != 1:
            return False
        n = self.players
        return all(ex.uses_only(ex.fold_aggregates(e, n), i + 1) for i, e in enumerate(self._costs.exprs))

    @property
    def shape(self) -> tuple[int, ...]:
        if not self.is_finite:
            raise GameSpecError("shape is only defined for finite games")
        return tuple(s.size for s in self._spaces)

    @property
    def n_profiles(self) -> int:
        return math.prod(self.shape)

    @property
    def zero(self) -> Profile:
        return tuple((0.0,) * d for d in self.dims)

    # -- profiles --------------------------------------------------------
    def contains(self, x: Profile) -> bool:
        return len(x) == self.players and all(s.contains(a) for s, a in zip(self._spaces, x))

    def indices(self, x: Profile) -> tuple[int, ...]:
        return tuple(s.index(a) for s, a in zip(self._spaces, x))

    def profile_at(self, idx: Sequence[int]) -> Profile:
        return tuple(s.points[int(k)] for s, k in zip(self._spaces, idx))

    def profiles(self) -> Iterator[Profile]:
        """All joint strategies of a finite game in lexicographic index order."""
        for idx in itertools.product(*(range(m) for m in self.shape)):
            yield self.profile_at(idx)

    # -- costs -----------------------------------------------------------
    def cost(self, i: int, x: Profile) -> float:
        c = self._costs
        if isinstance(c, ExprCosts):
            return self._fns[i](x)
        if isinstance(c, TableCosts):
            return float(c.tables[i][self.indices(x)])
        routes = [c.routes[int(round(a[0])) - 1] for a in x]
        v = _loads(routes)
        return float(sum(c.edges[e][v[e] - 1] for e in routes[i]))

    def cost_tables(self) -> tuple[np.ndarray, ...]:
        """Full cost arrays ``F[i][idx]`` of a finite game."""
        if isinstance(self._costs, TableCosts):
            return self._costs.tables
        if "_tables" not in self.__dict__:
            out = [np.empty(self.shape) for _ in range(self.players)]
            for idx in itertools.product(*(range(m) for m in self.shape)):
                x = self.profile_at(idx)
                for i in range(self.players):
                    out[i][idx] = self.cost(i, x)
            self.__dict__["_tables"] = tuple(out)
        return self.__dict__["_tables"]

    def __repr__(self) -> str:
        return f"GameSpec(players={self.players}, dims={self.dims}, costs={self._costs.kind})"


def evaluate_cost(g: GameSpec, i: int, x: Any) -> float:
    """Cost ``f_i(x)`` with membership checking."""
    x = as_profile(x)
    if not g.contains(x):
        raise GameSpecError(f"strategy {x} is outside the joint action set")
    return g.cost(i, x)


# --------------------------------------------------------------------------
# JSON

_SPACE_SCHEMA = {
    "oneOf": [
        {"type": "object", "required": ["kind", "points"],
         "properties": {"kind": {"const": "finite"},
                        "points": {"type": "array", "minItems": 1,
                                   "items": {"type": "array", "items": {"type": "number"}}}}},
        {"type": "object", "required": ["kind", "lo", "hi"],
         "properties": {"kind": {"const": "box"},
                        "lo": {"type": "array", "items": {"type": "number"}},
                        "hi": {"type": "array", "items": {"type": "number"}},
                        "open_lo": {"type": "boolean"}}},
        {"type": "object", "required": ["kind"],
         "properties": {"kind": {"const": "all"}}},
    ]
}

GAME_SCHEMA = {
    "type": "object",
    "required": ["players", "costs"],
    "properties": {
        "players": {"type": "integer", "minimum": 1},
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "spaces": {"type": "array", "items": _SPACE_SCHEMA},
        "params": {"type": "object", "additionalProperties": {"type": "number"}},
        "costs": {
            "type": "object",
            "required": ["kind"],
            "oneOf": [
                {"required": ["exprs"], "properties": {
                    "kind": {"const": "expr"},
                    "exprs": {"type": "array", "items": {"type": "string"}}}},
                {"required": ["tables"], "properties": {
                    "kind": {"const": "table"}, "tables": {"type": "array"}}},
                {"required": ["edges", "routes"], "properties": {
                    "kind": {"const": "congestion"},
                    "edges": {"type": "array", "items": {
                        "type": "object", "required": ["id", "cost"],
                        "properties": {"id": {"type": "string"},
                                       "cost": {"type": "array", "items": {"type": "number"}}}}},
                    "routes": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
                    "origin_loop_cost": {"type": "array", "items": {"type": "number"}}}},
            ],
        },
    },
}


def _json_path(err: jsonschema.ValidationError) -> str:
    path = ""
    for p in err.absolute_path:
        path += f"[{p}]" if isinstance(p, int) else (f".{p}" if path else p)
    return path


def game_from_dict(doc: Mapping[str, Any]) -> GameSpec:
    """Build a validated :class:`GameSpec` from a parsed game-spec document."""
    errors = sorted(jsonschema.Draft7Validator(GAME_SCHEMA).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = max(errors, key=lambda e: len(list(e.absolute_path)))
        raise GameSpecError(err.message, _json_path(err))
    n = doc["players"]
    c = doc["costs"]
    if c["kind"] == "congestion":
        m = len(c["routes"])
        spaces_doc = doc.get("spaces") or [{"kind": "finite", "points": [[r + 1] for r in range(m)]}] * n
    else:
        if "spaces" not in doc:
            raise GameSpecError("'spaces' is a required property", "spaces")
        spaces_doc = doc["spaces"]
    if len(spaces_doc) != n:
        raise GameSpecError(f"expected {n} spaces, got {len(spaces_doc)}", "spaces")
    dims = doc.get("dims")
    if dims is not None and len(dims) != n:
        raise GameSpecError(f"expected {n} dims, got {len(dims)}", "dims")
    spaces: list[ActionSpace] = []
    for k, s in enumerate(spaces_doc):
        try:
            if s["kind"] == "finite":
                sp: ActionSpace = Finite(tuple(map(tuple, s["points"])))
            elif s["kind"] == "box":
                sp = Box(tuple(s["lo"]), tuple(s["hi"]), bool(s.get("open_lo", False)))
            else:
                if dims is None:
                    raise GameSpecError("kind 'all' needs 'dims'")
                sp = AllSpace(int(dims[k]))
        except GameSpecError as err:
            raise GameSpecError(str(err), f"spaces[{k}]") from None
        if dims is not None and sp.dim != dims[k]:
            raise GameSpecError(f"dimension {sp.dim} != dims[{k}] = {dims[k]}", f"spaces[{k}]")
        spaces.append(sp)
    dims = [s.dim for s in spaces]

    if c["kind"] == "expr":
        exprs = []
        for k, src in enumerate(c["exprs"]):
            try:
                exprs.append(ex.parse_expression(src, dims))
            except ex.ExpressionError as err:
                raise GameSpecError(str(err), f"costs.exprs[{k}]") from None
        costs: Costs = ExprCosts(tuple(exprs), dict(doc.get("params", {})))
    elif c["kind"] == "table":
        costs = TableCosts(tuple(np.asarray(t, dtype=float) for t in c["tables"]))
    else:
        costs = CongestionNetwork(
            {e["id"]: tuple(float(v) for v in e["cost"]) for e in c["edges"]},
            tuple(tuple(r) for r in c["routes"]),
            tuple(float(v) for v in c["origin_loop_cost"]) if "origin_loop_cost" in c else None,
        )
    return GameSpec(spaces, costs)


def load_game_spec(file: Any) -> GameSpec:
    """Load a game from a JSON byte/text stream or a filesystem path."""
    if isinstance(file, (str, bytes)) or hasattr(file, "__fspath__"):
        with open(file, "rb") as fh:
            raw = fh.read()
    else:
        raw = file.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as err:
        raise GameSpecError(f"invalid JSON: {err}") from None
    return game_from_dict(doc)


def _space_to_dict(s: ActionSpace) -> dict:
    if isinstance(s, Finite):
        return {"kind": "finite", "points": [list(p) for p in s.points]}
    if isinstance(s, Box):
        d = {"kind": "box", "lo": list(s.lo), "hi": list(s.hi)}
        if s.open_lo:
            d["open_lo"] = True
        return d
    return {"kind": "all"}


def game_to_dict(g: GameSpec) -> dict:
    doc: dict[str, Any] = {"players": g.players, "dims": list(g.dims),
                           "spaces": [_space_to_dict(s) for s in g.spaces]}
    c = g.costs
    if isinstance(c, ExprCosts):
        doc["params"] = dict(c.params)
        doc["costs"] = {"kind": "expr", "exprs": [ex.to_text(e) for e in c.exprs]}
    elif isinstance(c, TableCosts):
        doc["costs"] = {"kind": "table", "tables": [t.tolist() for t in c.tables]}
    else:
        doc["costs"] = {"kind": "congestion",
                        "edges": [{"id": k, "cost": list(v)} for k, v in c.edges.items()],
                        "routes": [list(r) for r in c.routes]}
        if c.origin_loop_cost is not None:
            doc["costs"]["origin_loop_cost"] = list(c.origin_loop_cost)
    return doc


def dump_game_spec(g: GameSpec) -> str:
    return json.dumps(game_to_dict(g), indent=2)


# --------------------------------------------------------------------------
# sampling

def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(stream)])


def sample_strategies(g: GameSpec, count: int, seed: int = 0, radius: float = 10.0) -> list[Profile]:
    """Deterministic sample of joint strategies.

    Finite games are enumerated when ``|K| <= count``.  Continuous games get
    the zero profile (when feasible), the box midpoint, box corners (at most
    1024) and then uniform draws; open lower faces keep a small margin.
    """
    if count < 1:
        return []
    rng = _rng(seed)
    if g.is_finite:
        total = g.n_profiles
        if total <= count:
            return list(g.profiles())
        picks = np.sort(rng.choice(total, size=count, replace=False))
        return [g.profile_at(np.unravel_index(int(p), g.shape)) for p in picks]

    out: list[Profile] = []
    seen: set[Profile] = set()

    def push(x: Profile) -> None:
        k = tuple(_key(a) for a in x)
        if k not in seen and len(out) < count:
            seen.add(k)
            out.append(x)

    continuous = all(not s.is_finite for s in g.spaces)
    if continuous:
        bounds = [s.sampling_bounds(radius) for s in g.spaces]
        if g.contains_zero:
            push(g.zero)
        push(tuple(tuple(float(v) for v in (lo + hi) / 2) for lo, hi in bounds))
        flat = [(lo[k], hi[k]) for lo, hi in bounds for k in range(len(lo))]
        for corner in itertools.islice(itertools.product(*flat), CORNER_CAP):
            it = iter(corner)
            push(tuple(tuple(float(next(it)) for _ in range(s.dim)) for s in g.spaces))
    while len(out) < count:
        x = []
        for s in g.spaces:
            if s.is_finite:
                x.append(s.points[int(rng.integers(s.size))])
            else:
                lo, hi = s.sampling_bounds(radius)
                x.append(tuple(float(v) for v in rng.uniform(lo, hi)))
        push(tuple(x))
    return out


def own_actions(g: GameSpec, i: int, samples: Sequence[Profile], limit: int = 16) -> list[Action]:
    """Candidate actions for player ``i``: all points (finite) or distinct sampled ones."""
    s = g.spaces[i]
    if s.is_finite and s.size <= 4 * limit:
        return list(s.points)
    seen: dict[Action, Action] = {}
    for x in samples:
        seen.setdefault(_key(x[i]), x[i])
        if len(seen) >= limit:
            break
    return list(seen.values())


def replace(x: Profile, updates: Mapping[int, Action]) -> Profile:
    return tuple(updates.get(p, a) for p, a in enumerate(x))


def detect_abnormal(g: GameSpec, samples: int = 500, seed: int = 0, tol: float = 1e-9) -> TestReport:
    """Search for a player whose cost never varies with its own action."""
    xs = sample_strategies(g, samples, seed)
    exhaustive = g.is_finite and len(xs) == g.n_profiles
    per_player = []
    checks = 0
    for i in range(g.players):
        acts = own_actions(g, i, xs)
        if g.spaces[i].is_finite and len(acts) < g.spaces[i].size:
            exhaustive = False
        contexts: dict[tuple, Profile] = {}
        for x in xs:
            contexts.setdefault(tuple(_key(a) for p, a in enumerate(x) if p != i), x)
        spread_max, witness, varies = 0.0, None, False
        for x in contexts.values():
            vals = [g.cost(i, replace(x, {i: a})) for a in acts]
            checks += len(vals)
            lo, hi = int(np.argmin(vals)), int(np.argmax(vals))
            spread = vals[hi] - vals[lo]
            if spread > band(tol, vals[lo], vals[hi]):
                varies = True
            if witness is None or spread > spread_max:
                spread_max = spread
                witness = {"player": i, "x_i": list(acts[lo]), "x_i_prime": list(acts[hi]),
                           "x": [list(a) for a in x], "spread": spread}
        worst = (spread_max, witness if varies else None)
        per_player.append(worst)
    flat = [i for i, (_, w) in enumerate(per_player) if w is None]
    if flat:
        i = flat[0]
        return TestReport("abnormal", "abnormal", residual_max=max(per_player[i][0], 0.0),
                          witness={"player": i}, samples_used=checks, exhaustive=exhaustive)
    return TestReport("not abnormal", "abnormal", residual_max=min(s for s, _ in per_player),
                      witness={"players": [w for _, w in per_player]}, samples_used=checks,
                      exhaustive=exhaustive)


def unilateral_deviations(g: GameSpec, budget: int, seed: int = 0, radius: float = 10.0):
    """(player, x, x_i') triples: every deviation of a small finite game, else a seeded sample.

    Returns ``(iterator, exhaustive)``.
    """
    if g.is_finite:
        total = sum(g.n_profiles * (s.size - 1) for s in g.spaces)
        if total <= budget:
            def every():
                for x in g.profiles():
                    for i, s in enumerate(g.spaces):
                        for a in s.points:
                            if a != x[i]:
                                yield i, x, a
            return every(), True
        rng = np.random.default_rng([int(seed), 4])
        xs = sample_strategies(g, budget, seed)

        def drawn():
            for k, x in enumerate(xs):
                i = k % g.players
                s = g.spaces[i]
                yield i, x, s.points[int(rng.integers(s.size))]
        return drawn(), False
    xs = sample_strategies(g, budget, seed, radius)
    alt = sample_strategies(g, budget + 1, seed + 1, radius)[::-1]

    def sampled():
        for k, x in enumerate(xs):
            for i in range(g.players):
                yield i, x, alt[(k + i) % len(alt)][i]
    return sampled(), False



# --------------------------------------------------------------------------
# congestion expansion

LOOP_EDGE = "~loop"


def augmentation_constant(net: CongestionNetwork, n_players: int) -> float:
    """Cost ``M`` of artificial edges: larger than any real route cost a player can face."""
    longest = max(len(r) for r in net.routes)
    return 1.0 + max(n_players, longest) * net.max_abs_cost()


def congestion_routing(net: CongestionNetwork, n_players: int, augment: bool):
    """Actions, route per action, and edge cost tables of the (augmented) network.

    Augmented action ``-j`` is a private artificial edge of cost ``M``; action
    ``0`` is the origin self-loop with cost ``max(C_0(k), M)``.
    """
    m = net.n_routes
    edges = {k: tuple(v) for k, v in net.edges.items()}
    route_of: dict[int, tuple[str, ...]] = {r + 1: tuple(net.routes[r]) for r in range(m)}
    if not augment:
        return list(range(1, m + 1)), route_of, edges
    big = augmentation_constant(net, n_players)
    loop = net.origin_loop_cost or (0.0,) * n_players
    edges[LOOP_EDGE] = tuple(max(float(c), big) for c in loop)
    route_of[0] = (LOOP_EDGE,)
    for j in range(1, m + 1):
        edges[f"~art{j}"] = (big,) * n_players
        route_of[-j] = (f"~art{j}",)
    return list(range(-m, m + 1)), route_of, edges


def expand_congestion_game(g: GameSpec, augment: bool = False) -> GameSpec:
    """Tabulate a congestion game as a finite game over route numbers."""
    net = g.costs
    if not isinstance(net, CongestionNetwork):
        raise GameSpecError("expand_congestion_game needs congestion costs")
    if net.n_routes == 0:
        raise GameSpecError("no routes")
    n = g.players
    actions, route_of, edges = congestion_routing(net, n, augment)
    shape = (len(actions),) * n
    tables = [np.empty(shape) for _ in range(n)]
    for idx in itertools.product(range(len(actions)), repeat=n):
        routes = [route_of[actions[k]] for k in idx]
        v = _loads(routes)
        for i in range(n):
            tables[i][idx] = sum(edges[e][v[e] - 1] for e in routes[i])
    space = Finite(tuple((float(a),) for a in actions))
    return GameSpec([space] * n, TableCosts(tuple(tables)))
