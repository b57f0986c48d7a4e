"""Ordinal and generalized-ordinal potential checks.

Strict inequalities are tested with a dead-band: a compared quantity
within ``tol * (1 + scale)`` of zero is neither counted as negative nor
as non-negative, and the comparison is abstained (and counted) whenever
that ambiguity could flip the outcome.  Fail witnesses therefore always
have both quantities clearly outside the band.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from scipy import optimize

from . import expr as ex
from .game import (ExprCosts, GameSpec, Profile, sample_strategies, unilateral_deviations)
from .paths import _set
from .report import FAIL, PASS, TestReport, Tracker, band, inapplicable

__all__ = [
    "ConvexityCertificate", "OrdinalCandidate", "check_assumption1", "check_cross_partial_signs",
    "verify_ordinal_potential", "check_strong_convexity_certificate",
    "check_concave_subgradient_certificate", "estimate_constants",
]

DISCREPANCY_NOTE = ("the concave-subgradient sufficient conditions are stated for a generalized "
                    "ordinal potential while their argument concludes 'ordinal'; only the "
                    "generalized property is claimed here")


@dataclass(frozen=True)
class ConvexityCertificate:
    """Per-player strong-convexity constants and a Lipschitz constant for grad(phi)."""

    etas: tuple[float, ...]
    lipschitz: float
    source: str = "user-declared"

    def __post_init__(self):
        object.__setattr__(self, "etas", tuple(float(v) for v in self.etas))
        vals = self.etas + (float(self.lipschitz),)
        if not all(math.isfinite(v) and v >= 0 for v in vals):
            raise ValueError("certificate constants must be finite and >= 0")


@dataclass(frozen=True)
class OrdinalCandidate:
    """Candidate phi with optional per-player subgradient blocks and scalings alpha_i."""

    phi: ex.Expr
    subgradients: tuple[tuple[ex.Expr, ...], ...] | None = None
    alphas: tuple[ex.Expr, ...] | None = None

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], dims: Sequence[int]) -> OrdinalCandidate:
        """Parse ``{"phi": text, "subgradients": [text per (i,k)] | null, "alphas": [text per i] | null}``."""
        phi = ex.parse_expression(doc["phi"], dims)
        subs = None
        if doc.get("subgradients") is not None:
            flat = [ex.parse_expression(s, dims) for s in doc["subgradients"]]
            if len(flat) != sum(dims):
                raise ValueError(f"expected {sum(dims)} subgradient entries, got {len(flat)}")
            it = iter(flat)
            subs = tuple(tuple(next(it) for _ in range(d)) for d in dims)
        alphas = None
        if doc.get("alphas") is not None:
            alphas = tuple(ex.parse_expression(s, dims) for s in doc["alphas"])
            if len(alphas) != len(dims):
                raise ValueError(f"expected {len(dims)} alpha entries, got {len(alphas)}")
        return cls(phi, subs, alphas)

    def to_dict(self) -> dict:
        return {
            "phi": ex.to_text(self.phi),
            "subgradients": None if self.subgradients is None
            else [ex.to_text(s) for blk in self.subgradients for s in blk],
            "alphas": None if self.alphas is None else [ex.to_text(a) for a in self.alphas],
        }


# --------------------------------------------------------------------------
# helpers

def _sign(v: float, width: float) -> int:
    """-1 / +1 outside the dead-band, 0 inside it."""
    if v < -width:
        return -1
    if v > width:
        return 1
    return 0


def _compile_all(exprs: Sequence[ex.Expr], env) -> list[Callable]:
    return [ex.compile_expression(e, env) for e in exprs]


def _block(g: GameSpec, x: Profile, i: int) -> np.ndarray:
    return np.asarray(x[i], dtype=float)


def _dot(fns: Sequence[Callable], x: Profile, d: np.ndarray) -> float:
    return float(sum(fn(x) * dk for fn, dk in zip(fns, d)))


def _pairs(g: GameSpec, budget: int, seed: int, radius: float):
    """(x, y) joint-profile pairs for sampled first-order inequalities."""
    xs = sample_strategies(g, budget, seed, radius)
    ys = sample_strategies(g, budget + 1, seed + 1, radius)[::-1]
    return [(x, ys[k % len(ys)]) for k, x in enumerate(xs)]


_EVAL_ERRORS = (ArithmeticError, ValueError)


# --------------------------------------------------------------------------
# joint-move sign agreement and cross-partial signs

def _sampled_pair_moves(g: GameSpec, pairs, budget: int, seed: int, radius: float):
    if not pairs:
        return
    xs = sample_strategies(g, budget, seed, radius)
    ys = sample_strategies(g, budget + 1, seed + 1, radius)[::-1]
    for k, x in enumerate(xs):
        i, j = pairs[k % len(pairs)]
        y = ys[k % len(ys)]
        yield i, j, x, y[i], y[j]


def check_assumption1(g: GameSpec, budget: int = 500, seed: int = 0, tol: float = 1e-9,
                      radius: float = 10.0) -> TestReport:
    """f_i(x_i+y_i, x_j+y_j, x_rest) - f_i(x) < 0  iff  the same for f_j, all i < j.

    On pass every f_i is an ordinal potential.
    """
    pairs = list(itertools.combinations(range(g.players), 2))
    t = Tracker()
    exhaustive = True
    if g.is_finite and sum(g.n_profiles * g.spaces[i].size * g.spaces[j].size for i, j in pairs) <= budget:
        items = ((i, j, x, a, b) for i, j in pairs for x in g.profiles()
                 for a in g.spaces[i].points for b in g.spaces[j].points)
    else:
        exhaustive = not pairs
        items = _sampled_pair_moves(g, pairs, budget, seed, radius)
    for i, j, x, a, b in items:
        x2 = _set(_set(x, i, a), j, b)
        try:
            fi0, fi1, fj0, fj1 = g.cost(i, x), g.cost(i, x2), g.cost(j, x), g.cost(j, x2)
        except _EVAL_ERRORS:
            t.abstentions += 1
            continue
        u, v = fi1 - fi0, fj1 - fj0
        su, sv = _sign(u, band(tol, fi0, fi1)), _sign(v, band(tol, fj0, fj1))
        neg_u, neg_v = su < 0, sv < 0
        if neg_u == neg_v:
            t.see(0.0, None, True)
            continue
        if su == 0 or sv == 0:
            t.abstentions += 1
            continue
        res = min(abs(u), abs(v))
        t.see(res, lambda i=i, j=j, x=x, a=a, b=b, u=u, v=v: {
            "i": i, "j": j, "x": x, "x_i_prime": a, "x_j_prime": b, "df_i": u, "df_j": v}, False)
    notes = ["every f_i is an ordinal potential function"] if not t.failed else []
    return t.report("assumption1", exhaustive, notes=notes)


def check_cross_partial_signs(g: GameSpec, budget: int = 500, seed: int = 0, tol: float = 1e-9,
                              mode: str = "global", radius: float = 10.0) -> TestReport:
    """Sign agreement of d2 f_i/dx_j dx_i and d2 f_j/dx_i dx_j (one-dimensional actions).

    ``critical`` mode instead checks the product of the two is >= -tol at
    located points where every own-gradient vanishes.
    """
    method = f"crosssign-{mode}"
    if mode not in ("global", "critical"):
        raise ValueError(f"unknown mode {mode!r}")
    if not isinstance(g.costs, ExprCosts):
        return inapplicable(method, "needs expression costs")
    if any(d != 1 for d in g.dims):
        return inapplicable(method, "needs one-dimensional action spaces")
    env = g.params
    f = g.costs.exprs
    blocks = []
    for i, j in itertools.combinations(range(g.players), 2):
        a = ex.differentiate_expression(ex.differentiate_expression(f[i], i + 1, 1), j + 1, 1)
        b = ex.differentiate_expression(ex.differentiate_expression(f[j], j + 1, 1), i + 1, 1)
        blocks.append((i, j, ex.compile_expression(a, env), ex.compile_expression(b, env)))
    xs = sample_strategies(g, budget, seed, radius)
    t = Tracker()
    if mode == "global":
        for x in xs:
            for i, j, fa, fb in blocks:
                try:
                    u, v = fa(x), fb(x)
                except _EVAL_ERRORS:
                    t.abstentions += 1
                    continue
                su, sv = _sign(u, tol), _sign(v, tol)
                if (su < 0) == (sv < 0):
                    t.see(0.0, None, True)
                elif su == 0 or sv == 0:
                    t.abstentions += 1
                else:
                    t.see(min(abs(u), abs(v)), lambda i=i, j=j, x=x, u=u, v=v: {
                        "i": i, "j": j, "x": x, "d2f_i": u, "d2f_j": v}, False)
        return t.report(method, False)

    crit, notes = _critical_points(g, xs, tol, seed)
    for x in crit:
        for i, j, fa, fb in blocks:
            try:
                prod = fa(x) * fb(x)
            except _EVAL_ERRORS:
                t.abstentions += 1
                continue
            t.see(max(0.0, -prod), lambda i=i, j=j, x=x, prod=prod: {
                "i": i, "j": j, "x": x, "product": prod}, prod >= -tol)
    if not crit:
        notes.append("no critical points located; vacuous pass")
    return t.report(method, False, notes=notes)


def _critical_points(g: GameSpec, xs: Sequence[Profile], tol: float, seed: int,
                     starts: int = 32) -> tuple[list[Profile], list[str]]:
    """Sampled and root-refined points where every own partial vanishes within tol."""
    env = g.params
    own = [ex.compile_expression(ex.differentiate_expression(f, i + 1, 1), env)
           for i, f in enumerate(g.costs.exprs)]

    def residual(v):
        x = tuple((float(t),) for t in v)
        return [fn(x) for fn in own]

    found: dict[tuple, Profile] = {}
    for x in xs:
        try:
            if max(abs(r) for r in residual([a[0] for a in x])) <= tol:
                found[tuple(round(a[0], 9) for a in x)] = x
        except _EVAL_ERRORS:
            pass
    for x in xs[:starts]:
        try:
            sol = optimize.root(residual, [a[0] for a in x], tol=1e-14)
        except _EVAL_ERRORS:
            continue
        cand = tuple((float(v),) for v in sol.x)
        try:
            ok = g.contains(cand) and max(abs(r) for r in residual(sol.x)) <= tol
        except _EVAL_ERRORS:
            ok = False
        if ok:
            found.setdefault(tuple(round(a[0], 9) for a in cand), cand)
    notes = [f"{len(found)} critical point(s) located"]
    return [found[k] for k in sorted(found)], notes


# --------------------------------------------------------------------------
# ordinal / generalized ordinal verification

def verify_ordinal_potential(g: GameSpec, phi: Callable, budget: int = 500, seed: int = 0,
                             tol: float = 1e-9, mode: str = "ordinal", radius: float = 10.0) -> TestReport:
    """df_i < 0 iff (ordinal) / implies (generalized) dphi < 0 over unilateral deviations."""
    if mode not in ("ordinal", "generalized"):
        raise ValueError(f"unknown mode {mode!r}")
    items, exhaustive = unilateral_deviations(g, budget, seed, radius)
    t = Tracker()
    for i, x, a in items:
        x2 = _set(x, i, a)
        try:
            f0, f1, p0, p1 = g.cost(i, x), g.cost(i, x2), phi(x), phi(x2)
        except _EVAL_ERRORS:
            t.abstentions += 1
            continue
        df, dp = f1 - f0, p1 - p0
        sf, sp = _sign(df, band(tol, f0, f1)), _sign(dp, band(tol, p0, p1))
        if sf > 0 and mode == "generalized":
            t.see(0.0, None, True)
            continue
        if sf == 0:
            t.abstentions += 1
            continue
        if sp == 0:
            t.abstentions += 1
            continue
        ok = (sf < 0) == (sp < 0)
        t.see(0.0 if ok else min(abs(df), abs(dp)), lambda i=i, x=x, a=a, df=df, dp=dp: {
            "player": i, "x": x, "x_i_prime": a, "df": df, "dphi": dp}, ok)
    return t.report(mode, exhaustive)


# --------------------------------------------------------------------------
# first-order certificates

class _Grads:
    """Compiled own-block gradients of f_i and full gradient of phi."""

    def __init__(self, g: GameSpec, phi: ex.Expr):
        env = g.params
        self.g = g
        self.own = [_compile_all(ex.gradient(f, i + 1, g.dims[i]), env)
                    for i, f in enumerate(g.costs.exprs)]
        self.phi = ex.compile_expression(phi, env)
        self.dphi = [_compile_all(ex.gradient(phi, i + 1, g.dims[i]), env) for i in range(g.players)]

    def phi_grad(self, x: Profile) -> np.ndarray:
        return np.array([fn(x) for blk in self.dphi for fn in blk])


def _sub_verdict(t: Tracker) -> str:
    return FAIL if t.failed else PASS


def _combine(method: str, subs: dict[str, Tracker], extra: dict[str, Any], notes: list[str],
             scalar_fail: dict | None = None) -> TestReport:
    reports = {k: v.report(k, False) for k, v in subs.items()}
    verdicts = {k: r.verdict for k, r in reports.items()}
    failed = [k for k, r in reports.items() if r.verdict == FAIL]
    witness, residual = None, max((r.residual_max for r in reports.values()), default=0.0)
    if scalar_fail is not None:
        failed.insert(0, "condition_b")
    if failed:
        first = failed[0]
        if first == "condition_b":
            witness, residual = scalar_fail, scalar_fail["excess"]
        else:
            witness = {"condition": first, **reports[first].witness}
            residual = reports[first].residual_max
    details = {"sub_verdicts": verdicts, **extra}
    rep = TestReport(FAIL if failed else PASS, method, residual, witness,
                     sum(r.samples_used for r in reports.values()), False,
                     sum(r.abstentions for r in reports.values()), notes=notes, details=details)
    return rep


def check_strong_convexity_certificate(g: GameSpec, cand: OrdinalCandidate, cert: ConvexityCertificate,
                                       budget: int = 500, seed: int = 0, tol: float = 1e-9,
                                       radius: float = 10.0) -> TestReport:
    """Strongly convex costs plus an L-smooth phi with L <= min eta_i.

    Sub-checks: (i) strong convexity of each f_i(., x_-i) with eta_i;
    (ii) the L-smoothness bounds for phi; (iii) the gradient-domination
    condition at descent directions of f_i and the scalar L <= min eta.
    """
    method = "theorem10"
    if not isinstance(g.costs, ExprCosts):
        return inapplicable(method, "needs expression costs")
    if not g.is_convex:
        return inapplicable(method, "needs convex (box or unbounded) action spaces")
    if len(cert.etas) != g.players:
        raise ValueError(f"need {g.players} eta values, got {len(cert.etas)}")
    if any(e <= 0 for e in cert.etas):
        return inapplicable(method, "every eta_i must be > 0 (only strict convexity was claimed)")
    gr = _Grads(g, cand.phi)
    L = float(cert.lipschitz)
    sc, lip, cond_a = Tracker(), Tracker(), Tracker()
    for x, y in _pairs(g, budget, seed, radius):
        for i in range(g.players):
            d = _block(g, y, i) - _block(g, x, i)
            if not np.any(d):
                continue
            xi = _set(x, i, y[i])
            try:
                f0, f1 = g.cost(i, x), g.cost(i, xi)
                gf = _dot(gr.own[i], x, d)
                gp = _dot(gr.dphi[i], x, d)
            except _EVAL_ERRORS:
                sc.abstentions += 1
                continue
            rhs = f0 + gf + 0.5 * cert.etas[i] * float(d @ d)
            gap = rhs - f1
            sc.see(max(gap, 0.0), lambda i=i, x=x, y=y, f1=f1, rhs=rhs: {
                "player": i, "x": x, "y_i": y[i], "f(y)": f1, "bound": rhs}, gap <= band(tol, f1, rhs))
            if gf < -band(tol, f0, f1):
                viol = gp - gf
                cond_a.see(max(viol, 0.0), lambda i=i, x=x, y=y, gp=gp, gf=gf: {
                    "player": i, "x": x, "y_i": y[i], "<grad phi, d>": gp, "<grad f, d>": gf},
                    viol <= band(tol, gp, gf))
        try:
            p0, p1 = gr.phi(x), gr.phi(y)
            g0, g1 = gr.phi_grad(x), gr.phi_grad(y)
        except _EVAL_ERRORS:
            lip.abstentions += 1
            continue
        d = np.concatenate([_block(g, y, i) - _block(g, x, i) for i in range(g.players)])
        nd = float(np.linalg.norm(d))
        if nd == 0:
            continue
        bound = p0 + float(g0 @ d) + 0.5 * L * nd * nd
        gap = p1 - bound
        lip.see(max(gap, 0.0), lambda x=x, y=y, p1=p1, bound=bound: {
            "x": x, "y": y, "phi(y)": p1, "bound": bound, "kind": "descent-lemma"},
            gap <= band(tol, p1, bound))
        gd = float(np.linalg.norm(g1 - g0))
        gap = gd - L * nd
        lip.see(max(gap, 0.0), lambda x=x, y=y, gd=gd, nd=nd: {
            "x": x, "y": y, "|grad diff|": gd, "L|x-y|": L * nd, "kind": "gradient-difference"},
            gap <= band(tol, gd, L * nd))
    min_eta = min(cert.etas)
    scalar = None
    if L > min_eta + band(tol, L, min_eta):
        scalar = {"condition": "condition_b", "L": L, "min_eta": min_eta, "excess": L - min_eta}
    notes = ["phi is a generalized ordinal potential"] if not (sc.failed or lip.failed or cond_a.failed or scalar) else []
    return _combine(method, {"strong_convexity": sc, "lipschitz": lip, "condition_a": cond_a},
                    {"L": L, "min_eta": min_eta, "condition_b": FAIL if scalar else PASS,
                     "certificate_source": cert.source}, notes, scalar)


def check_concave_subgradient_certificate(g: GameSpec, cand: OrdinalCandidate, budget: int = 500,
                                          seed: int = 0, tol: float = 1e-9,
                                          radius: float = 10.0) -> TestReport:
    """Strictly convex costs plus a per-block concave phi whose subgradients dominate
    the (optionally alpha-scaled) cost gradients along descent directions.

    Without ``alphas`` the scaling is 1.  Missing subgradients are filled in
    with the symbolic gradient of phi, valid for differentiable concave phi.
    """
    method = "theorem12" if cand.alphas is not None else "theorem11"
    if not isinstance(g.costs, ExprCosts):
        return inapplicable(method, "needs expression costs")
    if not g.is_convex:
        return inapplicable(method, "needs convex (box or unbounded) action spaces")
    env = g.params
    gr = _Grads(g, cand.phi)
    notes = [DISCREPANCY_NOTE]
    if cand.subgradients is None:
        subs = gr.dphi
        notes.append("subgradients auto-filled with grad(phi)")
    else:
        if [len(b) for b in cand.subgradients] != list(g.dims):
            raise ValueError("subgradient blocks must match the action dimensions")
        subs = [_compile_all(b, env) for b in cand.subgradients]
    alphas = None
    if cand.alphas is not None:
        if len(cand.alphas) != g.players:
            raise ValueError(f"need {g.players} alpha expressions")
        alphas = _compile_all(cand.alphas, env)
    strict, conc, pos, dom = Tracker(), Tracker(), Tracker(), Tracker()
    for x, y in _pairs(g, budget, seed, radius):
        for i in range(g.players):
            d = _block(g, y, i) - _block(g, x, i)
            if not np.any(d):
                continue
            xi = _set(x, i, y[i])
            try:
                f0, f1 = g.cost(i, x), g.cost(i, xi)
                gf = _dot(gr.own[i], x, d)
                p0, p1 = gr.phi(x), gr.phi(xi)
                sd = _dot(subs[i], x, d)
                al = alphas[i](x) if alphas is not None else 1.0
            except _EVAL_ERRORS:
                strict.abstentions += 1
                continue
            # (i) strict convexity: f(y) > f(x) + <grad, d>
            lin = f0 + gf
            s = _sign(f1 - lin, band(tol, f1, lin))
            if s == 0:
                strict.abstentions += 1
            else:
                strict.see(max(lin - f1, 0.0), lambda i=i, x=x, y=y, f1=f1, lin=lin: {
                    "player": i, "x": x, "y_i": y[i], "f(y)": f1, "linearization": lin}, s > 0)
            # (ii) concavity of phi(., x_-i) with s_i as supergradient
            bound = p0 + sd
            gap = p1 - bound
            conc.see(max(gap, 0.0), lambda i=i, x=x, y=y, p1=p1, bound=bound: {
                "player": i, "x": x, "y_i": y[i], "phi(y)": p1, "bound": bound},
                gap <= band(tol, p1, bound))
            # (iii) alpha_i(x) > tol
            if alphas is not None:
                pos.see(max(tol - al, 0.0), lambda i=i, x=x, al=al: {"player": i, "x": x, "alpha": al},
                        al > tol)
            # (iv) <s_i, d> <= alpha_i <grad f_i, d> where <grad f_i, d> < 0
            if gf < -band(tol, f0, f1):
                rhs = al * gf
                viol = sd - rhs
                dom.see(max(viol, 0.0), lambda i=i, x=x, y=y, sd=sd, rhs=rhs: {
                    "player": i, "x": x, "y_i": y[i], "<s_i, d>": sd, "alpha <grad f_i, d>": rhs},
                    viol <= band(tol, sd, rhs))
    subs_t = {"strict_convexity": strict, "concavity": conc}
    if alphas is not None:
        subs_t["alpha_positive"] = pos
    subs_t["domination"] = dom
    if not any(t.failed for t in subs_t.values()):
        notes.insert(0, "phi is a generalized ordinal potential")
    return _combine(method, subs_t, {}, notes)


def estimate_constants(g: GameSpec, phi: ex.Expr, budget: int = 500, seed: int = 0,
                       radius: float = 10.0) -> tuple[ConvexityCertificate, dict]:
    """Sampled eta_i (min curvature ratio of f_i) and L (max gradient ratio of phi)."""
    gr = _Grads(g, phi)
    etas = [math.inf] * g.players
    eta_at: list[Any] = [None] * g.players
    L, L_at = 0.0, None
    for x, y in _pairs(g, budget, seed, radius):
        for i in range(g.players):
            d = _block(g, y, i) - _block(g, x, i)
            dd = float(d @ d)
            if dd == 0:
                continue
            try:
                val = 2 * (g.cost(i, _set(x, i, y[i])) - g.cost(i, x) - _dot(gr.own[i], x, d)) / dd
            except _EVAL_ERRORS:
                continue
            if val < etas[i]:
                etas[i], eta_at[i] = val, {"x": x, "y_i": y[i]}
        try:
            d = np.concatenate([_block(g, y, i) - _block(g, x, i) for i in range(g.players)])
            nd = float(np.linalg.norm(d))
            if nd == 0:
                continue
            ratio = float(np.linalg.norm(gr.phi_grad(y) - gr.phi_grad(x))) / nd
        except _EVAL_ERRORS:
            continue
        if ratio > L:
            L, L_at = ratio, {"x": x, "y": y}
    etas = [max(e, 0.0) if math.isfinite(e) else 0.0 for e in etas]
    return (ConvexityCertificate(tuple(etas), L, "sampled-estimate"),
            {"eta_pairs": eta_at, "lipschitz_pair": L_at})
