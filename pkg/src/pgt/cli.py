"""``pgt`` command line: potentiality checks, constructions and equilibria on JSON game specs."""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Sequence

from .construct import (ConstructionError, construct_from_pairs, construct_from_reverse_path,
                        construct_rosenthal, export_potential, potential_from_dict, table_potential,
                        verify_exact_potential, verify_gradient_match)
from .criteria import (OracleSizeError, oracle_finite_potential, symmetric_gate, test_cross_hessian,
                       test_four_cycles, test_hp_decomposition, test_pairwise)
from .equilibrium import better_response_dynamics, grid_game, minimize_potential, verify_nash
from .expr import ExpressionError
from .game import CongestionNetwork, GameSpec, GameSpecError, detect_abnormal, expand_congestion_game, load_game_spec
from .ordinal import (ConvexityCertificate, OrdinalCandidate, check_assumption1,
                      check_concave_subgradient_certificate, check_cross_partial_signs,
                      check_strong_convexity_certificate, verify_ordinal_potential)
from .report import FAIL, INAPPLICABLE, PASS, inapplicable, jsonable

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INAPPLICABLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _exit_code(verdict: str) -> int:
    if verdict == PASS:
        return EXIT_PASS
    if verdict == INAPPLICABLE:
        return EXIT_INAPPLICABLE
    return EXIT_FAIL


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from err
    except json.JSONDecodeError as err:
        raise UsageError(f"{path}: invalid JSON ({err})") from err


def _profile_arg(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise UsageError(f"profile must be JSON such as [[0],[1]]: {err}") from err


def _common(args) -> dict:
    return {"budget": args.samples, "seed": args.seed, "tol": args.tol, "radius": args.radius}


# --------------------------------------------------------------------------
# subcommands; each returns (payload dict, exit code)

def _cmd_check(g: GameSpec, args) -> tuple[dict, int]:
    kw = _common(args)
    if args.method == "oracle":
        if not g.is_finite:
            rep = inapplicable("oracle", "the oracle needs finite action spaces")
        else:
            rep, table = oracle_finite_potential(g, args.tol)
            if table is not None:
                rep.details["potential"] = table.tolist()
        return rep.to_dict(), _exit_code(rep.verdict)
    fn = {"cycle4": test_four_cycles, "pairwise": test_pairwise, "hp": test_hp_decomposition,
          "hessian": test_cross_hessian}[args.method]
    rep = fn(g, **kw)
    return rep.to_dict(), _exit_code(rep.verdict)


def _construct(g: GameSpec, method: str, augmented: bool):
    if method == "rosenthal":
        if not isinstance(g.costs, CongestionNetwork):
            raise ConstructionError("rosenthal needs a congestion game")
        return construct_rosenthal(g, augmented), expand_congestion_game(g, augmented)
    if method == "theorem5":
        return construct_from_reverse_path(g), g
    return construct_from_pairs(g), g


def _cmd_construct(g: GameSpec, args) -> tuple[dict, int]:
    try:
        phi, host = _construct(g, args.method, args.augmented)
    except ConstructionError as err:
        return inapplicable(args.method, str(err)).to_dict(), EXIT_INAPPLICABLE
    payload: dict[str, Any] = {"method": args.method, "verdict": "constructed",
                               "potential": export_potential(phi)}
    code = EXIT_PASS
    if args.verify:
        rep = verify_exact_potential(host, phi, **_common(args))
        payload["verification"] = rep.to_dict()
        payload["verdict"] = rep.label
        code = _exit_code(rep.verdict)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(jsonable(payload["potential"]), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return payload, code


def _cmd_verify(g: GameSpec, args) -> tuple[dict, int]:
    doc = _read_json(args.potential)
    if not isinstance(doc, dict):
        raise UsageError("potential file must hold a JSON object")
    phi = potential_from_dict(doc, g)
    host = g
    if isinstance(g.costs, CongestionNetwork) and phi.game is not None:
        # a tabulated congestion potential lives on the (possibly augmented) expanded game
        for augmented in (False, True):
            big = expand_congestion_game(g, augmented)
            if big.spaces == phi.game.spaces:
                host = big
                phi = table_potential(big, phi.table, phi.method, phi.normalization)
                break
    kw = _common(args)
    if args.mode == "exact":
        rep = verify_exact_potential(host, phi, **kw)
    elif args.mode == "gradient":
        rep = verify_gradient_match(host, phi, **kw)
    else:
        rep = verify_ordinal_potential(host, phi, mode=args.mode, **kw)
    return rep.to_dict(), _exit_code(rep.verdict)


def _candidate(g: GameSpec, path: str | None) -> OrdinalCandidate:
    if path is None:
        raise UsageError("this check needs --candidate FILE")
    doc = _read_json(path)
    if not isinstance(doc, dict) or "phi" not in doc:
        raise UsageError("candidate file must be an object with a 'phi' entry")
    try:
        return OrdinalCandidate.from_dict(doc, g.dims)
    except ValueError as err:
        if isinstance(err, ExpressionError):
            raise
        raise UsageError(str(err)) from err


def _cmd_ordinal(g: GameSpec, args) -> tuple[dict, int]:
    kw = _common(args)
    if args.check == "assumption1":
        rep = check_assumption1(g, **kw)
    elif args.check == "crosssign":
        rep = check_cross_partial_signs(g, mode=args.crosssign_mode, **kw)
    elif args.check == "theorem10":
        cand = _candidate(g, args.candidate)
        if args.eta is None or args.lipschitz is None:
            raise UsageError("theorem10 needs --eta and --lipschitz")
        etas = args.eta if len(args.eta) == g.players else (
            args.eta * g.players if len(args.eta) == 1 else None)
        if etas is None:
            raise UsageError(f"--eta takes 1 or {g.players} values")
        try:
            cert = ConvexityCertificate(tuple(etas), args.lipschitz)
        except ValueError as err:
            raise UsageError(str(err)) from err
        rep = check_strong_convexity_certificate(g, cand, cert, **kw)
    else:
        cand = _candidate(g, args.candidate)
        if args.check == "theorem11":
            cand = OrdinalCandidate(cand.phi, cand.subgradients, None)
        elif cand.alphas is None:
            raise UsageError("theorem12 needs 'alphas' in the candidate file")
        rep = check_concave_subgradient_certificate(g, cand, **kw)
    return rep.to_dict(), _exit_code(rep.verdict)


def _equilibrium_candidate(g: GameSpec, args):
    """Potential minimizer when a potential is available, otherwise a plain enumeration."""
    if g.is_finite:
        _, table = oracle_finite_potential(g, args.tol)
        if table is not None:
            return minimize_potential(g, table_potential(g, table)), "oracle potential minimizer"
        for x in g.profiles():
            if verify_nash(g, x, tol=args.tol).passed:
                return (x, None), "first pure equilibrium by enumeration"
        return (None, None), "no pure equilibrium exists"
    if symmetric_gate(g) is not None:
        raise UsageError("continuous game outside the construction gate: pass --profile")
    grid = grid_game(g, args.resolution, args.radius)
    return minimize_potential(grid, construct_from_reverse_path(g)), (
        f"potential minimizer on a {args.resolution}-point grid (approximate)")


def _cmd_nash(g: GameSpec, args) -> tuple[dict, int]:
    source = "user profile"
    if args.profile is not None:
        x, value = _profile_arg(args.profile), None
    else:
        (x, value), source = _equilibrium_candidate(g, args)
        if x is None:
            return {"method": "nash", "verdict": FAIL, "source": source}, EXIT_FAIL
    try:
        rep = verify_nash(g, x, **_common(args))
    except ValueError as err:
        raise UsageError(str(err)) from err
    payload = rep.to_dict()
    payload.update({"profile": jsonable(x), "source": source})
    if value is not None:
        payload["potential_value"] = value
    return payload, _exit_code(rep.verdict)


def _cmd_dynamics(g: GameSpec, args) -> tuple[dict, int]:
    if not g.is_finite:
        raise UsageError("dynamics needs a finite game")
    start = _profile_arg(args.start) if args.start is not None else g.profile_at((0,) * g.players)
    phi = None
    if args.with_potential:
        _, table = oracle_finite_potential(g, args.tol)
        if table is not None:
            phi = table_potential(g, table)
    try:
        res = better_response_dynamics(g, start, args.max_steps, args.seed, phi, args.tol, args.rule)
    except ValueError as err:
        raise UsageError(str(err)) from err
    payload = {"method": "dynamics", **res.to_dict()}
    return payload, EXIT_PASS if res.outcome == "converged" else EXIT_FAIL


def _cmd_abnormal(g: GameSpec, args) -> tuple[dict, int]:
    rep = detect_abnormal(g, args.samples, args.seed, args.tol)
    return rep.to_dict(), EXIT_PASS if rep.verdict == "not abnormal" else EXIT_FAIL


COMMANDS = {"check": _cmd_check, "construct": _cmd_construct, "verify": _cmd_verify,
            "ordinal": _cmd_ordinal, "nash": _cmd_nash, "dynamics": _cmd_dynamics,
            "abnormal": _cmd_abnormal}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="relative tolerance (default 1e-9)")
    common.add_argument("--samples", type=int, default=500, help="sample budget (default 500)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--radius", type=float, default=10.0,
                        help="sampling radius for unbounded action spaces (default 10)")

    p = argparse.ArgumentParser(prog="pgt", description="Potential-game tests and constructions.")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("game", help="game specification (JSON)")
        return s

    s = cmd("check", "decide exact potentiality")
    s.add_argument("--method", required=True, choices=["cycle4", "pairwise", "hp", "hessian", "oracle"])

    s = cmd("construct", "build a potential function")
    s.add_argument("--method", required=True, choices=["theorem5", "theorem8", "rosenthal"])
    s.add_argument("--verify", action="store_true", help="check the result against every deviation")
    s.add_argument("--out", help="write the potential as JSON")
    s.add_argument("--augmented", action="store_true",
                   help="rosenthal: include artificial edges and the origin loop")

    s = cmd("verify", "verify a candidate potential")
    s.add_argument("--potential", required=True, help="potential JSON (expr or table)")
    s.add_argument("--mode", required=True, choices=["exact", "ordinal", "generalized", "gradient"])

    s = cmd("ordinal", "sufficient conditions for ordinal potentials")
    s.add_argument("--check", required=True,
                   choices=["assumption1", "crosssign", "theorem10", "theorem11", "theorem12"])
    s.add_argument("--candidate", help="candidate JSON with phi, subgradients, alphas")
    s.add_argument("--eta", type=float, nargs="+", help="strong-convexity constants (1 or N values)")
    s.add_argument("--lipschitz", type=float, help="Lipschitz constant of grad(phi)")
    s.add_argument("--crosssign-mode", choices=["global", "critical"], default="global")

    s = cmd("nash", "compute or verify a pure Nash equilibrium")
    s.add_argument("--profile", help="profile to verify, e.g. '[[0],[1]]'")
    s.add_argument("--resolution", type=int, default=11, help="grid points per coordinate")

    s = cmd("dynamics", "run better-response dynamics")
    s.add_argument("--start", help="start profile, e.g. '[[0],[0]]' (default: first profile)")
    s.add_argument("--max-steps", type=int, default=1000)
    s.add_argument("--rule", choices=["lexicographic", "random"], default="lexicographic")
    s.add_argument("--with-potential", action="store_true",
                   help="record potential changes using the oracle potential when one exists")

    cmd("abnormal", "look for a cost that ignores its own action")
    return p


def _emit(payload: dict, as_json: bool, elapsed: float) -> None:
    if as_json:
        doc = dict(jsonable(payload))
        doc["timing"] = {"seconds": round(elapsed, 6)}
        print(json.dumps(doc, sort_keys=True, indent=2))
        return
    for key in ("method", "verdict", "residual_max", "samples_used", "exhaustive", "abstentions",
                "outcome", "steps", "profile", "source", "potential_value"):
        if key in payload:
            print(f"{key}: {json.dumps(jsonable(payload[key]))}")
    for key in ("witness", "cycle", "potential", "verification", "details"):
        if payload.get(key):
            print(f"{key}: {json.dumps(jsonable(payload[key]), sort_keys=True)}")
    for note in payload.get("notes") or ():
        print(f"note: {note}")
    print(f"timing: {elapsed:.3f} s")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_PASS
    t0 = time.perf_counter()
    try:
        g = load_game_spec(args.game)
        payload, code = COMMANDS[args.command](g, args)
    except (GameSpecError, ExpressionError, UsageError, OracleSizeError) as err:
        where = getattr(err, "path", None)
        print(f"pgt: error: {err}" + (f" (at {where})" if where else ""), file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"pgt: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    _emit(payload, args.json, time.perf_counter() - t0)
    return code


if __name__ == "__main__":
    sys.exit(main())
