"""Command-line interface: ``capgames {transform,solve,verify,simulate}``.

Exit codes: 0 success, 1 verification negative, 2 input error,
3 unsupported capability.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from typing import Sequence

from . import io
from .dynamics import CapitalGame, DomainError, dynamics_by_name, from_standard_game, to_standard_game
from .game import TIE_TOL, ShapeError, StandardGame, is_nash, regrets
from .simulate import SimulationConfig, run
from .solvers import (
    COMPLETE,
    PURE_ONLY,
    SOLVE_EPS,
    PartialCoverageWarning,
    enumerate_pure_growth_equilibria,
    enumerate_pure_nash,
    growth_equilibria,
    support_enumeration_2p,
    verify_growth_equilibrium,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_UNSUPPORTED = 3


class Unsupported(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text: str) -> list[str]:
    return [x.strip() for x in text.split(",")]


def _read_profile_arg(arg: str):
    """Inline JSON, a path, or ``-`` for stdin."""
    text = arg if arg.lstrip()[:1] in ("[", "{") else io.read_text(arg)
    return io.loads(text)


def cmd_transform(args) -> int:
    game = io.parse_game(args.input)
    direction = args.direction or ("to-standard" if isinstance(game, CapitalGame) else "to-capital")
    if direction == "to-standard":
        if not isinstance(game, CapitalGame):
            raise io.GameFileError([("kind", "to-standard needs a capital game")])
        out = to_standard_game(game)
    else:
        if not isinstance(game, StandardGame):
            raise io.GameFileError([("kind", "to-capital needs a standard game")])
        if args.endowments is None or args.dynamics is None:
            raise io.GameFileError([("", "to-capital needs --endowments and --dynamics")])
        n = game.num_players
        endowments, dyn = args.endowments, args.dynamics
        # a single value applies to every player
        endowments = endowments * n if len(endowments) == 1 else endowments
        dyn = dyn * n if len(dyn) == 1 else dyn
        durations = args.durations * n if args.durations and len(args.durations) == 1 else args.durations
        try:
            dynamics = [dynamics_by_name(d) for d in dyn]
        except KeyError as e:
            raise io.GameFileError([("--dynamics", str(e))]) from None
        out = from_standard_game(game, endowments, dynamics, durations)
    io.write_text(io.dumps(io.game_to_document(out)), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    game = io.parse_game(args.input)
    capital = isinstance(game, CapitalGame)
    n = game.num_players
    mixed = args.mixed or (not args.pure and n == 2)
    if mixed and n != 2:
        raise Unsupported(f"mixed equilibria are only computed for 2-player games; this game has {n} players "
                          "(use --pure)")
    eps = args.eps if args.eps is not None else (SOLVE_EPS if mixed else TIE_TOL)
    notice = None
    coverage = COMPLETE
    if mixed:
        method = "support_enumeration"
        results = growth_equilibria(game, eps) if capital else support_enumeration_2p(game, eps)
    else:
        method = "pure_enumeration"
        results = enumerate_pure_growth_equilibria(game, eps) if capital else enumerate_pure_nash(game, eps)
        if n > 1:
            coverage = PURE_ONLY
            notice = "pure equilibria only; mixed equilibria were not searched"
    doc = io.equilibria_to_document(results, "capital" if capital else "standard", method, coverage, eps, notice)
    io.write_text(io.dumps(doc), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    game = io.parse_game(args.input)
    profiles = io.profiles_from_json(_read_profile_arg(args.profile), game.action_counts)
    if not profiles:
        raise io.GameFileError([("profile", "no profiles to verify")])
    all_ok = True
    for k, s in enumerate(profiles):
        if isinstance(game, CapitalGame):
            ok, regs = verify_growth_equilibrium(game, s, args.eps)
        else:
            regs = tuple(max(0.0, r) for r in regrets(game, s))
            ok = is_nash(game, s, args.eps)
        all_ok &= ok
        label = f"profile {k}: " if len(profiles) > 1 else ""
        print(f"{label}{'equilibrium' if ok else 'not an equilibrium'} (eps={args.eps:g})")
        for i, r in enumerate(regs):
            name = game.player_names[i] if game.player_names else f"P{i + 1}"
            print(f"  {name}: regret {r:.17g}")
    return EXIT_OK if all_ok else EXIT_NEGATIVE


def cmd_simulate(args) -> int:
    game = io.parse_game(args.input)
    if not isinstance(game, CapitalGame):
        raise io.GameFileError([("kind", "simulate needs a capital game")])
    profile = io.profile_from_json(_read_profile_arg(args.profile), game.action_counts)
    cfg = SimulationConfig(args.rounds, args.trials, args.seed, profile,
                           record_trajectories=args.trajectories is not None, workers=args.workers)
    report = run(game, cfg)
    io.write_text(io.dumps(report.to_dict()), args.report)
    if args.trajectories is not None:
        io.write_trajectories_csv(report, args.trajectories)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capgames", description="Capital games and growth equilibria")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="capital game <-> standard game")
    p.add_argument("input", help="game file, or - for stdin")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--direction", choices=["to-standard", "to-capital"])
    p.add_argument("--endowments", type=_floats, help="comma-separated, one per player (or one for all)")
    p.add_argument("--dynamics", type=_names, help="additive, multiplicative or a registered custom name")
    p.add_argument("--durations", type=_floats)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("solve", help="find equilibria")
    p.add_argument("input")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--pure", action="store_true", help="pure equilibria only (any number of players)")
    mode.add_argument("--mixed", action="store_true", help="pure and mixed equilibria (2 players)")
    p.add_argument("--eps", type=float)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a profile is an equilibrium")
    p.add_argument("input")
    p.add_argument("--profile", required=True,
                   help="inline JSON, a file (a profile or a solve output), or - for stdin")
    p.add_argument("--eps", type=float, default=TIE_TOL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="simulate repeated play")
    p.add_argument("input")
    p.add_argument("--profile", required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default="-", help="report JSON path (default stdout)")
    p.add_argument("--trajectories", help="CSV path for round,trial,player,capital rows")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PartialCoverageWarning)
            return args.func(args)
    except Unsupported as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (io.GameFileError, DomainError, ShapeError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
