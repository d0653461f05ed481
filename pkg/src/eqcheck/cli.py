"""Command-line surface.

Exit codes: 0 = equilibrium confirmed (or command succeeded), 1 =
equilibrium refuted, 2 = refused (state budget) or invalid input.  All
reports are deterministic: identical inputs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import gameio, gen, oracle, verify
from .atm import atm_accepts, compile_atm, true_horizon
from .model import CapExceeded, GameSystem, validate_game
from .product import explore_chain
from .strategy import ProductTransducer, StrategyTransducer, validate_profile
from .values import bit_bound, format_value_table, hitting_probabilities, payoff

DEFAULT_CAP = verify.DEFAULT_CAP


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except gameio.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"VERDICT REFUSED cap={exc.cap}")
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqcheck",
        description="Exact equilibrium verification for finite-horizon "
        "bounded-concurrency stochastic games.",
    )
    sub = parser.add_subparsers(required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP,
                        help="explored-state budget (default 10^7)")
    common.add_argument("--horizon-override", type=int, default=None,
                        help="replace the game's horizon after loading")
    common.add_argument("--format", choices=("text", "structured"),
                        default="text")

    p = sub.add_parser("verify", help="decide an equilibrium property",
                       parents=[])
    vsub = p.add_subparsers(required=True)
    for kind in ("ne", "spe"):
        q = vsub.add_parser(kind, parents=[common])
        q.add_argument("game")
        q.add_argument("transducers", nargs="+")
        q.add_argument("--all-witnesses", action="store_true")
        q.set_defaults(handler=cmd_verify, kind=kind)

    p = sub.add_parser("payoff", parents=[common],
                       help="expected payoff of one agent under the profile")
    p.add_argument("--agent", type=int, required=True, help="1-based index")
    p.add_argument("--dump-values", action="store_true")
    p.add_argument("game")
    p.add_argument("transducers", nargs="+")
    p.set_defaults(handler=cmd_payoff)

    p = sub.add_parser("compile-atm", parents=[common],
                       help="compile a machine into a game and profile")
    p.add_argument("machine")
    p.add_argument("-n", "--cells", type=int, required=True)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(handler=cmd_compile_atm)

    p = sub.add_parser("oracle", help="brute-force references (unstable)")
    osub = p.add_subparsers(required=True)
    q = osub.add_parser("payoff", parents=[common])
    q.add_argument("--agent", type=int, required=True)
    q.add_argument("game")
    q.add_argument("transducers", nargs="+")
    q.set_defaults(handler=cmd_oracle_payoff)
    q = osub.add_parser("bestresponse", parents=[common])
    q.add_argument("--agent", type=int, required=True)
    q.add_argument("game")
    q.add_argument("transducers", nargs="+")
    q.set_defaults(handler=cmd_oracle_best)
    q = osub.add_parser("synthesize", parents=[common])
    q.add_argument("game")
    q.add_argument("-o", "--out", required=True)
    q.set_defaults(handler=cmd_oracle_synthesize)

    p = sub.add_parser("simulate", parents=[common],
                       help="sample plays and report goal frequencies")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("game")
    p.add_argument("transducers", nargs="+")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("info", parents=[common],
                       help="instance sizes, reachability and the bit ceiling")
    p.add_argument("game")
    p.add_argument("transducers", nargs="+")
    p.set_defaults(handler=cmd_info)

    p = sub.add_parser("gen", help="write a seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(handler=cmd_gen)

    return parser


def _load(args) -> tuple[GameSystem, list[StrategyTransducer], ProductTransducer]:
    g = gameio.parse_game(Path(args.game).read_text())
    if args.horizon_override is not None:
        g.horizon = args.horizon_override
    problems = validate_game(g)
    ts = [
        gameio.parse_transducer(Path(path).read_text(), g)
        for path in args.transducers
    ]
    problems += validate_profile(g, ts)
    if problems:
        for problem in problems:
            print(f"invalid input: {problem}", file=sys.stderr)
        raise SystemExit(2)
    return g, ts, ProductTransducer.of(ts)


def _agent_index(args, g: GameSystem) -> int:
    if not 1 <= args.agent <= g.num_agents:
        print(f"error: no agent {args.agent}", file=sys.stderr)
        raise SystemExit(2)
    return args.agent - 1


def _emit(args, human: str, machine: str) -> None:
    if args.format == "text" and human:
        print(human)
    print(machine)


def cmd_verify(args) -> int:
    g, ts, pt = _load(args)
    check = verify.verify_nash if args.kind == "ne" else verify.verify_spe
    verdict = check(g, pt, cap=args.cap, all_witnesses=args.all_witnesses)
    names = {
        verify.VerdictKind.NE_YES: "profile is a Nash equilibrium",
        verify.VerdictKind.NE_NO: "profile is not a Nash equilibrium",
        verify.VerdictKind.SPE_YES: "profile is a subgame perfect equilibrium",
        verify.VerdictKind.SPE_NO: "profile is not a subgame perfect equilibrium",
        verify.VerdictKind.REFUSED: "state budget exceeded; no verdict",
    }
    _emit(args, names[verdict.kind], verify.export_witness(g, pt, verdict))
    if verdict.kind is verify.VerdictKind.REFUSED:
        return 2
    if verdict.kind in (verify.VerdictKind.NE_NO, verify.VerdictKind.SPE_NO):
        return 1
    return 0


def cmd_payoff(args) -> int:
    g, ts, pt = _load(args)
    agent = _agent_index(args, g)
    if args.dump_values:
        reach = explore_chain(g, pt, args.cap)
        table = hitting_probabilities(g, pt, agent, reach)
        print(format_value_table(g, pt, table))
    value = payoff(g, pt, agent, args.cap)
    _emit(
        args,
        f"agent {args.agent} reaches its goal with probability "
        f"{value.numerator}/{value.denominator}",
        f"PAYOFF agent={args.agent} value={value.numerator}/{value.denominator}",
    )
    return 0


def cmd_compile_atm(args) -> int:
    machine = gameio.parse_atm(Path(args.machine).read_text())
    compiled = compile_atm(machine, args.cells,
                           horizon_override=args.horizon_override)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "game.game").write_text(gameio.serialize_game(compiled.game))
    for t in compiled.transducers:
        (out / f"agent{t.agent + 1}.tr").write_text(
            gameio.serialize_transducer(compiled.game, t)
        )
    _emit(
        args,
        f"compiled {args.cells}-cell instance with "
        f"{compiled.game.num_states} states, horizon {compiled.game.horizon}",
        f"COMPILED dir={out} agents={compiled.game.num_agents} "
        f"states={compiled.game.num_states} horizon={compiled.game.horizon} "
        f"accepts={'yes' if atm_accepts(machine, args.cells) else 'no'}",
    )
    return 0


def cmd_oracle_payoff(args) -> int:
    g, ts, _ = _load(args)
    agent = _agent_index(args, g)
    value = oracle.oracle_payoff(g, ts, agent, cap=args.cap)
    _emit(args, "",
          f"ORACLE_PAYOFF agent={args.agent} "
          f"value={value.numerator}/{value.denominator}")
    return 0


def cmd_oracle_best(args) -> int:
    g, ts, _ = _load(args)
    agent = _agent_index(args, g)
    value = oracle.oracle_best_response(g, ts, agent, cap=args.cap)
    _emit(args, "",
          f"ORACLE_BEST agent={args.agent} "
          f"value={value.numerator}/{value.denominator}")
    return 0


def cmd_oracle_synthesize(args) -> int:
    g = gameio.parse_game(Path(args.game).read_text())
    if args.horizon_override is not None:
        g.horizon = args.horizon_override
    problems = validate_game(g)
    if problems:
        for problem in problems:
            print(f"invalid input: {problem}", file=sys.stderr)
        return 2
    try:
        ts = oracle.synthesize_spe(g, cap=args.cap)
    except oracle.SynthesisRefusal as exc:
        print(f"SYNTH_REFUSED reason={exc}")
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for t in ts:
        (out / f"agent{t.agent + 1}.tr").write_text(
            gameio.serialize_transducer(g, t)
        )
    _emit(args, "", f"SYNTHESIZED dir={out} agents={len(ts)}")
    return 0


def cmd_simulate(args) -> int:
    g, ts, _ = _load(args)
    for line in gen.simulate(g, ts, args.seed, args.count):
        print(line)
    return 0


def cmd_info(args) -> int:
    g, ts, pt = _load(args)
    reach = explore_chain(g, pt, args.cap)
    _emit(
        args,
        "",
        f"INFO states={g.num_states} agents={g.num_agents} "
        f"product_states={pt.num_states} horizon={g.horizon} "
        f"reachable={len(reach)} bit_bound={bit_bound(g, pt)}",
    )
    return 0


def cmd_gen(args) -> int:
    g, ts = gen.gen_random_instance(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "game.game").write_text(gameio.serialize_game(g))
    for t in ts:
        (out / f"agent{t.agent + 1}.tr").write_text(
            gameio.serialize_transducer(g, t)
        )
    print(f"GENERATED dir={out} seed={args.seed} agents={len(ts)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
