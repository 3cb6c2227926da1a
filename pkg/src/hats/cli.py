"""Command-line surface: game I/O, verification, solving, construction,
board games, and report emission.

Exit codes: 0 winning/verified, 1 losing/refuted, 2 unknown/budget,
3 usage or file errors.  ``--json`` prints the machine-readable report
record instead of the human summary.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import kernels
from .core import Game, Strategy, HatsError, ValidationError, verify_strategy
from . import catalogue as cat
from . import constructors as cons
from . import rookcheck as rc
from . import solver as slv

EXIT_OF_VERDICT = {
    "winning": 0, "verified": 0, "ok": 0,
    "losing": 1, "refuted": 1,
    "unknown": 2,
}


class UsageError(HatsError):
    pass


def _load_game(path: str) -> Game:
    try:
        with open(path) as f:
            return Game.from_json(f.read())
    except OSError as e:
        raise UsageError(f"cannot read game file {path}: {e}")
    except ValidationError as e:
        raise UsageError(f"{path}: {e}")


def _load_strategy(path: str) -> Strategy:
    try:
        with open(path) as f:
            return Strategy.from_json(f.read())
    except OSError as e:
        raise UsageError(f"cannot read strategy file {path}: {e}")
    except ValidationError as e:
        raise UsageError(f"{path}: {e}")


def _write(path: str, text: str, report: dict) -> None:
    with open(path, "w") as f:
        f.write(text)
    report.setdefault("files", []).append(path)


def _parse_board(text: str) -> rc.Board:
    try:
        r, c = text.lower().split("x")
        return rc.Board(int(r), int(c))
    except (ValueError, ValidationError):
        raise UsageError(f"board size must look like RxC, got {text!r}")


def _report(verdict: str, reason: str = "", summary: str = "", **extra) -> dict:
    rep = {"verdict": verdict, "reason": reason, "summary": summary}
    rep.update(extra)
    return rep


def _budget(args) -> Optional[int]:
    if getattr(args, "budget_nodes", None) is not None:
        return args.budget_nodes
    env = os.environ.get("HATS_BUDGET_NODES")
    return int(env) if env else None


# -- subcommands --------------------------------------------------------------


def cmd_verify(args) -> dict:
    game = _load_game(args.game)
    strategy = _load_strategy(args.strategy)
    try:
        res = verify_strategy(game, strategy)
    except ValidationError as e:
        raise UsageError(str(e))
    if res.winning:
        return _report("verified", "exhaustive-search",
                       f"strategy wins all {game.total_arrangements} arrangements",
                       hashes={"game": game.sha256()})
    return _report("refuted", "exhaustive-search",
                   f"first losing arrangement: {list(res.first_losing)}",
                   counterexample=list(res.first_losing),
                   hashes={"game": game.sha256()})


def cmd_solve(args) -> dict:
    game = _load_game(args.game)
    extra = {"hashes": {"game": game.sha256()}}
    if args.dimacs:
        text = slv.to_dimacs(game)
        _write(args.dimacs, text, extra)
    if args.method == "naive":
        v = slv.naive_solve(game)
        stats = {"method": "naive"}
    elif args.method == "rook":
        r = slv.solve_c4_via_rook(game, node_budget=_budget(args))
        v, stats = r.verdict, vars(r.stats)
    else:
        r = slv.solve(game, node_budget=_budget(args), time_budget=args.time_budget)
        v, stats = r.verdict, vars(r.stats)
    if v.is_winning and args.strategy_out:
        _write(args.strategy_out, v.witness.to_json(), extra)
    return _report(v.status, v.reason, f"{v.status} ({v.reason})", stats=stats, **extra)


def cmd_catalogue(args) -> dict:
    game = _load_game(args.game)
    v = cat.classify_game(game)
    extra = {"hashes": {"game": game.sha256()}}
    if v.witness is not None and args.strategy_out:
        _write(args.strategy_out, v.witness.to_json(), extra)
    return _report(v.status, v.reason, f"{v.status} ({v.reason})", **extra)


def cmd_named(args) -> dict:
    cg = cat.named_game(args.id)
    extra = {"hashes": {"game": cg.game.sha256()},
             "arrangements": cg.game.total_arrangements}
    if args.out:
        _write(args.out, cg.game.to_json(), extra)
    if args.strategy_out and cg.witness is not None:
        _write(args.strategy_out, cg.witness.to_json(), extra)
    verified = cg.verified
    if args.verify and cg.witness is not None:
        verified = verify_strategy(cg.game, cg.witness).winning
    summary = f"{args.id}: {cg.status} ({cg.reason})"
    if args.verify:
        summary += f", verified over {cg.game.total_arrangements} arrangements"
    return _report(cg.status, cg.reason, summary, verified=verified, **extra)


def cmd_dimacs(args) -> dict:
    game = _load_game(args.game)
    text = slv.to_dimacs(game)
    rep = _report("ok", "dimacs-export", "CNF exported",
                  hashes={"game": game.sha256()})
    if args.out:
        _write(args.out, text, rep)
    else:
        sys.stdout.write(text)
    return rep


def cmd_rook(args) -> dict:
    pair = rc.BoardPair(_parse_board(args.left), _parse_board(args.right))
    piece = args.piece
    if args.dimacs:
        rep = _report("ok", "dimacs-export", f"{piece}-check CNF exported")
        _write(args.dimacs, rc.board_to_dimacs(pair, piece), rep)
        return rep
    if args.verify:
        s = rc.RookStrategyPair.from_json_dict(json.load(open(args.verify)))
        if piece == rc.ROOK:
            res = rc.verify_rook_strategy(pair, s)
        else:
            res = rc.verify_by_enumeration(pair, s, piece)
        if res["winning"]:
            return _report("verified", f"{piece}-check", "strategy wins every king pair")
        return _report("refuted", f"{piece}-check",
                       f"violated at (left king, right king) = {res['violation']}",
                       violation=list(res["violation"]))
    if piece == rc.KING:
        v = rc.king_check_classify(pair)
        return _report(v.status, v.reason, f"{pair}: {v.status}")
    if piece == rc.QUEEN:
        raise UsageError("queen check: use --verify or --dimacs (no in-process decision)")
    if args.solve:
        v = rc.solve_rook(pair, budget=_budget(args))
    else:
        v = rc.catalogue_rook(pair)
    rep = _report(v.status, v.reason, f"{pair}: {v.status} ({v.reason})",
                  nodes=v.nodes)
    if v.witness_pair is not None and args.strategy_out:
        _write(args.strategy_out, json.dumps(v.witness_pair.to_json_dict()), rep)
    return rep


def cmd_five_queens(args) -> dict:
    rep = rc.queen_5player_11x11(seed=args.seed, samples=args.samples)
    ok = (rep["dominated"] == rep["cells"] and rep["slice_failures"] == 0
          and rep["random_failures"] == 0)
    return _report("winning" if ok else "unknown", "queen-5player",
                   f"domination {rep['dominated']}/{rep['cells']}, "
                   f"{rep['slice_checked']} slice + {rep['random_checked']} random "
                   f"placements, {rep['slice_failures'] + rep['random_failures']} failures",
                   detail=rep)


def _operand(game_path: str, strategy_path: Optional[str], losing: bool) -> cons.ConstructedGame:
    game = _load_game(game_path)
    if losing:
        return cons.lost(game, "given")
    if strategy_path is None:
        raise UsageError(f"winning operand {game_path} needs a strategy file")
    s = _load_strategy(strategy_path)
    try:
        return cons.won(game, s, "given")
    except cons.InternalInconsistencyError:
        raise UsageError(f"strategy in {strategy_path} does not win {game_path}")


def cmd_construct(args) -> dict:
    rule = args.rule
    ops = args.operands
    losing_rules = {"pendant-losing", "attach2-losing", "glue-losing"}
    losing = rule in losing_rules

    def req(value, flag):
        if value is None:
            raise UsageError(f"{rule} requires {flag}")
        return value

    def pick(n):
        if losing:
            if len(ops) != n:
                raise UsageError(f"{rule} needs {n} game file(s)")
            return [_operand(p, None, True) for p in ops]
        if len(ops) != 2 * n:
            raise UsageError(f"{rule} needs {n} (game, strategy) file pair(s)")
        return [_operand(ops[2 * i], ops[2 * i + 1], False) for i in range(n)]

    def split_list(text):
        return [x for x in text.split(",") if x]

    if rule == "product":
        a, b = pick(2)
        out = cons.product(a, b, req(args.at, "--at"))
    elif rule == "substitute":
        a, b = pick(2)
        out = cons.substitute(a, req(args.vertex, "--vertex"), b)
    elif rule == "attach2":
        (a,) = pick(1)
        b, c = split_list(req(args.to, "--to"))
        out = cons.attach_vertex2(a, b, c, args.name)
    elif rule == "attach2edge":
        (a,) = pick(1)
        b, c = split_list(req(args.edge, "--edge"))
        out = cons.attach_vertex2_to_edge(a, b, c, args.name)
    elif rule == "attach-path23":
        (a,) = pick(1)
        na, nb = split_list(args.names)
        out = cons.attach_path_two_three(a, req(args.frm, "--from"), req(args.to, "--to"), na, nb)
    elif rule == "attach-leaf":
        (a,) = pick(1)
        out = cons.attach_leaf(a, req(args.at, "--at"), args.hatness, args.name)
    elif rule == "stitch":
        a, b = pick(2)
        out = cons.stitch(a, split_list(req(args.left, "--left")), b, split_list(req(args.right, "--right")))
    elif rule == "sew":
        a, b = pick(2)
        va, vb = split_list(req(args.at, "--at"))
        out = cons.sew(a, va, b, vb)
    elif rule == "fasten":
        marked = [split_list(m) for m in req(args.marked, "--marked").split(";")]
        frame, *comps = pick(1 + len(marked))
        out = cons.fasten(frame, list(zip(comps, marked)))
    elif rule == "fasten-single":
        marked = split_list(req(args.marked, "--marked").replace(";", ","))
        frame, *comps = pick(1 + len(marked))
        out = cons.fasten_single(frame, list(zip(comps, marked)))
    elif rule == "cone":
        specs = [tuple(split_list(m)) for m in req(args.marked, "--marked").split(";")]
        frame, *comps = pick(1 + len(specs))
        out = cons.cone(frame, [(c, o, a) for c, (o, a) in zip(comps, specs)],
                        apex=args.apex)
    elif rule == "pendant-losing":
        (a,) = pick(1)
        out = cons.losing_pendant(a, req(args.at, "--at"), args.name)
    elif rule == "attach2-losing":
        (a,) = pick(1)
        b, c = split_list(req(args.to, "--to"))
        out = cons.losing_attach_two(a, b, c, args.name)
    elif rule == "glue-losing":
        a, b = pick(2)
        out = cons.glue_losing(a, b, req(args.at, "--at"))
    else:
        raise UsageError(f"unknown construction rule {rule!r}")

    rep = _report(out.status, out.reason,
                  f"{rule}: {out.status}, {out.game.n} vertices, "
                  f"{out.game.total_arrangements} arrangements",
                  verified=out.verified,
                  hashes={"game": out.game.sha256()})
    game_json = out.game.to_json()
    if args.out:
        _write(args.out, game_json, rep)
    else:
        sys.stdout.write(game_json + "\n")
    if out.witness is not None and args.strategy_out:
        _write(args.strategy_out, out.witness.to_json(), rep)
    return rep


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hats",
                                description="hat-guessing games on graphs")
    p.add_argument("--json", action="store_true", help="emit the machine report as JSON")
    p.add_argument("--threads", type=int, default=None, help="cap kernel worker threads")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("verify", help="check a strategy file against a game file")
    q.add_argument("game")
    q.add_argument("strategy")
    q.set_defaults(fn=cmd_verify)

    q = sub.add_parser("solve", help="decide a game exhaustively")
    q.add_argument("game")
    q.add_argument("--method", choices=["csp", "rook", "naive"], default="csp")
    q.add_argument("--budget-nodes", type=int, default=None)
    q.add_argument("--time-budget", type=float, default=None)
    q.add_argument("--dimacs", metavar="OUT.cnf")
    q.add_argument("--strategy-out")
    q.set_defaults(fn=cmd_solve)

    q = sub.add_parser("catalogue", help="closed-form classification of a game file")
    q.add_argument("game")
    q.add_argument("--strategy-out")
    q.set_defaults(fn=cmd_catalogue)

    q = sub.add_parser("named", help="emit a named example game")
    q.add_argument("id", choices=list(cat.NAMED_GAME_IDS))
    q.add_argument("--verify", action="store_true")
    q.add_argument("-o", "--out")
    q.add_argument("--strategy-out")
    q.set_defaults(fn=cmd_named)

    q = sub.add_parser("dimacs", help="export the one-hot CNF of a game")
    q.add_argument("game")
    q.add_argument("-o", "--out")
    q.set_defaults(fn=cmd_dimacs)

    q = sub.add_parser("rook", help="two-player board check games")
    q.add_argument("--left", required=True, metavar="RxC")
    q.add_argument("--right", required=True, metavar="RxC")
    q.add_argument("--piece", choices=list(rc._PIECES), default="rook")
    q.add_argument("--solve", action="store_true")
    q.add_argument("--catalogue", action="store_true")
    q.add_argument("--verify", metavar="STRATEGY.json")
    q.add_argument("--dimacs", metavar="OUT.cnf")
    q.add_argument("--budget-nodes", type=int, default=None)
    q.add_argument("--strategy-out")
    q.set_defaults(fn=cmd_rook)

    q = sub.add_parser("five-queens", help="five players on 11x11 boards")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--samples", type=int, default=10**6)
    q.set_defaults(fn=cmd_five_queens)

    q = sub.add_parser("construct", help="apply a constructor to game files")
    q.add_argument("rule", choices=[
        "product", "substitute", "attach2", "attach2edge", "attach-path23",
        "attach-leaf", "stitch", "sew", "fasten", "fasten-single", "cone",
        "pendant-losing", "attach2-losing", "glue-losing"])
    q.add_argument("operands", nargs="*",
                   help="game.json [strategy.json] per operand; losing rules take game files only")
    q.add_argument("--at")
    q.add_argument("--to")
    q.add_argument("--edge")
    q.add_argument("--vertex")
    q.add_argument("--from", dest="frm")
    q.add_argument("--left")
    q.add_argument("--right")
    q.add_argument("--marked")
    q.add_argument("--apex", default="O")
    q.add_argument("--name", default="A*")
    q.add_argument("--names", default="A*,B*")
    q.add_argument("--hatness", type=int, default=3)
    q.add_argument("-o", "--out")
    q.add_argument("--strategy-out")
    q.set_defaults(fn=cmd_construct)
    return p


def run(argv) -> tuple[int, dict]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return (3 if e.code else 0), {"verdict": "usage", "reason": "argparse"}
    if args.threads:
        kernels.set_threads(args.threads)
    try:
        report = args.fn(args)
    except (UsageError, HatsError, OSError, json.JSONDecodeError) as e:
        report = _report("usage-error", type(e).__name__, str(e))
        if args.json:
            print(json.dumps(report))
        else:
            print(f"error: {e}", file=sys.stderr)
        return 3, report
    code = EXIT_OF_VERDICT.get(report.get("verdict"), 3)
    if args.json:
        print(json.dumps(report))
    else:
        print(report.get("summary") or report.get("verdict"))
    return code, report


def main(argv=None) -> int:
    code, _ = run(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
