"""Command-line entry point.

Every subcommand prints a JSON result on stdout (or writes it to ``--out``)
and records a run manifest: ``<out>.manifest.json`` when ``--out`` is
given, otherwise one JSON line on stderr.

Exit codes: 0 success, 1 internal invariant failure, 2 precondition or
budget error, 64 usage error.
"""
from __future__ import annotations

import argparse
import itertools
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .cfi import build_cfi, V0
from .csp import XorSystem, parse_target, solve_csp, solve_xor
from .errors import BudgetExceeded, InvariantViolation, PreconditionError
from .families import check_invariance, parse_family
from .games.copsrobber import GirthStrategy, solve_cr_game, solve_cr_game_minimax
from .games.duplicator import CFIGame, DuplicatorState, adversarial_verify
from .games.pebble import PGConfig, decode_position, solve_pebble_game, switch_set_bijections
from .graphs import generate_regular, girth, named_graph
from .io import (dump_graph, dump_graph_edgelist, dump_structure, dumps, load_graph,
                 load_structure)
from .quantifiers import (gamma_equivalence_check, is_downwards_monotone, is_p_closed,
                          make_census, parse_class)

EXIT_OK, EXIT_INTERNAL, EXIT_PRECONDITION, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _ints(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(x) for x in text.split(",") if x.strip()]


# ---- subcommands -------------------------------------------------------------
# Each returns (payload, is_json) where payload is a dict (JSON) or raw text.

def cmd_gen_graph(a):
    if a.named:
        G = named_graph(a.named)
    else:
        if a.ell is None or a.vertices is None:
            raise UsageError("gen-graph needs --named or both --ell and --vertices")
        G = generate_regular(a.ell, a.vertices, a.girth, seed=a.seed, budget=a.budget)
        if G is None:
            raise PreconditionError(f"no {a.ell}-regular graph on {a.vertices} vertices with girth >= "
                                    f"{a.girth} found within budget {a.budget}")
    if a.format == "edgelist":
        return dump_graph_edgelist(G), False
    return json.loads(dump_graph(G)), True


def cmd_gen_cfi(a):
    G = load_graph(_read(a.graph))
    if a.U is not None:
        U = _ints(a.U)
    else:
        U = [] if a.parity == "even" else [V0]
    return json.loads(dump_structure(build_cfi(G, U).structure)), True


def cmd_solve_csp(a):
    A = load_structure(_read(a.instance))
    if Path(a.target).is_file():
        B = load_structure(Path(a.target).read_text())
    else:
        B = parse_target(a.target)
    h = solve_csp(A, B)
    return {"verdict": "satisfiable" if h is not None else "unsatisfiable",
            "homomorphism": None if h is None else [h[x] for x in range(A.n)]}, True


def cmd_solve_xor(a):
    system = XorSystem.from_text(_read(a.file))
    bits = solve_xor(system)
    if bits is not None and not system.is_satisfied_by(bits):
        raise InvariantViolation("elimination returned a non-solution")
    return {"verdict": "satisfiable" if bits is not None else "unsatisfiable",
            "variables": system.variable_count, "equations": len(system.equations),
            "solution": bits}, True


def cmd_check_family(a):
    return check_invariance(parse_family(a.family), a.max_n).as_dict(), True


def cmd_check_closure(a):
    K = parse_class(a.class_)
    census = make_census(K.vocab, a.mode, a.max_n, count=a.count, seed=a.seed, max_tuples=a.max_tuples)
    if a.property == "monotone":
        v = is_downwards_monotone(K, census)
    else:
        P = parse_family(a.family)
        v = is_p_closed(K, P, census) if a.property == "closed" else gamma_equivalence_check(K, P, census)
    out = v.as_dict()
    out["class"] = K.description
    out["census_size"] = len(census)
    return out, True


def cmd_solve_pg(a):
    A = load_structure(_read(a.a))
    B = load_structure(_read(a.b))
    bij = None
    if a.bijections == "switchsets":
        if A.n != B.n or A.n % 2:
            raise PreconditionError("switch-set bijections need two CFI universes of equal size")
        bij = switch_set_bijections(A.n // 2)
    cfg = PGConfig(a.k, parse_family(a.family),
                   move_arities=tuple(_ints(a.arities)) or None,
                   bijections=bij, round_bound=a.round_bound)
    res = solve_pebble_game(A, B, cfg)
    out = res.as_dict()
    out["family"] = cfg.family.name
    out["k"] = a.k
    if a.strategy_out:
        start = (None,) * a.k
        strat = {"winner": res.winner, "k": a.k}
        if res.winner == "Spoiler" and res.reason != "no bijection":
            move = res.spoiler_move(start)
            strat["spoiler_first_move"] = None if move is None else {"side": move[0], "ys": list(move[1])}
        strat["positions"] = [
            {"position": [None if s is None else list(s) for s in pos],
             "spoiler_depth": res.spoiler_depth(pos)}
            for pos in _all_positions(res)]
        Path(a.strategy_out).write_text(dumps(strat))
        out["strategy_file"] = a.strategy_out
    return out, True


def _all_positions(res):
    nB = res.solver.nB
    for code in itertools.product(range(res.solver.S), repeat=res.k):
        yield decode_position(code, nB)


def cmd_solve_cr(a):
    G = load_graph(_read(a.graph))
    sol = solve_cr_game(G, a.k, a.ell)
    out = sol.as_dict()
    out["safe"] = sorted([sorted(F), u] for F, u in sol.safe)
    if a.check:
        other = solve_cr_game_minimax(G, a.k, a.ell)
        if other != sol.safe:
            raise InvariantViolation("fixpoint and minimax solvers disagree")
        out["cross_checked"] = True
    return out, True


def _certificate(G, k, a):
    if a.cert == "girth":
        return GirthStrategy(G, a.d)
    return solve_cr_game(G, k)


def cmd_verify_duplicator(a):
    G = load_graph(_read(a.graph))
    cert = _certificate(G, a.k, a)
    rep = adversarial_verify(G, a.k, a.rounds, cert)
    out = rep.as_dict()
    out.update({"k": a.k, "rounds": a.rounds, "vertices": G.n, "girth": girth(G)})
    if not rep.ok:
        raise InvariantViolation(json.dumps(out))
    return out, True


def cmd_play_pg(a, stdin=None, stdout=None):
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    G = load_graph(_read(a.graph))
    cert = _certificate(G, a.k, a)
    game = CFIGame(G, a.k, cert)
    if not cert.is_safe(frozenset(), V0):
        raise PreconditionError("v0 is not safe for the empty set; Duplicator has no certified strategy")
    st = DuplicatorState.initial(G, a.k)
    played = 0
    print(f"# CFI pair over {G.n} vertices, {game.n} elements, k={a.k}, family nu:{game.ell}", file=stdout)
    print("# enter: left|right <vars> <tuple> <pick>   e.g. 'left 0 5 1'; 'quit' to stop", file=stdout)
    for line in stdin:
        parts = line.split()
        if not parts:
            continue
        if parts[0] in ("quit", "exit"):
            break
        try:
            if len(parts) != 4:
                raise PreconditionError("expected 4 fields")
            side, ys, tup, pick = parts[0], tuple(_ints(parts[1])), tuple(_ints(parts[2])), int(parts[3])
            rnd = game.step(st, side, ys, tup, pick)
        except PreconditionError as exc:
            print(json.dumps({"error": str(exc)}), file=stdout)
            continue
        st = rnd.after
        played += 1
        print(json.dumps({
            "round": played,
            "bijection_switch_set": rnd.served_bijection.to_list(),
            "paths": [list(p) for p in rnd.paths],
            "served": [list(t) for t in rnd.response],
            "picked": list(rnd.response[pick]),
            "switch_set": st.switch_set.to_list(),
            "twist": st.switch_set.twist(),
            "invariant": True,
            "partial_isomorphism": True,
            "alpha": list(st.alpha), "beta": list(st.beta),
        }, sort_keys=True), file=stdout)
    return {"rounds_played": played, "final_switch_set": st.switch_set.to_list()}, True


COMMANDS = {
    "gen-graph": cmd_gen_graph, "gen-cfi": cmd_gen_cfi, "solve-csp": cmd_solve_csp,
    "solve-xor": cmd_solve_xor, "check-family": cmd_check_family, "check-closure": cmd_check_closure,
    "solve-pg": cmd_solve_pg, "solve-cr": cmd_solve_cr, "verify-duplicator": cmd_verify_duplicator,
    "play-pg": cmd_play_pg,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polyclosure", description="Partial polymorphism closure and pebble game workbench")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="write the result here instead of stdout")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1, help="accepted for compatibility; solvers run single-threaded")
        return sp

    s = common(sub.add_parser("gen-graph", help="generate or name a regular graph"))
    s.add_argument("--ell", type=int)
    s.add_argument("--vertices", type=int)
    s.add_argument("--girth", type=int, default=3)
    s.add_argument("--budget", type=int, default=200_000)
    s.add_argument("--named", help="k4, k3,3, petersen, c<n>")
    s.add_argument("--format", choices=("json", "edgelist"), default="json")

    s = common(sub.add_parser("gen-cfi", help="build the CFI structure of a graph"))
    s.add_argument("--graph", help="graph file (default stdin)")
    s.add_argument("--parity", choices=("even", "odd"), default="even")
    s.add_argument("--U", help="explicit comma-separated twisted vertices")

    s = common(sub.add_parser("solve-csp", help="homomorphism into a template"))
    s.add_argument("--instance", help="structure JSON (default stdin)")
    s.add_argument("--target", required=True, help="c<l>, h:<n>:<m>[:<k>] or a structure JSON file")

    s = common(sub.add_parser("solve-xor", help="solve an XOR system"))
    s.add_argument("file", nargs="?", default="-")

    s = common(sub.add_parser("check-family", help="invariance properties of a family"))
    s.add_argument("--family", required=True)
    s.add_argument("--max-n", type=int, default=4)

    s = common(sub.add_parser("check-closure", help="closure verdicts for a structure class"))
    s.add_argument("--class", dest="class_", required=True)
    s.add_argument("--family", default="nowhere")
    s.add_argument("--max-n", type=int, default=3)
    s.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    s.add_argument("--count", type=int, default=1000)
    s.add_argument("--max-tuples", type=int, default=3)
    s.add_argument("--property", choices=("closed", "monotone", "gamma"), default="closed")

    s = common(sub.add_parser("solve-pg", help="solve the pebble game"))
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--family", default="nowhere")
    s.add_argument("--arities", help="allowed move arities, e.g. 1 or 1,2")
    s.add_argument("--round-bound", type=int)
    s.add_argument("--bijections", choices=("full", "switchsets"), default="full")
    s.add_argument("--strategy-out", help="write per-position Spoiler depths here")

    s = common(sub.add_parser("solve-cr", help="solve the Cops&Robber game"))
    s.add_argument("--graph", help="graph file (default stdin)")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--ell", type=int)
    s.add_argument("--check", action="store_true", help="cross-check with the minimax solver")

    for name, helptext in (("verify-duplicator", "exhaustively test the Duplicator strategy"),
                           ("play-pg", "play Spoiler against the Duplicator strategy")):
        s = common(sub.add_parser(name, help=helptext))
        if name == "play-pg":
            s.add_argument("--graph", required=True, help="graph file (stdin carries the moves)")
        else:
            s.add_argument("--graph", help="graph file (default stdin)")
        s.add_argument("--k", type=int, required=True)
        s.add_argument("--cert", choices=("cr", "girth"), default="cr")
        s.add_argument("--d", type=int, default=1, help="distance parameter for the girth certificate")
        if name == "verify-duplicator":
            s.add_argument("--rounds", type=int, default=3)
    return p


def _emit(a, command, payload, is_json, started):
    text = dumps(payload) if is_json else payload
    digest = hashlib.sha256(text.encode()).hexdigest()
    manifest = {
        "command": command,
        "parameters": {k: v for k, v in sorted(vars(a).items()) if k not in ("command",)},
        "seed": getattr(a, "seed", 0),
        "version": __version__,
        "wall_time": round(time.perf_counter() - started, 6),
        "result_sha256": digest,
    }
    if a.out:
        Path(a.out).write_text(text)
        Path(a.out + ".manifest.json").write_text(dumps(manifest))
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
        sys.stderr.write(json.dumps(manifest, sort_keys=True) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    started = time.perf_counter()
    try:
        a = parser.parse_args(argv)
        if not a.command:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        payload, is_json = COMMANDS[a.command](a)
        _emit(a, a.command, payload, is_json, started)
        return EXIT_OK
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (InvariantViolation, AssertionError) as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (PreconditionError, BudgetExceeded, ValueError, KeyError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
