"""Command-line interface: ``python3 -m gqod --order FILE|@preset <command> ...``.

Exit codes: 0 the relation holds / success, 1 it fails (or no embedding,
or a game hit a limit), 2 usage error, 3 input error, 4 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .embedding import forest_embed, tree_embed, verify_witness
from .labels import OrderError, load_order_spec, preset
from .ordering import INFINITY, MeasureError, QuasiOrdering
from .rewrite import (DescentViolation, GreedyStrategy, InteractiveStrategy, RandomStrategy,
                      RuleError, ScriptedMove, ScriptedStrategy, TraceError, check_generic_method,
                      check_rule_decrease, parse_params, play, replay, write_trace)
from .terms import Node, TermError, parse, parse_position, render_tree

OK, FAILS, USAGE, INPUT, INTERNAL = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def load_order(spec: str | None):
    if spec is None:
        raise InputError("an order is required: --order FILE or --order @preset")
    if spec.startswith("@"):
        return preset(spec[1:])
    try:
        return load_order_spec(Path(spec).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read order spec: {exc}") from None


def _term(text, order):
    return parse(text, order)


def _index(text, order):
    if text in ("inf", "∞", "infinity"):
        return INFINITY
    name = order.index.canonical(text)
    if name not in order.index:
        raise InputError(f"{text!r} is not an index label")
    return name


def _yes(flag) -> str:
    return "true" if flag else "false"


# -- commands -------------------------------------------------------------------

def cmd_compare(args, order, out):
    q = QuasiOrdering(order)
    a, b = _term(args.alpha, order), _term(args.beta, order)
    if args.index is not None:
        i = _index(args.index, order)
        c = q.compare(i, a, b)
        print(f"index {i}: leq {_yes(c.leq)}  geq {_yes(c.geq)}  strict {_yes(c.lt)}", file=out)
        return OK if c.leq else FAILS
    indices = q.all_indices() if args.full else None
    for i, c in q.table(a, b, indices):
        print(f"{str(i):>8}  leq {_yes(c.leq):5}  geq {_yes(c.geq):5}  strict {_yes(c.lt)}",
              file=out)
    strict = q.lll(a, b, indices)
    print(f"lll {_yes(strict)}", file=out)
    print(f"lll= {_yes(strict or a == b)}", file=out)
    return OK if strict or a == b else FAILS


def cmd_sections(args, order, out):
    q = QuasiOrdering(order)
    for s in q.sections(_term(args.term, order), _index(args.index, order)):
        print(s, file=out)
    return OK


def cmd_indices(args, order, out):
    q = QuasiOrdering(order)
    for i in sorted(q.indices(_term(args.term, order)), key=str):
        print(i, file=out)
    return OK


def cmd_embed(args, order, out):
    a, b = _term(args.alpha, order), _term(args.beta, order)
    if args.command == "embed":
        if not (a.connected and b.connected):
            raise InputError("embed needs connected terms; use forest-embed")
        witness = tree_embed(a, b, order)
    else:
        found = forest_embed(a, b, order)
        witness = None if found is None else found.witness
    if witness is None:
        print("none", file=out)
        return FAILS
    problems = verify_witness(a, b, witness, order)
    if problems:
        raise AssertionError("search produced an invalid witness: " + "; ".join(problems))
    print(witness, file=out)
    return OK


def cmd_check_rule(args, order, out):
    q = QuasiOrdering(order)
    try:
        report = check_rule_decrease(_term(args.lhs, order), _term(args.rhs, order), q)
    except RuleError as exc:
        raise InputError(str(exc)) from None
    for i, c in report.rows:
        print(f"{str(i):>8}  rhs < lhs {_yes(c.lt)}", file=out)
    print(f"decreasing {_yes(report.decreasing)}", file=out)
    return OK if report.decreasing else FAILS


def cmd_check_generic(args, order, out):
    q = QuasiOrdering(order)
    report = check_generic_method(_term(args.lhs, order), _term(args.rhs, order), q,
                                  trials=args.trials, seed=args.seed)
    if not report.applicable:
        print("method inapplicable: r <<< l does not hold", file=out)
        return FAILS
    bad = report.violations
    print(f"samples {len(report.samples)}  violations {len(bad)}", file=out)
    for s in bad[:args.show]:
        print(f"  {s.lhs}  vs  {s.rhs}", file=out)
    return OK if report.passed else FAILS


# -- hydra ----------------------------------------------------------------------

def _strategy(name, seed):
    if name == "random":
        return RandomStrategy(seed)
    if name == "greedy":
        return GreedyStrategy(largest=True)
    if name == "greedy-small":
        return GreedyStrategy(largest=False)
    raise InputError(f"unknown strategy {name!r}")


def read_script(text: str) -> list:
    """Lines ``TAG POSITION PARAMS``, e.g. ``R2 /0/0 i-=0``; ``#`` starts a comment."""
    moves = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        cols = line.split()
        if len(cols) not in (2, 3):
            raise InputError(f"script line {lineno}: expected TAG POSITION [PARAMS]")
        try:
            moves.append(ScriptedMove(cols[0], parse_position(cols[1]),
                                      parse_params(cols[2] if len(cols) == 3 else "-")))
        except ValueError as exc:
            raise InputError(f"script line {lineno}: {exc}") from None
    return moves


def _recommended_form(t, rho) -> bool:
    return all(isinstance(p, Node) and p.label == rho for p in t.parts)


def _report_game(trace, args, order, out):
    if args.format == "trace":
        out.write(write_trace(trace, order, seed=args.seed))
    else:
        print(f"0. {trace.initial}", file=out)
        for n, st in enumerate(trace.steps, 1):
            print(f"{n}. {st.move} -> {st.move.result}", file=out)
    verdict = {"terminal": "terminated, descent verified",
               "step-limit": "step limit reached, descent verified so far",
               "size-limit": "size limit reached, descent verified so far",
               "time-limit": "time limit reached, descent verified so far",
               "stopped": "stopped, descent verified so far"}[trace.status]
    print(f"{verdict} ({len(trace.steps)} steps, final size {trace.final.node_count()})",
          file=sys.stderr if args.format == "trace" else out)
    return OK if trace.status in ("terminal", "stopped") else FAILS


def cmd_hydra(args, order, out):
    if args.mode == "replay":
        try:
            text = Path(args.target).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read trace: {exc}") from None
        report = replay(text, order)
        if not report.ok:
            print(f"rejected after {report.verified} verified steps: {report.error}", file=out)
            return FAILS
        print(f"verified, {report.verified} steps, status {report.trace.status}", file=out)
        return OK
    initial = _term(args.target, order)
    if not args.any_initial and not _recommended_form(initial, order.rho):
        raise InputError("initial hydra must have the form (rho, a1) # ... # (rho, an); "
                         "pass --any-initial to allow others")
    deadline = time.monotonic() + args.time_limit if args.time_limit else None
    common = dict(k_max=args.k_max, window=args.window, limit_steps=args.limit_steps,
                  limit_size=args.limit_size, deadline=deadline)
    if args.mode == "interactive":
        ui = InteractiveStrategy(read=lambda prompt: _ask(prompt, out),
                                 write=lambda line: print(line, file=out))
        heracles = _ShowingStrategy(ui, out)
        trace = play(initial, order, heracles, ui, **common)
        return _report_game(trace, args, order, out)
    if args.script:
        try:
            script = read_script(Path(args.script).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputError(f"cannot read script: {exc}") from None
        heracles = hydra = ScriptedStrategy(script)
    else:
        heracles = _strategy(args.heracles, args.seed)
        hydra = _strategy(args.hydra, args.seed + 1)
    try:
        trace = play(initial, order, heracles, hydra, **common)
    except RuleError as exc:
        raise InputError(str(exc)) from None
    return _report_game(trace, args, order, out)


def _ask(prompt, out):
    out.write(prompt)
    out.flush()
    line = sys.stdin.readline()
    return line if line else "q"


class _ShowingStrategy:
    """Wraps a strategy and prints the current hydra before each choice."""

    def __init__(self, inner, out):
        self.inner, self.out = inner, out

    def pick_redex(self, term, moves):
        print(f"hydra: {term}", file=self.out)
        print(render_tree(term), file=self.out)
        return self.inner.pick_redex(term, moves)

    def pick_params(self, term, position, tag, moves):
        return self.inner.pick_params(term, position, tag, moves)


def cmd_validate_order(args, order, out):
    idx = order.index
    if getattr(idx, "finite", False):
        print(f"index: {len(idx.elements)} labels", file=out)
    else:
        print(f"index: builtin {type(idx).__name__}", file=out)
    print(f"leaves: {len(order.leaves.elements)} declared", file=out)
    print(f"variables: {', '.join(sorted(order.variables)) or '-'}", file=out)
    print(f"rho: {order.rho or '-'}", file=out)
    return OK


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gqod", description=__doc__.split("\n")[0])
    _add_globals(p, {"seed": 0, "k_max": 3, "window": 5, "limit_steps": 10_000,
                     "format": "text"})
    # the same flags are accepted after the subcommand too
    shared = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    _add_globals(shared, {})
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compare", parents=[shared], help="compare two terms")
    c.add_argument("alpha")
    c.add_argument("beta")
    c.add_argument("--index", help="a single index label, or inf")
    c.add_argument("--full", action="store_true", help="use every index (finite orders only)")

    c = sub.add_parser("sections", parents=[shared], help="list the i-sections of a term")
    c.add_argument("term")
    c.add_argument("index")

    c = sub.add_parser("indices", parents=[shared], help="list the indices of a term")
    c.add_argument("term")

    for name, what in (("embed", "tree"), ("forest-embed", "forest")):
        c = sub.add_parser(name, parents=[shared], help=f"search for a {what} embedding witness")
        c.add_argument("alpha")
        c.add_argument("beta")

    c = sub.add_parser("check-rule", parents=[shared], help="check that rhs <<< lhs")
    c.add_argument("lhs")
    c.add_argument("rhs")

    c = sub.add_parser("check-generic", parents=[shared], 
                       help="sample contexts and numeral substitutions")
    c.add_argument("lhs")
    c.add_argument("rhs")
    c.add_argument("--trials", type=_positive, default=100)
    c.add_argument("--show", type=_natural, default=5, help="violations to print")

    c = sub.add_parser("hydra", parents=[shared], 
                       help="play, replay or interactively play a hydra game")
    c.add_argument("mode", choices=("run", "replay", "interactive"))
    c.add_argument("target", help="initial hydra (run, interactive) or trace file (replay)")
    c.add_argument("--heracles", default="random", choices=("random", "greedy", "greedy-small"))
    c.add_argument("--hydra", default="random", choices=("random", "greedy", "greedy-small"))
    c.add_argument("--script", help="file of moves, one 'TAG POSITION PARAMS' per line")
    c.add_argument("--any-initial", action="store_true")
    c.add_argument("--time-limit", type=float, default=None, help="seconds")

    sub.add_parser("validate-order", parents=[shared], help="load the order spec and summarize it")
    return p


def _add_globals(p, defaults):
    p.add_argument("--order", help="order-spec file, or @name for a built-in preset")
    p.add_argument("--seed", type=int)
    p.add_argument("--k-max", type=_natural)
    p.add_argument("--window", type=_positive, help="R3 candidates per limit label")
    p.add_argument("--limit-steps", type=_natural)
    p.add_argument("--limit-size", type=_positive)
    p.add_argument("--format", choices=("text", "trace"))
    p.set_defaults(**defaults)


def _natural(text):
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def _positive(text):
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return n


COMMANDS = {
    "compare": cmd_compare, "sections": cmd_sections, "indices": cmd_indices,
    "embed": cmd_embed, "forest-embed": cmd_embed, "check-rule": cmd_check_rule,
    "check-generic": cmd_check_generic, "hydra": cmd_hydra,
    "validate-order": cmd_validate_order,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        order = load_order(args.order)
        return COMMANDS[args.command](args, order, out)
    except (InputError, OrderError, TermError, TraceError, RuleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT
    except (DescentViolation, MeasureError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
