"""Hydra rules, move enumeration, the game engine and the two descent checkers.

Rule tags: ``R1`` and ``R1'`` (cut a (rho, rho) head and copy the rest),
``R2`` (successor head: duplicate its context one label lower), ``R3``
(limit label replaced by a smaller one).  The leaf ``a`` of rules R2/R3 is a
pattern variable, so a head ``(i, g)`` matches with ``a := g`` for any g.  In
R2 the segment is taken with ``a`` still a variable and g is plugged in
afterwards, and the context ``u_i`` itself is ground.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .ordering import QuasiOrdering
from .terms import (HOLE, Leaf, Node, Term, TermError, apply_substitution, context_at, forest,
                    format_position, hole_count, is_numeral_forest, is_path_comparable,
                    node, node_labels, parse, parse_position, plug, replace_at,
                    segment, subterm, times)

TAGS = ("R1", "R1'", "R2", "R3")


class RuleError(ValueError):
    """The rule does not apply with the given position and parameters."""


class DescentViolation(AssertionError):
    """A fired step was not strictly decreasing: an implementation bug."""


class Move:
    """One rule instance; the resulting term is built on first access."""

    __slots__ = ("tag", "position", "params", "_term", "_order", "_result", "_info", "_valid")

    def __init__(self, tag, position, params, term=None, order=None, result=None, info=None):
        self.tag = tag
        self.position = tuple(position)
        self.params = tuple(sorted(dict(params).items()))
        self._term, self._order = term, order
        self._result, self._info, self._valid = result, info, None

    def _realize(self):
        _, rhs, where, info = rule_instance(self._term, self.position, self.tag, self.params,
                                            self._order)
        self._result = replace_at(self._term, where, rhs)
        self._info = info

    @property
    def result(self) -> Term:
        if self._result is None:
            self._realize()
        return self._result

    @property
    def info(self) -> tuple:
        if self._info is None:
            self._realize()
        return self._info

    @property
    def valid(self) -> bool:
        """The result lies in the path-comparable domain."""
        if self._valid is None:
            # R1 and R1' only copy and cut existing subtrees
            self._valid = self.tag in ("R1", "R1'") or is_path_comparable(self.result,
                                                                          self._order)
        return self._valid

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def params_text(self) -> str:
        return format_params(self.params)

    def key(self):
        return (self.position, self.tag, self.params)

    def __eq__(self, other):
        return isinstance(other, Move) and self.key() == other.key() \
            and self.result == other.result

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"<Move {self}>"

    def __str__(self):
        return f"{self.tag} at {format_position(self.position)} [{self.params_text()}]"


def format_params(params) -> str:
    return ",".join(f"{k}={v}" for k, v in params) or "-"


def parse_params(text: str) -> tuple:
    text = text.strip()
    if text in ("", "-"):
        return ()
    out = []
    for item in text.split(","):
        k, sep, v = item.partition("=")
        if not sep:
            raise ValueError(f"bad parameter {item!r}")
        k, v = k.strip(), v.strip()
        out.append((k, int(v) if k == "k" else v))
    return tuple(sorted(out))


def _rho(order) -> str:
    if order.rho is None or order.rho not in order.index:
        raise RuleError("hydra rules need rho declared as an index label")
    return order.rho


# -- the rules ---------------------------------------------------------------

def rule_instance(term: Term, position, tag: str, params, order) -> tuple:
    """The pair (l sigma, r sigma) of a rule fired at position, plus the replaced position.

    For R2 the redex is the enclosing j-node, so the returned position may
    lie above ``position`` (which addresses the head).
    """
    params = dict(params)
    rho = _rho(order)
    rleaf = Leaf(rho)
    pair = node(rho, rleaf)
    try:
        s = subterm(term, position)
    except TermError as exc:
        raise RuleError(str(exc)) from None
    if not isinstance(s, Node):
        raise RuleError(f"no node at {format_position(position)}")
    if tag in ("R1", "R1'"):
        k = params.get("k")
        if not isinstance(k, int) or k < 0:
            raise RuleError("R1 needs a natural number k")
        if tag == "R1'":
            if s.kids != (pair,):
                raise RuleError("R1' needs a node whose body is (rho, rho)")
            return s, forest(times(node(s.label, rleaf), k + 1), rleaf), tuple(position), ()
        if len(s.kids) < 2 or pair not in s.kids:
            raise RuleError("R1 needs a (rho, rho) child next to at least one other child")
        rest = list(s.kids)
        rest.remove(pair)
        return s, forest(times(node(s.label, *rest), k + 1), rleaf, rleaf), tuple(position), ()
    if tag == "R3":
        lam, i = s.label, params.get("i")
        if order.classify(lam).kind != "limit":
            raise RuleError(f"{lam} is not a limit label")
        if i is None or i not in order.index or not order.lt_index(i, lam):
            raise RuleError(f"R3 needs i below {lam}")
        return s, forest(node(i, *s.kids), rleaf), tuple(position), ()
    if tag == "R2":
        return _r2(term, tuple(position), s, params, order, rleaf)
    raise RuleError(f"unknown rule tag {tag!r}")


def _r2(term, position, head: Node, params, order, rleaf):
    i = head.label
    cls = order.classify(i)
    if not cls.is_successor:
        raise RuleError(f"{i} is not a successor label")
    i_minus = params.get("i-")
    if i_minus not in cls.maxima:
        raise RuleError(f"i- must be one of {', '.join(cls.maxima)}")
    # nearest enclosing node whose label is not >= i; everything between is >= i
    wrappers, jpos, jnode = [], None, None
    s = term
    path = []
    for k in range(len(position)):
        if isinstance(s, Node):
            path.append((tuple(position[:k]), s))
        s = (s.kids if isinstance(s, Node) else s.parts)[position[k]]
    for apos, anode in reversed(path):
        if order.leq_index(i, anode.label):
            wrappers.append(anode.label)
        else:
            jpos, jnode = apos, anode
            break
    if jnode is None:
        raise RuleError("R2 needs an enclosing node with a label below the head")
    j = jnode.label
    if not order.lt_index(j, i):
        raise RuleError(f"enclosing label {j} is not below {i}")
    cpos = position[:len(jpos) + 1]
    u = context_at(subterm(term, cpos), position[len(cpos):])
    J = set() if u == HOLE else {j, i_minus, *wrappers}
    rho = rleaf.name
    pattern = node(i_minus, plug(u, node(rho, HOLE)))
    seg = segment(pattern, J, order)
    if hole_count(seg) != 1:
        raise RuleError("the segment removed the head position")
    filled = plug(u, plug(seg, head.body))
    others = list(jnode.kids)
    del others[cpos[-1]]
    lhs = jnode
    rhs = forest(node(j, *others, filled), rleaf)
    info = (("j", j), ("J", "{" + ",".join(sorted(J)) + "}"))
    return lhs, rhs, jpos, info


def apply_rule(term: Term, position, tag: str, params, order, check_domain=True) -> Term:
    """Fire one rule; the result must stay path comparable."""
    _, rhs, where, _ = rule_instance(term, position, tag, params, order)
    result = replace_at(term, where, rhs)
    if check_domain and not is_path_comparable(result, order):
        raise RuleError("result is not path comparable")
    return result


def enumerate_candidates(term: Term, order, k_max: int = 3, window: int = 5) -> list:
    """Rule instances whose left-hand shape and label conditions match (results not built)."""
    rho = _rho(order)
    pair = node(rho, Leaf(rho))
    index = order.index
    out = []
    stack = [((p,), part, ()) for p, part in enumerate(term.parts)] if not term.connected \
        else [((), term, ())]
    while stack:
        pos, s, above = stack.pop()
        if not isinstance(s, Node):
            continue
        lab = s.label
        if s.kids == (pair,):
            out += [Move("R1'", pos, {"k": k}, term, order) for k in range(k_max + 1)]
        elif pair in s.kids:
            out += [Move("R1", pos, {"k": k}, term, order) for k in range(k_max + 1)]
        cls = order.classify(lab)
        if cls.is_successor:
            j = next((a for a in reversed(above) if not index.leq(lab, a)), None)
            if j is not None and index.lt(j, lab):
                out += [Move("R2", pos, {"i-": m}, term, order) for m in cls.maxima]
        elif cls.is_limit:
            out += [Move("R3", pos, {"i": i}, term, order) for i in index.below(lab, window)]
        inner = above + (lab,)
        for n in reversed(range(len(s.kids))):
            stack.append((pos + (n,), s.kids[n], inner))
    return out


def enumerate_moves(term: Term, order, k_max: int = 3, window: int = 5) -> list:
    """All applicable rule instances within the bounds, results built, duplicates dropped."""
    moves, seen = [], set()
    for m in enumerate_candidates(term, order, k_max, window):
        if not m.valid:
            continue
        key = (m.tag, m.params, m.result)
        if key not in seen:
            seen.add(key)
            moves.append(m)
    return moves


# -- descent checks ------------------------------------------------------------

@dataclass
class DecreaseReport:
    lhs: Term
    rhs: Term
    rows: list  # (index, Comparison of rhs vs lhs)

    @property
    def decreasing(self) -> bool:
        return all(c.lt for _, c in self.rows)

    def failing_indices(self) -> list:
        return [i for i, c in self.rows if not c.lt]


def check_rule_decrease(lhs: Term, rhs: Term, q: QuasiOrdering) -> DecreaseReport:
    """l sigma >>> r sigma, index by index."""
    for t in (lhs, rhs):
        if not is_path_comparable(t, q.order):
            raise RuleError(f"{t} is outside the path-comparable domain")
    return DecreaseReport(lhs, rhs, q.table(rhs, lhs))


def check_monotonicity(alpha: Term, beta: Term, ctx: Term, q: QuasiOrdering):
    """For alpha <<< beta: u[alpha] <<< u[beta]; None when the instance is out of scope."""
    ua, ub = plug(ctx, alpha), plug(ctx, beta)
    if not (is_path_comparable(ua, q.order) and is_path_comparable(ub, q.order)):
        return None
    if not q.lll(alpha, beta):
        return None
    return q.lll(ua, ub)


def check_numeral_substitution(l: Term, r: Term, sigma: dict, q: QuasiOrdering):
    """For r <<< l: r sigma <<< l sigma; None when the instance is out of scope."""
    if not q.lll(r, l):
        return None
    return q.lll(apply_substitution(r, sigma), apply_substitution(l, sigma))


@dataclass
class GenericSample:
    label: str
    context: Term
    sigma: dict
    lhs: Term
    rhs: Term
    descending: bool


@dataclass
class GenericReport:
    applicable: bool
    connected_rule: bool
    samples: list = field(default_factory=list)

    @property
    def violations(self) -> list:
        return [s for s in self.samples if not s.descending]

    @property
    def passed(self) -> bool:
        return self.applicable and not self.violations


def check_generic_method(l: Term, r: Term, q: QuasiOrdering, trials: int = 100, seed: int = 0,
                         max_context: int = 5, max_numeral: int = 4) -> GenericReport:
    """Sample (i, u[l])sigma vs (i, u[r])sigma with numeral sigma and check descent."""
    from .sampling import TermSampler

    order = q.order
    rho = _rho(order)
    connected = l.connected and r.connected and not isinstance(l, Leaf) \
        and not isinstance(r, Leaf)
    if not q.lll(r, l):
        return GenericReport(False, connected)
    report = GenericReport(True, connected)
    variables = sorted((node_labels(l) | _leaves(l) | _leaves(r)) & set(order.variables))
    labels = sorted(node_labels(l) | node_labels(r) | {rho}, key=str)
    sampler = TermSampler(labels, [rho, *variables], seed=seed, order=order)
    rng = sampler.rng
    attempts = 0
    while len(report.samples) < trials and attempts < trials * 50:
        attempts += 1
        ctx = HOLE if rng.random() < 0.25 else sampler.context(max_context)
        i = rng.choice(labels)
        sigma = {x: sampler.numeral(max_numeral, rho) for x in variables}
        L = apply_substitution(node(i, plug(ctx, l)), sigma)
        R = apply_substitution(node(i, plug(ctx, r)), sigma)
        if not (is_path_comparable(L, order) and is_path_comparable(R, order)):
            continue
        report.samples.append(GenericSample(i, ctx, sigma, L, R, q.lll(R, L)))
    return report


def _leaves(t: Term) -> set:
    from .terms import leaf_names
    return leaf_names(t)


# -- strategies ---------------------------------------------------------------

class Strategy:
    """Heracles picks (position, tag); the hydra picks the parameters."""

    def pick_redex(self, term: Term, moves: Sequence[Move]) -> tuple:
        raise NotImplementedError

    def pick_params(self, term: Term, position, tag, moves: Sequence[Move]) -> tuple:
        raise NotImplementedError


def _groups(moves):
    out = {}
    for m in moves:
        out.setdefault((m.position, m.tag), []).append(m)
    return out


class RandomStrategy(Strategy):
    def __init__(self, seed=0):
        self.rng = random.Random(seed)

    def pick_redex(self, term, moves):
        keys = list(_groups(moves))
        return self.rng.choice(keys)

    def pick_params(self, term, position, tag, moves):
        return self.rng.choice(moves).params


class GreedyStrategy(Strategy):
    """Choose by resulting node count: largest (default) or smallest."""

    def __init__(self, largest=True):
        self.largest = largest

    def _best(self, moves):
        # ties go to the first instance in preorder
        best, score = None, None
        for m in moves:
            n = m.result.node_count()
            if score is None or (n > score if self.largest else n < score):
                best, score = m, n
        return best

    def pick_redex(self, term, moves):
        best = self._best(moves)
        return best.position, best.tag

    def pick_params(self, term, position, tag, moves):
        return self._best(moves).params


@dataclass(frozen=True)
class ScriptedMove:
    tag: str
    position: tuple
    params: tuple


class ScriptedStrategy(Strategy):
    """Replays a fixed list of moves; parameters need not lie in the enumeration window."""

    def __init__(self, script: Iterable[ScriptedMove]):
        self.script = list(script)
        self.step = 0

    def _current(self):
        if self.step >= len(self.script):
            return None
        return self.script[self.step]

    def pick_redex(self, term, moves):
        cur = self._current()
        if cur is None:
            return None
        return cur.position, cur.tag

    def pick_params(self, term, position, tag, moves):
        cur = self._current()
        self.step += 1
        return cur.params


class InteractiveStrategy(Strategy):
    """Numbered-menu choices read from a line source."""

    def __init__(self, read: Callable[[str], str] = input, write: Callable[[str], None] = print):
        self.read, self.write = read, write

    def _menu(self, title, options):
        self.write(title)
        for n, text in enumerate(options, 1):
            self.write(f"  {n}) {text}")
        while True:
            answer = self.read("> ").strip()
            if answer in ("q", "quit"):
                return None
            if answer.isdigit() and 1 <= int(answer) <= len(options):
                return int(answer) - 1
            self.write(f"enter 1-{len(options)} or q")

    def pick_redex(self, term, moves):
        keys = list(_groups(moves))
        n = self._menu("Heracles, choose a redex:",
                       [f"{tag} at {format_position(p)}: {subterm(term, p)}" for p, tag in keys])
        return None if n is None else keys[n]

    def pick_params(self, term, position, tag, moves):
        if len(moves) == 1:
            return moves[0].params
        n = self._menu("Hydra, choose the parameters:",
                       [f"{m.params_text()} -> {m.result}" for m in moves])
        return moves[0].params if n is None else moves[n].params


# -- the game -----------------------------------------------------------------

@dataclass
class Certificate:
    indices: list  # indices at which strict descent was checked
    local: bool  # rule instance l sigma >>> r sigma
    step: bool  # whole term u[l sigma] >>> u[r sigma]


@dataclass
class Step:
    move: Move
    certificate: Certificate | None


@dataclass
class GameTrace:
    initial: Term
    steps: list
    status: str  # terminal | step-limit | size-limit | stopped
    settings: dict = field(default_factory=dict)

    @property
    def final(self) -> Term:
        return self.steps[-1].move.result if self.steps else self.initial

    @property
    def terms(self) -> list:
        return [self.initial] + [s.move.result for s in self.steps]

    @property
    def completed(self) -> bool:
        return self.status == "terminal"


def certify(before: Term, position, tag, params, after: Term, q: QuasiOrdering) -> Certificate:
    lhs, rhs, _, _ = rule_instance(before, position, tag, params, q.order)
    indices = q.representative_indices(before, after)
    local = q.lll(rhs, lhs)
    step = all(q.lt(i, after, before) for i in indices)
    return Certificate([str(i) for i in indices], local, step)


def play(initial: Term, order, heracles: Strategy, hydra: Strategy | None = None, *,
         k_max: int = 3, window: int = 5, limit_steps: int = 10_000,
         limit_size: int | None = None, verify: bool = True,
         q: QuasiOrdering | None = None, deadline: float | None = None) -> GameTrace:
    """Run a game until no move applies or a limit is reached.

    Strategies see the candidate instances; a result leaving the
    path-comparable domain is discarded and the choice is made again.
    ``deadline`` is a ``time.monotonic()`` value after which the game stops
    with status ``time-limit``.
    """
    if not is_path_comparable(initial, order):
        raise RuleError("the initial hydra is not path comparable")
    hydra = hydra or heracles
    q = q or QuasiOrdering(order)
    scripted = isinstance(heracles, ScriptedStrategy)
    settings = {"k_max": k_max, "window": window, "limit_steps": limit_steps,
                "limit_size": limit_size}
    term, steps = initial, []
    status = "terminal"
    cands = None
    while True:
        if cands is None:
            cands = enumerate_candidates(term, order, k_max, window)
        if not cands and not scripted:
            status = "terminal"
            break
        if len(steps) >= limit_steps:
            status = "step-limit"
            break
        if deadline is not None and time.monotonic() > deadline:
            status = "time-limit"
            break
        choice = heracles.pick_redex(term, cands)
        if choice is None:
            status = "terminal" if not cands else "stopped"
            break
        position, tag = choice
        group = [m for m in cands if m.position == tuple(position) and m.tag == tag]
        params = tuple(sorted(dict(hydra.pick_params(term, position, tag, group)).items()))
        move = next((m for m in group if m.params == params), None)
        try:
            if move is None:
                move = Move(tag, position, params, term, order)
            valid = move.valid
        except RuleError as exc:
            raise RuleError(f"step {len(steps) + 1}: {exc}") from None
        if not valid:
            if scripted:
                raise RuleError(f"step {len(steps) + 1}: result is not path comparable")
            cands = [m for m in cands if m is not move]
            continue
        after = move.result
        cert = None
        if verify:
            cert = certify(term, position, tag, params, after, q)
            if not (cert.local and cert.step):
                raise DescentViolation(f"step {len(steps) + 1} ({move}) is not strictly "
                                       f"descending: {term} -> {after}")
            if len(q._memo) > 200_000:
                q.clear()
        steps.append(Step(move, cert))
        term, cands = after, None
        if limit_size is not None and term.node_count() > limit_size:
            status = "size-limit"
            break
    return GameTrace(initial, steps, status, settings)


def terminal_shape_ok(trace: GameTrace, rho: str, max_depth: int = 2) -> bool:
    return is_numeral_forest(trace.final, rho, max_depth)


# -- trace files ----------------------------------------------------------------

TRACE_MAGIC = "# gqod-trace 1"


def order_digest(order) -> str:
    return hashlib.sha256(order.source.encode("utf-8")).hexdigest()


def write_trace(trace: GameTrace, order, seed=None) -> str:
    s = trace.settings
    lines = [
        TRACE_MAGIC,
        f"# order-sha256 {order_digest(order)}",
        f"# seed {'-' if seed is None else seed}",
        f"# limits k_max={s.get('k_max')} window={s.get('window')} "
        f"steps={s.get('limit_steps')} size={s.get('limit_size') or '-'}",
        f"# initial {trace.initial}",
    ]
    for n, st in enumerate(trace.steps, 1):
        m = st.move
        lines.append(f"{n}\t{m.tag}\t{format_position(m.position)}\t{m.params_text()}\t{m.result}")
    lines.append(f"# status {trace.status}")
    return "\n".join(lines) + "\n"


@dataclass
class ParsedTrace:
    header: dict
    initial: Term
    steps: list  # (n, tag, position, params, term)
    status: str | None


class TraceError(ValueError):
    pass


def parse_trace(text: str, order) -> ParsedTrace:
    lines = text.splitlines()
    if not lines or lines[0] != TRACE_MAGIC:
        raise TraceError("not a trace file")
    header, steps, status, initial = {}, [], None, None
    for lineno, line in enumerate(lines[1:], 2):
        if line.startswith("# "):
            key, _, value = line[2:].partition(" ")
            if key == "initial":
                initial = parse(value, order)
            elif key == "status":
                status = value
            else:
                header[key] = value
            continue
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 5:
            raise TraceError(f"line {lineno}: expected 5 tab-separated fields")
        try:
            steps.append((int(cols[0]), cols[1], parse_position(cols[2]),
                          parse_params(cols[3]), parse(cols[4], order)))
        except (ValueError, TermError) as exc:
            raise TraceError(f"line {lineno}: {exc}") from None
    if initial is None:
        raise TraceError("missing initial term")
    return ParsedTrace(header, initial, steps, status)


@dataclass
class ReplayReport:
    verified: int
    trace: GameTrace | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def replay(text: str, order, verify: bool = True) -> ReplayReport:
    """Re-run a trace step by step, checking every term and every descent."""
    parsed = parse_trace(text, order)
    digest = parsed.header.get("order-sha256")
    if digest is not None and digest != order_digest(order):
        return ReplayReport(0, None, "order-spec digest does not match")
    q = QuasiOrdering(order)
    term, steps = parsed.initial, []
    for n, tag, pos, params, recorded in parsed.steps:
        if n != len(steps) + 1:
            return ReplayReport(len(steps), None, f"step {n} out of sequence")
        try:
            after = apply_rule(term, pos, tag, params, order)
        except RuleError as exc:
            return ReplayReport(len(steps), None, f"step {n}: {exc}")
        if after != recorded:
            return ReplayReport(len(steps), None, f"step {n}: recorded term differs from {after}")
        cert = None
        if verify:
            cert = certify(term, pos, tag, params, after, q)
            if not (cert.local and cert.step):
                return ReplayReport(len(steps), None, f"step {n}: no strict descent")
        _, _, _, info = rule_instance(term, pos, tag, params, order)
        steps.append(Step(Move(tag, pos, params, term, order, result=after, info=info), cert))
        term = after
    settings = _settings_from_header(parsed.header)
    trace = GameTrace(parsed.initial, steps, parsed.status or "stopped", settings)
    return ReplayReport(len(steps), trace)


def _settings_from_header(header) -> dict:
    out = {}
    for item in header.get("limits", "").split():
        k, _, v = item.partition("=")
        key = {"steps": "limit_steps", "size": "limit_size"}.get(k, k)
        out[key] = None if v == "-" else int(v) if v.isdigit() else v
    return out
