"""Tree embedding with gap condition, forest embedding, and witness checks.

A connected term is read as a rooted labelled tree (leaves carry their leaf
label).  Positions are those of :mod:`gqod.terms`; a witness maps every node
position of the source to a node position of the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .terms import Leaf, Node, Term, TermError, format_position, is_path_comparable, \
    parse_position, subterm


class _Tree:
    """Flat view of a connected term: labels, children and positions per node id."""

    def __init__(self, t: Term, prefix: tuple = ()):
        if not t.connected:
            raise TermError("tree embedding needs connected terms")
        self.label, self.kids, self.pos = [], [], []

        def go(s, pos):
            me = len(self.label)
            self.label.append(s.name if isinstance(s, Leaf) else s.label)
            self.kids.append([])
            self.pos.append(pos)
            if isinstance(s, Node):
                for n, k in enumerate(s.kids):
                    self.kids[me].append(go(k, pos + (n,)))
            return me

        go(t, tuple(prefix))

    def __len__(self):
        return len(self.label)


class _Search:
    def __init__(self, src: _Tree, tgt: _Tree, order):
        self.s, self.t, self.order = src, tgt, order
        self._can = {}

    def leq(self, a, b):
        return self.order.leq(a, b)

    def can(self, s, v):
        """Image map for the subtree at s rooted exactly at v, or None."""
        key = (s, v)
        if key in self._can:
            return self._can[key]
        self._can[key] = None
        S, T = self.s, self.t
        result = None
        if self.leq(S.label[s], T.label[v]):
            kids, slots = S.kids[s], T.kids[v]
            if len(kids) <= len(slots):
                result = self._assign(s, v, kids, slots)
        self._can[key] = result
        return result

    def landing(self, c, x):
        """Maps for child c placed in the subtree of target child x (gap condition)."""
        lab = self.s.label[c]
        stack = [x]
        while stack:
            w = stack.pop()
            found = self.can(c, w)
            if found is not None:
                return found
            if self.leq(lab, self.t.label[w]):
                stack.extend(reversed(self.t.kids[w]))
        return None

    def _assign(self, s, v, kids, slots):
        # bipartite matching of source children to distinct target-child subtrees
        options = {}

        def edge(c, x):
            key = (c, x)
            if key not in options:
                options[key] = self.landing(c, x)
            return options[key] is not None

        owner = {}

        def augment(c, seen):
            for x in slots:
                if x not in seen and edge(c, x):
                    seen.add(x)
                    if x not in owner or augment(owner[x], seen):
                        owner[x] = c
                        return True
            return False

        for c in kids:
            if not augment(c, set()):
                return None
        image = {s: v}
        for x, c in owner.items():
            image.update(options[(c, x)])
        return image

    def root(self):
        lab = self.s.label[0]
        stack = [0]
        while stack:
            w = stack.pop()
            found = self.can(0, w)
            if found is not None:
                return found
            if self.leq(lab, self.t.label[w]):
                stack.extend(reversed(self.t.kids[w]))
        return None


@dataclass
class EmbeddingWitness:
    pairs: dict  # source position -> target position

    def lines(self) -> list:
        return [f"{format_position(s)} -> {format_position(t)}"
                for s, t in sorted(self.pairs.items())]

    def __str__(self):
        return "\n".join(self.lines())

    @classmethod
    def parse(cls, text: str) -> "EmbeddingWitness":
        pairs = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            left, sep, right = line.partition("->")
            if not sep:
                raise ValueError(f"bad witness line {line!r}")
            pairs[parse_position(left)] = parse_position(right)
        return cls(pairs)


def tree_embed(alpha: Term, beta: Term, order) -> EmbeddingWitness | None:
    """A witness for alpha embedding into beta (both connected), or None."""
    src, tgt = _Tree(alpha), _Tree(beta)
    if len(src) > len(tgt):
        return None
    image = _Search(src, tgt, order).root()
    if image is None:
        return None
    return EmbeddingWitness({src.pos[a]: tgt.pos[b] for a, b in image.items()})


@dataclass
class ForestEmbedding:
    assignment: list  # (source component, target component) pairs
    witness: EmbeddingWitness  # positions in the whole source / target terms
    per_component: list = field(default_factory=list)


def _component_prefix(t: Term, k: int) -> tuple:
    return () if t.connected else (k,)


def forest_embed(alpha: Term, beta: Term, order) -> ForestEmbedding | None:
    A, B = alpha.parts, beta.parts
    if len(A) > len(B):
        return None
    found = {}

    def edge(a, b):
        if (a, b) not in found:
            found[(a, b)] = tree_embed(A[a], B[b], order)
        return found[(a, b)] is not None

    owner = {}

    def augment(a, seen):
        for b in range(len(B)):
            if b not in seen and edge(a, b):
                seen.add(b)
                if b not in owner or augment(owner[b], seen):
                    owner[b] = a
                    return True
        return False

    for a in range(len(A)):
        if not augment(a, set()):
            return None
    assignment = sorted((a, b) for b, a in owner.items())
    pairs, per = {}, []
    for a, b in assignment:
        w = found[(a, b)]
        per.append(w)
        pa, pb = _component_prefix(alpha, a), _component_prefix(beta, b)
        pairs.update({pa + s: pb + t for s, t in w.pairs.items()})
    return ForestEmbedding(assignment, EmbeddingWitness(pairs), per)


def _label(t: Term, pos) -> str:
    s = subterm(t, pos)
    if isinstance(s, Leaf):
        return s.name
    if isinstance(s, Node):
        return s.label
    raise TermError(f"{format_position(pos)} is not a tree node")


def _tree_positions(t: Term, prefix=()) -> list:
    return list(_Tree(t, prefix).pos)


def verify_witness(alpha: Term, beta: Term, witness: EmbeddingWitness, order) -> list:
    """Re-check every embedding condition; returns the list of violations (empty when valid)."""
    problems = []
    iota = witness.pairs
    src = []
    for k, part in enumerate(alpha.parts):
        src += _tree_positions(part, _component_prefix(alpha, k))
    if set(iota) != set(src):
        return ["witness domain differs from the source nodes"]
    try:
        labels_t = {p: _label(beta, p) for p in iota.values()}
    except TermError as exc:
        return [str(exc)]
    if len(set(iota.values())) != len(iota):
        problems.append("not injective")
    roots = {}
    for k, part in enumerate(alpha.parts):
        roots[_component_prefix(alpha, k)] = k
    tgt_comp = lambda p: p[:1] if not beta.connected else ()
    for p in src:
        lab = _label(alpha, p)
        if not order.leq(lab, labels_t[iota[p]]):
            problems.append(f"node condition 1 fails at {format_position(p)}")
    for p in src:
        for r in src:
            base = _common(p, r)
            if len(base) < _root_len(alpha) :
                continue  # different components are not related by the tree order
            if iota[base] != _common(iota[p], iota[r]):
                problems.append(f"node condition 2 fails at {format_position(p)}, "
                                f"{format_position(r)}")
    for p in src:
        if len(p) > _root_len(alpha):
            lab, lo, hi = _label(alpha, p), iota[p[:-1]], iota[p]
            if hi[:len(lo)] != lo or len(hi) <= len(lo):
                problems.append(f"edge {format_position(p)} is not mapped upward")
                continue
            for k in range(len(lo) + 1, len(hi)):
                if not order.leq(lab, _label(beta, hi[:k])):
                    problems.append(f"edge condition fails at {format_position(p)}")
                    break
    for root in roots:
        lab, img = _label(alpha, root), iota[root]
        start = _root_len(beta)
        for k in range(start, len(img)):
            if not order.leq(lab, _label(beta, img[:k])):
                problems.append(f"root condition fails at {format_position(root)}")
                break
    if not alpha.connected and len({tgt_comp(iota[r]) for r in roots}) != len(roots):
        problems.append("two source components share a target component")
    return problems


def _root_len(t: Term) -> int:
    return 0 if t.connected else 1


def _common(p, q):
    n = 0
    while n < len(p) and n < len(q) and p[n] == q[n]:
        n += 1
    return p[:n]


@dataclass
class ImplicationReport:
    embeds: bool
    ordered: bool | None

    @property
    def holds(self) -> bool:
        return not self.embeds or bool(self.ordered)


def check_embed_implies_order(alpha: Term, beta: Term, q) -> ImplicationReport:
    order = q.order
    for t in (alpha, beta):
        if not is_path_comparable(t, order):
            raise ValueError(f"{t} is not path comparable")
    if forest_embed(alpha, beta, order) is None:
        return ImplicationReport(False, None)
    return ImplicationReport(True, q.lll_eq(alpha, beta))


def bad_sequence_smoke(candidates: Sequence[Term], order, limit: int = 200) -> list:
    """Greedily collect a sequence in which no earlier term embeds into a later one."""
    seq = []
    for t in candidates:
        if len(seq) >= limit:
            break
        if all(forest_embed(s, t, order) is None for s in seq):
            seq.append(t)
    return seq
