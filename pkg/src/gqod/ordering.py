"""i-sections, indices and the indexed quasi orderings <=_i, i in I or infinity.

``QuasiOrdering`` binds the definitions to one ``CombinedOrder`` and memoizes
every comparison by ``(i, alpha, beta)``.

The forest clause is existential over choices of components.  Rather than
recursing over sub-multisets it is decided with bipartite matchings over the
component-wise relations; ``tests/oracles.py`` holds a literal recursive
transcription that the matching version is checked against.  Where a sum is
split off one component at a time, any component of the left side may be
taken first (the relation is on multisets, so no component is privileged).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .labels import CombinedOrder
from .terms import Forest, Leaf, Node, Term, node_labels, occurrences


class _Infinity:
    __slots__ = ()

    def __repr__(self):
        return "∞"

    __str__ = __repr__

    def __reduce__(self):
        return (_infinity, ())


def _infinity():
    return INFINITY


INFINITY = _Infinity()


@dataclass(frozen=True)
class Comparison:
    leq: bool
    geq: bool

    @property
    def lt(self) -> bool:
        return self.leq and not self.geq

    @property
    def gt(self) -> bool:
        return self.geq and not self.leq

    @property
    def equiv(self) -> bool:
        return self.leq and self.geq


class MeasureError(AssertionError):
    """A recursive call failed to decrease the induction measure."""


def _max_matching(rows: Sequence[int], cols: Sequence[int], edge) -> int:
    """Size of a maximum matching (Kuhn's augmenting paths)."""
    owner = {}

    def augment(r, seen):
        for c in cols:
            if c not in seen and edge(r, c):
                seen.add(c)
                if c not in owner or augment(owner[c], seen):
                    owner[c] = r
                    return True
        return False

    return sum(1 for r in rows if augment(r, set()))


class QuasiOrdering:
    """The family <=_i over one combined label order."""

    def __init__(self, order: CombinedOrder, debug: bool = False):
        self.order = order
        self.index = order.index
        self.debug = debug
        self._memo: dict = {}
        self._sections: dict = {}
        self._indices: dict = {}
        self._stack: list = []
        self.max_depth = 0

    def clear(self):
        self._memo.clear()
        self._sections.clear()
        self._indices.clear()

    # -- sections and indices ---------------------------------------------

    def sections(self, beta: Term, i) -> tuple:
        """All i-sections of beta, deduplicated, in canonical order."""
        key = (beta, i)
        hit = self._sections.get(key)
        if hit is not None:
            return hit
        found = set()
        if isinstance(beta, Node):
            j = beta.label
            if j == i:
                found.add(beta.body)
                found.update(self._sections_of_body(beta, i))
            elif self.index.lt(i, j):
                found.update(self._sections_of_body(beta, i))
        elif isinstance(beta, Forest):
            for p in beta.parts:
                found.update(self.sections(p, i))
        out = tuple(sorted(found))
        self._sections[key] = out
        return out

    def _sections_of_body(self, beta: Node, i):
        for k in beta.kids:
            yield from self.sections(k, i)

    def indices(self, alpha: Term) -> frozenset:
        """Labels i for which alpha has an i-section."""
        hit = self._indices.get(alpha)
        if hit is not None:
            return hit
        if isinstance(alpha, Leaf):
            out = frozenset()
        elif isinstance(alpha, Node):
            j = alpha.label
            below = set()
            for k in alpha.kids:
                below |= {l for l in self.indices(k) if self.index.leq(l, j)}
            below.add(j)
            out = frozenset(below)
        else:
            out = frozenset().union(*(self.indices(p) for p in alpha.parts))
        self._indices[alpha] = out
        return out

    def sid(self, i, terms: Iterable[Term]) -> frozenset:
        if i is INFINITY:
            return frozenset()
        found = set()
        for t in terms:
            found |= self.indices(t)
        return frozenset(j for j in found if self.index.lt(i, j))

    # -- the orderings -------------------------------------------------------

    def measure(self, i, alpha, beta) -> tuple:
        return (occurrences(alpha, beta), len(self.sid(i, (alpha, beta))),
                0 if i is INFINITY else 1)

    def leq(self, i, alpha: Term, beta: Term) -> bool:
        """alpha <=_i beta."""
        if self.debug:
            return self._leq_checked(i, alpha, beta)
        key = (i, alpha, beta)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._decide(i, alpha, beta)
        return hit

    def _leq_checked(self, i, alpha, beta):
        m = self.measure(i, alpha, beta)
        if self._stack and not m < self._stack[-1]:
            raise MeasureError(f"measure {m} does not decrease below {self._stack[-1]} "
                               f"at {i}: {alpha} vs {beta}")
        self._stack.append(m)
        self.max_depth = max(self.max_depth, len(self._stack))
        try:
            key = (i, alpha, beta)
            hit = self._memo.get(key)
            if hit is None:
                hit = self._memo[key] = self._decide(i, alpha, beta)
            return hit
        finally:
            self._stack.pop()

    def _decide(self, i, a, b) -> bool:
        a_leaf, b_leaf = isinstance(a, Leaf), isinstance(b, Leaf)
        if a_leaf and b_leaf:
            return self.order.leq_leaf(a.name, b.name)
        if a_leaf:
            return True
        if b_leaf:
            return False
        if isinstance(a, Forest) or isinstance(b, Forest):
            return self._forest_leq(i, a.parts, b.parts)
        j, k = a.label, b.label
        if i is INFINITY:
            if j == k:
                return self.leq(j, a.body, b.body)
            return self.index.lt(j, k)
        if any(self.leq(i, a, s) for s in self.sections(b, i)):
            return True
        for s in self.sections(a, i):
            if not self.leq(i, s, b) or self.leq(i, b, s):
                return False
        sid = self.sid(i, (a, b))
        if sid:
            return all(self.leq(m, a, b) for m in sorted(self.index.minimal_elements(sid)))
        return self.leq(INFINITY, a, b)

    def _forest_leq(self, i, X: tuple, Y: tuple) -> bool:
        # X, Y are multisets of connected terms with len(X) + len(Y) > 2 and
        # neither side a single leaf.  Peeling one matched pair at a time ends
        # in one of three ways: X used up (a perfect matching), a single leaf
        # of X left against at least two parts of Y, or the rest of X lying
        # strictly below one part y of Y (with a leaf y, more than one rest
        # element needs some other part of Y left over).
        n, m = len(X), len(Y)
        le = {}

        def edge(r, c):
            v = le.get((r, c))
            if v is None:
                v = le[(r, c)] = self.leq(i, X[r], Y[c])
            return v

        rows, cols = range(n), range(m)
        if n <= m and _max_matching(rows, cols, edge) == n:
            return True
        if m >= n + 1:
            seen = set()
            for r in rows:
                if isinstance(X[r], Leaf) and X[r] not in seen:
                    seen.add(X[r])
                    rest = [q for q in rows if q != r]
                    if _max_matching(rest, cols, edge) == n - 1:
                        return True
        for c in cols:
            below = [r for r in rows if edge(r, c) and not self.leq(i, Y[c], X[r])]
            if not below:
                continue
            rest = [r for r in rows if r not in below]
            others = [q for q in cols if q != c]
            if len(rest) > len(others):
                continue
            if isinstance(Y[c], Leaf) and len(below) >= 2 and len(others) - len(rest) < 1:
                continue
            if _max_matching(rest, others, edge) == len(rest):
                return True
        return False

    def compare(self, i, alpha: Term, beta: Term) -> Comparison:
        return Comparison(self.leq(i, alpha, beta), self.leq(i, beta, alpha))

    def lt(self, i, alpha, beta) -> bool:
        return self.leq(i, alpha, beta) and not self.leq(i, beta, alpha)

    # -- the aggregate ordering ------------------------------------------------

    def representative_indices(self, *terms: Term) -> list:
        """Occurring node labels, rho (when it is an index label) and infinity."""
        found = set()
        for t in terms:
            found |= node_labels(t)
        rho = self.order.rho
        if rho is not None and rho in self.index:
            found.add(rho)
        return sorted(found, key=str) + [INFINITY]

    def all_indices(self) -> list:
        if not self.index.finite:
            raise ValueError("full enumeration needs a finite index order")
        return list(self.index.elements) + [INFINITY]

    def lll(self, alpha: Term, beta: Term, indices=None) -> bool:
        """alpha <_i beta at every index (representative set unless indices given)."""
        if indices is None:
            indices = self.representative_indices(alpha, beta)
        return all(self.lt(i, alpha, beta) for i in indices)

    def lll_eq(self, alpha, beta, indices=None) -> bool:
        return alpha == beta or self.lll(alpha, beta, indices)

    def table(self, alpha, beta, indices=None) -> list:
        """(index, Comparison) rows for a comparison report."""
        if indices is None:
            indices = self.representative_indices(alpha, beta)
        return [(i, self.compare(i, alpha, beta)) for i in indices]


@dataclass
class ChainReport:
    descending: list  # per adjacent pair: seq[n] >>> seq[n+1]
    good_pairs: list  # (m, n) with m < n and seq[m] <<<= seq[n]

    @property
    def strictly_descending(self) -> bool:
        return all(self.descending)

    @property
    def bad(self) -> bool:
        return not self.good_pairs


def descending_chain_check(q: QuasiOrdering, seq: Sequence[Term]) -> ChainReport:
    desc = [q.lll(seq[n + 1], seq[n]) for n in range(len(seq) - 1)]
    good = [(m, n) for n in range(len(seq)) for m in range(n) if q.lll_eq(seq[m], seq[n])]
    return ChainReport(desc, good)
