"""Exhaustive enumeration and seeded random generation of terms."""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Sequence

from .terms import HOLE, Leaf, Term, forest, is_path_comparable, node


def enumerate_terms(node_labels: Sequence[str], leaves: Sequence[str], max_nodes: int,
                    connected_only: bool = False) -> list:
    """Every term (up to identity) with at most max_nodes tree nodes, canonical order."""
    node_labels, leaves = tuple(node_labels), tuple(leaves)

    @lru_cache(maxsize=None)
    def conn(n):
        if n == 1:
            return tuple(Leaf(a) for a in leaves)
        return tuple(node(l, b) for l in node_labels for b in sums(n - 1))

    @lru_cache(maxsize=None)
    def sums(n):
        # natural sums (one part or more) with exactly n nodes
        out = set()
        for first in range(1, n + 1):
            for c in conn(first):
                if first == n:
                    out.add(c)
                else:
                    out.update(forest(c, rest) for rest in sums(n - first))
        return tuple(sorted(out))

    out = []
    for n in range(1, max_nodes + 1):
        out.extend(conn(n) if connected_only else sums(n))
    return out


class TermSampler:
    """Seeded random terms over explicit label pools."""

    def __init__(self, node_labels: Sequence[str], leaves: Sequence[str], seed=0,
                 order=None):
        self.node_labels = list(node_labels)
        self.leaves = list(leaves)
        self.rng = random.Random(seed)
        self.order = order

    def connected(self, max_nodes: int, max_depth: int | None = None) -> Term:
        """A random connected term with at most max_nodes nodes."""
        budget = self.rng.randint(1, max_nodes)
        return self._conn(budget, max_depth if max_depth is not None else budget)

    def _conn(self, budget, depth):
        if budget <= 1 or depth <= 0 or self.rng.random() < 0.15:
            return Leaf(self.rng.choice(self.leaves))
        label = self.rng.choice(self.node_labels)
        return node(label, self._sum(budget - 1, depth - 1))

    def _sum(self, budget, depth):
        parts = []
        while budget > 0:
            take = self.rng.randint(1, budget)
            parts.append(self._conn(take, depth))
            budget -= take
            if self.rng.random() < 0.4:
                break
        return forest(*parts)

    def term(self, max_nodes: int, max_parts: int = 3) -> Term:
        k = self.rng.randint(1, max_parts)
        budget = max(1, max_nodes // k)
        return forest(*(self.connected(budget) for _ in range(k)))

    def path_comparable(self, max_nodes: int, connected: bool = False, tries: int = 1000,
                        max_depth: int | None = None) -> Term:
        """Rejection-sample a term of the path-comparable domain."""
        for _ in range(tries):
            t = self.connected(max_nodes, max_depth) if connected else self.term(max_nodes)
            if self.order is None or is_path_comparable(t, self.order):
                return t
        raise RuntimeError("no path-comparable term found")

    def numeral(self, max_nodes: int, rho: str) -> Term:
        saved = self.node_labels, self.leaves
        self.node_labels, self.leaves = [rho], [rho]
        try:
            return self.connected(max_nodes)
        finally:
            self.node_labels, self.leaves = saved

    def context(self, max_nodes: int, min_label=None) -> Term:
        """A one-hole context: a random term with one leaf position turned into the hole."""
        t = self.connected(max_nodes)
        return _punch(t, self.rng)


def _punch(t: Term, rng) -> Term:
    from .terms import positions, replace_at, subterm
    spots = [p for p in positions(t) if isinstance(subterm(t, p), Leaf)]
    return replace_at(t, rng.choice(spots), HOLE)


DEFAULT_HYDRA_LABELS = ("0", "1", "2", "3", "1'", "2'", "3'", "w'")


def _exact(rng, n, depth, labels, rho):
    # a connected term with exactly n tree nodes and at most depth levels below the root
    if n == 1:
        return Leaf(rho)
    if depth == 0:
        return None
    rest, parts = n - 1, []
    while rest:
        take = rng.randint(1, rest)
        part = _exact(rng, take, depth - 1, labels, rho)
        if part is None:
            return None
        parts.append(part)
        rest -= take
    return node(rng.choice(labels), forest(*parts))


def random_hydra(order, seed=0, max_nodes: int = 12, max_depth: int = 4,
                 node_labels: Sequence[str] = DEFAULT_HYDRA_LABELS, tries: int = 10_000) -> Term:
    """A path-comparable hydra (rho, a1) # ... # (rho, an) with rho leaves only.

    The total node count is drawn uniformly from 2..max_nodes first, so
    larger hydras are as likely as small ones.  Depth counts edges from a
    component root.
    """
    rho = order.rho
    rng = random.Random(seed)
    labels = list(node_labels)
    for _ in range(tries):
        total = rng.randint(2, max_nodes)
        parts, budget = [], total
        while budget >= 2:
            size = budget if rng.random() < 0.6 else rng.randint(2, budget)
            parts.append(_exact(rng, size, max_depth, labels, rho))
            budget -= size
        if None in parts or budget:
            continue
        parts = [node(rho, p.body) for p in parts]
        t = forest(*parts)
        if is_path_comparable(t, order):
            return t
    raise RuntimeError("no hydra found")
