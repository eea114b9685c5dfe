"""Independent reference implementations used only by the tests.

They work on a private representation (a term is a sorted tuple of
components; a component is ``("a", name)`` or ``("n", label, body)``) and
follow the recursive definitions clause by clause, with no matching
shortcuts.  They are slow and meant for small exhaustive sweeps.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from gqod.terms import Leaf, Node, Term

INF = "<inf>"


def to_tuple(t: Term) -> tuple:
    def comp(s):
        if isinstance(s, Leaf):
            return ("a", s.name)
        return ("n", s.label, tuple(sorted(comp(k) for k in s.kids)))
    return tuple(sorted(comp(p) for p in t.parts))


def _without(seq, k):
    return seq[:k] + seq[k + 1:]


class LiteralOrdering:
    """Clause-by-clause transcription of <=_i over a finite index order."""

    def __init__(self, order):
        self.order = order
        self.I = list(order.index.elements)
        self.ile = {(a, b) for a in self.I for b in self.I if order.index.leq(a, b)}
        self.leq = lru_cache(maxsize=None)(self._leq)

    def ilt(self, a, b):
        return a != b and (a, b) in self.ile

    def sections(self, beta: tuple, i) -> set:
        if len(beta) > 1:
            out = set()
            for p in beta:
                out |= self.sections((p,), i)
            return out
        (c,) = beta
        if c[0] == "a":
            return set()
        j, body = c[1], c[2]
        if i == j:
            return {body} | self.sections(body, i)
        if self.ilt(i, j):
            return self.sections(body, i)
        return set()

    def is_index(self, i, alpha) -> bool:
        return bool(self.sections(alpha, i))

    def sid(self, i, *terms):
        return {j for j in self.I if self.ilt(i, j) and any(self.is_index(j, t) for t in terms)}

    def _leq(self, i, a: tuple, b: tuple) -> bool:
        n, m = len(a), len(b)
        a_leaf = n == 1 and a[0][0] == "a"
        b_leaf = m == 1 and b[0][0] == "a"
        if a_leaf and b_leaf:
            return self.order.leq_leaf(a[0][1], b[0][1])
        if a_leaf:
            return True
        if b_leaf:
            return False
        if n + m > 2:
            for l in range(m):
                if all(self.leq(i, (a[k],), (b[l],)) and not self.leq(i, (b[l],), (a[k],))
                       for k in range(n)):
                    return True
            for k in range(n):
                for l in range(m):
                    if not self.leq(i, (a[k],), (b[l],)):
                        continue
                    if n == 1:
                        return True
                    if m >= 2 and self.leq(i, _without(a, k), _without(b, l)):
                        return True
            return False
        (_, j, a0), (_, jj, b0) = a[0], b[0]
        if i == INF:
            return self.ilt(j, jj) or (j == jj and self.leq(j, a0, b0))
        if any(self.leq(i, a, s) for s in self.sections(b, i)):
            return True
        if not all(self.leq(i, s, b) and not self.leq(i, b, s) for s in self.sections(a, i)):
            return False
        sid = self.sid(i, a, b)
        if sid:
            minimal = [h for h in sid if not any(self.ilt(g, h) for g in sid)]
            return all(self.leq(h, a, b) for h in minimal)
        return self.leq(INF, a, b)

    def leq_terms(self, i, alpha: Term, beta: Term) -> bool:
        return self.leq(INF if i is None or str(i) == "∞" else i, to_tuple(alpha), to_tuple(beta))

    def lll(self, alpha: Term, beta: Term) -> bool:
        a, b = to_tuple(alpha), to_tuple(beta)
        return all(self.leq(i, a, b) and not self.leq(i, b, a) for i in self.I + [INF])


# -- brute-force tree embedding -------------------------------------------------

def tree_nodes(t: Term):
    """Nodes of a connected term as (path, label) with paths as tuples; root is ()."""
    out = []

    def go(s, path):
        out.append((path, s.name if isinstance(s, Leaf) else s.label))
        if isinstance(s, Node):
            for n, k in enumerate(s.kids):
                go(k, path + (n,))

    go(t, ())
    return out


def _meet(p, q):
    n = 0
    while n < len(p) and n < len(q) and p[n] == q[n]:
        n += 1
    return p[:n]


def _strictly_between(lo, hi):
    # paths strictly between an ancestor lo and a descendant hi
    return [hi[:k] for k in range(len(lo) + 1, len(hi))]


def embeds_brute(alpha: Term, beta: Term, order) -> bool:
    """Try every injection of nodes and check the four conditions literally."""
    src, tgt = tree_nodes(alpha), tree_nodes(beta)
    tlab = dict(tgt)
    if len(src) > len(tgt):
        return False
    for image in itertools.permutations([p for p, _ in tgt], len(src)):
        iota = {s[0]: img for s, img in zip(src, image)}
        if not all(order.leq(l, tlab[iota[p]]) for p, l in src):
            continue
        if not all(iota[_meet(p, q)] == _meet(iota[p], iota[q]) for p, _ in src for q, _ in src):
            continue
        ok = True
        for p, l in src:
            if p:
                parent = p[:-1]
                if not all(order.leq(l, tlab[b]) for b in _strictly_between(iota[parent], iota[p])):
                    ok = False
                    break
        if not ok:
            continue
        root_img = iota[()]
        root_label = dict(src)[()]
        if all(order.leq(root_label, tlab[root_img[:k]]) for k in range(len(root_img))):
            return True
    return False


def forest_embeds_brute(alpha: Term, beta: Term, order) -> bool:
    A, B = alpha.parts, beta.parts
    if len(A) > len(B):
        return False
    return any(all(embeds_brute(a, B[k], order) for a, k in zip(A, perm))
               for perm in itertools.permutations(range(len(B)), len(A)))
