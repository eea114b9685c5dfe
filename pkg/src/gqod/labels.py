"""Index orders (I, <=_I), leaf orders (A, <=_A) and the order-spec loader.

Index orders are well partial orders.  Besides finite explicit orders two
infinite parametric families are built in:

``two-chain-omega``
    0 < 1 < 2 < ... and 0 < 1' < 2' < ..., both chains below a top w'.
    Unprimed and primed positive elements are incomparable.

``nat-omega``
    0 < 1 < 2 < ... < w.

Leaf orders are finite quasi orders (equivalence cycles allowed).  When
variables are declared the combined order is in "rewrite mode": rho is both
the least index label and the least leaf, and every variable sits strictly
between rho and the other index labels.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import count
from typing import Iterable, Iterator


class OrderError(ValueError):
    """Invalid order declaration or label."""


class UnsupportedOrderError(OrderError):
    pass


@dataclass(frozen=True)
class Classification:
    kind: str  # "minimum" | "successor" | "limit"
    maxima: tuple[str, ...] = ()

    @property
    def is_successor(self) -> bool:
        return self.kind == "successor"

    @property
    def is_limit(self) -> bool:
        return self.kind == "limit"


class LabelOrder:
    """Common interface of index orders."""

    kind = "abstract"
    finite = False

    def __contains__(self, name) -> bool:
        raise NotImplementedError

    def leq(self, a: str, b: str) -> bool:
        raise NotImplementedError

    def lt(self, a: str, b: str) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a: str, b: str) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def check(self, name: str) -> str:
        if name not in self:
            raise OrderError(f"{name!r} is not an index label")
        return name

    def minimal_elements(self, labels: Iterable[str]) -> set[str]:
        """The elements of a finite set with nothing strictly below them in the set."""
        s = {self.check(x) for x in labels}
        return {j for j in s if not any(self.lt(k, j) for k in s)}

    def below(self, i: str, limit: int | None = None) -> list[str]:
        """Elements strictly below ``i``, smallest first, at most ``limit`` of them."""
        raise NotImplementedError

    def classify(self, i: str) -> Classification:
        raise NotImplementedError

    def canonical(self, token: str) -> str:
        return token


class FiniteOrder(LabelOrder):
    """A finite partial order given by its reflexive-transitive closure."""

    kind = "finite-explicit"
    finite = True

    def __init__(self, elements: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        self.elements = tuple(dict.fromkeys(elements))
        index = {e: n for n, e in enumerate(self.elements)}
        up = {e: {e} for e in self.elements}
        for a, b in edges:
            if a not in index or b not in index:
                raise OrderError(f"edge {a} < {b} references an undeclared element")
            up[a].add(b)
        changed = True
        while changed:
            changed = False
            for a in self.elements:
                reach = set(up[a])
                for b in up[a]:
                    reach |= up[b]
                if reach != up[a]:
                    up[a] = reach
                    changed = True
        for a in self.elements:
            for b in up[a]:
                if a != b and a in up[b]:
                    raise OrderError(f"antisymmetry violated: {a} <= {b} <= {a}")
        self._up = {a: frozenset(s) for a, s in up.items()}
        self._rank = index

    def __contains__(self, name) -> bool:
        return name in self._up

    def leq(self, a, b):
        return b in self._up[a]

    def below(self, i, limit=None):
        self.check(i)
        out = [j for j in self.elements if j != i and self.leq(j, i)]
        # smallest first: fewer elements below means lower in the order
        out.sort(key=lambda j: (sum(1 for k in out if self.lt(k, j)), self._rank[j]))
        return out if limit is None else out[:limit]

    def classify(self, i):
        lower = self.below(i)
        if not lower:
            return Classification("minimum")
        maxima = tuple(j for j in lower if not any(self.lt(j, k) for k in lower))
        return Classification("successor", maxima)


_NAT = re.compile(r"0|[1-9][0-9]*")


class TwoChainOmega(LabelOrder):
    """0 < 1 < 2 < ..., 0 < 1' < 2' < ..., everything below w'."""

    kind = "two-chain-omega"
    top = "w'"

    def _decode(self, name):
        if not isinstance(name, str):
            return None
        if name == self.top:
            return ("top", 0)
        if _NAT.fullmatch(name):
            n = int(name)
            return ("base", 0) if n == 0 else ("left", n)
        if name.endswith("'") and _NAT.fullmatch(name[:-1]) and name[:-1] != "0":
            return ("right", int(name[:-1]))
        return None

    def canonical(self, token):
        return {"ω'": self.top}.get(token, token)

    def __contains__(self, name):
        return self._decode(name) is not None

    def leq(self, a, b):
        (ca, na), (cb, nb) = self._decode(a), self._decode(b)
        if ca == "base" or cb == "top":
            return True
        if ca == "top" or cb == "base":
            return False
        return ca == cb and na <= nb

    def _name(self, chain, n):
        if n == 0:
            return "0"
        return str(n) if chain == "left" else f"{n}'"

    def _all_below_top(self) -> Iterator[str]:
        yield "0"
        for n in count(1):
            yield str(n)
            yield f"{n}'"

    def below(self, i, limit=None):
        chain, n = self._decode(self.check(i))
        if chain == "top":
            if limit is None:
                raise UnsupportedOrderError("infinitely many elements below w'")
            it = self._all_below_top()
            return [next(it) for _ in range(limit)]
        out = [self._name(chain, m) for m in range(n)]
        return out if limit is None else out[:limit]

    def classify(self, i):
        chain, n = self._decode(self.check(i))
        if chain == "base":
            return Classification("minimum")
        if chain == "top":
            return Classification("limit")
        return Classification("successor", (self._name(chain, n - 1),))


class NatOmega(LabelOrder):
    """0 < 1 < 2 < ... < w."""

    kind = "nat-omega"
    top = "w"

    def _decode(self, name):
        if name == self.top:
            return float("inf")
        if isinstance(name, str) and _NAT.fullmatch(name):
            return int(name)
        return None

    def canonical(self, token):
        return {"ω": self.top}.get(token, token)

    def __contains__(self, name):
        return self._decode(name) is not None

    def leq(self, a, b):
        return self._decode(a) <= self._decode(b)

    def below(self, i, limit=None):
        n = self._decode(self.check(i))
        if n == float("inf"):
            if limit is None:
                raise UnsupportedOrderError("infinitely many elements below w")
            return [str(m) for m in range(limit)]
        out = [str(m) for m in range(n)]
        return out if limit is None else out[:limit]

    def classify(self, i):
        n = self._decode(self.check(i))
        if n == 0:
            return Classification("minimum")
        if n == float("inf"):
            return Classification("limit")
        return Classification("successor", (str(n - 1),))


BUILTINS = {"two-chain-omega": TwoChainOmega, "nat-omega": NatOmega}


class LeafOrder:
    """A finite quasi order on leaf constants, plus variables and rho."""

    def __init__(self, elements: Iterable[str], edges: Iterable[tuple[str, str]] = (),
                 variables: Iterable[str] = (), rho: str | None = None):
        self.variables = frozenset(variables)
        self.rho = rho
        names = list(dict.fromkeys([*elements, *sorted(self.variables)]))
        if rho is not None and rho not in names:
            names.insert(0, rho)
        self.elements = tuple(names)
        up = {e: {e} for e in names}
        for a, b in edges:
            if a not in up or b not in up:
                raise OrderError(f"leaf edge {a} <= {b} references an undeclared element")
            up[a].add(b)
        if rho is not None:
            for e in names:
                up[rho].add(e)
        changed = True
        while changed:
            changed = False
            for a in names:
                reach = set(up[a])
                for b in up[a]:
                    reach |= up[b]
                if reach != up[a]:
                    up[a] = reach
                    changed = True
        self._up = {a: frozenset(s) for a, s in up.items()}
        for x in self.variables:
            for y in self.variables:
                if x != y and self.leq(x, y):
                    raise OrderError(f"variables {x} and {y} must be incomparable")

    def __contains__(self, name):
        return name in self._up

    def leq(self, a, b):
        return b in self._up[a]


class CombinedOrder:
    """Index order and leaf order together, with the cross rule a < i."""

    def __init__(self, index: LabelOrder, leaves: LeafOrder, source: str = ""):
        self.index = index
        self.leaves = leaves
        self.rho = leaves.rho
        self.variables = leaves.variables
        self.source = source
        for a in leaves.elements:
            if a in index and a != self.rho:
                raise OrderError(f"{a!r} is declared both as index and as leaf label")
        if self.variables:
            if self.rho is None:
                raise OrderError("rho must be declared when variables are present")
            if self.rho not in index:
                raise OrderError("rho must be an index label when variables are present")
            if index.classify(self.rho).kind != "minimum" or (
                    index.finite and not all(index.leq(self.rho, i) for i in index.elements)):
                raise OrderError("rho must be the least index label")

    @property
    def rewrite_mode(self) -> bool:
        return bool(self.variables)

    def is_index(self, name) -> bool:
        return name in self.index

    def is_leaf(self, name) -> bool:
        return name in self.leaves

    def canonical(self, token: str) -> str:
        if self.rho is not None and token in ("ρ", "rho") and token not in self.leaves \
                and token not in self.index:
            return self.rho
        return self.index.canonical(token)

    def leq_index(self, i, j) -> bool:
        return self.index.leq(i, j)

    def lt_index(self, i, j) -> bool:
        return self.index.lt(i, j)

    def leq_leaf(self, a, b) -> bool:
        return self.leaves.leq(a, b)

    def leq(self, p: str, q: str) -> bool:
        """Combined order on all labels; rho (when declared) is least of everything."""
        if p == q:
            return True
        rho = self.rho
        if rho is not None:
            if p == rho:
                return True
            if q == rho:
                return p in self.leaves and self.leaves.leq(p, rho)
        p_index, q_index = p in self.index, q in self.index
        if p_index and q_index:
            return self.index.leq(p, q)
        if not p_index and not q_index:
            return self.leaves.leq(p, q)
        return q_index

    def comparable(self, p, q) -> bool:
        return self.leq(p, q) or self.leq(q, p)

    def classify(self, i) -> Classification:
        return self.index.classify(i)

    def minimal_elements(self, labels) -> set[str]:
        return self.index.minimal_elements(labels)


# -- order-spec documents ----------------------------------------------------

_SECTION = re.compile(r"\[\s*(I|A|V)\s*\]")


@dataclass
class _Draft:
    index_names: list = field(default_factory=list)
    index_edges: list = field(default_factory=list)
    leaf_names: list = field(default_factory=list)
    leaf_edges: list = field(default_factory=list)
    strict_leaf: list = field(default_factory=list)
    variables: list = field(default_factory=list)
    builtin: str | None = None
    rho: str | None = None
    saw_index: bool = False


def load_order_spec(text: str) -> CombinedOrder:
    """Parse an order-spec document (sections ``[I]``, ``[A]``, ``[V]``).

    Lines are ``a < b`` (chains ``a < b < c`` and ``b > a`` also accepted),
    ``a ~ b`` (leaf equivalence), ``rho = name``, ``builtin = <family>`` or a
    bare name.  ``#`` at line head starts a comment.
    """
    d = _Draft()
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _SECTION.fullmatch(line)
        if m:
            section = m.group(1)
            d.saw_index |= section == "I"
            continue
        where = f"line {lineno}"
        if "=" in line:
            key, _, value = (s.strip() for s in line.partition("="))
            if key == "rho":
                d.rho = value
            elif key == "builtin":
                if section != "I":
                    raise OrderError(f"{where}: builtin only allowed in [I]")
                if value not in BUILTINS:
                    raise OrderError(f"{where}: unknown builtin {value!r}")
                d.builtin = value
            else:
                raise OrderError(f"{where}: unknown setting {key!r}")
            continue
        if section is None:
            raise OrderError(f"{where}: declaration outside of a section")
        _parse_relation(d, section, line, where)

    if not d.saw_index or (d.builtin is None and not d.index_names):
        raise OrderError("the [I] section is missing or empty")
    if d.builtin is not None:
        if d.index_names or d.index_edges:
            raise OrderError("a builtin index order cannot be extended")
        index = BUILTINS[d.builtin]()
    else:
        index = FiniteOrder(d.index_names, d.index_edges)
    rho = d.rho
    if rho is not None:
        rho = index.canonical(rho)
        if rho not in index and rho not in d.leaf_names:
            raise OrderError(f"rho = {rho!r} names an undeclared element")
    elif d.variables:
        raise OrderError("rho must be declared when [V] lists variables")
    for x in d.variables:
        if x in index or x in d.leaf_names:
            raise OrderError(f"variable {x!r} clashes with a declared label")
    leaves = LeafOrder(d.leaf_names, d.leaf_edges, d.variables, rho)
    for a, b in d.strict_leaf:
        if leaves.leq(b, a):
            raise OrderError(f"cycle through strict leaf edge {a} < {b}")
    return CombinedOrder(index, leaves, source=text)


def _parse_relation(d: _Draft, section: str, line: str, where: str) -> None:
    tokens = re.split(r"\s*([<>~])\s*", line)
    names, ops = tokens[0::2], tokens[1::2]
    if any(not n or re.search(r"[\s(),#*]", n) for n in names):
        raise OrderError(f"{where}: malformed declaration {line!r}")
    if section == "V":
        if ops:
            raise OrderError(f"{where}: variables are pairwise incomparable")
        d.variables.extend(names)
        return
    target_names = d.index_names if section == "I" else d.leaf_names
    if section == "I" and d.builtin is not None:
        raise OrderError(f"{where}: a builtin index order cannot be extended")
    for n in names:
        if n not in target_names:
            target_names.append(n)
    for a, op, b in zip(names, ops, names[1:]):
        if op == "~":
            if section != "A":
                raise OrderError(f"{where}: equivalences are only allowed among leaves")
            d.leaf_edges += [(a, b), (b, a)]
            continue
        lo, hi = (a, b) if op == "<" else (b, a)
        if lo == hi:
            raise OrderError(f"{where}: {lo} < {lo} is not strict")
        if section == "I":
            d.index_edges.append((lo, hi))
        else:
            d.leaf_edges.append((lo, hi))
            d.strict_leaf.append((lo, hi))


PRESETS = {
    # two-chain-omega index order with the leaf order of the forest example
    "example22": """\
[I]
builtin = two-chain-omega
[A]
0'' < 1'' < 2''
0'' < 1''' < 2'''
2'' ~ 2'''
""",
    # the hydra play: two-chain-omega, V = {x}, rho = 0
    "play": """\
[I]
builtin = two-chain-omega
[V]
x
rho = 0
""",
    "play2": """\
[I]
builtin = two-chain-omega
[V]
x
y
rho = 0
""",
    "counterexample": """\
[I]
0 < a1 < b1
0 < a2 < b2
[A]
0
rho = 0
""",
    "chain2": """\
[I]
0 < 1
[A]
ρ
rho = ρ
""",
    "nat": """\
[I]
builtin = nat-omega
[A]
0'' < 1'' < 2'' < 3'' < 4'' < 5'' < 6'' < 7'' < 8'' < 9'' < 10'' < 11''
""",
}


def preset(name: str) -> CombinedOrder:
    try:
        return load_order_spec(PRESETS[name])
    except KeyError:
        raise OrderError(f"unknown preset {name!r}") from None
