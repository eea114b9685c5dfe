"""Terms: leaves, unary-labelled nodes (i, body) and natural sums a # b # ...

Terms are immutable and kept in canonical form: forest parts and node
children are sorted by their printed text, forests are flattened and a
one-part forest is just that part.  Two terms are identical exactly when
their canonical texts coincide, so ``==`` and ``hash`` go through the text.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Mapping, Sequence

Position = tuple  # tuple[int, ...]


class TermError(ValueError):
    pass


class ParseError(TermError):
    def __init__(self, message, pos=None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} at offset {pos}")


class Term:
    __slots__ = ("_text", "_hash", "_nodes")

    connected = True

    def __eq__(self, other):
        return self is other or (isinstance(other, Term) and self._text == other._text)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._text < other._text

    def __str__(self):
        return self._text

    def __repr__(self):
        return f"<{type(self).__name__} {self._text}>"

    @property
    def text(self) -> str:
        return self._text

    @property
    def parts(self) -> tuple:
        """Components: the term itself when connected."""
        return (self,)

    def node_count(self) -> int:
        return self._nodes


class Leaf(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._text = name
        self._hash = hash(name)
        self._nodes = 1


class Hole(Leaf):
    __slots__ = ()

    def __init__(self):
        super().__init__("*")


HOLE = Hole()


class Node(Term):
    __slots__ = ("label", "kids")

    def __init__(self, label: str, kids: tuple):
        # kids must already be canonical: connected, sorted
        self.label = label
        self.kids = kids
        self._text = f"({label}, {' # '.join(k._text for k in kids)})"
        self._hash = hash(self._text)
        self._nodes = 1 + sum(k._nodes for k in kids)

    @property
    def body(self) -> Term:
        return self.kids[0] if len(self.kids) == 1 else Forest(self.kids)


class Forest(Term):
    __slots__ = ("_parts",)

    connected = False

    def __init__(self, parts: tuple):
        self._parts = parts
        self._text = " # ".join(p._text for p in parts)
        self._hash = hash(self._text)
        self._nodes = sum(p._nodes for p in parts)

    @property
    def parts(self):
        return self._parts


def _flat(terms: Iterable[Term]) -> list:
    out = []
    for t in terms:
        out.extend(t.parts)
    return out


def leaf(name: str) -> Leaf:
    return HOLE if name == "*" else Leaf(name)


def node(label: str, *body: Term) -> Node:
    """``(label, b1 # b2 # ...)``; forest arguments are flattened."""
    kids = _flat(body)
    if not kids:
        raise TermError("a node needs a non-empty body")
    return Node(label, tuple(sorted(kids)))


def forest(*terms: Term) -> Term:
    """Natural sum of the given terms (flattened, canonical, one part -> that part)."""
    parts = _flat(terms)
    if not parts:
        raise TermError("empty natural sum")
    if len(parts) == 1:
        return parts[0]
    return Forest(tuple(sorted(parts)))


def times(t: Term, n: int) -> Term:
    """``t . n``: n copies of t as a natural sum."""
    if n < 1:
        raise TermError("multiplicity must be positive")
    return forest(*([t] * n))


def components(t: Term) -> tuple:
    return t.parts


def identical(a: Term, b: Term) -> bool:
    return a == b


def is_leaf(t: Term) -> bool:
    return isinstance(t, Leaf)


def is_node(t: Term) -> bool:
    return isinstance(t, Node)


def is_forest(t: Term) -> bool:
    return isinstance(t, Forest)


# -- measures -----------------------------------------------------------------

def size(*terms: Term) -> int:
    """Node constructors plus # constructors, every varyadic # counted once."""
    total = 0
    for t in terms:
        if isinstance(t, Forest):
            total += 1 + size(*t.parts)
        elif isinstance(t, Node):
            total += 1 + (len(t.kids) > 1) + size(*t.kids)
    return total


def occurrences(*terms: Term) -> int:
    """Occurrences of ( , ) and # when sums are written out with binary #."""
    total = 0
    for t in terms:
        if isinstance(t, Forest):
            total += len(t.parts) - 1 + occurrences(*t.parts)
        elif isinstance(t, Node):
            total += 1 + len(t.kids) - 1 + occurrences(*t.kids)
    return total


def depth(t: Term) -> int:
    """Height of the deepest part; a leaf has depth 0."""
    if isinstance(t, Forest):
        return max(depth(p) for p in t.parts)
    if isinstance(t, Node):
        return 1 + max(depth(k) for k in t.kids)
    return 0


def labels(t: Term) -> set:
    """All labels (node labels and leaf names) occurring in t."""
    out = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Leaf):
            out.add(s.name)
        elif isinstance(s, Node):
            out.add(s.label)
            stack.extend(s.kids)
        else:
            stack.extend(s.parts)
    return out


def node_labels(t: Term) -> set:
    out = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Node):
            out.add(s.label)
            stack.extend(s.kids)
        elif isinstance(s, Forest):
            stack.extend(s.parts)
    return out


def leaf_names(t: Term) -> set:
    return labels(t) - node_labels(t)


# -- domain predicates --------------------------------------------------------

def is_path_comparable(t: Term, order) -> bool:
    """Membership in the path-comparable domain: node labels comparable with their subtree."""
    def walk(s):
        # returns the label set of s, or None when s is not path comparable
        if isinstance(s, Leaf):
            return {s.name}
        found = {s.label}
        for k in s.kids:
            sub = walk(k)
            if sub is None:
                return None
            found |= sub
        if not all(order.comparable(s.label, x) for x in found):
            return None
        return found

    return all(walk(p) is not None for p in t.parts)


def is_numeral(t: Term, rho: str) -> bool:
    return t.connected and labels(t) == {rho}


def is_numeral_forest(t: Term, rho: str, max_depth: int | None = None) -> bool:
    return all(is_numeral(p, rho) and (max_depth is None or depth(p) <= max_depth)
               for p in t.parts)


def segment(t: Term, J: Iterable[str], order) -> Term:
    """The segment of a connected term on J: prune nodes whose label clashes with J."""
    if not t.connected:
        raise TermError("segments are taken of connected terms only")
    J = frozenset(J)
    if not J:
        return t
    if order.rho is None:
        raise TermError("segments need a configured rho")
    rho = Leaf(order.rho)
    index = order.index

    def go(s):
        if isinstance(s, Leaf):
            return s
        if any(not index.comparable(j, s.label) for j in J):
            return rho
        return node(s.label, *(go(k) for k in s.kids))

    return go(t)


def apply_substitution(t: Term, sigma: Mapping[str, Term]) -> Term:
    def go(s):
        if isinstance(s, Leaf):
            return sigma.get(s.name, s)
        if isinstance(s, Node):
            return node(s.label, *(go(k) for k in s.kids))
        return forest(*(go(p) for p in s.parts))

    return go(t)


def compose(sigma: Mapping[str, Term], tau: Mapping[str, Term]) -> dict:
    """The substitution "sigma then tau"."""
    out = {x: apply_substitution(v, tau) for x, v in sigma.items()}
    for x, v in tau.items():
        out.setdefault(x, v)
    return out


# -- positions ----------------------------------------------------------------

def children(t: Term) -> tuple:
    if isinstance(t, Node):
        return t.kids
    if isinstance(t, Forest):
        return t.parts
    return ()


def subterm(t: Term, pos: Sequence[int]) -> Term:
    for n in pos:
        kids = children(t)
        if not 0 <= n < len(kids):
            raise TermError(f"position {format_position(pos)} does not exist")
        t = kids[n]
    return t


def replace_at(t: Term, pos: Sequence[int], new: Term) -> Term:
    """Replace the occurrence at pos; a forest replacement merges into the parent sum."""
    if not pos:
        return new
    kids = list(children(t))
    n = pos[0]
    if not 0 <= n < len(kids):
        raise TermError(f"position {format_position(pos)} does not exist")
    kids[n] = replace_at(kids[n], pos[1:], new)
    if isinstance(t, Node):
        return node(t.label, *kids)
    return forest(*kids)


def positions(t: Term) -> Iterator[tuple]:
    """Positions of all connected occurrences, preorder (a root forest itself excluded)."""
    if t.connected:
        yield ()
    stack = [(pos, k) for pos, k in _numbered((), t)]
    while stack:
        pos, s = stack.pop()
        yield pos
        stack.extend(_numbered(pos, s))


def _numbered(pos, s):
    # children in reverse, so popping from a stack visits them in order
    kids = children(s)
    return [(pos + (n,), kids[n]) for n in reversed(range(len(kids)))]


def ancestors(t: Term, pos: Sequence[int]) -> list:
    """Node occurrences strictly enclosing pos, nearest first, as (position, Node)."""
    out = []
    s = t
    for k in range(len(pos)):
        if isinstance(s, Node):
            out.append((tuple(pos[:k]), s))
        s = children(s)[pos[k]]
    out.reverse()
    return out


def format_position(pos: Sequence[int]) -> str:
    return "/" + "/".join(str(n) for n in pos)


def parse_position(text: str) -> tuple:
    text = text.strip()
    if not text.startswith("/"):
        raise TermError(f"bad position {text!r}")
    body = text[1:]
    if not body:
        return ()
    try:
        return tuple(int(n) for n in body.split("/"))
    except ValueError:
        raise TermError(f"bad position {text!r}") from None


# -- contexts -----------------------------------------------------------------

def hole_count(t: Term) -> int:
    if isinstance(t, Leaf):
        return int(t == HOLE)
    return sum(hole_count(k) for k in children(t))


def plug(ctx: Term, t: Term) -> Term:
    """Put t into the hole of a one-hole context."""
    def go(s):
        if isinstance(s, Leaf):
            return t if s == HOLE else s
        if isinstance(s, Node):
            return node(s.label, *(go(k) for k in s.kids))
        return forest(*(go(p) for p in s.parts))

    return go(ctx)


def context_at(t: Term, pos: Sequence[int]) -> Term:
    """The one-hole context obtained by punching out the occurrence at pos."""
    return replace_at(t, pos, HOLE)


# -- parsing and printing -------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:([(),#])|([^\s(),#]+))")


def _tokens(text: str):
    pos = 0
    out = []
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if rest:
                raise ParseError(f"unexpected character {rest[0]!r}", pos)
            break
        out.append((m.group(1) or m.group(2), m.start(1) if m.group(1) else m.start(2),
                    m.group(1) is not None))
        pos = m.end()
    return out


def parse(text: str, order=None) -> Term:
    """Parse ``term := part ('#' part)*``, ``part := LEAF | '(' LABEL ',' term ')'``.

    With an order, labels are checked: node labels must be index labels,
    leaves must be leaf constants, variables, rho or the hole ``*``.
    """
    toks = _tokens(text)
    i = 0

    def peek():
        return toks[i] if i < len(toks) else (None, len(text), True)

    def expect(sym):
        nonlocal i
        tok, at, punct = peek()
        if not punct or tok != sym:
            raise ParseError(f"expected {sym!r}, found {tok!r}", at)
        i += 1

    def name(kind):
        nonlocal i
        tok, at, punct = peek()
        if tok is None or punct:
            raise ParseError(f"expected a {kind}, found {tok!r}", at)
        i += 1
        if order is not None:
            tok = order.canonical(tok)
            if kind == "label" and not order.is_index(tok):
                raise ParseError(f"unknown index label {tok!r}", at)
            if kind == "leaf" and tok != "*" and not order.is_leaf(tok):
                raise ParseError(f"unknown leaf label {tok!r}", at)
        return tok

    def part():
        nonlocal i
        tok, at, punct = peek()
        if punct and tok == "(":
            i += 1
            lab = name("label")
            expect(",")
            body = term()
            expect(")")
            return node(lab, body)
        return leaf(name("leaf"))

    def term():
        nonlocal i
        items = [part()]
        while True:
            tok, at, punct = peek()
            if punct and tok == "#":
                i += 1
                items.append(part())
            else:
                return forest(*items)

    result = term()
    if i != len(toks):
        tok, at, _ = toks[i]
        raise ParseError(f"trailing input {tok!r}", at)
    return result


def render_tree(t: Term, indent: str = "  ") -> str:
    """ASCII indentation rendering, one node per line."""
    lines = []

    def go(s, d):
        if isinstance(s, Leaf):
            lines.append(f"{indent * d}{s.name}")
        elif isinstance(s, Node):
            lines.append(f"{indent * d}{s.label}")
            for k in s.kids:
                go(k, d + 1)
        else:
            for p in s.parts:
                go(p, d)

    go(t, 0)
    return "\n".join(lines)
