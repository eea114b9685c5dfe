import itertools

import pytest
from hypothesis import given, settings, strategies as st

from gqod.labels import (FiniteOrder, LeafOrder, NatOmega, OrderError,
                         TwoChainOmega, UnsupportedOrderError, load_order_spec, preset)

TWO = TwoChainOmega()


def test_minimal_elements_chain():
    assert TWO.minimal_elements({"1", "2"}) == {"1"}


def test_minimal_elements_empty():
    assert TWO.minimal_elements(set()) == set()


def test_minimal_elements_incomparable_pair():
    assert TWO.minimal_elements({"1", "1'"}) == {"1", "1'"}


def test_two_chain_shape():
    assert TWO.leq("0", "5") and TWO.leq("0", "5'") and TWO.leq("7'", "w'")
    assert not TWO.comparable("1", "1'")
    assert not TWO.leq("w'", "3")
    assert TWO.canonical("ω'") == "w'"
    assert "0'" not in TWO and "x" not in TWO


def test_classify_two_chain():
    assert TWO.classify("w'").is_limit
    c = TWO.classify("2")
    assert c.is_successor and c.maxima == ("1",)
    assert TWO.classify("1'").maxima == ("0",)
    assert TWO.classify("0").kind == "minimum"


def test_below_window_under_limit():
    assert TWO.below("w'", 5) == ["0", "1", "1'", "2", "2'"]
    with pytest.raises(UnsupportedOrderError):
        TWO.below("w'")


def test_nat_omega():
    n = NatOmega()
    assert n.classify("w").is_limit and n.classify("3").maxima == ("2",)
    assert n.below("w", 3) == ["0", "1", "2"]
    assert n.leq("12", "w") and not n.leq("w", "12")


def test_finite_order_closure_and_classify():
    o = FiniteOrder("abcd", [("a", "b"), ("b", "c"), ("a", "d")])
    assert o.leq("a", "c") and not o.comparable("c", "d")
    assert o.classify("c").maxima == ("b",)
    assert o.classify("a").kind == "minimum"
    top = FiniteOrder("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
    assert set(top.classify("d").maxima) == {"b", "c"}


def test_finite_order_rejects_cycle():
    with pytest.raises(OrderError):
        FiniteOrder("ab", [("a", "b"), ("b", "a")])


def test_load_example_order():
    o = preset("example22")
    assert o.classify("w'").is_limit
    assert o.leq_leaf("0''", "2'''") and o.leq_leaf("2''", "2'''") and o.leq_leaf("2'''", "2''")
    assert not o.leq_leaf("1''", "1'''")


def test_load_counterexample_order():
    o = load_order_spec("[I]\n0\na1 > 0\nb1 > a1\na2 > 0\nb2 > a2\n[A]\n0\nrho = 0\n")
    idx = o.index
    for c, d in itertools.product(["a1", "b1"], ["a2", "b2"]):
        assert not idx.comparable(c, d)
    assert idx.lt("0", "b2")


@pytest.mark.parametrize("text", [
    "[A]\na\n",
    "[I]\n",
    "[I]\na < b\nb < a\n",
    "[I]\na ~ b\n",
    "[I]\na < b\n[V]\nx\n",
    "[I]\nbuiltin = nope\n",
    "a < b\n",
    "[I]\na\nrho = zz\n",
])
def test_load_rejects(text):
    with pytest.raises(OrderError):
        load_order_spec(text)


def test_rewrite_mode_cross_rule():
    o = preset("play")
    assert o.rewrite_mode and o.rho == "0"
    assert o.leq("0", "x") and o.leq("x", "1") and not o.leq("1", "x")
    assert o.canonical("rho") == "0" and o.canonical("ρ") == "0"


def test_leaf_order_variables_incomparable():
    with pytest.raises(OrderError):
        LeafOrder(["x", "y"], [("x", "y")], variables=["x", "y"])


def test_unknown_preset():
    with pytest.raises(OrderError):
        preset("nope")


# -- property tests -------------------------------------------------------------

labels = st.sampled_from(["0", "1", "2", "3", "1'", "2'", "5'", "w'"])


@given(labels, labels, labels)
def test_two_chain_is_partial_order(a, b, c):
    assert TWO.leq(a, a)
    if TWO.leq(a, b) and TWO.leq(b, c):
        assert TWO.leq(a, c)
    if TWO.leq(a, b) and TWO.leq(b, a):
        assert a == b


@st.composite
def finite_orders(draw):
    n = draw(st.integers(1, 7))
    names = [f"i{k}" for k in range(n)]
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=12))
    return FiniteOrder(names, [(names[a], names[b]) for a, b in edges if a < b])


@settings(max_examples=60)
@given(finite_orders(), st.data())
def test_minimal_elements_matches_pairwise(o, data):
    s = set(data.draw(st.lists(st.sampled_from(o.elements), max_size=6)))
    expect = {j for j in s if not any(o.lt(k, j) for k in s)}
    assert o.minimal_elements(s) == expect


@settings(max_examples=60)
@given(finite_orders())
def test_successor_maxima_have_nothing_between(o):
    for i in o.elements:
        c = o.classify(i)
        if c.is_successor:
            for m in c.maxima:
                assert o.lt(m, i)
                assert not any(o.lt(m, k) and o.lt(k, i) for k in o.elements)
