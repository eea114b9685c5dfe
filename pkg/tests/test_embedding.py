import random

import pytest
from hypothesis import given, settings, strategies as st

from gqod import QuasiOrdering, parse, preset
from gqod.embedding import (EmbeddingWitness, bad_sequence_smoke, check_embed_implies_order,
                            forest_embed, tree_embed, verify_witness)
from gqod.sampling import TermSampler, enumerate_terms
from gqod.terms import TermError, forest, parse_position

from oracles import embeds_brute, forest_embeds_brute

NAT = preset("nat")
CHAIN = preset("chain2")

SRC = "(3, 1'' # (7, 11'' # 2''))"
TGT = "(5, (4, (9, (7, 6'' # (11, 0''))) # (2, 0'' # (1, 3'') # 0'')) # (0, (0, 0'' # 0'')))"

# the displayed witness: root 3 -> 4, leaf 1 -> 3, 7 -> 7, 11 -> 11, 2 -> 6
SHOWN = """
/ -> /1
/1 -> /1/0/0/0
/0 -> /1/1/0
/0/0 -> /1/1/0/0
/0/1 -> /1/1/0/1
"""


def test_displayed_witness_is_valid():
    src, tgt = parse(SRC, NAT), parse(TGT, NAT)
    w = EmbeddingWitness.parse(SHOWN)
    assert len(w.pairs) == 5
    assert verify_witness(src, tgt, w, NAT) == []


def test_search_finds_a_witness_for_the_example():
    src, tgt = parse(SRC, NAT), parse(TGT, NAT)
    w = tree_embed(src, tgt, NAT)
    assert w is not None and len(w.pairs) == 5
    assert verify_witness(src, tgt, w, NAT) == []


def test_embedding_example_implies_order():
    src, tgt = parse(SRC, NAT), parse(TGT, NAT)
    report = check_embed_implies_order(src, tgt, QuasiOrdering(NAT))
    assert report.embeds and report.holds


def test_identity_embedding():
    t = parse("(1, (0, ρ # ρ) # ρ)", CHAIN)
    w = tree_embed(t, t, CHAIN)
    assert w is not None and len(w.pairs) == 5
    identity = EmbeddingWitness({p: p for p in w.pairs})
    assert verify_witness(t, t, identity, CHAIN) == []


def test_verifier_rejects_broken_witnesses():
    src, tgt = parse(SRC, NAT), parse(TGT, NAT)
    good = EmbeddingWitness.parse(SHOWN).pairs
    clash = dict(good)
    clash[parse_position("/1")] = parse_position("/1/1/0/1")
    assert verify_witness(src, tgt, EmbeddingWitness(clash), NAT)
    low = dict(good)
    low[()] = parse_position("/0")
    assert verify_witness(src, tgt, EmbeddingWitness(low), NAT)
    missing = dict(good)
    del missing[parse_position("/0/1")]
    assert verify_witness(src, tgt, EmbeddingWitness(missing), NAT)


def test_gap_condition_blocks_low_intermediate_label():
    # the 1-child would have to pass through a 0-node
    blocked = tree_embed(parse("(1, (1, ρ))", CHAIN), parse("(1, (0, (1, ρ)))", CHAIN), CHAIN)
    assert blocked is None
    assert tree_embed(parse("(0, (0, ρ))", CHAIN), parse("(0, (1, (0, ρ)))", CHAIN), CHAIN)


def test_unconnected_input_rejected():
    with pytest.raises(TermError):
        tree_embed(parse("ρ # ρ", CHAIN), parse("ρ", CHAIN), CHAIN)


def test_forest_embed_guards():
    a, b = parse("(1, ρ)", CHAIN), parse("(0, ρ # ρ)", CHAIN)
    assert forest_embed(a, forest(a, b), CHAIN) is not None
    three = forest(a, a, b)
    assert forest_embed(three, forest(a, b), CHAIN) is None


def test_witness_text_round_trip():
    w = EmbeddingWitness.parse(SHOWN)
    assert EmbeddingWitness.parse(str(w)).pairs == w.pairs


def test_search_matches_brute_force_on_three_node_terms():
    terms = enumerate_terms(["0", "1"], ["ρ"], 3, connected_only=True)
    for a in terms:
        for b in terms:
            assert (tree_embed(a, b, CHAIN) is not None) == embeds_brute(a, b, CHAIN)


def test_forest_search_matches_brute_force():
    conn = enumerate_terms(["0", "1"], ["ρ"], 3, connected_only=True)
    rng = random.Random(4)
    for _ in range(400):
        a = forest(*rng.sample(conn, rng.randint(1, 3)))
        b = forest(*rng.sample(conn, rng.randint(1, 3)))
        found = forest_embed(a, b, CHAIN)
        assert (found is not None) == forest_embeds_brute(a, b, CHAIN)
        if found is not None:
            assert verify_witness(a, b, found.witness, CHAIN) == []


def test_bad_sequence_smoke_is_bounded():
    candidates = enumerate_terms(["0", "1"], ["ρ"], 4)
    seq = bad_sequence_smoke(candidates, CHAIN, limit=200)
    assert 0 < len(seq) < 200
    for m in range(len(seq)):
        for n in range(m + 1, len(seq)):
            assert forest_embed(seq[m], seq[n], CHAIN) is None


# -- property tests -------------------------------------------------------------

seeds = st.integers(0, 10**9)


def chain_term(seed, n=6):
    return TermSampler(["0", "1"], ["ρ"], seed=seed, order=CHAIN).path_comparable(n, True)


@settings(max_examples=80, deadline=None)
@given(seeds, seeds)
def test_witnesses_always_verify(s1, s2):
    a, b = chain_term(s1, 4), chain_term(s2, 8)
    w = tree_embed(a, b, CHAIN)
    if w is not None:
        assert verify_witness(a, b, w, CHAIN) == []


@settings(max_examples=60, deadline=None)
@given(seeds, seeds, seeds)
def test_embedding_is_transitive(s1, s2, s3):
    a, b, c = chain_term(s1, 3), chain_term(s2, 5), chain_term(s3, 8)
    ab, bc = tree_embed(a, b, CHAIN), tree_embed(b, c, CHAIN)
    if ab is not None and bc is not None:
        composed = EmbeddingWitness({p: bc.pairs[q] for p, q in ab.pairs.items()})
        assert verify_witness(a, c, composed, CHAIN) == []


@settings(max_examples=80, deadline=None)
@given(seeds, seeds)
def test_embedding_implies_order(s1, s2):
    a, b = chain_term(s1, 5), chain_term(s2, 8)
    assert check_embed_implies_order(a, b, QuasiOrdering(CHAIN)).holds
