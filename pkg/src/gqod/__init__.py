"""Generalized quasi ordinal diagrams: terms, orderings, embeddings and hydra games."""

from .labels import (CombinedOrder, FiniteOrder, LeafOrder, NatOmega, OrderError,
                     TwoChainOmega, load_order_spec, preset)
from .ordering import INFINITY, Comparison, QuasiOrdering, descending_chain_check
from .terms import (Forest, Leaf, Node, Term, forest, identical, leaf, node, parse)

__all__ = [
    "CombinedOrder", "Comparison", "FiniteOrder", "Forest", "INFINITY", "Leaf",
    "LeafOrder", "NatOmega", "Node", "OrderError", "QuasiOrdering", "Term",
    "TwoChainOmega", "descending_chain_check", "forest", "identical", "leaf",
    "load_order_spec", "node", "parse", "preset",
]
