"""Max-leaf out-trees and out-branchings in directed graphs.

Decides whether a digraph has an out-tree or out-branching with at least
k leaves (FPT in k), produces checkable witnesses, and ships executable
versions of the constructive lower bounds plus brute-force oracles for
desk-scale verification.
"""

from .digraph import (
    Digraph,
    StrongComponentPartition,
    find_useless_arcs,
    has_out_branching,
    parse_digraph,
    reachable_set,
    remove_useless_arcs,
    serialize_digraph,
    strong_components,
)
from .outtree import (
    OutTree,
    apply_path_changes,
    extend_to_out_branching,
    is_improving,
    is_one_optimal,
    one_change,
    one_optimal_out_branching,
    parse_witness,
    tree_leq,
    witness_text,
)
from .oracle import (
    enumerate_out_branchings,
    exact_max_leaf_out_branching,
    exact_max_leaf_out_tree,
)

__all__ = [
    "Digraph",
    "OutTree",
    "StrongComponentPartition",
    "apply_path_changes",
    "enumerate_out_branchings",
    "exact_max_leaf_out_branching",
    "exact_max_leaf_out_tree",
    "extend_to_out_branching",
    "find_useless_arcs",
    "has_out_branching",
    "is_improving",
    "is_one_optimal",
    "one_change",
    "one_optimal_out_branching",
    "parse_digraph",
    "parse_witness",
    "reachable_set",
    "remove_useless_arcs",
    "serialize_digraph",
    "strong_components",
    "tree_leq",
    "witness_text",
]

__version__ = "0.1.0"
