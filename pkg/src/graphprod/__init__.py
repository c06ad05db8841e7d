"""Graph products of finite abelian groups and their elementary equivalence."""

from .blocks import block_decomposition, centralizer, commutes, link_subgroup
from .errors import GraphProductError
from .logic import build_phi, check_phi, emit, eval_formula_finite, parse_formula
from .marked_graph import (GroupProductSpec, Mark, MarkedGraph, build_marked_graph,
                           decide_elementary_equivalence, find_marked_embedding, marked_isomorphic,
                           non_commutation_graph, primary_decompose)
from .oracle import ball_enumerate, bounded_subgroup_closure, finite_carrier, naive_marked_iso
from .witness import rank_exact, select_transversal, singular_witnesses
from .words import (NormalForm, alphabet, cyclically_reduce, invert, multiply, normalize, order_of,
                    parse_word, power)

__all__ = [
    "GraphProductError", "GroupProductSpec", "Mark", "MarkedGraph", "NormalForm",
    "alphabet", "ball_enumerate", "block_decomposition", "bounded_subgroup_closure", "build_marked_graph",
    "build_phi", "centralizer", "check_phi", "commutes", "cyclically_reduce",
    "decide_elementary_equivalence", "emit", "eval_formula_finite", "finite_carrier",
    "find_marked_embedding", "invert", "link_subgroup", "marked_isomorphic", "multiply",
    "naive_marked_iso", "non_commutation_graph", "normalize", "order_of", "parse_formula",
    "parse_word", "power", "primary_decompose", "rank_exact", "select_transversal",
    "singular_witnesses",
]
