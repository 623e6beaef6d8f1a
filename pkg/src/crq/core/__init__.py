"""Instances, the reference evaluator, orderings, conversions and file I/O."""

from .binary import to_binary
from .evaluate import Answer, dot, evaluate, is_tie_free, solve_all, tied_nodes
from .gcrq import GcrqEvalError, GcrqTree, evaluate_gcrq, expression_tree
from .generate import GenerationError, balanced_shape, gen_random, random_shape
from .orderings import Ordering, OrderingError, memory_rank, memory_rank_sort, reverse_bfs_order
from .serialize import FormatError, deserialize, serialize
from .tree import DEFAULT_GAMMA, CrqTree, NodeRecord, TreeError, clog2

__all__ = [
    "to_binary", "Answer", "dot", "evaluate", "is_tie_free", "solve_all", "tied_nodes",
    "GcrqEvalError", "GcrqTree", "evaluate_gcrq", "expression_tree", "GenerationError",
    "balanced_shape", "gen_random", "random_shape", "Ordering", "OrderingError", "memory_rank",
    "memory_rank_sort", "reverse_bfs_order", "FormatError", "deserialize", "serialize",
    "DEFAULT_GAMMA", "CrqTree", "NodeRecord", "TreeError", "clog2",
]
