"""Exact neural solvers for compositional reasoning questions (CRQs)."""

from .core import CrqTree, evaluate, gen_random, memory_rank, memory_rank_sort

__version__ = "0.1.0"
__all__ = ["CrqTree", "evaluate", "gen_random", "memory_rank", "memory_rank_sort"]
