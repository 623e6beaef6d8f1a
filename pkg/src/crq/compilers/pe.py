"""Random sign vectors with small pairwise inner products."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from ..core.tree import CrqTree, clog2


class PeError(RuntimeError):
    pass


@dataclass(frozen=True)
class PeAssignment:
    dim: int
    vectors: tuple[tuple[int, ...], ...]
    seed: int = 0
    attempts: int = 1
    z: Mapping[int, tuple[int, ...]] = field(default_factory=dict)  # internal node -> vector
    w: Mapping[int, tuple[int, ...]] = field(default_factory=dict)  # position 1..n+1 -> vector

    @property
    def k(self) -> int:
        return len(self.vectors)

    @property
    def log_k(self) -> int:
        return clog2(self.k)

    def max_cross(self) -> int:
        """Largest |<v_i, v_j>| over distinct pairs."""
        if self.k < 2:
            return 0
        v = np.array(self.vectors, dtype=np.int64)
        g = np.abs(v @ v.T)
        np.fill_diagonal(g, 0)
        return int(g.max())


def gen_sign_pe(k: int, seed: int = 0, dim: int | None = None, max_attempts: int = 1000) -> PeAssignment:
    """Sample ``k`` uniform vectors in {-1, 1}^dim until all pairs satisfy the bound.

    ``dim`` defaults to ``4 * clog2(k)`` and the bound is ``3 * clog2(k)``.
    Whole batches are resampled; the attempt count is recorded.
    """
    if k < 2:
        raise PeError("need at least two vectors")
    m = clog2(k)
    dim = 4 * m if dim is None else dim
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        v = rng.integers(0, 2, size=(k, dim), dtype=np.int64) * 2 - 1
        g = np.abs(v @ v.T)
        np.fill_diagonal(g, 0)
        if g.max() <= 3 * m:
            return PeAssignment(dim, tuple(map(tuple, v.tolist())), seed, attempt)
    raise PeError(f"no valid assignment for k={k} in {max_attempts} attempts")


def assign(pe: PeAssignment, tree: CrqTree) -> PeAssignment:
    """Bind vectors to internal nodes (BFS order) and to positions 1..n+1."""
    internal = [v for v in tree.bfs() if tree.children[v]]
    if pe.k < max(len(internal), tree.n):
        raise PeError(f"assignment has {pe.k} vectors, tree needs {max(len(internal), tree.n)}")
    z = {v: pe.vectors[i] for i, v in enumerate(internal)}
    w = {i + 1: pe.vectors[i] for i in range(tree.n)}
    w[tree.n + 1] = w[1]
    return replace(pe, z=z, w=w)


def pe_for(tree: CrqTree, seed: int = 0) -> PeAssignment:
    return assign(gen_sign_pe(max(tree.n, 2), seed), tree)
