"""Seeded random instance generators."""

from __future__ import annotations

import random
from typing import Sequence

from .evaluate import dot
from .tree import DEFAULT_GAMMA, CrqTree


class GenerationError(ValueError):
    pass


def random_shape(n: int, rng: random.Random, max_degree: int = 2) -> list[list[int]]:
    """Grow a tree to exactly ``n`` nodes by expanding uniformly chosen leaves."""
    if n < 1:
        raise GenerationError("node budget must be positive")
    if max_degree < 2:
        raise GenerationError("max_degree must be at least 2")
    if max_degree == 2 and n % 2 == 0:
        raise GenerationError(f"binary trees have an odd node count, got {n}")
    if n == 2:
        raise GenerationError("no tree without unary nodes has 2 nodes")
    children: list[list[int]] = [[]]
    leaves = [0]
    while len(children) < n:
        left = n - len(children)
        ks = [k for k in range(2, min(max_degree, left) + 1) if left - k != 1]
        k = rng.choice(ks)
        v = leaves.pop(rng.randrange(len(leaves)))
        for _ in range(k):
            children[v].append(len(children))
            leaves.append(len(children))
            children.append([])
    return children


def balanced_shape(height: int) -> list[list[int]]:
    """Complete binary tree of the given height, ids in BFS order."""
    if height < 0:
        raise GenerationError("height must be nonnegative")
    n = 2 ** (height + 1) - 1
    return [[2 * v + 1, 2 * v + 2] if 2 * v + 2 < n else [] for v in range(n)]


def _postorder(children: Sequence[Sequence[int]]) -> list[int]:
    out, stack = [], [(0, False)]
    while stack:
        v, done = stack.pop()
        if done:
            out.append(v)
        else:
            stack.append((v, True))
            stack.extend((u, False) for u in reversed(children[v]))
    return out


def label_shape(children: Sequence[Sequence[int]], d: int, gamma: Sequence[int], rng: random.Random,
                tie_free: bool = False, budget: int = 1000) -> list[tuple[int, ...]]:
    """Uniform labels from ``gamma^d``.

    With ``tie_free`` every internal label is resampled (at most ``budget``
    times per node) until no two distinct child answers share the top score.
    """
    gamma = list(gamma)
    labels: list = [None] * len(children)
    ans: list = [None] * len(children)
    draw = lambda: tuple(rng.choice(gamma) for _ in range(d))  # noqa: E731
    for v in _postorder(children):
        kids = children[v]
        if not kids:
            labels[v] = ans[v] = draw()
            continue
        cand = [ans[u] for u in kids]
        for _ in range(budget):
            x = draw()
            scores = [dot(a, x) for a in cand]
            top = max(scores)
            winners = {a for a, s in zip(cand, scores) if s == top}
            if not tie_free or len(winners) == 1:
                break
        else:
            raise GenerationError(f"node {v}: no tie-free label after {budget} draws")
        labels[v] = x
        ans[v] = cand[scores.index(top)]
    return labels


def gen_random(n: int | None = None, *, height: int | None = None,
               skeleton: Sequence[Sequence[int]] | None = None, d: int = 2,
               gamma: Sequence[int] = DEFAULT_GAMMA, seed: int = 0, tie_free: bool = False,
               max_degree: int = 2, budget: int = 1000) -> CrqTree:
    """Random labeled tree.

    Exactly one of ``n`` (node budget), ``height`` (complete binary tree) or
    ``skeleton`` (child lists, root 0) selects the shape.
    """
    if sum(x is not None for x in (n, height, skeleton)) != 1:
        raise GenerationError("give exactly one of n, height, skeleton")
    if d < 1:
        raise GenerationError("d must be positive")
    if not gamma:
        raise GenerationError("vocabulary is empty")
    rng = random.Random(seed)
    if n is not None:
        shape = random_shape(n, rng, max_degree)
    elif height is not None:
        shape = balanced_shape(height)
    else:
        shape = [list(c) for c in skeleton]
    labels = label_shape(shape, d, gamma, rng, tie_free, budget)
    return CrqTree(d, gamma, 0, shape, labels)
