"""Set-disjointness instances laid out in an order hostile to small stacks."""

from __future__ import annotations

from typing import Sequence

from ..core.orderings import Ordering
from ..core.tree import CrqTree
from ..core.generate import balanced_shape


def _pad(bits: Sequence[int]) -> list[int]:
    size = 1
    while size < len(bits):
        size *= 2
    return list(bits) + [0] * (size - len(bits))


def disjointness_family(a: Sequence[int], b: Sequence[int]) -> tuple[CrqTree, Ordering]:
    """Balanced tree over leaves a1, b1, a2, b2, ... (bit 1 -> +1, bit 0 -> -1).

    Parents of leaves carry -1 (pick the smaller), everything above +1
    (pick the larger), so the answer is +1 exactly when some a_i = b_i = 1.
    Both vectors are padded with zeros to a power-of-two length.
    The ordering lists the a-leaves, then the b-leaves, then the internal
    nodes in BFS order with the root last.
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if not a:
        raise ValueError("empty input")
    for bit in list(a) + list(b):
        if bit not in (0, 1):
            raise ValueError(f"not a bit: {bit!r}")
    a, b = _pad(a), _pad(b)
    n = len(a)
    height = (2 * n).bit_length() - 1
    shape = balanced_shape(height)
    first_leaf = 2 * n - 1
    labels: list[tuple[int]] = []
    for v in range(len(shape)):
        if v >= first_leaf:
            i = v - first_leaf
            bit = a[i // 2] if i % 2 == 0 else b[i // 2]
            labels.append((1 if bit else -1,))
        elif v >= n - 1:
            labels.append((-1,))
        else:
            labels.append((1,))
    tree = CrqTree(1, (-1, 1), 0, shape, labels)
    leaves = list(range(first_leaf, len(shape)))
    internal = list(range(1, first_leaf))
    perm = leaves[0::2] + leaves[1::2] + internal + [0]
    return tree, Ordering(tuple(perm), "adversarial-disjointness")


def intersects(a: Sequence[int], b: Sequence[int]) -> bool:
    return any(x and y for x, y in zip(a, b))
