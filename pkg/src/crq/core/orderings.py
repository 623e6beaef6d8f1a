"""Memory rank and the node orderings fed to sequential backends."""

from __future__ import annotations

from dataclasses import dataclass, field

from .tree import CrqTree

KINDS = ("mr-sort", "reverse-bfs", "adversarial-disjointness", "custom")


class OrderingError(ValueError):
    pass


@dataclass(frozen=True)
class Ordering:
    perm: tuple[int, ...]
    kind: str = "custom"
    tree_id: str | None = None
    iterations: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise OrderingError(f"unknown ordering kind {self.kind!r}")
        if sorted(self.perm) != list(range(len(self.perm))):
            raise OrderingError("permutation must list every node id exactly once")

    def position(self) -> dict[int, int]:
        """1-based position of every node."""
        return {v: i + 1 for i, v in enumerate(self.perm)}

    def check(self, tree: CrqTree) -> None:
        if len(self.perm) != tree.n:
            raise OrderingError(f"ordering has {len(self.perm)} nodes, tree has {tree.n}")

    def is_postorder(self, tree: CrqTree) -> bool:
        pos = self.position()
        return all(pos[u] < pos[v] for v in range(tree.n) for u in tree.children[v])


def memory_rank(tree: CrqTree) -> list[int]:
    """Rank of every node.

    With the children's ranks sorted in decreasing order ``r1 >= r2 >= ...``
    a node's rank is ``max(r_i + i - 1)``; leaves have rank 0.
    """
    mr = [0] * tree.n
    for v in tree.postorder():
        ranks = sorted((mr[u] for u in tree.children[v]), reverse=True)
        mr[v] = max((r + i for i, r in enumerate(ranks)), default=0)
    return mr


def memory_rank_sort(tree: CrqTree, ranks: list[int] | None = None) -> Ordering:
    """Walk the tree, always entering the unvisited child of highest rank.

    A node is emitted once all of its children have been emitted, then the
    walk climbs to its parent.  Equal ranks resolve to the earlier child.
    The number of loop iterations is recorded on the result.
    """
    mr = memory_rank(tree) if ranks is None else ranks
    done = [False] * tree.n
    order: list[int] = []
    v = tree.root
    iterations = 0
    while True:
        iterations += 1
        best = None
        for u in tree.children[v]:
            if not done[u] and (best is None or mr[u] > mr[best]):
                best = u
        if best is not None:
            v = best
            continue
        done[v] = True
        order.append(v)
        if v == tree.root:
            break
        v = tree.parent[v]
    return Ordering(tuple(order), "mr-sort", iterations=iterations)


def reverse_bfs_order(tree: CrqTree) -> Ordering:
    """Deepest level first, root last: position ``n - b(v) + 1`` for BFS index ``b``."""
    return Ordering(tuple(reversed(tree.bfs())), "reverse-bfs")


def custom_order(perm, kind: str = "custom") -> Ordering:
    return Ordering(tuple(perm), kind)
