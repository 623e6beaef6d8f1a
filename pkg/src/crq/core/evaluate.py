"""Reference answers for labeled trees."""

from __future__ import annotations

from dataclasses import dataclass

from .tree import CrqTree


def dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class Answer:
    value: tuple[int, ...]
    # (node, winning child) for every internal node, children before parents
    witness: tuple[tuple[int, int], ...]

    def winners(self) -> dict[int, int]:
        return dict(self.witness)

    def chain(self, root: int) -> list[int]:
        """Root-to-leaf path following the winning children."""
        win = self.winners()
        path = [root]
        while path[-1] in win:
            path.append(win[path[-1]])
        return path


def solve_all(tree: CrqTree) -> tuple[list[tuple[int, ...]], dict[int, int]]:
    """Answers of every node plus the winning child of every internal node.

    Ties go to the earliest child in the node's child list.
    """
    ans: list = [None] * tree.n
    win: dict[int, int] = {}
    for v in tree.postorder():
        kids = tree.children[v]
        if not kids:
            ans[v] = tree.labels[v]
            continue
        x = tree.labels[v]
        best = kids[0]
        best_score = dot(ans[best], x)
        for u in kids[1:]:
            s = dot(ans[u], x)
            if s > best_score:
                best, best_score = u, s
        win[v] = best
        ans[v] = ans[best]
    return ans, win


def evaluate(tree: CrqTree) -> Answer:
    ans, win = solve_all(tree)
    order = [v for v in tree.postorder() if v in win]
    return Answer(ans[tree.root], tuple((v, win[v]) for v in order))


def tied_nodes(tree: CrqTree) -> list[int]:
    """Internal nodes where two *different* child answers share the top score."""
    ans, _ = solve_all(tree)
    out = []
    for v in tree.internal():
        x = tree.labels[v]
        scores = [(dot(ans[u], x), ans[u]) for u in tree.children[v]]
        top = max(s for s, _ in scores)
        if len({a for s, a in scores if s == top}) > 1:
            out.append(v)
    return out


def is_tie_free(tree: CrqTree) -> bool:
    return not tied_nodes(tree)
