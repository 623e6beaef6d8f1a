"""Rewrite wide nodes as balanced binary tournaments with the same answer."""

from __future__ import annotations

from collections import deque

from .tree import CrqTree


def to_binary(tree: CrqTree, duplicate_last: bool = False) -> CrqTree:
    """Replace every node with k > 2 children by a binary gadget of depth ceil(log2 k).

    Gadget internal nodes all carry the original node's label, so each one
    picks the better of two candidate answers.  The children are split
    left-heavy, which keeps the earliest-child tie rule intact and adds
    exactly k - 2 nodes per wide node.

    With ``duplicate_last`` the child list is first padded to a power of two
    by repeating a copy of the last child's subtree.
    """
    children: list[list[int]] = []
    labels: list[tuple] = []
    pending: deque = deque()

    def new(label) -> int:
        children.append([])
        labels.append(label)
        return len(children) - 1

    def spawn(v: int) -> int:
        w = new(tree.labels[v])
        kids = list(tree.children[v])
        if duplicate_last and len(kids) > 2:
            size = 1
            while size < len(kids):
                size *= 2
            kids += [kids[-1]] * (size - len(kids))
        if kids:
            pending.append((w, kids))
        return w

    spawn(tree.root)
    while pending:
        w, kids = pending.popleft()
        if len(kids) == 2:
            children[w] = [spawn(kids[0]), spawn(kids[1])]
            continue
        half = (len(kids) + 1) // 2
        for group in (kids[:half], kids[half:]):
            if len(group) == 1:
                children[w].append(spawn(group[0]))
            else:
                g = new(labels[w])
                pending.append((g, group))
                children[w].append(g)
    return CrqTree(tree.d, tree.gamma, 0, children, labels)
