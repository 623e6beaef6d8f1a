"""Direct stack evaluation of a binary tree under a given node ordering."""

from __future__ import annotations

from dataclasses import dataclass

from ..core.evaluate import Answer, dot
from ..core.orderings import Ordering
from ..core.tree import CrqTree


class IllegalOrdering(ValueError):
    def __init__(self, message: str, step: int, node: int):
        super().__init__(f"step {step} (node {node}): {message}")
        self.step = step
        self.node = node


@dataclass(frozen=True)
class Item:
    x: tuple[int, ...]
    depth: int
    node: int


@dataclass(frozen=True)
class StackRun:
    answer: Answer
    max_occupancy: int
    trace: tuple[tuple[Item, ...], ...]  # stack after each step, top first

    def padded(self, step: int, slots: int, d: int) -> list[int]:
        """Stack after ``step`` as a flat vector of ``slots`` (x, depth + 1) slots."""
        flat: list[int] = []
        items = self.trace[step]
        for i in range(slots):
            if i < len(items):
                flat.extend(items[i].x)
                flat.append(items[i].depth + 1)
            else:
                flat.extend([0] * (d + 1))
        return flat


def semantic_stack_machine(tree: CrqTree, ordering: Ordering, capacity: int | None = None) -> StackRun:
    """Consume nodes in order; push on depth >= top depth, otherwise combine the top two.

    When combining, the top item wins only if it scores strictly higher
    against the incoming node's label, and the winner is re-pushed with the
    incoming node's depth.  Any step that is not a legal post-order move
    raises :class:`IllegalOrdering`.
    """
    ordering.check(tree)
    stack: list[Item] = []  # bottom first
    trace = []
    witness = []
    peak = 0
    for step, v in enumerate(ordering.perm):
        depth = tree.depth[v]
        if not stack or depth >= stack[-1].depth:
            if tree.children[v]:
                raise IllegalOrdering("internal node arrived before its children were combined", step, v)
            if capacity is not None and len(stack) >= capacity:
                raise IllegalOrdering(f"stack capacity {capacity} exceeded", step, v)
            stack.append(Item(tree.labels[v], depth, v))
        else:
            if not tree.children[v]:
                raise IllegalOrdering("leaf arrived on top of deeper items", step, v)
            if len(stack) < 2:
                raise IllegalOrdering("fewer than two items to combine", step, v)
            top, second = stack[-1], stack[-2]
            if {top.node, second.node} != set(tree.children[v]) or len(tree.children[v]) != 2:
                raise IllegalOrdering(
                    f"top items {second.node}, {top.node} are not the children of this node", step, v)
            x = tree.labels[v]
            win = top if dot(top.x, x) > dot(second.x, x) else second
            witness.append((v, win.node))
            del stack[-2:]
            stack.append(Item(win.x, depth, v))
        peak = max(peak, len(stack))
        trace.append(tuple(reversed(stack)))
    if len(stack) != 1:
        raise IllegalOrdering(f"{len(stack)} items remain at the end", len(ordering.perm) - 1,
                              ordering.perm[-1])
    return StackRun(Answer(stack[0].x, tuple(witness)), peak, tuple(trace))
