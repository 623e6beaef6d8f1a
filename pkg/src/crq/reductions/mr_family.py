"""Labelings that force the answer to flow through a complete binary subtree.

For a binary tree of memory rank r there is a complete binary subtree of
height r whose internal nodes are linked by chains of nodes with a single
same-rank child.  Labeling the chain nodes and the off-chain material so
they never change the outcome leaves a Boolean-style instance living on the
subtree alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from ..core.evaluate import evaluate
from ..core.orderings import memory_rank
from ..core.tree import CrqTree

FALSE = (0, 1, 1)
TRUE = (1, 0, 1)
NULL = (0, 0, 1)
FILL_LEAF = (0, 0, -1)
FILL_INTERNAL = (0, 0, 1)
GAMMA = (-1, 0, 1)
CHOICES = (FALSE, TRUE, NULL)


class FamilyMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class Subset:
    nodes: tuple[int, ...]  # full-tree ids in subset-preorder
    children: tuple[tuple[int, ...], ...]  # subset child lists, indexed like ``nodes``

    def leaves(self) -> list[int]:
        return [i for i, c in enumerate(self.children) if not c]

    def internal(self) -> list[int]:
        return [i for i, c in enumerate(self.children) if c]


def extract_subset(tree: CrqTree) -> Subset:
    if not tree.is_binary():
        raise ValueError("needs a binary tree")
    mr = memory_rank(tree)
    nodes: list[int] = []
    kids: list[list[int]] = []
    stack = [(tree.root, None)]
    while stack:
        v, parent_slot = stack.pop()
        r = mr[v]
        while r > 0:
            a, b = tree.children[v]
            if mr[a] == r - 1 and mr[b] == r - 1:
                break
            v = a if mr[a] == r else b
        idx = len(nodes)
        nodes.append(v)
        kids.append([])
        if parent_slot is not None:
            kids[parent_slot].append(idx)
        if r > 0:
            a, b = tree.children[v]
            stack.append((b, idx))
            stack.append((a, idx))
    return Subset(tuple(nodes), tuple(tuple(k) for k in kids))


@dataclass(frozen=True)
class Assignment:
    leaf_bits: tuple[int, ...]  # one per subset leaf, in ``Subset.leaves()`` order
    gates: tuple[tuple[int, ...], ...]  # one label per subset internal node


class MrFamily:
    def __init__(self, tree: CrqTree):
        self.shape = tree
        self.subset = extract_subset(tree)
        self.rank = memory_rank(tree)[tree.root]

    def random_assignment(self, rng: random.Random) -> Assignment:
        return Assignment(tuple(rng.randint(0, 1) for _ in self.subset.leaves()),
                          tuple(rng.choice(CHOICES) for _ in self.subset.internal()))

    def _subset_labels(self, asg: Assignment) -> list[tuple[int, ...]]:
        labels: list = [None] * len(self.subset.nodes)
        for i, bit in zip(self.subset.leaves(), asg.leaf_bits):
            labels[i] = TRUE if bit else FALSE
        for i, gate in zip(self.subset.internal(), asg.gates):
            labels[i] = gate
        return labels

    def full_tree(self, asg: Assignment) -> CrqTree:
        t = self.shape
        labels = [FILL_INTERNAL if t.children[v] else FILL_LEAF for v in range(t.n)]
        for v, lab in zip(self.subset.nodes, self._subset_labels(asg)):
            labels[v] = lab
        return t.relabel(labels, GAMMA)

    def subset_tree(self, asg: Assignment) -> CrqTree:
        return CrqTree(3, GAMMA, 0, self.subset.children, self._subset_labels(asg))

    def instance(self, asg: Assignment) -> CrqTree:
        """Full labeled tree; raises if its answer differs from the subset's."""
        full = self.full_tree(asg)
        if evaluate(full).value != evaluate(self.subset_tree(asg)).value:
            raise FamilyMismatch(f"full and subset answers differ for {asg}")
        return full

    def sample(self, count: int, seed: int = 0) -> list[tuple[Assignment, CrqTree]]:
        rng = random.Random(seed)
        out = []
        for _ in range(count):
            asg = self.random_assignment(rng)
            out.append((asg, self.instance(asg)))
        return out


def mr_family(tree: CrqTree) -> MrFamily:
    return MrFamily(tree)


def subset_size(rank: int) -> int:
    return 2 ** (rank + 1) - 1


def fill_never_wins(tree: CrqTree) -> bool:
    """No node on the winning root-to-leaf path has the filler-leaf answer."""
    ans = evaluate(tree)
    return ans.value != FILL_LEAF and all(tree.labels[v] != FILL_LEAF for v in ans.chain(tree.root))


def assignments_for(family: MrFamily, seeds: Sequence[int]) -> list[Assignment]:
    return [family.random_assignment(random.Random(s)) for s in seeds]
