"""Rooted, labeled trees: the problem instances everything else consumes."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

DEFAULT_GAMMA = tuple(range(-9, 10))


def clog2(x: int) -> int:
    """Ceiling of log2, never below 1."""
    if x < 1:
        raise ValueError("clog2 needs a positive argument")
    return max(1, (x - 1).bit_length())


class TreeError(ValueError):
    """An invalid tree.  ``node`` and ``field`` locate the problem when known."""

    def __init__(self, message: str, node: int | None = None, field: str | None = None):
        where = []
        if node is not None:
            where.append(f"node {node}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.node = node
        self.field = field


@dataclass(frozen=True)
class NodeRecord:
    id: int
    parent: int | None
    children: tuple[int, ...]
    label: tuple[int, ...]
    depth: int

    @property
    def is_leaf(self) -> bool:
        return not self.children


class CrqTree:
    """A validated, immutable labeled tree with dense ids ``0..n-1``.

    Depths are always derived from the parent links.
    """

    __slots__ = ("d", "gamma", "root", "parent", "children", "labels", "depth")

    def __init__(self, d: int, gamma: Iterable[int], root: int,
                 children: Sequence[Sequence[int]], labels: Sequence[Sequence[int]]):
        self.d = int(d)
        self.gamma = tuple(sorted(set(int(g) for g in gamma)))
        self.root = root
        self.children = tuple(tuple(c) for c in children)
        self.labels = tuple(tuple(int(v) for v in lab) for lab in labels)
        self._validate()

    def _validate(self) -> None:
        n = len(self.children)
        if self.d < 1:
            raise TreeError("dimension must be positive", field="d")
        if not self.gamma:
            raise TreeError("vocabulary is empty", field="gamma")
        if n == 0:
            raise TreeError("tree has no nodes", field="nodes")
        if len(self.labels) != n:
            raise TreeError("one label per node required", field="label")
        if not (isinstance(self.root, int) and 0 <= self.root < n):
            raise TreeError(f"root {self.root!r} is not a node id", field="root")
        parent: list[int | None] = [None] * n
        for v, kids in enumerate(self.children):
            if len(kids) == 1:
                raise TreeError("exactly one child is not allowed", node=v, field="children")
            for u in kids:
                if not (isinstance(u, int) and 0 <= u < n):
                    raise TreeError(f"child {u!r} is not a node id", node=v, field="children")
                if u == self.root or parent[u] is not None:
                    raise TreeError(f"node {u} has more than one parent", node=v, field="children")
                parent[u] = v
        gset = set(self.gamma)
        for v, lab in enumerate(self.labels):
            if len(lab) != self.d:
                raise TreeError(f"label length {len(lab)} != d={self.d}", node=v, field="label")
            for x in lab:
                if x not in gset:
                    raise TreeError(f"label entry {x} not in vocabulary", node=v, field="label")
        depth = [-1] * n
        depth[self.root] = 0
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for u in self.children[v]:
                depth[u] = depth[v] + 1
                queue.append(u)
        for v in range(n):
            if depth[v] < 0:
                raise TreeError("unreachable from the root", node=v, field="parent")
        self.parent = tuple(parent)
        self.depth = tuple(depth)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_records(cls, d: int, gamma: Iterable[int], root: int,
                     records: Iterable[Mapping]) -> "CrqTree":
        """Build from node records carrying ``id``, ``parent``, ``children``, ``label``."""
        recs = {}
        for r in records:
            for key in ("id", "parent", "children", "label"):
                if key not in r:
                    raise TreeError("missing", node=r.get("id"), field=key)
            if r["id"] in recs:
                raise TreeError("duplicate id", node=r["id"], field="id")
            recs[r["id"]] = r
        n = len(recs)
        if sorted(recs) != list(range(n)):
            raise TreeError("node ids must be dense 0..n-1", field="id")
        tree = cls(d, gamma, root, [recs[i]["children"] for i in range(n)],
                   [recs[i]["label"] for i in range(n)])
        for i in range(n):
            if recs[i]["parent"] != tree.parent[i]:
                raise TreeError(f"parent {recs[i]['parent']!r} disagrees with child lists",
                                node=i, field="parent")
        return tree

    @classmethod
    def from_nested(cls, spec, d: int | None = None, gamma: Iterable[int] = DEFAULT_GAMMA) -> "CrqTree":
        """Build from ``(label, [child, ...])`` pairs; bare label tuples are leaves.

        Ids are assigned in preorder.
        """
        children: list[list[int]] = []
        labels: list[tuple] = []

        def walk(s) -> int:
            v = len(children)
            children.append([])
            if len(s) == 2 and isinstance(s[1], list):
                labels.append(tuple(s[0]))
                children[v] = [walk(c) for c in s[1]]
            else:
                labels.append(tuple(s))
            return v

        walk(spec)
        return cls(d or len(labels[0]), gamma, 0, children, labels)

    def relabel(self, labels: Sequence[Sequence[int]], gamma: Iterable[int] | None = None) -> "CrqTree":
        d = len(labels[0]) if labels else self.d
        return CrqTree(d, self.gamma if gamma is None else gamma, self.root, self.children, labels)

    def renumber(self, new_id: Sequence[int]) -> "CrqTree":
        """Same tree with node ``v`` stored under id ``new_id[v]``."""
        n = self.n
        children: list = [None] * n
        labels: list = [None] * n
        for v in range(n):
            children[new_id[v]] = [new_id[u] for u in self.children[v]]
            labels[new_id[v]] = self.labels[v]
        return CrqTree(self.d, self.gamma, new_id[self.root], children, labels)

    # -- queries ----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.children)

    @property
    def height(self) -> int:
        """Maximum depth over all nodes (the tree depth L)."""
        return max(self.depth)

    @property
    def max_abs(self) -> int:
        return max(abs(g) for g in self.gamma)

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def leaves(self) -> list[int]:
        return [v for v in range(self.n) if not self.children[v]]

    def internal(self) -> list[int]:
        return [v for v in range(self.n) if self.children[v]]

    def is_binary(self) -> bool:
        return all(len(c) in (0, 2) for c in self.children)

    def max_degree(self) -> int:
        return max(len(c) for c in self.children)

    def node(self, v: int) -> NodeRecord:
        return NodeRecord(v, self.parent[v], self.children[v], self.labels[v], self.depth[v])

    def nodes(self) -> Iterator[NodeRecord]:
        return (self.node(v) for v in range(self.n))

    def bfs(self) -> list[int]:
        out = [self.root]
        for v in out:
            out.extend(self.children[v])
        return out

    def postorder(self) -> list[int]:
        out: list[int] = []
        stack = [(self.root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                out.append(v)
                continue
            stack.append((v, True))
            stack.extend((u, False) for u in reversed(self.children[v]))
        return out

    def shape_key(self) -> tuple:
        return (self.root, self.children)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CrqTree):
            return NotImplemented
        return (self.d, self.gamma, self.root, self.children, self.labels) == (
            other.d, other.gamma, other.root, other.children, other.labels)

    def __hash__(self) -> int:
        return hash((self.d, self.gamma, self.root, self.children, self.labels))

    def __repr__(self) -> str:
        return f"CrqTree(n={self.n}, d={self.d}, height={self.height})"
