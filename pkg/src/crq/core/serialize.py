"""JSON text format for trees, optionally with an ordering block."""

from __future__ import annotations

import json

from .orderings import Ordering, OrderingError
from .tree import CrqTree, TreeError


class FormatError(TreeError):
    pass


def to_dict(tree: CrqTree, ordering: Ordering | None = None) -> dict:
    body = {
        "d": tree.d,
        "gamma": list(tree.gamma),
        "root": tree.root,
        "nodes": [
            {"id": v, "parent": tree.parent[v], "children": list(tree.children[v]),
             "label": list(tree.labels[v])}
            for v in range(tree.n)
        ],
    }
    if ordering is not None:
        body["order"] = {"kind": ordering.kind, "perm": list(ordering.perm)}
    return body


def serialize(tree: CrqTree, ordering: Ordering | None = None) -> str:
    return json.dumps(to_dict(tree, ordering), separators=(",", ":")) + "\n"


def _need(obj: dict, key: str, kind, node=None):
    if key not in obj:
        raise FormatError("missing", node=node, field=key)
    val = obj[key]
    if not isinstance(val, kind) or isinstance(val, bool):
        raise FormatError(f"expected {getattr(kind, '__name__', kind)}, got {type(val).__name__}",
                          node=node, field=key)
    return val


def _int_list(obj: dict, key: str, node=None) -> list[int]:
    vals = _need(obj, key, list, node)
    for x in vals:
        if not isinstance(x, int) or isinstance(x, bool):
            raise FormatError(f"non-integer entry {x!r}", node=node, field=key)
    return vals


def from_dict(body: dict) -> tuple[CrqTree, Ordering | None]:
    if not isinstance(body, dict):
        raise FormatError("top level must be an object")
    d = _need(body, "d", int)
    gamma = _int_list(body, "gamma")
    root = _need(body, "root", int)
    nodes = _need(body, "nodes", list)
    records = []
    for i, rec in enumerate(nodes):
        if not isinstance(rec, dict):
            raise FormatError("node record must be an object", node=i)
        nid = _need(rec, "id", int, i)
        if "parent" not in rec:
            raise FormatError("missing", node=nid, field="parent")
        if rec["parent"] is not None and not isinstance(rec["parent"], int):
            raise FormatError("parent must be an id or null", node=nid, field="parent")
        records.append({"id": nid, "parent": rec["parent"],
                        "children": _int_list(rec, "children", nid),
                        "label": _int_list(rec, "label", nid)})
    tree = CrqTree.from_records(d, gamma, root, records)
    ordering = None
    if "order" in body:
        o = body["order"]
        if not isinstance(o, dict):
            raise FormatError("order must be an object", field="order")
        try:
            ordering = Ordering(tuple(_int_list(o, "perm")), _need(o, "kind", str))
            ordering.check(tree)
        except OrderingError as exc:
            raise FormatError(str(exc), field="order") from exc
    return tree, ordering


def deserialize(text: str) -> tuple[CrqTree, Ordering | None]:
    try:
        body = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not JSON: {exc}") from exc
    return from_dict(body)


def load(path) -> tuple[CrqTree, Ordering | None]:
    with open(path, encoding="utf-8") as fh:
        return deserialize(fh.read())


def dump(path, tree: CrqTree, ordering: Ordering | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(tree, ordering))
