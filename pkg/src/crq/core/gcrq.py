"""Generalized trees where each internal node applies a named operator."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .evaluate import dot
from .serialize import FormatError, from_dict, to_dict
from .tree import CrqTree, TreeError

Vec = tuple[Fraction, ...]


class GcrqEvalError(ArithmeticError):
    def __init__(self, message: str, node: int):
        super().__init__(f"node {node}: {message}")
        self.node = node


def _div(x: Vec, a: Vec, b: Vec) -> Vec:
    if any(v == 0 for v in b):
        raise ZeroDivisionError("division by zero")
    return tuple(p / q for p, q in zip(a, b))


OPERATORS: dict[str, Callable[[Vec, Vec, Vec], Vec]] = {
    "add": lambda x, a, b: tuple(p + q for p, q in zip(a, b)),
    "sub": lambda x, a, b: tuple(p - q for p, q in zip(a, b)),
    "mul": lambda x, a, b: tuple(p * q for p, q in zip(a, b)),
    "div": _div,
    # the plain argmax rule, earlier child on ties
    "select": lambda x, a, b: a if dot(a, x) >= dot(b, x) else b,
}


@dataclass(frozen=True)
class GcrqTree:
    tree: CrqTree
    ops: Mapping[int, int]  # internal node -> index into ``operators``
    operators: tuple[str, ...]

    def __post_init__(self):
        for name in self.operators:
            if name not in OPERATORS:
                raise TreeError(f"unknown operator {name!r}", field="operators")
        for v in self.tree.internal():
            if len(self.tree.children[v]) != 2:
                raise TreeError("operator nodes need exactly two children", node=v, field="children")
            i = self.ops.get(v)
            if i is None:
                raise TreeError("missing", node=v, field="op")
            if not 0 <= i < len(self.operators):
                raise TreeError(f"operator index {i} out of range", node=v, field="op")


def evaluate_gcrq(g: GcrqTree) -> tuple[Fraction, ...]:
    t = g.tree
    val: dict[int, Vec] = {}
    for v in t.postorder():
        kids = t.children[v]
        if not kids:
            val[v] = tuple(Fraction(x) for x in t.labels[v])
            continue
        fn = OPERATORS[g.operators[g.ops[v]]]
        x = tuple(Fraction(c) for c in t.labels[v])
        try:
            val[v] = fn(x, val[kids[0]], val[kids[1]])
        except ZeroDivisionError as exc:
            raise GcrqEvalError(str(exc), v) from None
    return val[t.root]


def gcrq_from_dict(body: dict) -> GcrqTree:
    tree, _ = from_dict(body)
    ops_names = body.get("operators")
    if not isinstance(ops_names, list):
        raise FormatError("missing", field="operators")
    ops = {rec["id"]: rec["op"] for rec in body["nodes"] if "op" in rec}
    for v, i in ops.items():
        if not isinstance(i, int):
            raise FormatError("operator index must be an integer", node=v, field="op")
    return GcrqTree(tree, ops, tuple(ops_names))


def gcrq_to_dict(g: GcrqTree) -> dict:
    body = to_dict(g.tree)
    body["operators"] = list(g.operators)
    for rec in body["nodes"]:
        if rec["id"] in g.ops:
            rec["op"] = g.ops[rec["id"]]
    return body


def is_gcrq_body(body) -> bool:
    return isinstance(body, dict) and "operators" in body


def expression_tree(expr, operators: Sequence[str] = ("add", "sub", "mul", "div"), d: int = 1,
                    gamma: Sequence[int] = tuple(range(-9, 10))) -> GcrqTree:
    """Build from nested ``(op_name, left, right)`` tuples over integer leaves."""
    children: list[list[int]] = []
    labels: list = []
    ops: dict[int, int] = {}

    def walk(e) -> int:
        v = len(children)
        children.append([])
        if isinstance(e, tuple):
            name, left, right = e
            labels.append((0,) * d)
            ops[v] = list(operators).index(name)
            children[v] = [walk(left), walk(right)]
        else:
            labels.append((e,) * d if isinstance(e, int) else tuple(e))
        return v

    walk(expr)
    return GcrqTree(CrqTree(d, gamma, 0, children, labels), ops, tuple(operators))


def dumps_gcrq(g: GcrqTree) -> str:
    return json.dumps(gcrq_to_dict(g), separators=(",", ":")) + "\n"
