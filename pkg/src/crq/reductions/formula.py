"""Fully parenthesized Boolean formulas over 0, 1, ¬, ∧, ∨."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Union

NOT, AND, OR = "¬", "∧", "∨"
ALIASES = {"!": NOT, "&": AND, "|": OR}
ALPHABET = set("01()") | {NOT, AND, OR} | set(ALIASES)


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"position {pos}: {message}")
        self.pos = pos


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class Bin:
    op: str  # AND or OR
    left: "Formula"
    right: "Formula"


Formula = Union[Const, Not, Bin]


def parse_formula(text: str) -> Formula:
    """Parse ``φ := 0 | 1 | (¬φ) | (φ∧φ) | (φ∨φ)``; ASCII ``! & |`` also accepted."""
    pos = 0

    def peek() -> str | None:
        if pos >= len(text):
            return None
        ch = text[pos]
        return ALIASES.get(ch, ch)

    def expect(ch: str) -> None:
        nonlocal pos
        got = peek()
        if got != ch:
            raise FormulaSyntaxError(f"expected {ch!r}, found {got!r}", pos)
        pos += 1

    def formula() -> Formula:
        nonlocal pos
        ch = peek()
        if ch in ("0", "1"):
            pos += 1
            return Const(int(ch))
        if ch != "(":
            raise FormulaSyntaxError(f"expected '0', '1' or '(', found {ch!r}", pos)
        pos += 1
        if peek() == NOT:
            pos += 1
            arg = formula()
            expect(")")
            return Not(arg)
        left = formula()
        op = peek()
        if op not in (AND, OR):
            raise FormulaSyntaxError(f"expected a binary operator, found {op!r}", pos)
        pos += 1
        right = formula()
        expect(")")
        return Bin(op, left, right)

    for i, ch in enumerate(text):
        if ch not in ALPHABET:
            raise FormulaSyntaxError(f"symbol {ch!r} is not in the alphabet", i)
    tree = formula()
    if pos != len(text):
        raise FormulaSyntaxError("trailing input", pos)
    return tree


def to_text(f: Formula, ascii: bool = False) -> str:
    sym = {NOT: "!", AND: "&", OR: "|"} if ascii else {NOT: NOT, AND: AND, OR: OR}
    if isinstance(f, Const):
        return str(f.value)
    if isinstance(f, Not):
        return f"({sym[NOT]}{to_text(f.arg, ascii)})"
    return f"({to_text(f.left, ascii)}{sym[f.op]}{to_text(f.right, ascii)})"


def eval_formula(f: Formula) -> int:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return 1 - eval_formula(f.arg)
    a, b = eval_formula(f.left), eval_formula(f.right)
    return (a & b) if f.op == AND else (a | b)


def nesting_profile(text: str) -> list[int]:
    """Open minus close parentheses strictly before each position."""
    out, depth = [], 0
    for ch in text:
        out.append(depth)
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
    return out


def size(f: Formula) -> int:
    if isinstance(f, Const):
        return 1
    if isinstance(f, Not):
        return 1 + size(f.arg)
    return 1 + size(f.left) + size(f.right)


def nesting(f: Formula) -> int:
    if isinstance(f, Const):
        return 0
    if isinstance(f, Not):
        return 1 + nesting(f.arg)
    return 1 + max(nesting(f.left), nesting(f.right))


def all_formulas(n: int) -> Iterator[Formula]:
    """Every formula with exactly ``n`` AST nodes."""
    if n == 1:
        yield Const(0)
        yield Const(1)
        return
    for sub in all_formulas(n - 1):
        yield Not(sub)
    for k in range(1, n - 1):
        for left in all_formulas(k):
            for right in all_formulas(n - 1 - k):
                yield Bin(AND, left, right)
                yield Bin(OR, left, right)


def random_formula(rng: random.Random, max_nesting: int = 8) -> Formula:
    """40% binary, 20% negation, 40% constant; constants forced at the cap."""
    if max_nesting == 0:
        return Const(rng.randint(0, 1))
    r = rng.random()
    if r < 0.4:
        return Bin(rng.choice((AND, OR)), random_formula(rng, max_nesting - 1),
                   random_formula(rng, max_nesting - 1))
    if r < 0.6:
        return Not(random_formula(rng, max_nesting - 1))
    return Const(rng.randint(0, 1))
