"""Container for a compiled instance plus a fixed slot layout helper."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable


class CompileError(ValueError):
    pass


class Layout:
    """Named, contiguous coordinate ranges inside an embedding."""

    def __init__(self, *fields: tuple[str, int]):
        self.slices: dict[str, slice] = {}
        pos = 0
        for name, size in fields:
            self.slices[name] = slice(pos, pos + size)
            pos += size
        self.width = pos

    def __getitem__(self, name: str) -> slice:
        return self.slices[name]

    def idx(self, name: str) -> range:
        s = self.slices[name]
        return range(s.start, s.stop)

    def one(self, name: str) -> int:
        s = self.slices[name]
        assert s.stop - s.start == 1
        return s.start

    def describe(self) -> dict[str, list[int]]:
        return {k: [s.start, s.stop] for k, s in self.slices.items()}


@dataclass
class CompiledInstance:
    backend: str  # "deep" | "cot" | "rnn"
    program: Any
    inputs: Any  # TokenSequence for transformers, list of vectors for the RNN
    meta: dict = field(default_factory=dict)
    token_builder: Callable | None = None
    # token index -> node id, or node visiting order for the RNN
    node_of: tuple = ()
