"""Single-head hardmax attention and transformer interpreters."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .mlp import MlpProgram, WidthError, mlp_forward
from .rational import BitTracker, QArray, concat, stack_rows

COT_GENERATED = "cot-generated"


@dataclass(frozen=True)
class TokenSequence:
    vectors: QArray  # (N, width)
    provenance: tuple = ()

    def __post_init__(self):
        if len(self.vectors.shape) != 2:
            raise WidthError("token matrix must be 2-d")
        if self.provenance and len(self.provenance) != self.vectors.shape[0]:
            raise ValueError("one provenance tag per token")

    @property
    def width(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def with_vectors(self, vectors: QArray) -> "TokenSequence":
        return TokenSequence(vectors, self.provenance)

    def append(self, vector: QArray, tag=COT_GENERATED) -> "TokenSequence":
        rows = concat([self.vectors, QArray(vector.num[None, :], vector.den, reduce_=False)])
        prov = tuple(self.provenance) or (None,) * len(self)
        return TokenSequence(rows, prov + (tag,))


@dataclass(frozen=True)
class AttentionLayer:
    """Score of key ``j`` for query ``i`` is ``h_j . score @ h_i``."""

    score: QArray
    value: QArray
    residual: bool = True

    def __post_init__(self):
        s, v = self.score.shape, self.value.shape
        if s[0] != s[1] or v != s:
            raise WidthError(f"score {s} and value {v} must be equal square shapes")

    @property
    def width(self) -> int:
        return self.score.shape[0]

    def param_count(self) -> int:
        return 2 * self.width * self.width

    @cached_property
    def score_t(self) -> QArray:
        return self.score.T

    @cached_property
    def value_t(self) -> QArray:
        return self.value.T


def attention_scores(h: QArray, layer: AttentionLayer, queries=None) -> QArray:
    """Matrix ``S[i, j]`` of key ``j`` scored against query ``i``."""
    q = h if queries is None else h[queries]
    return (q @ layer.score_t) @ h.T


def hardmax_attention(tokens: TokenSequence, layer: AttentionLayer, queries=None,
                      tracker: BitTracker | None = None):
    """Apply one attention layer; returns (new tokens, winner index per query).

    ``queries`` optionally restricts which rows are computed (a slice or index
    array); the returned sequence then holds only those rows.
    """
    h = tokens.vectors
    if len(tokens) == 0:
        raise ValueError("attention over an empty sequence")
    if tokens.width != layer.width:
        raise WidthError(f"token width {tokens.width} != layer width {layer.width}")
    scores = attention_scores(h, layer, queries)
    if tracker is not None:
        tracker.see(scores, "attention scores")
    winners = scores.argmax_rows()
    out = h[winners] @ layer.value_t
    if layer.residual:
        out = out + (h if queries is None else h[queries])
    prov = tokens.provenance
    if queries is not None and prov:
        prov = tuple(np.asarray(prov, dtype=object)[queries])
    return TokenSequence(out, prov), winners


@dataclass(frozen=True)
class Block:
    attention: AttentionLayer
    mlp: MlpProgram


@dataclass(frozen=True)
class TransformerProgram:
    width: int
    blocks: tuple[Block, ...]
    out_dim: int

    def __post_init__(self):
        if self.out_dim > self.width:
            raise WidthError("unembedding keeps more coordinates than the width")
        for b in self.blocks:
            if b.attention.width != self.width or b.mlp.n_in != self.width or b.mlp.n_out != self.width:
                raise WidthError("block width mismatch")

    def param_count(self, shared: bool = False) -> int:
        """Weight count; with ``shared`` identical block objects count once."""
        seen = []
        total = 0
        for b in self.blocks:
            if shared and any(b is s for s in seen):
                continue
            seen.append(b)
            total += b.attention.param_count() + b.mlp.param_count()
        return total


@dataclass
class RunTrace:
    winners: list = field(default_factory=list)  # per block, winner index per token
    states: list = field(default_factory=list)  # per block input, token matrix


def run_blocks(program: TransformerProgram, tokens: TokenSequence, trace: RunTrace | None = None,
               tracker: BitTracker | None = None, last_only: bool = False) -> TokenSequence:
    if tokens.width != program.width:
        raise WidthError(f"token width {tokens.width} != program width {program.width}")
    for i, block in enumerate(program.blocks):
        if trace is not None:
            trace.states.append(tokens.vectors)
        queries = None
        if last_only and i == len(program.blocks) - 1:
            queries = slice(len(tokens) - 1, len(tokens))
        tokens, winners = hardmax_attention(tokens, block.attention, queries, tracker)
        if trace is not None:
            trace.winners.append(winners)
        tokens = tokens.with_vectors(mlp_forward(block.mlp, tokens.vectors, tracker))
    return tokens


def unembed(program: TransformerProgram, vector: QArray) -> QArray:
    return vector[: program.out_dim]


def transformer_run(program: TransformerProgram, tokens: TokenSequence,
                    trace: RunTrace | None = None, tracker: BitTracker | None = None) -> QArray:
    """Run every block and return the leading coordinates of the last token."""
    out = run_blocks(program, tokens, trace, tracker, last_only=trace is None)
    return unembed(program, out.vectors[len(out) - 1])


def transformer_run_cot(program: TransformerProgram, tokens: TokenSequence, steps: int,
                        token_builder: Callable[[QArray], QArray] | None = None,
                        tracker: BitTracker | None = None):
    """Autoregressive decoding.

    Each step reruns the program over the whole current sequence, turns the
    last position's output into a new token and appends it.  Returns the
    generated tokens and the unembedded final token.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    build = token_builder or (lambda v: v)
    generated = []
    seq = tokens
    for _ in range(steps):
        out = run_blocks(program, seq, tracker=tracker, last_only=True)
        new = build(out.vectors[len(out) - 1])
        if new.shape != (program.width,):
            raise WidthError("token builder changed the width")
        generated.append(new)
        seq = seq.append(new)
    gen = TokenSequence(stack_rows(generated), (COT_GENERATED,) * len(generated))
    return gen, unembed(program, generated[-1])


def to_tokens(rows: Sequence[Sequence], provenance: Sequence = ()) -> TokenSequence:
    return TokenSequence(QArray.of([list(r) for r in rows]), tuple(provenance))
