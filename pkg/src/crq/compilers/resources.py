"""Resource accounting for the three backends."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Resources:
    backend: str
    params: int  # distinct weights; a block reused at every layer counts once
    width: int
    sequential_steps: int  # forward passes executed one after another
    parallel_steps: int  # depth of the computation with unlimited parallel hardware
    cot_tokens: int
    max_occupancy: int | None

    def as_dict(self) -> dict:
        return asdict(self)


def resource_report(ci, run) -> Resources:
    """``ci`` is a compiled instance and ``run`` the matching run record."""
    n, L = ci.meta["n"], ci.meta["L"]
    if ci.backend == "deep":
        prog = ci.program
        return Resources("deep", prog.param_count(shared=True), prog.width, max(L, 0),
                         max(L, 0), 0, None)
    if ci.backend == "cot":
        prog = ci.program
        # each step is a full pass over the two blocks
        return Resources("cot", prog.param_count(), prog.width, run.tokens, run.tokens,
                         run.tokens, None)
    if ci.backend == "rnn":
        prog = ci.program
        return Resources("rnn", prog.param_count(), prog.hidden_width, len(ci.inputs),
                         len(ci.inputs), 0, run.max_occupancy)
    raise ValueError(f"unknown backend {ci.backend!r}")
