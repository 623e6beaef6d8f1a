"""Recurrent networks: one MLP folded over an input sequence."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .mlp import MlpProgram, WidthError, mlp_forward
from .rational import BitTracker, QArray, concat


@dataclass(frozen=True)
class RnnProgram:
    """``cell`` maps ``input ++ hidden`` to the next hidden state.

    The hidden state is viewed as ``slot_count`` slots of ``slot_width``
    entries each, top slot first.
    """

    cell: MlpProgram
    h0: QArray
    input_width: int
    slot_width: int
    slot_count: int

    def __post_init__(self):
        m = self.hidden_width
        if self.h0.shape != (m,):
            raise WidthError(f"initial state has shape {self.h0.shape}, expected ({m},)")
        if self.cell.n_in != self.input_width + m or self.cell.n_out != m:
            raise WidthError("cell widths do not match input and hidden widths")

    @property
    def hidden_width(self) -> int:
        return self.slot_width * self.slot_count

    def slots(self, h: QArray) -> list[QArray]:
        w = self.slot_width
        return [h[i * w:(i + 1) * w] for i in range(self.slot_count)]

    def param_count(self) -> int:
        return self.cell.param_count()


def occupancy(program: RnnProgram, h: QArray) -> int:
    """Number of occupied slots; a slot is empty when its last entry is zero."""
    w = program.slot_width
    tags = h.num[w - 1::w]
    return int(sum(1 for t in tags.tolist() if t != 0))


def rnn_run(program: RnnProgram, inputs: Sequence[QArray], trace: list | None = None,
            tracker: BitTracker | None = None) -> QArray:
    """Fold the cell over ``inputs`` from ``h0`` and return the last state.

    When ``trace`` is a list, every intermediate hidden state is appended.
    """
    h = program.h0
    for x in inputs:
        if x.shape != (program.input_width,):
            raise WidthError(f"input width {x.shape} != {program.input_width}")
        h = mlp_forward(program.cell, concat([x, h]), tracker)
        if trace is not None:
            trace.append(h)
    return h
