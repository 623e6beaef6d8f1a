"""JSON-shaped debug dumps of compiled programs.  Not a stable format."""

from __future__ import annotations

import json
from fractions import Fraction

from .mlp import Affine, MlpProgram
from .rational import QArray
from .rnn import RnnProgram
from .transformer import AttentionLayer, Block, TransformerProgram


def _matrix(a: QArray):
    def conv(x):
        if isinstance(x, list):
            return [conv(y) for y in x]
        return str(x)

    return conv(a.to_fractions())


def _unmatrix(rows) -> QArray:
    return QArray.of(_map(rows, Fraction))


def _map(x, f):
    return [_map(y, f) for y in x] if isinstance(x, list) else f(x)


def mlp_to_dict(p: MlpProgram) -> dict:
    return {
        "layers": [
            {"weight": _matrix(a.weight), "bias": _matrix(a.bias), "relu": a.relu}
            for a in p.layers
        ]
    }


def mlp_from_dict(d: dict) -> MlpProgram:
    layers = []
    for a in d["layers"]:
        layers.append(Affine(_unmatrix(a["weight"]), _unmatrix(a["bias"]), a["relu"]))
    return MlpProgram(tuple(layers))


def program_to_dict(program) -> dict:
    if isinstance(program, TransformerProgram):
        return {
            "kind": "transformer",
            "width": program.width,
            "out_dim": program.out_dim,
            "blocks": [
                {
                    "score": _matrix(b.attention.score),
                    "value": _matrix(b.attention.value),
                    "residual": b.attention.residual,
                    "mlp": mlp_to_dict(b.mlp),
                }
                for b in program.blocks
            ],
        }
    if isinstance(program, RnnProgram):
        return {
            "kind": "rnn",
            "input_width": program.input_width,
            "slot_width": program.slot_width,
            "slot_count": program.slot_count,
            "h0": _matrix(program.h0),
            "cell": mlp_to_dict(program.cell),
        }
    raise TypeError(f"cannot dump {type(program).__name__}")


def program_from_dict(d: dict):
    if d["kind"] == "transformer":
        blocks = tuple(
            Block(AttentionLayer(_unmatrix(b["score"]), _unmatrix(b["value"]), b["residual"]),
                  mlp_from_dict(b["mlp"]))
            for b in d["blocks"]
        )
        return TransformerProgram(d["width"], blocks, d["out_dim"])
    if d["kind"] == "rnn":
        return RnnProgram(mlp_from_dict(d["cell"]), _unmatrix(d["h0"]), d["input_width"],
                          d["slot_width"], d["slot_count"])
    raise ValueError(f"unknown program kind {d['kind']!r}")


def dumps(program, header: dict | None = None) -> str:
    body = program_to_dict(program)
    if header:
        body = {"meta": header, **body}
    return json.dumps(body)
