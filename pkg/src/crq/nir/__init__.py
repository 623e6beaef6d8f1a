"""Exact neural machine interpreters."""

from .mlp import Affine, Lin, MlpBuilder, MlpProgram, Stage, WidthError, identity_program, mlp_forward
from .rational import BitTracker, PrecisionError, QArray
from .rnn import RnnProgram, occupancy, rnn_run
from .transformer import (
    COT_GENERATED,
    AttentionLayer,
    Block,
    RunTrace,
    TokenSequence,
    TransformerProgram,
    hardmax_attention,
    transformer_run,
    transformer_run_cot,
)

__all__ = [
    "Affine", "Lin", "MlpBuilder", "MlpProgram", "Stage", "WidthError", "identity_program",
    "mlp_forward", "BitTracker", "PrecisionError", "QArray", "RnnProgram", "occupancy", "rnn_run",
    "COT_GENERATED", "AttentionLayer", "Block", "RunTrace", "TokenSequence", "TransformerProgram",
    "hardmax_attention", "transformer_run", "transformer_run_cot",
]
