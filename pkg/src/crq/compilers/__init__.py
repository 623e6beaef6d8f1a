"""Compile CRQ instances into exact hardmax transformers and a stack RNN."""

from .compiled import CompiledInstance, CompileError, Layout
from .cot import compile_cot_transformer, run_cot
from .deep import attention_pattern_violations, compile_deep_transformer, run_deep
from .mult import inner_product_gadget, knots_per_unit, mult_gadget
from .pe import PeAssignment, PeError, assign, gen_sign_pe, pe_for
from .resources import Resources, resource_report
from .rnn import compile_rnn, compile_rnn_instance, rnn_inputs, run_rnn
from .stack import IllegalOrdering, StackRun, semantic_stack_machine

__all__ = [
    "CompiledInstance", "CompileError", "Layout", "compile_cot_transformer", "run_cot",
    "attention_pattern_violations", "compile_deep_transformer", "run_deep",
    "inner_product_gadget", "knots_per_unit", "mult_gadget", "PeAssignment", "PeError", "assign",
    "gen_sign_pe", "pe_for", "Resources", "resource_report", "compile_rnn", "compile_rnn_instance",
    "rnn_inputs", "run_rnn", "IllegalOrdering", "StackRun", "semantic_stack_machine",
]
