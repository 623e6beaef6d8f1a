"""Compile a tree into a two-block transformer decoded for n steps.

Token layout::

    X (d)    value
    Y (d)    scratch
    Z (D)    own id (internal), parent id (leaf), parent id (generated answer)
    P (D)    parent id (internal nodes only)
    WI (D)   id of this token's position in the visiting order
    WN (D)   id of the next position
    F (1)    1 for internal nodes

Nodes are visited deepest level first.  At step k the last token's WN
points at the node in position k; block 2 copies that node's solved value
out as a new token shaped like a leaf of its parent, so the parent finds it
with the same attention rule as an ordinary leaf.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..core.orderings import reverse_bfs_order
from ..core.tree import CrqTree, clog2
from ..nir.mlp import MlpBuilder, Stage, identity_program
from ..nir.rational import BitTracker, QArray
from ..nir.transformer import (
    AttentionLayer,
    Block,
    TokenSequence,
    TransformerProgram,
    transformer_run_cot,
)
from .compiled import CompiledInstance, CompileError, Layout
from .deep import token_order
from .gadgets import select
from .pe import PeAssignment, assign, gen_sign_pe


def layout(d: int, D: int) -> Layout:
    return Layout(("X", d), ("Y", d), ("Z", D), ("P", D), ("WI", D), ("WN", D), ("F", 1))


def margins(own, flag, c, m: int, rho: int) -> dict[str, bool]:
    full = 4 * m
    return {
        "child_over_self": flag > 2 * c,
        "child_over_foreign_leaf": (full - rho) * own > 2 * c,
        "child_over_unmatched": full * own > 2 * c,
    }


def fit(own: Fraction, flag: Fraction, c, m: int, rho: int, max_rounds: int = 64):
    for _ in range(max_rounds):
        ok = margins(own, flag, c, m, rho)
        if all(ok.values()):
            return own, flag
        if not ok["child_over_self"]:
            flag *= 2
        else:
            own *= 2
    raise CompileError("could not satisfy the attention margins")


@lru_cache(maxsize=64)
def build_program(d: int, D: int, gmax: int, own: Fraction, flag: Fraction) -> TransformerProgram:
    lay = layout(d, D)
    W = lay.width

    # block 1: internal nodes fetch their best child's value into Y
    s1 = [((i, i), 1) for i in lay.idx("X")]
    s1 += [((i, i), own) for i in lay.idx("Z")]
    s1.append(((lay.one("F"), lay.one("F")), -flag))
    v1 = [((i, j), 1) for i, j in zip(lay.idx("Y"), lay.idx("X"))]
    attn1 = AttentionLayer(QArray.from_sparse((W, W), s1), QArray.from_sparse((W, W), v1), True)

    bound = max(gmax, 1) + 1
    b = MlpBuilder(W)
    h = b.inputs()
    st = Stage(b)
    f = h[lay.one("F")]
    out = [st.signed(v) for v in h]
    for i, (x, y) in enumerate(zip(lay.idx("X"), lay.idx("Y"))):
        out[y] = select(st, h[x], h[y], f, bound)
    st.commit()
    mlp1 = b.finish(out)

    # block 2: the last token fetches the node whose WI equals its WN
    s2 = [((i, j), 1) for i, j in zip(lay.idx("WI"), lay.idx("WN"))]
    v2 = [((i, j), 1) for i, j in zip(lay.idx("X"), lay.idx("Y"))]
    v2 += [((i, j), 1) for i, j in zip(lay.idx("Z"), lay.idx("P"))]
    v2 += [((i, i), 1) for i in list(lay.idx("WI")) + list(lay.idx("WN"))]
    attn2 = AttentionLayer(QArray.from_sparse((W, W), s2), QArray.from_sparse((W, W), v2), False)

    blocks = (Block(attn1, mlp1), Block(attn2, identity_program(W)))
    return TransformerProgram(W, blocks, d)


def embed(tree: CrqTree, pe: PeAssignment, D: int) -> tuple[TokenSequence, list[int]]:
    order = token_order(tree)
    position = reverse_bfs_order(tree).position()
    zero = [0] * D
    rows = []
    for v in order:
        x = list(tree.labels[v]) + [0] * tree.d
        p = tree.parent[v]
        wi, wn = list(pe.w[position[v]]), list(pe.w[position[v] + 1])
        if tree.children[v]:
            parent_id = list(pe.z[p]) if p is not None else zero
            rows.append(x + list(pe.z[v]) + parent_id + wi + wn + [1])
        else:
            parent_id = list(pe.z[p]) if p is not None else zero
            rows.append(x + parent_id + zero + wi + wn + [0])
    return TokenSequence(QArray.of(rows), tuple(order)), order


def compile_cot_transformer(tree: CrqTree, pe: PeAssignment | None = None, seed: int = 0) -> CompiledInstance:
    pe = pe if pe is not None else gen_sign_pe(max(tree.n, 2), seed)
    if not pe.w:
        pe = assign(pe, tree)
    m = clog2(pe.k)
    D = pe.dim
    if D != 4 * m:
        raise CompileError(f"id vectors have dimension {D}, expected {4 * m}")
    gmax = tree.max_abs
    c = max(1, tree.d * gmax * gmax)
    rho = pe.max_cross()
    own, flag = fit(Fraction(c), Fraction(3 * c), c, m, rho)
    program = build_program(tree.d, D, gmax, own, flag)
    tokens, order = embed(tree, pe, D)
    meta = {
        "n": tree.n, "d": tree.d, "L": tree.height, "c": c, "m": m, "width": program.width,
        "pe_seed": pe.seed, "pe_attempts": pe.attempts, "rho": rho,
        "scales": [str(own), str(flag)], "scales_raised": (own, flag) != (c, 3 * c),
        "margins_checked": True, "steps": tree.n, "layout": layout(tree.d, D).describe(),
    }
    return CompiledInstance("cot", program, tokens, meta, token_builder=lambda v: v,
                            node_of=tuple(order))


@dataclass
class CotRun:
    answer: tuple[int, ...]
    generated: TokenSequence
    widest_bits: int

    @property
    def tokens(self) -> int:
        return len(self.generated)


def run_cot(ci: CompiledInstance, bit_limit: int | None = 64) -> CotRun:
    tracker = BitTracker(bit_limit)
    gen, out = transformer_run_cot(ci.program, ci.inputs, ci.meta["steps"], ci.token_builder, tracker)
    return CotRun(tuple(out.to_ints()), gen, tracker.widest)
