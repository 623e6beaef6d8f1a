"""Compile a tree into a depth-L hardmax transformer with one shared block.

Every node is a token.  Token layout::

    X (d)   current value: the label, or the answer once solved
    Y (d)   scratch written by attention
    Z (D)   own id vector for internal nodes, parent's id for leaves
    P (D)   parent's id for unsolved internal nodes, 0 otherwise
    K (1)   depth counter, advanced once per block
    F (1)   1 exactly in the block where this internal node is solved

An unsolved internal node with F = 1 attends to the child whose value best
matches its label and then turns into a leaf of its parent: X takes the
child's value, Z takes P, P is cleared.  Everything else attends to itself
or is ignored.  Tokens are zeroed once their parent has consumed them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..core.tree import CrqTree, clog2
from ..nir.mlp import MlpBuilder, Stage
from ..nir.rational import BitTracker, QArray
from ..nir.transformer import AttentionLayer, Block, RunTrace, TokenSequence, TransformerProgram, transformer_run
from .compiled import CompiledInstance, CompileError, Layout
from .gadgets import at_least, gated, zero_finish, zero_parts
from .pe import PeAssignment, assign, gen_sign_pe


def token_order(tree: CrqTree) -> list[int]:
    """Non-root nodes in BFS order, root last."""
    bfs = tree.bfs()
    return bfs[1:] + bfs[:1]


def layout(d: int, D: int) -> Layout:
    return Layout(("X", d), ("Y", d), ("Z", D), ("P", D), ("K", 1), ("F", 1))


@dataclass(frozen=True)
class Scales:
    """Weights on the id-match, parent-match and flag terms of the score."""

    own: Fraction
    parent: Fraction
    flag: Fraction

    def margins(self, c, m: int, rho: int) -> dict[str, bool]:
        """Each strict inequality that makes the attention choices unambiguous."""
        a, b, g = self.own, self.parent, self.flag
        full = 4 * m
        return {
            "self_over_child_leaf": full * b > c,
            "self_over_other_internal": (full - rho) * a > c,
            "child_over_self": g > 2 * c + full * b,
            "child_over_unsolved_internal": (full - rho) * a > 2 * c + full * b,
            "child_over_foreign_leaf": (full - rho) * a > 2 * c,
        }


def default_scales(c, m: int) -> Scales:
    return Scales(Fraction(6 * c), Fraction(c), Fraction(6 * c * m))


def fit_scales(scales: Scales, c, m: int, rho: int, max_rounds: int = 64) -> Scales:
    """Double whichever scale a failing margin depends on until all hold."""
    for _ in range(max_rounds):
        ok = scales.margins(c, m, rho)
        if all(ok.values()):
            return scales
        own, parent, flag = scales.own, scales.parent, scales.flag
        if not ok["self_over_child_leaf"]:
            parent *= 2
        elif not ok["child_over_self"]:
            flag *= 2
        else:
            own *= 2
        scales = Scales(own, parent, flag)
    raise CompileError("could not satisfy the attention margins")


@lru_cache(maxsize=128)
def build_block(d: int, D: int, depth: int, gmax: int, scales: Scales) -> Block:
    lay = layout(d, D)
    W = lay.width

    score = [((i, i), 1) for i in list(lay.idx("X")) + list(lay.idx("Y"))]
    score += [((i, i), scales.own) for i in lay.idx("Z")]
    score += [((i, i), scales.parent) for i in lay.idx("P")]
    score.append(((lay.one("F"), lay.one("F")), -scales.flag))
    value = [((i, j), 1) for i, j in zip(lay.idx("Y"), lay.idx("X"))]
    attn = AttentionLayer(QArray.from_sparse((W, W), score), QArray.from_sparse((W, W), value),
                          residual=True)

    bound = max(gmax, 1) + 1
    b = MlpBuilder(W)
    h = b.inputs()
    X, Y, Z, P = (h[lay[k]] for k in "XYZP")
    k, f = h[lay.one("K")], h[lay.one("F")]

    st = Stage(b)
    internal = st.relu(P[0]) + st.relu(-P[0])
    dead = at_least(st, k - depth)
    parts = zero_parts(st, k + 2 - depth)
    X, Y, Z, P = ([st.signed(v) for v in part] for part in (X, Y, Z, P))
    k, f = st.nonneg(k), st.nonneg(f)
    st.commit()

    st = Stage(b)
    next_is_last = zero_finish(st, parts)
    alive = st.nonneg(1 - dead)
    keep_p = st.relu(1 - f - dead)
    X2 = [gated(st, x, f + dead, bound) + gated(st, y, 1 - f + dead, bound) - bound * alive
          for x, y in zip(X, Y)]
    Z2 = [gated(st, z, f + dead, bound) + gated(st, p, 1 - f + dead, bound) - bound * alive
          for z, p in zip(Z, P)]
    P2 = [gated(st, p, f + dead, bound) - bound * keep_p for p in P]
    internal, f, k = st.nonneg(internal), st.nonneg(f), st.nonneg(k)
    st.commit()

    st = Stage(b)
    flag = st.relu(internal + next_is_last + (1 - f) + alive - 3)
    X3, Z3, P3 = ([st.signed(v) for v in part] for part in (X2, Z2, P2))
    k = st.nonneg(k)
    st.commit()

    out = X3 + [0 * k] * d + Z3 + P3 + [k + 1, flag]
    return Block(attn, b.finish(out))


def embed(tree: CrqTree, pe: PeAssignment, D: int) -> tuple[TokenSequence, list[int]]:
    L = tree.height
    zero = (0,) * D
    order = token_order(tree)
    rows = []
    for v in order:
        x = list(tree.labels[v])
        p = tree.parent[v]
        if tree.children[v]:
            parent_id = pe.z[p] if p is not None else pe.z[v]
            rows.append(x + [0] * tree.d + list(pe.z[v]) + list(parent_id)
                        + [tree.depth[v], int(tree.depth[v] == L - 1)])
        else:
            parent_id = pe.z[p] if p is not None else zero
            rows.append(x + [0] * tree.d + list(parent_id) + list(zero) + [tree.depth[v], 0])
    return TokenSequence(QArray.of(rows), tuple(order)), order


def compile_deep_transformer(tree: CrqTree, pe: PeAssignment | None = None, seed: int = 0,
                             scales: Scales | None = None) -> CompiledInstance:
    pe = pe if pe is not None else gen_sign_pe(max(tree.n, 2), seed)
    if not pe.z or len(pe.z) != len(tree.internal()):
        pe = assign(pe, tree)
    m = clog2(pe.k)
    D = pe.dim
    if D != 4 * m:
        raise CompileError(f"id vectors have dimension {D}, expected {4 * m}")
    gmax = tree.max_abs
    c = max(1, tree.d * gmax * gmax)
    rho = pe.max_cross()
    requested = scales or default_scales(c, m)
    fitted = fit_scales(requested, c, m, rho) if tree.internal() else requested
    L = tree.height
    tokens, order = embed(tree, pe, D)
    lay = layout(tree.d, D)
    blocks: tuple[Block, ...] = ()
    if L > 0:
        block = build_block(tree.d, D, L, gmax, fitted)
        blocks = (block,) * L
    program = TransformerProgram(lay.width, blocks, tree.d)
    meta = {
        "n": tree.n, "d": tree.d, "L": L, "c": c, "m": m, "width": lay.width,
        "pe_seed": pe.seed, "pe_attempts": pe.attempts, "rho": rho,
        "scales": [str(fitted.own), str(fitted.parent), str(fitted.flag)],
        "scales_raised": fitted != requested,
        "margins_checked": all(fitted.margins(c, m, rho).values()) if tree.internal() else True,
        "layout": lay.describe(),
    }
    return CompiledInstance("deep", program, tokens, meta, node_of=tuple(order))


@dataclass
class DeepRun:
    answer: tuple[int, ...]
    trace: RunTrace
    widest_bits: int


def run_deep(ci: CompiledInstance, bit_limit: int | None = 64) -> DeepRun:
    tracker = BitTracker(bit_limit)
    trace = RunTrace()
    out = transformer_run(ci.program, ci.inputs, trace=trace, tracker=tracker)
    return DeepRun(tuple(out.to_ints()), trace, tracker.widest)


def attention_pattern_violations(tree: CrqTree, ci: CompiledInstance, trace: RunTrace) -> list[str]:
    """Check every block: unsolved internal tokens with F = 0 attend to themselves,
    tokens with F = 1 attend to one of their children."""
    d = tree.d
    D = (ci.program.width - 2 * d - 2) // 2
    lay = layout(d, D)
    pos = {v: i for i, v in enumerate(ci.node_of)}
    bad = []
    for t, (state, winners) in enumerate(zip(trace.states, trace.winners)):
        p_first = state.num[:, lay["P"].start]
        flags = state.num[:, lay.one("F")]
        for i, v in enumerate(ci.node_of):
            if p_first[i] == 0:
                continue
            w = int(winners[i])
            if flags[i] == 0 and w != i:
                bad.append(f"block {t}: node {v} attended {ci.node_of[w]} instead of itself")
            if flags[i] != 0 and ci.node_of[w] not in tree.children[v]:
                bad.append(f"block {t}: node {v} attended non-child {ci.node_of[w]}")
    return bad
