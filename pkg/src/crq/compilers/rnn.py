"""Compile a stack-evaluating recurrent network.

Hidden state: ``slots`` slots of ``d + 1`` entries, top first.  A slot holds
a vector and ``depth + 1``; a slot whose tag is 0 is empty.  Each step reads one
node ``(x_v, depth_v)`` and either pushes it (depth_v >= depth of the top)
or pops the top two, keeps the one with the larger inner product against
``x_v`` (the top needs a strict win) and pushes it back tagged with
``depth_v``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..core.orderings import Ordering, memory_rank_sort
from ..core.tree import CrqTree, clog2
from ..nir.mlp import Lin, MlpBuilder, Stage
from ..nir.rational import BitTracker, QArray
from ..nir.rnn import RnnProgram, occupancy, rnn_run
from .compiled import CompiledInstance
from .gadgets import at_least, gated, select
from .mult import inner_product

GAP = Fraction(1, 2)  # distinct integer scores differ by at least 1
PRODUCT_EPS = Fraction(1, 4)


def compile_rnn(d: int, n: int, gamma) -> RnnProgram:
    """Recurrent cell for trees with at most ``n`` nodes over ``gamma``.

    The network depends on ``n`` only through ``clog2(n)``, so results are
    cached on that.
    """
    return _compile(d, clog2(n), max(abs(g) for g in gamma))


@lru_cache(maxsize=64)
def _compile(d: int, log_n: int, gmax: int) -> RnnProgram:
    slots = log_n + 1
    s = d + 1
    # depth tags are at most n <= 2**log_n
    bound = max(gmax, 2 ** log_n) + 1

    b = MlpBuilder(s + s * slots)
    inp = b.inputs()
    xv, lv = inp[:d], inp[d]
    hid = [inp[s + j * s: s + (j + 1) * s] for j in range(slots)]

    # 1: push flag, carry everything
    st = Stage(b)
    push = at_least(st, lv + 1 - hid[0][d])
    xv = [st.signed(a) for a in xv]
    lv = st.nonneg(lv)
    hid = [[st.signed(a) for a in slot[:d]] + [st.nonneg(slot[d])] for slot in hid]
    st.commit()

    # 2: on push, shift every slot down one and write (x_v, depth_v + 1) on top
    st = Stage(b)
    fresh = xv + [lv + 1]
    shifted = [[select(st, hid[j][i], (fresh if j == 0 else hid[j - 1])[i], push, bound)
                for i in range(s)] for j in range(slots)]
    push = st.nonneg(push)
    xv = [st.signed(a) for a in xv]
    lv = st.nonneg(lv)
    st.commit()
    hid = shifted

    # 3: inner products of the top two slots with x_v
    st = Stage(b)
    score0 = inner_product(st, hid[0][:d], xv, gmax, PRODUCT_EPS)
    score1 = inner_product(st, hid[1][:d], xv, gmax, PRODUCT_EPS) if slots > 1 else Lin()
    push = st.nonneg(push)
    lv = st.nonneg(lv)
    hid = [[st.signed(a) for a in slot[:d]] + [st.nonneg(slot[d])] for slot in hid]
    st.commit()

    # 4: top wins iff score0 - score1 >= 1
    st = Stage(b)
    diff = score0 - score1
    hi, lo = st.relu(diff), st.relu(diff - GAP / 2)
    top_wins = (hi - lo) * (2 / GAP)
    push = st.nonneg(push)
    lv = st.nonneg(lv)
    hid = [[st.signed(a) for a in slot[:d]] + [st.nonneg(slot[d])] for slot in hid]
    st.commit()

    # 5: on pop, the winner goes on top and the rest move up one slot
    st = Stage(b)
    pop = 1 - push
    out = []
    for j in range(slots):
        for i in range(s):
            keep = gated(st, hid[j][i], pop, bound)
            if j == 0 and i < d:
                chosen = (gated(st, hid[0][i], push + (1 - top_wins), bound)
                          + gated(st, hid[1][i] if slots > 1 else Lin(), push + top_wins, bound))
            elif j == 0:
                chosen = gated(st, lv + 1, push, bound)
            else:
                below = hid[j + 1][i] if j + 1 < slots else Lin()
                chosen = gated(st, below, push, bound)
            out.append(keep + chosen - bound)
    st.commit()

    cell = b.finish(out)
    return RnnProgram(cell, QArray.zeros(s * slots), s, s, slots)


def rnn_inputs(tree: CrqTree, ordering: Ordering) -> list[QArray]:
    return [QArray.of(list(tree.labels[v]) + [tree.depth[v]]) for v in ordering.perm]


def compile_rnn_instance(tree: CrqTree, ordering: Ordering | None = None) -> CompiledInstance:
    if not tree.is_binary():
        raise ValueError("the recurrent backend needs a binary tree; convert with to_binary first")
    ordering = ordering or memory_rank_sort(tree)
    ordering.check(tree)
    program = compile_rnn(tree.d, tree.n, tree.gamma)
    meta = {
        "n": tree.n, "d": tree.d, "L": tree.height, "slots": program.slot_count,
        "slot_width": program.slot_width, "gap": str(GAP), "product_eps": str(PRODUCT_EPS),
        "order_kind": ordering.kind,
    }
    return CompiledInstance("rnn", program, rnn_inputs(tree, ordering), meta,
                            node_of=tuple(ordering.perm))


@dataclass
class RnnRun:
    answer: tuple[int, ...]
    states: list[QArray]
    max_occupancy: int
    widest_bits: int


def run_rnn(ci: CompiledInstance, bit_limit: int | None = 64) -> RnnRun:
    prog: RnnProgram = ci.program
    tracker = BitTracker(bit_limit)
    states: list[QArray] = []
    h = rnn_run(prog, ci.inputs, trace=states, tracker=tracker)
    top = h[: prog.slot_width - 1].to_ints()
    peak = max((occupancy(prog, s) for s in states), default=0)
    return RnnRun(tuple(top), states, peak, tracker.widest)
