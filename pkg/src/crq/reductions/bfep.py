"""Boolean formula evaluation as a two-dimensional tree question.

False is ``(0, 1)`` and true is ``(1, 0)``.  An ∧ node carries the false
vector, so it prefers a false child; an ∨ node carries the true vector.
Negation is a fixed seven-node gadget.
"""

from __future__ import annotations

from ..core.evaluate import evaluate
from ..core.tree import CrqTree
from .formula import AND, Bin, Const, Formula, Not, eval_formula

FALSE = (0, 1)
TRUE = (1, 0)
GAMMA = tuple(range(-2, 3))

# negation gadget, top to bottom: the top node's second child is FALSE, the
# middle node's second child is TRUE, the bottom node's second child is ONES
NEG_TOP, NEG_MID, NEG_BOTTOM, ONES = (-1, -2), (2, 1), (-2, 1), (1, 1)


def bfep_to_crq(f: Formula) -> CrqTree:
    children: list[list[int]] = []
    labels: list[tuple[int, int]] = []

    def new(label) -> int:
        children.append([])
        labels.append(label)
        return len(children) - 1

    def build(g: Formula) -> int:
        if isinstance(g, Const):
            return new(TRUE if g.value else FALSE)
        if isinstance(g, Bin):
            v = new(FALSE if g.op == AND else TRUE)
            children[v] = [build(g.left), build(g.right)]
            return v
        top = new(NEG_TOP)
        mid = new(NEG_MID)
        children[top] = [mid, new(FALSE)]
        bottom = new(NEG_BOTTOM)
        children[mid] = [bottom, new(TRUE)]
        children[bottom] = [build(g.arg), new(ONES)]
        return top

    build(f)
    return CrqTree(2, GAMMA, 0, children, labels)


def verify_reduction(f: Formula) -> bool:
    want = TRUE if eval_formula(f) else FALSE
    return evaluate(bfep_to_crq(f)).value == want
