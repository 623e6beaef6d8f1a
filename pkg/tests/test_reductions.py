import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crq.compilers import IllegalOrdering, semantic_stack_machine
from crq.core import clog2, evaluate, gen_random, memory_rank, memory_rank_sort
from crq.reductions import (
    FamilyMismatch,
    FormulaSyntaxError,
    bfep_to_crq,
    disjointness_family,
    eval_formula,
    extract_subset,
    intersects,
    mr_family,
    parse_formula,
    random_formula,
    subset_size,
    to_text,
    verify_reduction,
)
from crq.reductions.bfep import FALSE, TRUE
from crq.reductions.formula import AND, OR, Bin, Const, Not, all_formulas, nesting_profile, size
from crq.reductions.mr_family import FILL_LEAF, fill_never_wins

from conftest import ranked_skeleton


class TestFormula:
    def test_parse(self):
        assert parse_formula("1") == Const(1)
        assert parse_formula("(0∧1)") == Bin(AND, Const(0), Const(1))
        assert parse_formula("((¬0)∨0)") == Bin(OR, Not(Const(0)), Const(0))

    def test_ascii_aliases(self):
        assert parse_formula("((!0)|0)") == parse_formula("((¬0)∨0)")
        assert parse_formula("(1&0)") == parse_formula("(1∧0)")

    def test_eval(self):
        assert [eval_formula(parse_formula(s)) for s in ("1", "(0∧1)", "((¬0)∨0)")] == [1, 0, 1]

    def test_nesting_profile(self):
        assert nesting_profile("1") == [0]
        assert nesting_profile("(0∧1)") == [0, 1, 1, 1, 1]
        assert nesting_profile("((¬0)∨0)") == [0, 1, 2, 2, 2, 1, 1, 1]

    @pytest.mark.parametrize("text,pos", [
        ("0∧1", 1),  # missing parentheses
        ("(0∧1", 4),
        ("(¬0", 3),
        ("(01)", 2),
        ("(0∧1))", 5),
        ("(0 ∧ 1)", 2),
        ("", 0),
    ])
    def test_syntax_errors(self, text, pos):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_formula(text)
        assert err.value.pos == pos

    def test_enumeration_counts(self):
        # a(1) = 2, a(n) = a(n-1) + 2 * sum a(k) a(n-1-k)
        assert [sum(1 for _ in all_formulas(n)) for n in range(1, 6)] == [2, 2, 10, 26, 114]

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_text_round_trip(self, seed):
        f = random_formula(random.Random(seed), 6)
        assert parse_formula(to_text(f)) == f
        assert parse_formula(to_text(f, ascii=True)) == f


class TestBfep:
    def test_negation_gadget(self):
        assert evaluate(bfep_to_crq(parse_formula("(¬1)"))).value == FALSE
        assert evaluate(bfep_to_crq(parse_formula("(¬0)"))).value == TRUE
        t = bfep_to_crq(parse_formula("(¬0)"))
        assert t.n == 7
        assert sorted(t.labels) == sorted([(-1, -2), (2, 1), (-2, 1), (1, 1), (1, 0), (0, 1), FALSE])

    def test_and_of_trues_uses_identical_tie(self):
        assert evaluate(bfep_to_crq(parse_formula("(1∧1)"))).value == TRUE

    @pytest.mark.parametrize("text", ["0", "1", "((¬(0∨1))∧1)", "((¬(¬1))∨(0∧1))"])
    def test_examples(self, text):
        assert verify_reduction(parse_formula(text))

    def test_all_small_formulas(self):
        for n in range(1, 6):
            for f in all_formulas(n):
                assert verify_reduction(f), to_text(f)

    def test_linear_size(self):
        rng = random.Random(1)
        for _ in range(200):
            f = random_formula(rng, 8)
            assert bfep_to_crq(f).n <= 6 * size(f)


class TestDisjointness:
    def test_examples(self):
        assert evaluate(disjointness_family([1, 0], [1, 0])[0]).value == (1,)
        assert evaluate(disjointness_family([1, 0], [0, 1])[0]).value == (-1,)
        assert evaluate(disjointness_family([0, 0], [0, 0])[0]).value == (-1,)

    def test_shape_and_order(self):
        tree, order = disjointness_family([1, 0, 1, 1], [0, 0, 1, 0])
        assert tree.n == 4 * 4 - 1
        order.check(tree)
        leaves = order.perm[:8]
        assert all(not tree.children[v] for v in leaves)
        assert order.perm[-1] == tree.root

    def test_padding(self):
        tree, _ = disjointness_family([1, 0, 1], [0, 0, 1])
        assert tree.n == 15
        assert evaluate(tree).value == (1,)

    def test_errors(self):
        with pytest.raises(ValueError):
            disjointness_family([1], [1, 0])
        with pytest.raises(ValueError):
            disjointness_family([2], [1])

    def test_small_stack_fails(self):
        a, b = [1, 0, 1, 0], [0, 1, 0, 1]
        tree, order = disjointness_family(a, b)
        with pytest.raises(IllegalOrdering):
            semantic_stack_machine(tree, order, capacity=clog2(4) + 1)
        good = memory_rank_sort(tree)
        run = semantic_stack_machine(tree, good, capacity=memory_rank(tree)[tree.root] + 1)
        assert run.answer.value == evaluate(tree).value

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=16))
    def test_predicate(self, pairs):
        a, b = [p[0] for p in pairs], [p[1] for p in pairs]
        tree, _ = disjointness_family(a, b)
        assert evaluate(tree).value == ((1,) if intersects(a, b) else (-1,))


class TestMrFamily:
    def test_balanced_is_its_own_subset(self):
        t = gen_random(height=3, d=1, seed=0)
        sub = extract_subset(t)
        assert sorted(sub.nodes) == list(range(15))

    def test_ranked_shape(self):
        shape = gen_random(skeleton=ranked_skeleton(), d=1, seed=0)
        fam = mr_family(shape)
        assert len(fam.subset.nodes) == subset_size(2) == 7
        for _, tree in fam.sample(100, seed=3):
            assert fill_never_wins(tree)

    def test_single_leaf(self):
        fam = mr_family(gen_random(1, d=1, seed=0))
        assert len(fam.subset.nodes) == 1
        assert len(fam.sample(5)) == 5

    def test_subset_is_complete(self):
        for s in range(20):
            t = gen_random(2 * (s + 5) + 1, d=1, seed=s)
            sub = extract_subset(t)
            r = memory_rank(t)[t.root]
            assert len(sub.nodes) == subset_size(r)
            assert all(len(k) in (0, 2) for k in sub.children)

    def test_needs_binary(self, worked):
        with pytest.raises(ValueError):
            mr_family(worked)

    def test_mismatch_is_reported(self, monkeypatch):
        fam = mr_family(gen_random(skeleton=ranked_skeleton(), d=1, seed=0))
        asg = fam.random_assignment(random.Random(0))
        full = fam.full_tree(asg)
        # a filler leaf that always wins breaks the family on purpose
        broken = full.relabel([(9, 9, 9) if lab == FILL_LEAF else lab for lab in full.labels],
                              range(-9, 10))
        monkeypatch.setattr(fam, "full_tree", lambda _: broken)
        with pytest.raises(FamilyMismatch):
            fam.instance(asg)
