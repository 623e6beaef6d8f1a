import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crq.core import (
    CrqTree,
    FormatError,
    GcrqEvalError,
    GenerationError,
    OrderingError,
    TreeError,
    clog2,
    deserialize,
    evaluate,
    evaluate_gcrq,
    expression_tree,
    gen_random,
    is_tie_free,
    memory_rank,
    memory_rank_sort,
    reverse_bfs_order,
    serialize,
    to_binary,
)
from crq.core.gcrq import dumps_gcrq, gcrq_from_dict
from crq.core.generate import balanced_shape
from crq.core.orderings import custom_order
from crq.core.serialize import to_dict

from conftest import RANKED_POSITIONS, RANKED_RANKS

seeds = st.integers(0, 2**31 - 1)


def two_leaves(root, a, b):
    return CrqTree.from_nested((root, [a, b]))


class TestTree:
    def test_from_nested_preorder_ids(self, worked):
        assert worked.n == 8
        assert worked.children[0] == (1, 5)
        assert worked.children[1] == (2, 3, 4)
        assert worked.height == 2
        assert worked.depth[7] == 2

    def test_rejects_unary_node(self):
        with pytest.raises(TreeError) as err:
            CrqTree(1, [0, 1], 0, [[1], []], [(1,), (0,)])
        assert err.value.node == 0

    def test_rejects_label_outside_gamma(self):
        with pytest.raises(TreeError) as err:
            CrqTree(1, [0, 1], 0, [[1, 2], [], []], [(1,), (0,), (5,)])
        assert err.value.node == 2

    def test_rejects_wrong_dimension(self):
        with pytest.raises(TreeError):
            CrqTree(2, [0, 1], 0, [[]], [(1,)])

    def test_rejects_cycle_and_orphans(self):
        with pytest.raises(TreeError):
            CrqTree(1, [0], 0, [[1, 2], [0, 2], []], [(0,)] * 3)
        with pytest.raises(TreeError):
            CrqTree(1, [0], 0, [[], []], [(0,)] * 2)

    def test_clog2(self):
        assert [clog2(x) for x in (1, 2, 3, 4, 5, 8, 9)] == [1, 1, 2, 2, 3, 3, 4]

    def test_renumber_keeps_semantics(self, worked):
        perm = list(range(worked.n))
        random.Random(3).shuffle(perm)
        other = worked.renumber(perm)
        assert evaluate(other).value == evaluate(worked).value


class TestEvaluate:
    def test_worked_example(self, worked):
        ans = evaluate(worked)
        assert ans.value == (7, 6)
        assert ans.winners() == {1: 2, 5: 7, 0: 1}
        assert ans.chain(0) == [0, 1, 2]

    def test_single_leaf(self):
        t = CrqTree.from_nested((3, -4))
        assert evaluate(t).value == (3, -4)
        assert evaluate(t).witness == ()

    def test_depth_one(self):
        assert evaluate(two_leaves((1, 0), (3, 5), (2, 9))).value == (3, 5)

    def test_tie_goes_to_first_child(self):
        t = two_leaves((0, 1), (5, 2), (-3, 2))
        assert evaluate(t).value == (5, 2)
        assert not is_tie_free(t)

    @settings(max_examples=50, deadline=None)
    @given(seeds, st.integers(1, 4))
    def test_answer_is_a_leaf_and_chain_is_a_path(self, seed, d):
        t = gen_random(31, d=d, seed=seed)
        ans = evaluate(t)
        chain = ans.chain(t.root)
        assert not t.children[chain[-1]]
        assert ans.value == t.labels[chain[-1]]
        for p, c in zip(chain, chain[1:]):
            assert t.parent[c] == p

    @settings(max_examples=50, deadline=None)
    @given(seeds, st.integers(2, 5))
    def test_scaling_labels_keeps_chain(self, seed, k):
        t = gen_random(31, d=2, seed=seed)
        scaled = t.relabel([tuple(k * x for x in lab) for lab in t.labels],
                           range(-9 * k, 9 * k + 1))
        assert evaluate(scaled).chain(0) == evaluate(t).chain(0)

    @settings(max_examples=50, deadline=None)
    @given(seeds)
    def test_storage_order_invariance(self, seed):
        t = gen_random(25, d=2, seed=seed, max_degree=3)
        perm = list(range(t.n))
        random.Random(seed).shuffle(perm)
        assert evaluate(t.renumber(perm)).value == evaluate(t).value


class TestGcrq:
    def test_arithmetic(self):
        g = expression_tree(("mul", ("add", 2, 3), 6))
        assert evaluate_gcrq(g) == (30,)

    def test_add_zeros_and_sub(self):
        assert evaluate_gcrq(expression_tree(("add", 0, 0))) == (0,)
        assert evaluate_gcrq(expression_tree(("sub", 5, 7))) == (-2,)

    def test_division_is_exact(self):
        assert evaluate_gcrq(expression_tree(("div", 1, 3))) == (Fraction(1, 3),)

    def test_division_by_zero_names_node(self):
        g = expression_tree(("add", 1, ("div", 4, ("sub", 2, 2))))
        with pytest.raises(GcrqEvalError) as err:
            evaluate_gcrq(g)
        assert err.value.node == 2

    def test_select_ties_to_first_child(self):
        # operator nodes carry the zero label, so every child scores 0
        g = expression_tree(("select", 4, 7), operators=("select",))
        assert evaluate_gcrq(g) == (4,)

    def test_round_trip(self):
        g = expression_tree(("mul", ("add", 2, 3), 6))
        again = gcrq_from_dict(json.loads(dumps_gcrq(g)))
        assert evaluate_gcrq(again) == (30,)


class TestMemoryRank:
    def test_ranked_shape(self, ranked):
        assert memory_rank(ranked) == RANKED_RANKS
        pos = memory_rank_sort(ranked).position()
        assert [pos[v] for v in range(15)] == RANKED_POSITIONS

    def test_small_cases(self):
        leaf = CrqTree.from_nested((1,))
        assert memory_rank(leaf) == [0]
        assert memory_rank_sort(leaf).perm == (0,)
        t = two_leaves((1,), (2,), (3,))
        assert memory_rank_sort(t).perm == (1, 2, 0)
        assert memory_rank(gen_random(height=2))[0] == 2

    def test_general_degree(self):
        # three leaves under one node: 0, 0 + 1, 0 + 2
        t = CrqTree.from_nested(((1,), [(1,), (2,), (3,)]))
        assert memory_rank(t)[0] == 2

    @settings(max_examples=80, deadline=None)
    @given(seeds, st.integers(0, 100))
    def test_bounds_and_postorder(self, seed, half):
        t = gen_random(2 * half + 1, d=1, seed=seed)
        order = memory_rank_sort(t)
        assert memory_rank(t)[t.root] <= clog2(t.n)
        assert order.iterations <= 3 * t.n
        assert order.is_postorder(t)


class TestReverseBfs:
    def test_root_is_last(self, worked):
        assert reverse_bfs_order(worked).position()[0] == 8

    def test_depth_one(self):
        t = two_leaves((1,), (2,), (3,))
        assert reverse_bfs_order(t).position() == {2: 1, 1: 2, 0: 3}

    def test_deepest_first(self, ranked):
        order = reverse_bfs_order(ranked).perm
        depths = [ranked.depth[v] for v in order]
        assert depths == sorted(depths, reverse=True)

    def test_bad_ordering(self, worked):
        with pytest.raises(OrderingError):
            custom_order([0, 1, 2]).check(worked)


class TestBinary:
    def test_worked_example(self, worked):
        b = to_binary(worked)
        assert b.is_binary() and b.n == 9
        assert evaluate(b).value == (7, 6)
        dup = to_binary(worked, duplicate_last=True)
        assert dup.n == 11 and evaluate(dup).value == (7, 6)

    def test_binary_unchanged(self, ranked):
        assert to_binary(ranked) == ranked

    @settings(max_examples=80, deadline=None)
    @given(seeds, st.integers(1, 60), st.integers(2, 5))
    def test_equivalent_and_small(self, seed, n, deg):
        if n == 2:
            n = 3
        t = gen_random(n if deg > 2 else n | 1, d=2, seed=seed, max_degree=deg)
        b = to_binary(t)
        assert b.is_binary()
        assert b.n <= 2 * t.n
        assert evaluate(b).value == evaluate(t).value


class TestGenerate:
    def test_deterministic(self):
        a = gen_random(31, d=3, seed=7, tie_free=True)
        assert serialize(a) == serialize(gen_random(31, d=3, seed=7, tie_free=True))

    def test_single_leaf(self):
        t = gen_random(1, d=2, gamma=[0, 1], seed=5)
        assert t.n == 1 and set(t.labels[0]) <= {0, 1}

    def test_tie_free(self):
        for s in range(30):
            assert is_tie_free(gen_random(63, d=1, seed=s, tie_free=True))

    def test_rejects_bad_requests(self):
        with pytest.raises(GenerationError):
            gen_random(5, gamma=[])
        with pytest.raises(GenerationError):
            gen_random(5, d=0)
        with pytest.raises(GenerationError):
            gen_random(4)
        with pytest.raises(GenerationError):
            gen_random(63, d=1, gamma=[0, 1], tie_free=True, budget=1)

    def test_balanced_shape(self):
        assert len(balanced_shape(3)) == 15
        assert gen_random(height=3).height == 3


class TestSerialize:
    def test_round_trip(self, worked):
        order = memory_rank_sort(worked)
        tree, again = deserialize(serialize(worked, order))
        assert tree == worked and again == order

    def test_missing_root(self, worked):
        body = to_dict(worked)
        del body["root"]
        with pytest.raises(FormatError) as err:
            deserialize(json.dumps(body))
        assert err.value.field == "root"

    def test_label_outside_gamma(self, worked):
        body = to_dict(worked)
        body["nodes"][3]["label"] = [20, 0]
        with pytest.raises(TreeError) as err:
            deserialize(json.dumps(body))
        assert err.value.node == 3

    def test_parent_mismatch(self, worked):
        body = to_dict(worked)
        body["nodes"][2]["parent"] = 5
        with pytest.raises(TreeError):
            deserialize(json.dumps(body))

    def test_not_json(self):
        with pytest.raises(FormatError):
            deserialize("{nope")
