from fractions import Fraction

import pytest

from ainf.fixtures import BETA_E, build_fixture
from ainf.hpl import retraction_for, transfer
from ainf.novikov import ZERO, GappedMonoid, MonoidElement
from ainf.trees import LEAF, RibbonTree, count_trees, enumerate_trees, evaluate_tree, tree_transfer


def test_tree_counts():
    G = GappedMonoid()
    assert count_trees(2, ZERO, G) == 1
    assert count_trees(3, ZERO, G) == 3
    assert [count_trees(k, ZERO, G) for k in (4, 5)] == [11, 45]
    assert count_trees(1, ZERO, G) == 0
    G1 = GappedMonoid([BETA_E])
    assert [str(t) for t in enumerate_trees(0, BETA_E, G1)] == ["(0;1,2)"]


def test_three_leaf_shapes():
    shapes = {str(t) for t in enumerate_trees(3, ZERO, GappedMonoid())}
    assert shapes == {"(3;0,0 * * *)", "(2;0,0 (2;0,0 * *) *)", "(2;0,0 * (2;0,0 * *))"}


def test_corolla_is_projected_product():
    A = build_fixture("M6").structure
    r = retraction_for(A)
    corolla = RibbonTree(ZERO, (LEAF, LEAF))
    assert evaluate_tree(corolla, A, r, ("[1]", "[w]")) == {"[w]": 1}


def test_curved_vertex():
    A = build_fixture("DEF-E").structure
    r = retraction_for(A)
    (tree,) = enumerate_trees(0, BETA_E, A.monoid)
    assert evaluate_tree(tree, A, r, ()) == {"[1]": 1}


def test_massey_summands_add_up():
    A = build_fixture("N3").structure
    r = retraction_for(A)
    word = ("[x1]", "[x1]", "[x2]")
    trees = enumerate_trees(3, ZERO, A.monoid)
    parts = [evaluate_tree(t, A, r, word) for t in trees]
    total = {}
    for p in parts:
        for n, c in p.items():
            total[n] = total.get(n, 0) + c
    total = {n: c for n, c in total.items() if c}
    assert total == tree_transfer(A, r, 3, ZERO)[word]
    assert total == transfer(A, r).A_can.m(3, ZERO, word)
    assert sum(1 for p in parts if p) >= 1
