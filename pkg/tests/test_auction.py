import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sfpa.auction import (CapExceeded, PriorityRule, RandomizedRule,
                          allocate, optimal_allocations, optimal_welfare,
                          optimal_welfare_dp, outcome, rule_from_json)
from sfpa.valuations import (AdditiveValuation, AndValuation, OrValuation,
                             SingleMindedValuation, TableValuation)


def test_allocate_strict_max():
    alloc = allocate([[1.0], [2.0]])
    assert alloc.winners == (1,)


def test_allocate_tie_priority():
    favor_second = PriorityRule(((1, 0),))
    assert allocate([[1.0], [1.0]], favor_second).winners == (1,)
    assert allocate([[1.0], [1.0]]).winners == (0,)


def test_allocate_randomized_mixture():
    rule = RandomizedRule(((0.5, PriorityRule(((0, 1),))),
                           (0.5, PriorityRule(((1, 0),)))))
    branches = allocate([[1.0], [1.0]], rule)
    assert len(branches) == 2
    assert {b.winners for _, b in branches} == {(0,), (1,)}
    assert all(p == 0.5 for p, _ in branches)


def test_outcome_single_item_overbid_by_cent():
    vals = [AdditiveValuation((1.0,)), AdditiveValuation((2.0,))]
    o = outcome(vals, [[1.0], [1.01]])
    assert o.utilities == (0.0, pytest.approx(0.99))
    assert o.welfare == 2.0
    assert o.revenue == pytest.approx(1.01)


def test_outcome_all_zero_bids_to_priority_winner():
    vals = [AndValuation(2, 1.0), OrValuation(2, 0.5)]
    o = outcome(vals, [[0.0, 0.0], [0.0, 0.0]])
    assert o.allocation.winners == (0, 0)
    assert o.utilities == (1.0, 0.0)
    assert o.revenue == 0.0


def test_outcome_andor_hand_simulated():
    # OR outbids on item 0 only; AND keeps item 1 and eats its losing cost.
    vals = [AndValuation(2, 1.0), OrValuation(2, 0.7)]
    o = outcome(vals, [[0.2, 0.2], [0.3, 0.0]])
    assert o.allocation.winners == (1, 0)
    assert o.utilities[0] == pytest.approx(-0.2)
    assert o.utilities[1] == pytest.approx(0.7 - 0.3)
    assert o.welfare == pytest.approx(0.7)


def test_outcome_randomized_expectation():
    vals = [AdditiveValuation((1.0,)), AdditiveValuation((2.0,))]
    rule = RandomizedRule(((0.25, PriorityRule(((0, 1),))),
                           (0.75, PriorityRule(((1, 0),)))))
    o = outcome(vals, [[1.0], [1.0]], rule)
    assert o.allocation is None
    assert len(o.branches) == 2
    assert o.welfare == pytest.approx(0.25 * 1.0 + 0.75 * 2.0)
    assert o.utilities[1] == pytest.approx(0.75 * 1.0)
    assert sum(p for p, _ in o.branches) == 1.0


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2 ** 31 - 1))
@settings(max_examples=40, deadline=None)
def test_outcome_invariants(n, m, seed):
    rng = np.random.default_rng(seed)
    vals = [AdditiveValuation(tuple(rng.uniform(0, 2, m))) for _ in range(n)]
    bids = rng.uniform(0, 2, (n, m))
    o = outcome(vals, bids)
    # every item assigned exactly once; revenue + utilities == welfare
    bundles = o.allocation.bundles(n)
    union = 0
    for b in bundles:
        assert union & b == 0
        union |= b
    assert union == (1 << m) - 1
    assert o.revenue + sum(o.utilities) == pytest.approx(o.welfare, abs=1e-9)
    opt, _ = optimal_welfare(vals)
    assert o.welfare <= opt + 1e-9


def test_optimal_welfare_examples():
    v = 1 / np.sqrt(2)
    opt, alloc = optimal_welfare([AndValuation(2, 1.0), OrValuation(2, float(v))])
    assert opt == 1.0 and alloc.winners == (0, 0)
    tri = [SingleMindedValuation(3, b, 1.0) for b in (0b011, 0b110, 0b101)]
    opt_tri, _ = optimal_welfare(tri)
    assert opt_tri == 1.0
    assert optimal_welfare_dp(tri) == 1.0


def test_optimal_welfare_grid_game():
    side = 2
    m = side * side
    bundles = [0b0011, 0b1100, 0b0101, 0b1010]
    vals = [SingleMindedValuation(m, b, float(side)) for b in bundles]
    opt, alloc = optimal_welfare(vals)
    assert opt == 4.0
    assert optimal_welfare_dp(vals) == 4.0


@given(st.integers(2, 3), st.integers(1, 3), st.integers(0, 2 ** 31 - 1))
@settings(max_examples=30, deadline=None)
def test_optimal_welfare_matches_dp(n, m, seed):
    rng = np.random.default_rng(seed)
    vals = []
    for _ in range(n):
        raw = rng.uniform(0, 1, 1 << m)
        table = np.zeros(1 << m)
        for s in range(1, 1 << m):
            table[s] = max(raw[s], max(table[s & ~(1 << j)]
                                       for j in range(m) if s >> j & 1))
        vals.append(TableValuation(m, tuple(table)))
    enum, _ = optimal_welfare(vals)
    assert enum == pytest.approx(optimal_welfare_dp(vals), abs=1e-9)


def test_optimal_welfare_lexicographic_tie():
    vals = [AdditiveValuation((1.0,)), AdditiveValuation((1.0,))]
    _, alloc = optimal_welfare(vals)
    assert alloc.winners == (0,)  # tie broken toward the lex-first assignment


def test_optimal_allocations_lists_all():
    vals = [AdditiveValuation((1.0,)), AdditiveValuation((1.0,))]
    best, allocs = optimal_allocations(vals)
    assert best == 1.0 and len(allocs) == 2


def test_cap_enforced():
    vals = [AdditiveValuation(tuple([1.0] * 10))] * 6
    with pytest.raises(CapExceeded):
        optimal_welfare(vals, cap=1000)


def test_outcome_json_with_branch_detail():
    vals = [AdditiveValuation((1.0,)), AdditiveValuation((2.0,))]
    rule = RandomizedRule(((0.5, PriorityRule(((0, 1),))),
                           (0.5, PriorityRule(((1, 0),)))))
    doc = outcome(vals, [[1.0], [1.0]], rule).to_json(2)
    assert doc["welfare"] == pytest.approx(1.5)
    assert len(doc["branches"]) == 2
    assert doc["branches"][0]["outcome"]["allocation"] == [[0], []]
    det = outcome(vals, [[1.0], [1.5]]).to_json(2)
    assert det["allocation"] == [[], [0]]
    assert "branches" not in det


def test_rule_json_roundtrip():
    rules = [PriorityRule(), PriorityRule(((1, 0), (0, 1))),
             RandomizedRule(((0.5, PriorityRule()), (0.5, PriorityRule(((1, 0),)))))]
    for r in rules:
        assert rule_from_json(r.to_json()) == r


def test_bid_validation():
    with pytest.raises(ValueError):
        allocate([[1.0], [-0.5]])
    with pytest.raises(ValueError):
        allocate([[np.inf], [0.0]])
    with pytest.raises(ValueError):
        RandomizedRule(((0.6, PriorityRule()),))
