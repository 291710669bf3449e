"""Capacitated cardinality auction engine."""

import pytest

from auctionmatch.errors import InvariantViolation
from auctionmatch.graph import BipartiteInstance, Epsilon, generate_random
from auctionmatch.mcbm import (
    McbmState,
    expand_copies,
    find_demand_set,
    mcbm_round_budget,
    run_mcbm,
)
from auctionmatch.mcm import run_mcm
from auctionmatch.oracles import exact_mcbm


def test_copy_expansion_counts():
    inst = BipartiteInstance.build(
        2, 2, [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)],
        b_l=[2, 1], b_r=[1, 2])
    cg = expand_copies(inst)
    assert cg.n_bidder_copies == 3
    assert cg.n_item_copies == 3
    assert cg.copy_edge_count() == 9
    assert list(cg.bidder_copies(0)) == [0, 1]
    assert list(cg.bidder_copies(1)) == [2]
    assert list(cg.item_copies(1)) == [1, 2]
    assert cg.bidder_orig == (0, 0, 1)
    assert cg.item_orig == (0, 1, 1)


def test_copy_edge_count_products():
    one = BipartiteInstance.build(1, 2, [(0, 0, 1)], b_l=[2], b_r=[1, 1])
    assert expand_copies(one).copy_edge_count() == 2
    big = BipartiteInstance.build(
        2, 3, [(0, 0, 1)], b_l=[3, 1], b_r=[2, 1, 1])
    assert expand_copies(big).copy_edge_count() == 6


def _probe_state(k=4):
    # one bidder with two copies; items 0 and 1 with two copies each
    inst = BipartiteInstance.build(
        2, 2, [(0, 0, 1), (0, 1, 1)], b_l=[2, 1], b_r=[2, 2])
    state = McbmState(cg=expand_copies(inst), k=k)
    return state


def test_demand_set_takes_global_cheapest_copies():
    state = _probe_state()
    state.prices = [1, 2, 0, 3]
    assert find_demand_set(state, 0) == [2]
    state.prices = [1, 1, 1, 4]
    assert find_demand_set(state, 0) == [0, 1, 2]


def test_demand_set_skips_held_originals():
    state = _probe_state()
    state.prices = [1, 2, 0, 3]
    state.held.add((0, 1))
    assert find_demand_set(state, 0) == [0]


def test_demand_set_respects_cutoff():
    state = _probe_state()
    state.prices = [1, 2, 0, 3]
    state.cutoffs[0] = 2
    # item 0 min price 1 and item 1 min price 0 both sit below the cutoff
    assert find_demand_set(state, 0) == []
    state.cutoffs[0] = 1
    assert find_demand_set(state, 0) == [0]


def test_demand_set_ignores_full_price_copies():
    state = _probe_state(k=2)
    state.prices = [2, 2, 2, 2]
    assert find_demand_set(state, 0) == []


def test_bidder_capacity_two_items():
    inst = BipartiteInstance.build(
        1, 2, [(0, 0, 1), (0, 1, 1)], b_l=[2], b_r=[1, 1])
    res, tr = run_mcbm(inst, Epsilon(2))
    assert res.cardinality == 2
    assert res.pairs == ((0, 0), (0, 1))
    assert res.bidder_usage == (2,)
    assert res.valid
    assert tr.round_budget == mcbm_round_budget(Epsilon(2)) == 8


def test_single_edge_used_once_despite_capacity():
    inst = BipartiteInstance.build(
        2, 2, [(0, 0, 1)], b_l=[2, 1], b_r=[2, 1])
    res, _ = run_mcbm(inst, Epsilon(2))
    assert res.cardinality == 1
    assert res.pairs == ((0, 0),)


def test_rejects_unknown_kernel():
    inst = BipartiteInstance.build(1, 1, [(0, 0, 1)])
    with pytest.raises(ValueError):
        run_mcbm(inst, Epsilon(2), kernel="rand")


@pytest.mark.parametrize("kernel", ["det", "stream"])
@pytest.mark.parametrize("seed", range(6))
def test_approximation_bound(kernel, seed):
    inst = generate_random(
        8, 8, 0.4, b_l_range=(1, 3), b_r_range=(1, 3), seed=seed)
    opt = exact_mcbm(inst).value
    for k in (4, 8):
        res, tr = run_mcbm(inst, Epsilon(k), kernel=kernel)
        assert res.valid
        assert k * res.cardinality >= (k - 2) * opt
        assert tr.rounds_executed <= tr.round_budget == 2 * k * k


@pytest.mark.parametrize("seed", range(6))
def test_unit_capacities_match_plain_engine_value(seed):
    inst = generate_random(9, 9, 0.35, seed=seed)
    cap_res, _ = run_mcbm(inst, Epsilon(4))
    plain_res, _ = run_mcm(inst, Epsilon(4))
    assert cap_res.cardinality == plain_res.value


def test_structural_audit_properties_hold():
    # structural checks never fire; only the happiness assertion can
    structural = {
        "price-monotonicity", "cutoff-monotonicity",
        "assignment-owner-mismatch", "one-item-match", "held-set-drift",
        "copy-price-spread", "price-range",
        "positive-price-implies-matched",
    }
    hits = []
    for seed in range(8):
        inst = generate_random(
            6, 6, 0.5, b_l_range=(1, 3), b_r_range=(1, 3), seed=seed)
        try:
            run_mcbm(inst, Epsilon(4), audit=True)
        except InvariantViolation as exc:
            hits.append(exc.prop)
    assert all(p not in structural for p in hits)


def test_happiness_audit_reports_reopened_pair():
    # A sibling eviction can re-open an original at a price below what a
    # matched copy paid while the pair was blocked; the audit reports it.
    inst = generate_random(
        8, 8, 0.5, b_l_range=(1, 4), b_r_range=(1, 4), seed=7)
    with pytest.raises(InvariantViolation) as info:
        run_mcbm(inst, Epsilon(4), audit=True)
    assert info.value.prop == "copy-happiness"
