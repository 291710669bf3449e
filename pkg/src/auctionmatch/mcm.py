"""Auction engine for approximate maximum-cardinality matching.

Every bidder values every neighboring item at 1. Prices live on the grid of
multiples of eps = 1/k and are stored as integer counts of that unit, so all
comparisons are exact. Each round, every unmatched bidder demands its
cheapest neighbors priced below 1, one maximal matching over those demands
is committed (evicting previous owners), and winning items get eps added to
their price. The best assignment over all rounds is returned; with
eps = 1/(n_l + 1) the result is exactly optimal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InvariantViolation
from .graph import BipartiteInstance, Epsilon
from .kernels import KernelMatching, Subgraph, greedy_maximal, randomized_proposal_mm
from .results import BlackboardTrace, MatchingResult, RunTrace

__all__ = ["McmState", "demand_set_mcm", "run_mcm", "mcm_round_budget"]


def mcm_round_budget(eps: Epsilon) -> int:
    """ceil(2 / eps**2), which is exactly 2 * k * k for eps = 1/k."""
    return 2 * eps.k * eps.k


@dataclass
class McmState:
    """Mutable auction state. Prices are integers in [0, k] counting units
    of 1/k; assignment maps bidders to items and owner is its inverse."""

    inst: BipartiteInstance
    k: int
    prices: list[int]
    assignment: list[int | None]
    owner: list[int | None]
    adj: list[list[int]]
    round_no: int = 0


def _new_state(inst: BipartiteInstance, eps: Epsilon) -> McmState:
    return McmState(
        inst=inst,
        k=eps.k,
        prices=[0] * inst.n_r,
        assignment=[None] * inst.n_l,
        owner=[None] * inst.n_r,
        adj=[[j for j, _ in nbrs] for nbrs in inst.bidder_adjacency()],
    )


def demand_set_mcm(state: McmState, bidder: int) -> list[int]:
    """Cheapest neighbors with price below 1, ascending by item id."""
    best: int | None = None
    items: list[int] = []
    for j in state.adj[bidder]:
        p = state.prices[j]
        if p >= state.k:
            continue
        if best is None or p < best:
            best = p
            items = [j]
        elif p == best:
            items.append(j)
    items.sort()
    return items


def _audit_round(state: McmState) -> None:
    k = state.k
    for j, p in enumerate(state.prices):
        if p < 0 or p > k:
            raise InvariantViolation("price-range", f"item {j} price {p}/{k} outside [0, 1]")
        if p > 0 and state.owner[j] is None:
            raise InvariantViolation("positive-price-implies-matched",
                                     f"item {j} priced {p}/{k} but unmatched")
    # Sum of matched utilities is |M| - sum of prices (exact, in 1/k units).
    matched = [i for i, a in enumerate(state.assignment) if a is not None]
    util_sum = sum(k - state.prices[state.assignment[i]] for i in matched)
    if util_sum > len(matched) * k - sum(state.prices):
        raise InvariantViolation("utility-sum",
                                 "sum of utilities exceeds |M| - sum of prices")
    # eps-happiness: matched bidders, and unmatched ones whose demand set is
    # empty, satisfy u_i >= 1 - p_j - eps for every neighbor j.
    for i in range(state.inst.n_l):
        a = state.assignment[i]
        if a is not None:
            u = k - state.prices[a]
        elif not demand_set_mcm(state, i):
            u = 0
        else:
            continue
        for j in state.adj[i]:
            if u < k - state.prices[j] - 1:
                raise InvariantViolation(
                    "eps-happiness",
                    f"bidder {i} has utility {u}/{k} but item {j} offers "
                    f"{k - state.prices[j]}/{k} - eps")


def run_mcm(inst: BipartiteInstance, eps: Epsilon, kernel: str = "det",
            seed: int = 0, audit: bool = False) -> tuple[MatchingResult, RunTrace]:
    """Run the cardinality auction for up to ceil(2/eps^2) rounds.

    kernel 'det' uses the deterministic greedy (bidders ascending, demanded
    items ascending by id; demand sets share one price so id order is price
    order), 'rand' the seeded randomized proposal kernel, which also fills
    in a blackboard communication trace. A round with no reassignment ends
    the run early; the nominal budget is still reported in the trace.
    """
    if kernel not in ("det", "rand"):
        raise ValueError(f"unknown kernel {kernel!r} for the cardinality engine")
    state = _new_state(inst, eps)
    budget = mcm_round_budget(eps)
    rng = random.Random(seed)

    best_pairs: tuple[tuple[int, int], ...] = ()
    best_size = 0
    best_round = 0
    executed = 0
    proposal_rounds = 0
    proposals = 0
    announcements = 0

    for round_no in range(1, budget + 1):
        bidders = [i for i in range(inst.n_l)
                   if state.assignment[i] is None and state.adj[i]]
        if not bidders:
            break
        executed = round_no
        state.round_no = round_no
        sub = Subgraph(bidders=[], candidates={})
        for i in bidders:
            demand = demand_set_mcm(state, i)
            if demand:
                sub.bidders.append(i)
                sub.candidates[i] = demand
        if kernel == "rand":
            got: KernelMatching = randomized_proposal_mm(sub, rng)
            proposal_rounds += got.proposal_rounds
            proposals += got.proposals
        else:
            got = greedy_maximal(sub)
        for i, j in got.pairs:
            prev = state.owner[j]
            if prev is not None:
                state.assignment[prev] = None
            state.owner[j] = i
            state.assignment[i] = j
            state.prices[j] += 1
        announcements += len(got.pairs)
        if audit:
            _audit_round(state)
        size = sum(1 for a in state.assignment if a is not None)
        if size > best_size:
            best_size = size
            best_round = round_no
            best_pairs = tuple(sorted(
                (i, a) for i, a in enumerate(state.assignment) if a is not None))
        if not got.pairs:
            break

    edge_set = {(i, j) for i, j, _ in inst.edges}
    valid = (all(p in edge_set for p in best_pairs)
             and len({i for i, _ in best_pairs}) == len(best_pairs)
             and len({j for _, j in best_pairs}) == len(best_pairs))
    result = MatchingResult(pairs=best_pairs, value=best_size,
                            round_captured=best_round, valid=valid)
    blackboard = None
    if kernel == "rand":
        blackboard = BlackboardTrace(
            proposal_rounds=proposal_rounds,
            coordination_rounds=2 * executed,
            proposals=proposals,
            price_announcements=announcements,
            proposal_bits_each=(inst.n_r - 1).bit_length(),
            price_bits_each=(eps.k - 1).bit_length(),
        )
    trace = RunTrace(rounds_executed=executed, round_budget=budget,
                     blackboard=blackboard)
    return result, trace
