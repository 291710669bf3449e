"""Auction engine for approximate maximum-weight matching.

Runs on a ScaledGraph. Valuations v_i(j) = w_ij / w_max and prices are kept
as integer multiples of the base unit 1/(k * w_max): the valuation of an
edge of original weight w is k*w units and a price increment eps * v_i(j)
is exactly w units. Each phase, unmatched bidders demand the items whose
margin is within eps * v_i(j) of their best margin, one maximal matching
over the demands is committed bucket by bucket (heaviest first), winners'
prices rise by eps times the winning valuation, and the best phase-end
matching by weight is returned in original units.

The deterministic guarantee is (1 - 6*eps) of the optimum and the
randomized-kernel guarantee (1 - 7*eps); both are enforced by the test
suite against exact oracles rather than re-derived here.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvariantViolation
from .graph import Epsilon, ScaledGraph
from .kernels import Subgraph, bucket_ordered_maximal
from .results import BlackboardTrace, MatchingResult, RunTrace

__all__ = [
    "DemandSpec",
    "MwmState",
    "demand_set_mwm",
    "edge_bucket",
    "phase_budget",
    "run_mwm",
]


def edge_bucket(scaled_w: Fraction, eps: Epsilon) -> int:
    """The unique b >= 1 with eps**(b-1) <= scaled_w < eps**(b-2).

    scaled_w must lie in (0, 1]; bucket 1 holds the heaviest edges.
    """
    num, den = scaled_w.numerator, scaled_w.denominator
    if num <= 0 or num > den:
        raise ValueError(f"scaled weight {scaled_w} outside (0, 1]")
    k = eps.k
    b = 1
    power = 1  # k**(b-1)
    while num * power < den:
        power *= k
        b += 1
    return b


def phase_budget(bucket_count: int, eps: Epsilon) -> int:
    """ceil(2 * (ceil(log_{1/eps} W)^2 + 2) / eps^4), at least 1.

    bucket_count is ceil(log_{1/eps} W) over surviving weights; equal
    weights give 0 and therefore a budget of 4 / eps^4.
    """
    k = eps.k
    return max(1, 2 * (bucket_count * bucket_count + 2) * k ** 4)


@dataclass(frozen=True)
class DemandSpec:
    """One bidder's demand for a phase: the best achievable margin in base
    units (None when no item has positive margin) and the demanded items."""

    max_utility: int | None
    items: tuple[int, ...]


@dataclass
class MwmState:
    """Mutable engine state; all integers are in base units 1/(k * w_max)."""

    sg: ScaledGraph
    k: int
    prices: list[int]
    assignment: list[int | None]
    owner: list[int | None]
    adj: list[list[tuple[int, int]]]  # per bidder: (item, original weight)
    phase_no: int = 0

    def value_units(self, w: int) -> int:
        return self.k * w


def _new_state(sg: ScaledGraph, eps: Epsilon) -> MwmState:
    inst = sg.instance
    return MwmState(
        sg=sg,
        k=eps.k,
        prices=[0] * inst.n_r,
        assignment=[None] * inst.n_l,
        owner=[None] * inst.n_r,
        adj=sg.bidder_adjacency(),
    )


def demand_set_mwm(state: MwmState, bidder: int) -> DemandSpec:
    """Items with positive margin within eps * v_i(j) of the best margin.

    Exact in base units: v = k*w, the slack eps * v_i(j) is w, so item j
    qualifies when p_j < v and v - p_j >= U - w.
    """
    k = state.k
    best: int | None = None
    for j, w in state.adj[bidder]:
        margin = k * w - state.prices[j]
        if margin > 0 and (best is None or margin > best):
            best = margin
    if best is None:
        return DemandSpec(max_utility=None, items=())
    items = []
    for j, w in state.adj[bidder]:
        v = k * w
        if state.prices[j] < v and v - state.prices[j] >= best - w:
            items.append(j)
    # Scan priority: cheapest first, then item id.
    items.sort(key=lambda j: (state.prices[j], j))
    return DemandSpec(max_utility=best, items=tuple(items))


def _current_weight(state: MwmState, weights: dict[tuple[int, int], int]) -> int:
    return sum(weights[(i, a)] for i, a in enumerate(state.assignment) if a is not None)


def _audit_phase(state: MwmState, weights: dict[tuple[int, int], int],
                 prev_prices: list[int], optimum: int | None) -> None:
    k = state.k
    for j, p in enumerate(state.prices):
        if p < 0:
            raise InvariantViolation("price-range", f"item {j} price {p} negative")
        if p < prev_prices[j]:
            raise InvariantViolation("price-monotonicity",
                                     f"item {j} price fell {prev_prices[j]} -> {p}")
        if p > 0 and state.owner[j] is None:
            raise InvariantViolation("positive-price-implies-matched",
                                     f"item {j} priced {p} but unmatched")
    if optimum is not None and sum(state.prices) > k * optimum:
        raise InvariantViolation(
            "price-sum-bound",
            f"sum of prices {sum(state.prices)} exceeds optimum {k * optimum} (base units)")
    # An empty demand set must coincide with every neighbor being priced
    # at or above its valuation.
    for i in range(len(state.adj)):
        spec = demand_set_mwm(state, i)
        dominated = all(k * w <= state.prices[j] for j, w in state.adj[i])
        if (not spec.items) != dominated:
            raise InvariantViolation(
                "empty-demand-characterization",
                f"bidder {i}: demand empty={not spec.items} but dominated={dominated}")
    # Matched bidders are 2*eps*v_i(a_i)-happy against every item, where
    # non-neighbors count as valuation 0.
    neighbor_v: dict[tuple[int, int], int] = {}
    for i, nbrs in enumerate(state.adj):
        for j, w in nbrs:
            neighbor_v[(i, j)] = k * w
    for i, a in enumerate(state.assignment):
        if a is None:
            continue
        u = neighbor_v[(i, a)] - state.prices[a]
        slack = 2 * weights[(i, a)]
        for j in range(state.sg.instance.n_r):
            rhs = neighbor_v.get((i, j), 0) - state.prices[j] - slack
            if u < rhs:
                raise InvariantViolation(
                    "weighted-happiness",
                    f"bidder {i} utility {u} below margin {rhs} at item {j}")


def run_mwm(sg: ScaledGraph, eps: Epsilon, kernel: str = "det", seed: int = 0,
            audit: bool = False, optimum: int | None = None
            ) -> tuple[MatchingResult, RunTrace]:
    """Run the weighted auction over its phase budget.

    kernel 'det' sweeps weight buckets heaviest-first with a deterministic
    greedy, 'rand' replaces the per-bucket greedy with seeded proposal
    rounds and records a blackboard trace, 'stream' matches the first
    qualifying edge in stream order (the same maximal matching the
    streaming engine builds on the fly). Weight is reported in original
    units. ``optimum``, when given, additionally audits the price-sum bound.
    """
    if kernel not in ("det", "rand", "stream"):
        raise ValueError(f"unknown kernel {kernel!r} for the weighted engine")
    if not sg.edges:
        raise ValueError("scaled graph has no surviving edges")
    inst = sg.instance
    k = eps.k
    state = _new_state(sg, eps)
    budget = phase_budget(sg.bucket_count, eps)
    rng = random.Random(seed)

    weights = {(i, j): w for i, j, w in sg.edges}
    buckets = {(i, j): edge_bucket(Fraction(w, sg.w_max), eps) for i, j, w in sg.edges}

    best_pairs: tuple[tuple[int, int], ...] = ()
    best_weight = 0
    best_phase = 0
    executed = 0
    proposal_rounds = 0
    proposals = 0
    announcements = 0

    for phase_no in range(1, budget + 1):
        unmatched = [i for i in range(inst.n_l)
                     if state.assignment[i] is None and state.adj[i]]
        if not unmatched:
            break
        executed = phase_no
        state.phase_no = phase_no

        if kernel == "stream":
            pairs = _stream_order_matching(state, weights)
        else:
            sub = Subgraph(bidders=[], candidates={}, buckets={})
            for i in unmatched:
                spec = demand_set_mwm(state, i)
                if spec.items:
                    sub.bidders.append(i)
                    sub.candidates[i] = list(spec.items)
                    for j in spec.items:
                        sub.buckets[(i, j)] = buckets[(i, j)]
            got = bucket_ordered_maximal(sub, kernel=kernel, seed=rng)
            proposal_rounds += got.proposal_rounds
            proposals += got.proposals
            pairs = got.pairs

        prev_prices = list(state.prices) if audit else state.prices
        for i, j in pairs:
            prev = state.owner[j]
            if prev is not None:
                state.assignment[prev] = None
            state.owner[j] = i
            state.assignment[i] = j
            state.prices[j] += weights[(i, j)]
        announcements += len(pairs)

        if audit:
            _audit_phase(state, weights, prev_prices, optimum)
        current = _current_weight(state, weights)
        if current > best_weight:
            best_weight = current
            best_phase = phase_no
            best_pairs = tuple(sorted(
                (i, a) for i, a in enumerate(state.assignment) if a is not None))
        if not pairs:
            break

    valid = (all(p in weights for p in best_pairs)
             and len({i for i, _ in best_pairs}) == len(best_pairs)
             and len({j for _, j in best_pairs}) == len(best_pairs))
    result = MatchingResult(pairs=best_pairs, value=best_weight,
                            round_captured=best_phase, valid=valid)
    blackboard = None
    if kernel == "rand":
        blackboard = BlackboardTrace(
            proposal_rounds=proposal_rounds,
            coordination_rounds=2 * executed,
            proposals=proposals,
            price_announcements=announcements,
            proposal_bits_each=(inst.n_r - 1).bit_length(),
            price_bits_each=(k * sg.w_max - 1).bit_length(),
        )
    trace = RunTrace(rounds_executed=executed, round_budget=budget,
                     blackboard=blackboard)
    return result, trace


def _stream_order_matching(state: MwmState, weights: dict[tuple[int, int], int]
                           ) -> list[tuple[int, int]]:
    """Greedy maximal matching in stream (edge list) order.

    Matches an edge the moment it qualifies for the bidder's demand set,
    using phase-start prices throughout; mirrors the streaming engine's
    second pass exactly.
    """
    k = state.k
    margin_best: dict[int, int] = {}
    for i in range(state.sg.instance.n_l):
        if state.assignment[i] is not None:
            continue
        for j, w in state.adj[i]:
            margin = k * w - state.prices[j]
            if margin > 0 and margin > margin_best.get(i, 0):
                margin_best[i] = margin
    pairs: list[tuple[int, int]] = []
    newly_matched: set[int] = set()
    claimed: set[int] = set()
    for i, j, w in state.sg.edges:
        if state.assignment[i] is not None or i in newly_matched:
            continue
        if j in claimed or i not in margin_best:
            continue
        v = k * w
        if state.prices[j] < v and v - state.prices[j] >= margin_best[i] - w:
            newly_matched.add(i)
            claimed.add(j)
            pairs.append((i, j))
    return pairs
