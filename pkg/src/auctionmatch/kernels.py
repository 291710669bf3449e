"""Maximal-matching kernels run on per-round demand subgraphs.

Every engine round boils down to one maximal matching on the bipartite
subgraph of unmatched bidders and their demanded items. The engines build a
Subgraph whose candidate lists are already in scan priority order (ascending
price, then id, unless noted) and the kernels never look at prices again.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

__all__ = [
    "Subgraph",
    "KernelMatching",
    "greedy_maximal",
    "bucket_ordered_maximal",
    "nondup_maximal",
    "randomized_proposal_mm",
]


@dataclass
class Subgraph:
    """Demand subgraph for one round.

    candidates[i] lists the items bidder i demands, in scan order. buckets,
    when present, maps (bidder, item) to a weight bucket index (1 is the
    heaviest bucket); bucket_ordered_maximal requires it.
    """

    bidders: list[int]
    candidates: dict[int, list[int]]
    buckets: dict[tuple[int, int], int] | None = None


@dataclass
class KernelMatching:
    """Pairs plus the communication stats randomized kernels accumulate."""

    pairs: list[tuple[int, int]] = field(default_factory=list)
    proposal_rounds: int = 0
    proposals: int = 0


def _as_rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def greedy_maximal(sub: Subgraph, rng: random.Random | None = None) -> KernelMatching:
    """One greedy pass; maximal because items never become free again.

    Deterministic order scans bidders ascending and candidates in list
    order. With ``rng`` both orders are shuffled instead.
    """
    bidders = sorted(sub.bidders)
    if rng is not None:
        rng.shuffle(bidders)
    taken: set[int] = set()
    out = KernelMatching()
    for i in bidders:
        cands = sub.candidates.get(i, [])
        if rng is not None:
            cands = list(cands)
            rng.shuffle(cands)
        for j in cands:
            if j not in taken:
                taken.add(j)
                out.pairs.append((i, j))
                break
    return out


def randomized_proposal_mm(sub: Subgraph, seed=0) -> KernelMatching:
    """Folklore proposal rounds: each unmatched bidder proposes to a uniform
    random still-unmatched candidate, each item accepts its lowest-id
    proposer; repeat until no proposals are possible. Counts rounds."""
    rng = _as_rng(seed)
    out = KernelMatching()
    matched_items: set[int] = set()
    active = sorted(i for i in sub.bidders if sub.candidates.get(i))
    while True:
        proposals: dict[int, int] = {}
        still_active = []
        for i in active:
            avail = [j for j in sub.candidates[i] if j not in matched_items]
            if not avail:
                continue
            still_active.append(i)
            j = avail[rng.randrange(len(avail))]
            out.proposals += 1
            if j not in proposals or i < proposals[j]:
                proposals[j] = i
        if not still_active:
            break
        out.proposal_rounds += 1
        for j, i in proposals.items():
            matched_items.add(j)
            out.pairs.append((i, j))
        accepted = {i for _, i in proposals.items()}
        active = [i for i in still_active if i not in accepted]
    out.pairs.sort()
    return out


def bucket_ordered_maximal(sub: Subgraph, kernel: str = "det", seed=0) -> KernelMatching:
    """Sweep weight buckets from heaviest (index 1) to lightest, keeping
    earlier matches; the union is maximal on the whole subgraph.

    kernel 'det' runs the deterministic greedy inside each bucket, 'rand'
    the randomized proposal kernel (proposal rounds accumulate across
    buckets).
    """
    if sub.buckets is None:
        raise ValueError("bucket_ordered_maximal needs bucket indices")
    rng = _as_rng(seed) if kernel == "rand" else None
    present = sorted({b for b in sub.buckets.values()})
    matched_bidders: set[int] = set()
    matched_items: set[int] = set()
    out = KernelMatching()
    for b in present:
        layer = Subgraph(bidders=[], candidates={})
        for i in sub.bidders:
            if i in matched_bidders:
                continue
            cands = [j for j in sub.candidates.get(i, [])
                     if j not in matched_items and sub.buckets.get((i, j)) == b]
            if cands:
                layer.bidders.append(i)
                layer.candidates[i] = cands
        if not layer.bidders:
            continue
        if kernel == "rand":
            got = randomized_proposal_mm(layer, rng)
            out.proposal_rounds += got.proposal_rounds
            out.proposals += got.proposals
        else:
            got = greedy_maximal(layer)
        for i, j in got.pairs:
            matched_bidders.add(i)
            matched_items.add(j)
            out.pairs.append((i, j))
    out.pairs.sort()
    return out


def nondup_maximal(sub: Subgraph, *, bidder_orig: dict[int, int],
                   item_orig: dict[int, int], item_matched: set[int],
                   held: set[tuple[int, int]]) -> KernelMatching:
    """Maximal matching on a copy graph that never pairs two copies of the
    same original (bidder, item) combination.

    Runs two sub-phases: first only currently unmatched item copies (no
    eviction needed), then everything left. ``held`` lists original pairs
    already matched in the engine state; together with the pairs formed here
    it blocks duplicates. Bidder copies scan ascending, candidates in list
    order.
    """
    out = KernelMatching()
    claimed_items: set[int] = set()
    matched_copies: set[int] = set()
    used_pairs: set[tuple[int, int]] = set(held)

    def sweep(allow_matched: bool) -> None:
        for ic in sorted(sub.bidders):
            if ic in matched_copies:
                continue
            oi = bidder_orig[ic]
            for jc in sub.candidates.get(ic, []):
                if jc in claimed_items:
                    continue
                if not allow_matched and jc in item_matched:
                    continue
                oj = item_orig[jc]
                if (oi, oj) in used_pairs:
                    continue
                claimed_items.add(jc)
                matched_copies.add(ic)
                used_pairs.add((oi, oj))
                out.pairs.append((ic, jc))
                break

    sweep(allow_matched=False)
    sweep(allow_matched=True)
    out.pairs.sort()
    return out
