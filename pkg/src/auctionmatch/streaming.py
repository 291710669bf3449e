"""Semi-streaming execution of the auction engines.

An EdgeStream replays an instance from a file or an in-memory object;
each full traversal counts as one pass.  The engines below keep only
per-vertex (or per-vertex-copy) state, metered in words by a
SpaceAccountant, and reproduce the in-memory engines' stream kernels
exactly: same matchings, with pass counts 1 + 2 * phases for the
weighted engine and 1 + 2 * rounds for the capacitated one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import InstanceFormatError, InvariantViolation
from .graph import BipartiteInstance, Epsilon, ceil_log
from .mwm import phase_budget
from .results import BMatchingResult, MatchingResult, RunTrace

# Measured ceiling for peak words over (sum of bidder capacities + n_r);
# the capacitated engine's state is a fixed number of arrays on those
# two scales, so the ratio stays flat as instances grow.  Worst observed
# ratio is 10.45 across the test shapes (n up to 2048, caps up to 4).
STREAM_MCBM_SPACE_FACTOR = 12


class EdgeStream:
    """Re-iterable edge source with pass counting.

    Built from a path or a parsed instance, never from a one-shot
    iterator: every traversal must see the same records in the same
    order.  Header fields (n_l, n_r, m, capacities) become available
    once the first traversal has run.
    """

    def __init__(self, *, path=None, instance: BipartiteInstance | None = None):
        if (path is None) == (instance is None):
            raise ValueError("exactly one of path or instance is required")
        self._path = Path(path) if path is not None else None
        self._instance = instance
        self.passes = 0
        if instance is not None:
            self.n_l: int | None = instance.n_l
            self.n_r: int | None = instance.n_r
            self.m: int | None = instance.m
            self.b_l: tuple[int, ...] | None = instance.b_l
            self.b_r: tuple[int, ...] | None = instance.b_r
        else:
            self.n_l = self.n_r = self.m = None
            self.b_l = self.b_r = None

    @classmethod
    def from_path(cls, path) -> "EdgeStream":
        return cls(path=path)

    @classmethod
    def from_instance(cls, inst: BipartiteInstance) -> "EdgeStream":
        if not isinstance(inst, BipartiteInstance):
            raise TypeError("from_instance requires a BipartiteInstance")
        return cls(instance=inst)

    def traverse(self):
        """Start one pass; yields (i, j, w) with 0-based endpoints."""
        self.passes += 1
        if self._instance is not None:
            return iter(self._instance.edges)
        return self._traverse_file()

    def _traverse_file(self):
        n_l = n_r = m_declared = None
        b_l: list[int] = []
        b_r: list[int] = []
        seen = 0
        with open(self._path, "r", encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                parts = raw.split()
                if not parts or parts[0] == "c":
                    continue
                tag = parts[0]
                if tag == "p":
                    if len(parts) != 5 or parts[1] != "bm":
                        raise InstanceFormatError("malformed problem line", line_no)
                    n_l, n_r, m_declared = (int(x) for x in parts[2:5])
                    b_l = [1] * n_l
                    b_r = [1] * n_r
                    self.n_l, self.n_r, self.m = n_l, n_r, m_declared
                elif tag == "b":
                    if n_l is None:
                        raise InstanceFormatError("capacity before problem line", line_no)
                    side, vid, cap = parts[1], int(parts[2]) - 1, int(parts[3])
                    (b_l if side == "l" else b_r)[vid] = cap
                elif tag == "e":
                    if n_l is None:
                        raise InstanceFormatError("edge before problem line", line_no)
                    if len(parts) != 4:
                        raise InstanceFormatError("malformed edge line", line_no)
                    i, j, w = int(parts[1]) - 1, int(parts[2]) - 1, int(parts[3])
                    seen += 1
                    yield i, j, w
                else:
                    raise InstanceFormatError(f"unknown record {tag!r}", line_no)
        if m_declared is not None and seen != m_declared:
            raise InstanceFormatError(
                f"header declares {m_declared} edges, stream has {seen}")
        self.b_l = tuple(b_l)
        self.b_r = tuple(b_r)


@dataclass
class SpaceAccountant:
    """Words of live engine state; one id, price, counter or flag each."""

    current: int = 0
    peak: int = 0
    tags: dict[str, int] = field(default_factory=dict)

    def alloc(self, words: int, tag: str = "misc") -> None:
        self.current += words
        self.tags[tag] = self.tags.get(tag, 0) + words
        if self.current > self.peak:
            self.peak = self.current

    def free(self, words: int, tag: str = "misc") -> None:
        self.current -= words
        self.tags[tag] = self.tags.get(tag, 0) - words


def stream_mwm(stream: EdgeStream, eps: Epsilon, audit: bool = False
               ) -> tuple[MatchingResult, RunTrace]:
    """Weighted auction over an edge stream.

    Pass 1 collects n, m and the weight extremes, fixing the prune
    threshold.  Each phase then spends one pass computing best margins
    for unmatched bidders (the first phase also learns the surviving
    weight range, hence the phase budget) and one pass matching edges
    greedily in stream order, exactly as the in-memory engine's stream
    kernel does.  Passes total 1 + 2 * phases.
    """
    k = eps.k
    acct = SpaceAccountant()

    m = 0
    w_max = 0
    w_min = None
    n_l = n_r = 0
    acct.alloc(8, "scalars")
    for i, j, w in stream.traverse():
        m += 1
        w_max = max(w_max, w)
        w_min = w if w_min is None else min(w_min, w)
    n_l, n_r = stream.n_l, stream.n_r
    if m == 0:
        raise ValueError("cannot scale an instance with no edges")
    if m * w_min <= w_max:
        t = ceil_log(k, m) + 1
    else:
        t = ceil_log(k, w_max, w_min) + 1
    power = k ** t

    prices = [0] * n_r
    owner: list[int | None] = [None] * n_r
    assignment: list[int | None] = [None] * n_l
    matched_w = [0] * n_l
    has_edge = [False] * n_l
    best_assign: list[int | None] = [None] * n_l
    acct.alloc(2 * n_r + 4 * n_l, "vertex-state")

    budget = None
    phases = 0
    current_weight = 0
    best_weight = 0
    best_phase = 0

    while True:
        if budget is not None and phases >= budget:
            break
        if budget is not None:
            live = any(assignment[i] is None and has_edge[i] for i in range(n_l))
            if not live:
                break
        phases += 1

        margin_best: dict[int, int] = {}
        w_min_surv = None
        for i, j, w in stream.traverse():
            if w * power < w_max:
                continue
            if phases == 1:
                has_edge[i] = True
                w_min_surv = w if w_min_surv is None else min(w_min_surv, w)
            if assignment[i] is not None:
                continue
            margin = k * w - prices[j]
            if margin > 0 and margin > margin_best.get(i, 0):
                if i not in margin_best:
                    acct.alloc(1, "margins")
                margin_best[i] = margin
        if phases == 1:
            budget = phase_budget(ceil_log(k, w_max, w_min_surv), eps)

        pairs: list[tuple[int, int, int]] = []
        newly_matched: set[int] = set()
        claimed: set[int] = set()
        for i, j, w in stream.traverse():
            if w * power < w_max:
                continue
            if assignment[i] is not None or i in newly_matched:
                continue
            if j in claimed or i not in margin_best:
                continue
            v = k * w
            if prices[j] < v and v - prices[j] >= margin_best[i] - w:
                newly_matched.add(i)
                claimed.add(j)
                pairs.append((i, j, w))
                acct.alloc(5, "phase-claims")

        for i, j, w in pairs:
            prev = owner[j]
            if prev is not None:
                assignment[prev] = None
                current_weight -= matched_w[prev]
            owner[j] = i
            assignment[i] = j
            matched_w[i] = w
            prices[j] += w
            current_weight += w

        if audit:
            _audit_mwm_stream(prices, owner, assignment, k, w_max)

        if current_weight > best_weight:
            best_weight = current_weight
            best_phase = phases
            best_assign = list(assignment)

        acct.free(len(margin_best), "margins")
        acct.free(5 * len(pairs), "phase-claims")
        if not pairs:
            break

    pairs_out = tuple(sorted(
        (i, a) for i, a in enumerate(best_assign) if a is not None))
    valid = (len({i for i, _ in pairs_out}) == len(pairs_out)
             and len({j for _, j in pairs_out}) == len(pairs_out))
    result = MatchingResult(pairs=pairs_out, value=best_weight,
                            round_captured=best_phase, valid=valid)
    trace = RunTrace(rounds_executed=phases, round_budget=budget or 0,
                     passes=stream.passes, peak_words=acct.peak)
    return result, trace


def _audit_mwm_stream(prices, owner, assignment, k, w_max) -> None:
    for j, p in enumerate(prices):
        if not 0 <= p <= k * w_max:
            raise InvariantViolation("price-range",
                                     f"item {j} price {p} outside [0, {k * w_max}]")
        if p > 0 and owner[j] is None:
            raise InvariantViolation("positive-price-implies-matched",
                                     f"item {j} priced {p} but unmatched")
        if owner[j] is not None and assignment[owner[j]] != j:
            raise InvariantViolation("assignment-owner-mismatch",
                                     f"item {j} owner disagrees")


def stream_mcbm(stream: EdgeStream, eps: Epsilon, audit: bool = False
                ) -> tuple[BMatchingResult, RunTrace]:
    """Capacitated cardinality auction over an edge stream.

    Pass 1 reads the header and capacities.  Each round then spends one
    pass accumulating the cheapest qualifying price per unmatched bidder
    copy while matching price-0 item copies to cutoff-0 bidder copies,
    and a second pass matching the remaining bidder copies at their
    accumulated price, evicting the lowest holder when no free copy is
    left.  Item copies are interchangeable, so each item is tracked as
    (minimum price, copies at it, copies one step above).  Passes total
    1 + 2 * rounds.
    """
    k = eps.k
    acct = SpaceAccountant()

    for _ in stream.traverse():
        pass
    n_l, n_r = stream.n_l, stream.n_r
    b_l, b_r = list(stream.b_l), list(stream.b_r)
    acct.alloc(n_l + n_r + 6, "capacities")

    start = [0] * (n_l + 1)
    for i in range(n_l):
        start[i + 1] = start[i] + b_l[i]
    n_copies = start[-1]
    acct.alloc(n_l + 1, "copy-layout")

    cutoff = [0] * n_copies
    assignment: list[int | None] = [None] * n_copies
    held_price = [0] * n_copies
    best_assign: list[int | None] = [None] * n_copies
    acct.alloc(4 * n_copies, "bidder-copy-state")

    pmin = [0] * n_r
    n_min = list(b_r)
    n_max = [0] * n_r
    acct.alloc(3 * n_r, "item-state")

    has_edge = [False] * n_l
    acct.alloc(n_l, "bidder-flags")

    budget = 2 * k * k
    rounds = 0
    best_card = 0
    best_round = 0

    def lowest_free_copy(i: int, price: int, delta, claimed_bidders) -> int | None:
        for bc in range(start[i], start[i + 1]):
            if (assignment[bc] is None and bc not in claimed_bidders
                    and cutoff[bc] <= price and delta.get(bc) == price):
                return bc
        return None

    while rounds < budget and stream.m > 0:
        if rounds > 0:
            live = any(
                has_edge[i] and any(
                    assignment[bc] is None for bc in range(start[i], start[i + 1]))
                for i in range(n_l))
            if not live:
                break
        rounds += 1

        delta: dict[int, int] = {}
        claims: list[tuple[int, int, int | None, int]] = []
        claimed_pairs: set[tuple[int, int]] = set()
        claimed_bidders: set[int] = set()
        claimed_at_pmin = [0] * n_r
        evicted: set[int] = set()
        acct.alloc(n_r, "round-claim-counts")

        for i, j, _ in stream.traverse():
            if rounds == 1:
                has_edge[i] = True
            held_ij = any(assignment[bc] == j for bc in range(start[i], start[i + 1]))
            if held_ij:
                continue
            p = pmin[j]
            if p < k:
                for bc in range(start[i], start[i + 1]):
                    if assignment[bc] is None and cutoff[bc] <= p:
                        if bc not in delta or p < delta[bc]:
                            if bc not in delta:
                                acct.alloc(1, "round-demands")
                            delta[bc] = p
            if p == 0 and (i, j) not in claimed_pairs:
                if n_min[j] - claimed_at_pmin[j] <= 0:
                    continue
                pick = None
                for bc in range(start[i], start[i + 1]):
                    if (assignment[bc] is None and bc not in claimed_bidders
                            and cutoff[bc] == 0):
                        pick = bc
                        break
                if pick is None:
                    continue
                claims.append((pick, j, None, 0))
                claimed_bidders.add(pick)
                claimed_pairs.add((i, j))
                claimed_at_pmin[j] += 1
                acct.alloc(7, "round-claims")

        for i, j, _ in stream.traverse():
            if (i, j) in claimed_pairs:
                continue
            if any(assignment[bc] == j for bc in range(start[i], start[i + 1])):
                continue
            p = pmin[j]
            if p >= k:
                continue
            bc = lowest_free_copy(i, p, delta, claimed_bidders)
            if bc is None:
                continue
            if p == 0 and n_min[j] - claimed_at_pmin[j] > 0:
                claims.append((bc, j, None, 0))
                claimed_at_pmin[j] += 1
            else:
                victim = None
                for other in range(n_copies):
                    if (assignment[other] == j and held_price[other] == p
                            and other not in evicted):
                        victim = other
                        break
                if victim is None:
                    continue
                evicted.add(victim)
                claims.append((bc, j, victim, p))
            claimed_bidders.add(bc)
            claimed_pairs.add((i, j))
            acct.alloc(7, "round-claims")

        for bc, j, victim, p_star in claims:
            if victim is not None:
                assignment[victim] = None
                held_price[victim] = 0
            assignment[bc] = j
            held_price[bc] = p_star + 1
            n_min[j] -= 1
            n_max[j] += 1
            if n_min[j] == 0:
                pmin[j] += 1
                n_min[j] = n_max[j]
                n_max[j] = 0

        for bc in delta:
            if assignment[bc] is None:
                cutoff[bc] += 1

        if audit:
            _audit_mcbm_stream(n_l, n_r, start, assignment, held_price,
                               pmin, n_min, n_max, b_r, k)

        card = sum(1 for a in assignment if a is not None)
        if card > best_card:
            best_card = card
            best_round = rounds
            best_assign = list(assignment)

        acct.free(len(delta), "round-demands")
        acct.free(7 * len(claims), "round-claims")
        acct.free(n_r, "round-claim-counts")
        if not claims and not delta:
            break

    pairs = tuple(sorted(
        (_orig_of(start, bc), j)
        for bc, j in enumerate(best_assign) if j is not None))
    bidder_usage = [0] * n_l
    item_usage = [0] * n_r
    for i, j in pairs:
        bidder_usage[i] += 1
        item_usage[j] += 1
    valid = (len(set(pairs)) == len(pairs)
             and all(bidder_usage[i] <= b_l[i] for i in range(n_l))
             and all(item_usage[j] <= b_r[j] for j in range(n_r)))
    result = BMatchingResult(
        pairs=pairs, cardinality=len(pairs), round_captured=best_round,
        bidder_usage=tuple(bidder_usage), item_usage=tuple(item_usage),
        valid=valid)
    trace = RunTrace(rounds_executed=rounds, round_budget=budget,
                     passes=stream.passes, peak_words=acct.peak)
    return result, trace


def _orig_of(start: list[int], bc: int) -> int:
    lo, hi = 0, len(start) - 1
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if start[mid] <= bc:
            lo = mid
        else:
            hi = mid
    return lo


def _audit_mcbm_stream(n_l, n_r, start, assignment, held_price,
                       pmin, n_min, n_max, b_r, k) -> None:
    for j in range(n_r):
        if n_min[j] <= 0 and b_r[j] > 0:
            raise InvariantViolation("item-state", f"item {j} has no copies at pmin")
        if n_min[j] + n_max[j] != b_r[j]:
            raise InvariantViolation("item-state", f"item {j} copy counts drift")
        top = pmin[j] + (1 if n_max[j] else 0)
        if top > k:
            raise InvariantViolation("price-range", f"item {j} price {top}/{k} above 1")
    matched = sum(1 for a in assignment if a is not None)
    priced = sum(b_r[j] - (n_min[j] if pmin[j] == 0 else 0) for j in range(n_r))
    if matched != priced:
        raise InvariantViolation(
            "positive-price-implies-matched",
            f"{matched} matched copies vs {priced} positively priced copies")
    per_pair: set[tuple[int, int]] = set()
    for bc, j in enumerate(assignment):
        if j is None:
            continue
        if held_price[bc] < 1:
            raise InvariantViolation("held-price", f"copy {bc} matched at price 0")
        pair = (_orig_of(start, bc), j)
        if pair in per_pair:
            raise InvariantViolation("one-item-match",
                                     f"pair {pair} matched twice")
        per_pair.add(pair)
