"""Weight-range reduction for approximate maximum-weight matching.

Edge weights are grouped into geometric buckets relative to the minimum
weight.  The reduction builds C = k copies of the instance; copy r drops
every bucket congruent to r mod C, which splits the surviving buckets
into levels of C - 1 consecutive buckets each.  Each level has weight
spread below k^(C-1), so the core auction needs few phases on it.  The
per-level matchings of a copy are combined greedily from the heaviest
level down, and the best copy wins.  Every bucket is dropped in exactly
one copy, so the copies' removed weights partition the total weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import BipartiteInstance, Epsilon, scale_and_prune
from .mwm import run_mwm
from .results import MatchingResult, RunTrace

Edge = tuple[int, int, int]


def weight_bucket(w: int, w_min: int, k: int) -> int:
    """Index b >= 0 with k^b * w_min <= w < k^(b+1) * w_min."""
    if w < w_min:
        raise ValueError(f"weight {w} below minimum {w_min}")
    b = 0
    bound = k * w_min
    while w >= bound:
        bound *= k
        b += 1
    return b


@dataclass(frozen=True)
class LevelGraph:
    """Edges of one copy that fall into one level of buckets."""

    copy_index: int
    level: int
    edges: tuple[Edge, ...]

    @property
    def w_max(self) -> int:
        return max(w for _, _, w in self.edges)

    @property
    def w_min(self) -> int:
        return min(w for _, _, w in self.edges)


@dataclass(frozen=True)
class CopyPartition:
    """One copy of the instance: kept levels plus the dropped edges."""

    index: int
    levels: tuple[LevelGraph, ...]
    removed: tuple[Edge, ...]

    @property
    def removed_weight(self) -> int:
        return sum(w for _, _, w in self.removed)


@dataclass(frozen=True)
class WeightPartition:
    instance: BipartiteInstance
    eps: Epsilon
    copies: tuple[CopyPartition, ...]

    @property
    def n_copies(self) -> int:
        return len(self.copies)


def build_partition(inst: BipartiteInstance, eps: Epsilon) -> WeightPartition:
    """Split the instance into C = k copies of leveled subgraphs.

    In copy r an edge of bucket b survives iff b is not congruent to
    r mod C, landing on level (b - r - 1) // C.  Levels may be negative
    for buckets below the first dropped one; only their order matters.
    """
    c = eps.k
    w_min = inst.w_min
    buckets = [weight_bucket(w, w_min, c) for _, _, w in inst.edges]

    copies = []
    for r in range(c):
        level_edges: dict[int, list[Edge]] = {}
        removed: list[Edge] = []
        for edge, b in zip(inst.edges, buckets):
            if b % c == r:
                removed.append(edge)
            else:
                level_edges.setdefault((b - r - 1) // c, []).append(edge)
        levels = tuple(
            LevelGraph(copy_index=r, level=lv, edges=tuple(level_edges[lv]))
            for lv in sorted(level_edges)
        )
        copies.append(CopyPartition(index=r, levels=levels, removed=tuple(removed)))
    return WeightPartition(instance=inst, eps=eps, copies=tuple(copies))


@dataclass(frozen=True)
class DisplacementRecord:
    """A taken edge plus the lower-level matched edges it blocked."""

    edge: Edge
    level: int
    displaced: tuple[tuple[Edge, int], ...]

    @property
    def displaced_weight(self) -> int:
        return sum(w for (_, _, w), _ in self.displaced)


@dataclass(frozen=True)
class CombineOutcome:
    copy_index: int
    taken: tuple[tuple[Edge, int], ...]
    records: tuple[DisplacementRecord, ...]

    @property
    def weight(self) -> int:
        return sum(w for (_, _, w), _ in self.taken)


def combine_levels(
    copy_part: CopyPartition,
    level_matchings: dict[int, list[Edge]],
) -> CombineOutcome:
    """Merge per-level matchings, heaviest level first.

    An edge survives when both endpoints are still free.  Each taken
    edge records the matched edges from strictly lower levels that
    share an endpoint with it; the recorded group never outweighs the
    taken edge by more than a factor (k + 3) / k.
    """
    used_l: set[int] = set()
    used_r: set[int] = set()
    taken: list[tuple[Edge, int]] = []
    records: list[DisplacementRecord] = []
    level_order = sorted(level_matchings, reverse=True)
    for lv in level_order:
        for edge in sorted(level_matchings[lv]):
            i, j, _ = edge
            if i in used_l or j in used_r:
                continue
            used_l.add(i)
            used_r.add(j)
            taken.append((edge, lv))
            displaced = [
                (other, lv2)
                for lv2 in level_order
                if lv2 < lv
                for other in level_matchings[lv2]
                if other[0] == i or other[1] == j
            ]
            records.append(
                DisplacementRecord(edge=edge, level=lv, displaced=tuple(displaced))
            )
    return CombineOutcome(
        copy_index=copy_part.index, taken=tuple(taken), records=tuple(records)
    )


@dataclass
class ReductionDetail:
    """Instrumentation for the reduction, kept for audits and reports."""

    partition: WeightPartition
    outcomes: list[CombineOutcome] = field(default_factory=list)
    level_results: dict[tuple[int, int], MatchingResult] = field(default_factory=dict)
    level_traces: dict[tuple[int, int], RunTrace] = field(default_factory=dict)
    best_copy: int = 0


def run_reduced_mwm(
    inst: BipartiteInstance,
    eps: Epsilon,
    engine: str = "memory",
    kernel: str = "det",
    seed: int = 0,
    audit: bool = False,
    collect_detail: bool = False,
):
    """Solve weighted matching through the bucket-copy reduction.

    engine "memory" runs the in-memory auction per level with the given
    kernel.  engine "stream-sequential" streams the copies one after
    another (each pass is shared by all levels of the current copy);
    engine "stream-concurrent" streams all copies at once.  Per-level
    results are identical either way; only pass and space accounting
    differ.  Returns (result, trace) or (result, trace, detail) when
    collect_detail is set.
    """
    if engine not in ("memory", "stream-sequential", "stream-concurrent"):
        raise ValueError(f"unknown engine {engine!r}")
    part = build_partition(inst, eps)
    detail = ReductionDetail(partition=part)

    for cp in part.copies:
        level_matchings: dict[int, list[Edge]] = {}
        for lg in cp.levels:
            level_inst = BipartiteInstance.build(
                inst.n_l, inst.n_r, edges=list(lg.edges)
            )
            if engine == "memory":
                sg = scale_and_prune(level_inst, eps)
                res, tr = run_mwm(sg, eps, kernel=kernel, seed=seed, audit=audit)
            else:
                from .streaming import EdgeStream, stream_mwm

                stream = EdgeStream.from_instance(level_inst)
                res, tr = stream_mwm(stream, eps, audit=audit)
            detail.level_results[(cp.index, lg.level)] = res
            detail.level_traces[(cp.index, lg.level)] = tr
            weight_of = {(i, j): w for i, j, w in lg.edges}
            level_matchings[lg.level] = [
                (i, j, weight_of[(i, j)]) for i, j in res.pairs
            ]
        detail.outcomes.append(combine_levels(cp, level_matchings))

    best = max(detail.outcomes, key=lambda oc: (oc.weight, -oc.copy_index))
    detail.best_copy = best.copy_index

    pairs = tuple(sorted((i, j) for (i, j, _), _ in best.taken))
    edge_set = {(i, j) for i, j, _ in inst.edges}
    valid = all(p in edge_set for p in pairs)
    seen_l = len({i for i, _ in pairs}) == len(pairs)
    seen_r = len({j for _, j in pairs}) == len(pairs)
    result = MatchingResult(
        pairs=pairs,
        value=best.weight,
        round_captured=0,
        valid=valid and seen_l and seen_r,
    )

    trace = _aggregate_trace(engine, part, detail)
    return (result, trace, detail) if collect_detail else (result, trace)


def _aggregate_trace(
    engine: str, part: WeightPartition, detail: ReductionDetail
) -> RunTrace:
    """Fold per-level traces into one, per the engine's schedule.

    Sequential streaming shares each pass among the levels of one copy,
    so a copy costs one stats pass plus two passes per phase of its
    slowest level, and only one copy's state is live at a time.
    Concurrent streaming shares passes across everything and keeps all
    state live at once.
    """
    traces = detail.level_traces
    total_phases = sum(tr.rounds_executed for tr in traces.values())
    total_budget = sum(tr.round_budget for tr in traces.values())
    trace = RunTrace(rounds_executed=total_phases, round_budget=total_budget)
    trace.notes["n_copies"] = part.n_copies
    trace.notes["n_levels"] = len(traces)
    trace.notes["best_copy"] = detail.best_copy

    if engine == "memory":
        return trace

    def phases(key: tuple[int, int]) -> int:
        return (traces[key].passes - 1) // 2

    if engine == "stream-sequential":
        passes = 0
        peak = 0
        for cp in part.copies:
            keys = [(cp.index, lg.level) for lg in cp.levels]
            if not keys:
                continue
            passes += 1 + 2 * max(phases(k) for k in keys)
            peak = max(peak, sum(traces[k].peak_words for k in keys))
    else:
        keys = list(traces)
        passes = 1 + 2 * max((phases(k) for k in keys), default=0) if keys else 0
        peak = sum(traces[k].peak_words for k in keys)

    trace.passes = passes
    trace.peak_words = peak
    return trace
