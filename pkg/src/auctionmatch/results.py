"""Result and trace records returned by the matching engines."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class MatchingResult:
    """A matching captured at some round of an engine run.

    pairs are (bidder, item) indices sorted by bidder. ``value`` is the
    cardinality for unweighted runs and the total weight in original
    (unscaled) units for weighted runs. ``round_captured`` is the 1-based
    round/phase whose end-of-round state produced this matching; ties on
    value keep the earliest round. ``valid`` records that the engine checked
    the pairs against the instance (edges exist, no endpoint reused).
    """

    pairs: tuple[tuple[int, int], ...]
    value: int
    round_captured: int
    valid: bool


@dataclass(frozen=True)
class BMatchingResult:
    """A capacitated matching: at most b_i edges per bidder, b_j per item."""

    pairs: tuple[tuple[int, int], ...]
    cardinality: int
    round_captured: int
    bidder_usage: tuple[int, ...]
    item_usage: tuple[int, ...]
    valid: bool


@dataclass(frozen=True)
class BlackboardTrace:
    """Communication cost of a randomized-kernel run on a shared blackboard.

    One proposal costs ceil(log2 n_r) bits, one price announcement costs
    ceil(log2 (k * w_max)) bits. Every executed phase contributes its kernel
    proposal rounds plus two fixed coordination rounds.
    """

    proposal_rounds: int
    coordination_rounds: int
    proposals: int
    price_announcements: int
    proposal_bits_each: int
    price_bits_each: int

    @property
    def rounds(self) -> int:
        return self.proposal_rounds + self.coordination_rounds

    @property
    def total_bits(self) -> int:
        return (self.proposals * self.proposal_bits_each
                + self.price_announcements * self.price_bits_each)


@dataclass
class RunTrace:
    """Cost accounting for one engine run.

    ``rounds_executed`` counts rounds/phases that actually ran, including a
    final round that made no reassignment and triggered early exit.
    ``round_budget`` is the nominal bound the engine would have honored.
    ``passes`` and ``peak_words`` are zero for in-memory runs.
    """

    rounds_executed: int
    round_budget: int
    passes: int = 0
    peak_words: int = 0
    blackboard: BlackboardTrace | None = None
    notes: dict = field(default_factory=dict)
