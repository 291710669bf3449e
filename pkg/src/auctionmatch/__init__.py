"""Auction-based bipartite matching with exact epsilon arithmetic.

Approximate engines for maximum-cardinality, maximum-weight, and
capacitated (b-matching) bipartite matching, a weight-range reduction,
semi-streaming execution with pass/space accounting, and exact oracles
for verifying every approximation bound.
"""

from .errors import AuctionMatchError, InstanceFormatError, InvariantViolation
from .graph import (
    BipartiteInstance,
    Epsilon,
    ScaledGraph,
    dumps_instance,
    generate_random,
    load_instance,
    loads_instance,
    save_instance,
    scale_and_prune,
)
from .mcbm import expand_copies, find_demand_set, mcbm_round_budget, run_mcbm
from .mcm import demand_set_mcm, mcm_round_budget, run_mcm
from .mwm import demand_set_mwm, edge_bucket, phase_budget, run_mwm
from .oracles import ORACLE_SIZE_LIMIT, exact_mcbm, exact_mcm, exact_mwm
from .results import BlackboardTrace, BMatchingResult, MatchingResult, RunTrace
from .streaming import (
    STREAM_MCBM_SPACE_FACTOR,
    EdgeStream,
    SpaceAccountant,
    stream_mcbm,
    stream_mwm,
)
from .weight_reduction import (
    build_partition,
    combine_levels,
    run_reduced_mwm,
    weight_bucket,
)

__version__ = "0.1.0"

__all__ = [
    "AuctionMatchError",
    "BipartiteInstance",
    "BlackboardTrace",
    "BMatchingResult",
    "EdgeStream",
    "Epsilon",
    "InstanceFormatError",
    "InvariantViolation",
    "MatchingResult",
    "ORACLE_SIZE_LIMIT",
    "RunTrace",
    "ScaledGraph",
    "SpaceAccountant",
    "STREAM_MCBM_SPACE_FACTOR",
    "build_partition",
    "combine_levels",
    "demand_set_mcm",
    "demand_set_mwm",
    "dumps_instance",
    "edge_bucket",
    "exact_mcbm",
    "exact_mcm",
    "exact_mwm",
    "expand_copies",
    "find_demand_set",
    "generate_random",
    "load_instance",
    "loads_instance",
    "mcbm_round_budget",
    "mcm_round_budget",
    "phase_budget",
    "run_mcbm",
    "run_mcm",
    "run_mwm",
    "run_reduced_mwm",
    "save_instance",
    "scale_and_prune",
    "stream_mcbm",
    "stream_mwm",
    "weight_bucket",
]
