"""Bipartite instances, exact scaling, file I/O, and random generation.

Weights are positive integers and the accuracy parameter is a unit fraction
eps = 1/k, so every quantity the engines touch (scaled weights, prices,
utilities) is an integer multiple of 1/(k * w_max). All comparisons here are
done on cross-multiplied integers; no floats are involved anywhere.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InstanceFormatError

__all__ = [
    "Epsilon",
    "BipartiteInstance",
    "BaseUnit",
    "ScaledGraph",
    "scale_and_prune",
    "ceil_log",
    "load_instance",
    "loads_instance",
    "save_instance",
    "dumps_instance",
    "generate_random",
]


@dataclass(frozen=True)
class Epsilon:
    """Accuracy parameter eps = 1/k for an integer k >= 2."""

    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 2:
            raise ValueError(f"eps must be 1/k with integer k >= 2, got k={self.k!r}")

    @property
    def value(self) -> Fraction:
        return Fraction(1, self.k)

    def __str__(self) -> str:
        return f"1/{self.k}"

    @classmethod
    def parse(cls, text: str) -> "Epsilon":
        """Parse the literal form '1/k'."""
        parts = text.strip().split("/")
        if len(parts) != 2 or parts[0].strip() != "1":
            raise ValueError(f"eps must be written as 1/k, got {text!r}")
        try:
            k = int(parts[1])
        except ValueError:
            raise ValueError(f"eps must be written as 1/k, got {text!r}") from None
        return cls(k)


def ceil_log(base: int, num: int, den: int = 1) -> int:
    """Smallest integer t >= 0 with base**t >= num/den, computed exactly."""
    if num <= 0 or den <= 0:
        raise ValueError("ceil_log needs a positive ratio")
    t = 0
    power = den
    while power < num:
        power *= base
        t += 1
    return t


@dataclass(frozen=True)
class BipartiteInstance:
    """A bipartite graph with integer edge weights and vertex capacities.

    Bidders are 0..n_l-1 on the left, items 0..n_r-1 on the right. Edges keep
    their construction order; that order doubles as the stream order for the
    streaming engines. Capacities default to 1 on both sides and are bounded
    by the size of the opposite side.
    """

    n_l: int
    n_r: int
    edges: tuple[tuple[int, int, int], ...]
    b_l: tuple[int, ...]
    b_r: tuple[int, ...]

    def __post_init__(self):
        if self.n_l < 1 or self.n_r < 1:
            raise ValueError("both sides need at least one vertex")
        if len(self.b_l) != self.n_l or len(self.b_r) != self.n_r:
            raise ValueError("capacity vectors must cover every vertex")
        for i, b in enumerate(self.b_l):
            if not 1 <= b <= self.n_r:
                raise ValueError(f"bidder {i} capacity {b} outside [1, {self.n_r}]")
        for j, b in enumerate(self.b_r):
            if not 1 <= b <= self.n_l:
                raise ValueError(f"item {j} capacity {b} outside [1, {self.n_l}]")
        seen = set()
        for i, j, w in self.edges:
            if not (0 <= i < self.n_l and 0 <= j < self.n_r):
                raise ValueError(f"edge ({i}, {j}) endpoint out of range")
            if w < 1:
                raise ValueError(f"edge ({i}, {j}) has non-positive weight {w}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    @classmethod
    def build(cls, n_l: int, n_r: int, edges, b_l=None, b_r=None) -> "BipartiteInstance":
        """Construct with default unit capacities where none are given."""
        return cls(
            n_l=n_l,
            n_r=n_r,
            edges=tuple((int(i), int(j), int(w)) for i, j, w in edges),
            b_l=tuple(b_l) if b_l is not None else (1,) * n_l,
            b_r=tuple(b_r) if b_r is not None else (1,) * n_r,
        )

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def sum_b_l(self) -> int:
        return sum(self.b_l)

    @property
    def sum_b_r(self) -> int:
        return sum(self.b_r)

    @property
    def w_max(self) -> int:
        if not self.edges:
            raise ValueError("instance has no edges")
        return max(w for _, _, w in self.edges)

    @property
    def w_min(self) -> int:
        if not self.edges:
            raise ValueError("instance has no edges")
        return min(w for _, _, w in self.edges)

    def bidder_adjacency(self) -> list[list[tuple[int, int]]]:
        """Per-bidder list of (item, weight), in edge order."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_l)]
        for i, j, w in self.edges:
            adj[i].append((j, w))
        return adj

    def unit_capacities(self) -> bool:
        return all(b == 1 for b in self.b_l) and all(b == 1 for b in self.b_r)


@dataclass(frozen=True)
class BaseUnit:
    """The exact grid every engine quantity lives on: multiples of 1/denominator."""

    denominator: int

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be positive")


@dataclass(frozen=True)
class ScaledGraph:
    """An instance rescaled by its maximum weight, with tiny edges pruned.

    Surviving edges keep their original integer weights and order; the
    scaled weight of (i, j, w) is the exact rational w / w_max. The prune
    threshold is eps**prune_exponent, where the exponent came from the
    pre-prune edge count and weight spread (or was inherited, when a scaled
    graph is re-scaled).
    """

    instance: BipartiteInstance
    eps: Epsilon
    w_max: int
    edges: tuple[tuple[int, int, int], ...]
    pruned_count: int
    prune_exponent: int
    base_unit: BaseUnit

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def w_min_surviving(self) -> int:
        return min(w for _, _, w in self.edges)

    @property
    def weight_spread(self) -> Fraction:
        """Max/min ratio over surviving weights (the post-prune W)."""
        return Fraction(self.w_max, self.w_min_surviving)

    @property
    def bucket_count(self) -> int:
        """ceil(log_{1/eps} W) over surviving weights; 0 when all equal."""
        return ceil_log(self.eps.k, self.w_max, self.w_min_surviving)

    def scaled_weight(self, w: int) -> Fraction:
        return Fraction(w, self.w_max)

    def bidder_adjacency(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.instance.n_l)]
        for i, j, w in self.edges:
            adj[i].append((j, w))
        return adj


def scale_and_prune(inst: BipartiteInstance, eps: Epsilon,
                    threshold_exponent: int | None = None) -> ScaledGraph:
    """Divide weights by w_max and drop edges below eps**t.

    t is ceil(log_{1/eps} min(m, W)) + 1 computed from the graph as given;
    pass ``threshold_exponent`` to inherit the exponent of an earlier scaling
    instead (re-scaling a scaled graph's survivors with the inherited
    exponent changes nothing). Exact arithmetic: an edge survives iff
    w * k**t >= w_max.
    """
    if not inst.edges:
        raise ValueError("cannot scale an instance with no edges")
    k = eps.k
    w_max = inst.w_max
    w_min = inst.w_min
    m = inst.m
    if threshold_exponent is None:
        # min(m, W) with W = w_max / w_min, compared exactly.
        if m * w_min <= w_max:
            t = ceil_log(k, m) + 1
        else:
            t = ceil_log(k, w_max, w_min) + 1
    else:
        if threshold_exponent < 0:
            raise ValueError("threshold exponent must be >= 0")
        t = threshold_exponent
    power = k ** t
    survivors = tuple(e for e in inst.edges if e[2] * power >= w_max)
    return ScaledGraph(
        instance=inst,
        eps=eps,
        w_max=w_max,
        edges=survivors,
        pruned_count=m - len(survivors),
        prune_exponent=t,
        base_unit=BaseUnit(k * w_max),
    )


# ---------------------------------------------------------------------------
# File format. One header line, then edge and optional capacity lines:
#
#   c free-form comment
#   p bm <n_l> <n_r> <m>
#   b l <i> <capacity>        (1-based vertex id)
#   b r <j> <capacity>
#   e <i> <j> <w>             (1-based endpoints, positive integer weight)
#
# Line order of edges is preserved and is the stream order.
# ---------------------------------------------------------------------------


def loads_instance(text: str) -> BipartiteInstance:
    """Parse an instance from a string; errors carry 1-based line numbers."""
    n_l = n_r = declared_m = None
    edges: list[tuple[int, int, int]] = []
    b_l: list[int] | None = None
    b_r: list[int] | None = None
    seen: set[tuple[int, int]] = set()

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        tag = fields[0]
        if tag == "p":
            if n_l is not None:
                raise InstanceFormatError("duplicate problem line", line_no)
            if len(fields) != 5 or fields[1] != "bm":
                raise InstanceFormatError(f"malformed problem line {line!r}", line_no)
            try:
                n_l, n_r, declared_m = (int(x) for x in fields[2:5])
            except ValueError:
                raise InstanceFormatError(f"malformed problem line {line!r}", line_no) from None
            if n_l < 1 or n_r < 1 or declared_m < 0:
                raise InstanceFormatError("problem line sizes out of range", line_no)
            b_l = [1] * n_l
            b_r = [1] * n_r
        elif tag == "e":
            if n_l is None:
                raise InstanceFormatError("edge line before problem line", line_no)
            if len(fields) != 4:
                raise InstanceFormatError(f"malformed edge line {line!r}", line_no)
            try:
                i, j, w = (int(x) for x in fields[1:4])
            except ValueError:
                raise InstanceFormatError(f"malformed edge line {line!r}", line_no) from None
            if not (1 <= i <= n_l and 1 <= j <= n_r):
                raise InstanceFormatError(f"edge endpoint out of range in {line!r}", line_no)
            if w < 1:
                raise InstanceFormatError(f"edge weight must be a positive integer in {line!r}", line_no)
            if (i - 1, j - 1) in seen:
                raise InstanceFormatError(f"duplicate edge ({i}, {j})", line_no)
            seen.add((i - 1, j - 1))
            edges.append((i - 1, j - 1, w))
        elif tag == "b":
            if n_l is None:
                raise InstanceFormatError("capacity line before problem line", line_no)
            if len(fields) != 4 or fields[1] not in ("l", "r"):
                raise InstanceFormatError(f"malformed capacity line {line!r}", line_no)
            try:
                v, cap = int(fields[2]), int(fields[3])
            except ValueError:
                raise InstanceFormatError(f"malformed capacity line {line!r}", line_no) from None
            side = fields[1]
            bound = n_l if side == "l" else n_r
            if not 1 <= v <= bound:
                raise InstanceFormatError(f"capacity vertex out of range in {line!r}", line_no)
            limit = n_r if side == "l" else n_l
            if not 1 <= cap <= limit:
                raise InstanceFormatError(f"capacity {cap} outside [1, {limit}]", line_no)
            if side == "l":
                b_l[v - 1] = cap
            else:
                b_r[v - 1] = cap
        else:
            raise InstanceFormatError(f"unknown line type {tag!r}", line_no)

    if n_l is None:
        raise InstanceFormatError("missing problem line")
    if declared_m != len(edges):
        raise InstanceFormatError(
            f"problem line declares {declared_m} edges but {len(edges)} were given")
    return BipartiteInstance(n_l=n_l, n_r=n_r, edges=tuple(edges),
                             b_l=tuple(b_l), b_r=tuple(b_r))


def load_instance(path) -> BipartiteInstance:
    with open(path, "r", encoding="ascii") as fh:
        return loads_instance(fh.read())


def dumps_instance(inst: BipartiteInstance) -> str:
    """Canonical serialization: identical instances yield identical bytes."""
    lines = [f"p bm {inst.n_l} {inst.n_r} {inst.m}"]
    for i, b in enumerate(inst.b_l):
        if b != 1:
            lines.append(f"b l {i + 1} {b}")
    for j, b in enumerate(inst.b_r):
        if b != 1:
            lines.append(f"b r {j + 1} {b}")
    for i, j, w in inst.edges:
        lines.append(f"e {i + 1} {j + 1} {w}")
    return "\n".join(lines) + "\n"


def save_instance(inst: BipartiteInstance, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps_instance(inst))


def generate_random(n_l: int, n_r: int, density: float,
                    w_range: tuple[int, int] = (1, 1),
                    b_l_range: tuple[int, int] = (1, 1),
                    b_r_range: tuple[int, int] = (1, 1),
                    seed: int = 0) -> BipartiteInstance:
    """Seed-deterministic random instance.

    Each of the n_l * n_r pairs becomes an edge independently with the given
    probability; weights and capacities are uniform over their ranges
    (capacities clamped to the opposite side's size). A zero-edge draw is
    retried once from the continuing generator state before raising.
    """
    if not 0.0 < density <= 1.0:
        raise ValueError("density must be in (0, 1]")
    if w_range[0] < 1 or w_range[0] > w_range[1]:
        raise ValueError("weight range must satisfy 1 <= lo <= hi")
    for lo, hi in (b_l_range, b_r_range):
        if lo < 1 or lo > hi:
            raise ValueError("capacity range must satisfy 1 <= lo <= hi")
    rng = random.Random(seed)
    edges: list[tuple[int, int, int]] = []
    for attempt in range(2):
        for i in range(n_l):
            for j in range(n_r):
                if rng.random() < density:
                    edges.append((i, j, rng.randint(w_range[0], w_range[1])))
        if edges:
            break
    if not edges:
        raise ValueError(
            f"no edges drawn for n_l={n_l} n_r={n_r} density={density} seed={seed} after one retry")
    b_l = [min(n_r, rng.randint(b_l_range[0], b_l_range[1])) for _ in range(n_l)]
    b_r = [min(n_l, rng.randint(b_r_range[0], b_r_range[1])) for _ in range(n_r)]
    return BipartiteInstance(n_l=n_l, n_r=n_r, edges=tuple(edges),
                             b_l=tuple(b_l), b_r=tuple(b_r))
