"""EF1 + PO for restricted additive valuations via bucketed maximum-weight
perfect matching, plus the multiplicative value-rounding reduction.

The bipartite graph pairs item vertices (padded with worthless dummies)
against m copies of every agent; edge weights -m^(t-f) * c make any
maximum-weight perfect matching hand out high-value buckets round-robin
style. A deterministic exact assignment solver replaces the randomized
parallel matching the construction was originally paired with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import pram
from .model import Allocation, Instance, ParfairError, ValuationClass

__all__ = [
    "BucketedGraph",
    "PerfectMatching",
    "MatchingInfeasibleError",
    "WeightOverflowError",
    "build_bucketed_graph",
    "max_weight_perfect_matching",
    "assignment_by_copy",
    "ef1_po_restricted",
    "alpha_round",
    "rounded_value",
    "rounding_interval_count",
]

#: Largest tolerated |edge weight| (m^t * m); beyond this the instance is
#: rejected rather than risking an intractable solve.
WEIGHT_MAGNITUDE_CAP = 1 << 127

_RESTRICTED_OK = (
    ValuationClass.RESTRICTED_ADDITIVE,
    ValuationClass.BINARY,
    ValuationClass.IDENTICAL,
)


class MatchingInfeasibleError(ParfairError):
    """No perfect matching avoids the forbidden pairs (a construction bug:
    the bucketed graph always satisfies Hall's condition)."""


class WeightOverflowError(ParfairError):
    pass


@dataclass(frozen=True)
class BucketedGraph:
    """The item-side/copy-side bipartite graph of the bucketed matching.

    Left vertices are the valued items in bucket order followed by
    m*(n-1) dummies; right vertices are agent copies (agent-major). Edges are
    implicit through `weight`.
    """

    n: int
    m_eff: int  # valued items; copies per agent
    t: int
    items: tuple[int, ...]  # original item index per left position (bucket order)
    bucket_rank: tuple[int, ...]  # 1-based bucket of each left position (1 = highest value)
    discarded: tuple[int, ...]  # original indices of items valued by nobody
    values: tuple[tuple[int, ...], ...]  # the instance matrix, for edge tests

    @property
    def side_size(self) -> int:
        return self.n * self.m_eff

    def right_index(self, agent: int, copy: int) -> int:
        """Vertex index of agent copy c (copies are 1-based)."""
        return agent * self.m_eff + (copy - 1)

    def right_label(self, vertex: int) -> tuple[int, int]:
        return divmod(vertex, self.m_eff)[0], vertex % self.m_eff + 1

    def weight(self, left: int, agent: int, copy: int) -> int | None:
        """Edge weight between left vertex and agent copy, or None if the
        pair is not adjacent. Dummy items connect everywhere at weight 0."""
        if left >= self.m_eff:
            return 0
        item = self.items[left]
        if self.values[agent][item] <= 0:
            return None
        f = self.bucket_rank[left]
        return -(self.m_eff ** (self.t - f)) * copy


@dataclass(frozen=True)
class PerfectMatching:
    """A maximum-weight perfect matching: pairs[left] = right vertex."""

    pairs: tuple[int, ...]
    total_weight: int


def build_bucketed_graph(inst: Instance) -> BucketedGraph:
    """Construct the bucketed graph. Items valued by nobody are discarded
    first and reported in the graph; buckets sort by strictly decreasing
    inherent value."""
    if inst.valuation_class not in _RESTRICTED_OK:
        raise ParfairError(
            f"bucketed matching needs a restricted-additive instance "
            f"(or binary/identical), got class {inst.valuation_class.value}"
        )
    from .model import column_inherent_values

    per_item = column_inherent_values(inst.values, inst.n, inst.m)
    if per_item is None:
        raise ParfairError("matrix is not restricted additive (an item has two nonzero values)")
    valued = [j for j in range(inst.m) if per_item[j] > 0]
    discarded = tuple(j for j in range(inst.m) if per_item[j] == 0)
    m_eff = len(valued)
    if m_eff == 0:
        return BucketedGraph(
            n=inst.n, m_eff=0, t=0, items=(), bucket_rank=(), discarded=discarded,
            values=inst.values,
        )
    keys = [(-per_item[j], j) for j in valued]
    ordered, _, _ = pram.bitonic_sort(keys)
    items = tuple(j for _, j in ordered)
    distinct = sorted({per_item[j] for j in valued}, reverse=True)
    t = len(distinct)
    rank_of = {v: f for f, v in enumerate(distinct, start=1)}
    bucket_rank = tuple(rank_of[per_item[j]] for j in items)
    if m_eff**t * m_eff >= WEIGHT_MAGNITUDE_CAP:
        raise WeightOverflowError(
            f"edge weights up to {m_eff}^{t} * {m_eff} exceed the supported magnitude; "
            f"reduce the number of distinct item values"
        )
    return BucketedGraph(
        n=inst.n, m_eff=m_eff, t=t, items=items, bucket_rank=bucket_rank,
        discarded=discarded, values=inst.values,
    )


# ---------------------------------------------------------------------------
# Exact assignment solver (successive shortest paths with potentials).
# Pure integer arithmetic, None for forbidden pairs, fixed iteration order.


def solve_min_cost_assignment(cost: list[list[int | None]]) -> tuple[list[int], int]:
    """Minimum-cost perfect assignment on a square matrix.

    Entries are exact integers; None marks a forbidden pair. Returns
    (columns, total) with columns[row] the matched column. Raises
    MatchingInfeasibleError when no perfect matching avoids forbidden pairs.
    """
    n = len(cost)
    if n == 0:
        return [], 0
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    match_row = [0] * (n + 1)  # match_row[col] = row matched to col; 0 = free
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        match_row[0] = i
        j0 = 0
        minv: list[int | None] = [None] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match_row[j0]
            row = cost[i0 - 1]
            delta: int | None = None
            j1 = -1
            for j in range(1, n + 1):
                if used[j]:
                    continue
                c = row[j - 1]
                if c is not None:
                    cur = c - u[i0] - v[j]
                    mj = minv[j]
                    if mj is None or cur < mj:
                        minv[j] = cur
                        way[j] = j0
                mj = minv[j]
                if mj is not None and (delta is None or mj < delta):
                    delta = mj
                    j1 = j
            if delta is None:
                raise MatchingInfeasibleError(
                    "no perfect matching avoids the forbidden pairs"
                )
            for j in range(n + 1):
                if used[j]:
                    u[match_row[j]] += delta
                    v[j] -= delta
                elif minv[j] is not None:
                    minv[j] -= delta
            j0 = j1
            if match_row[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match_row[j0] = match_row[j1]
            j0 = j1
    columns = [0] * n
    for j in range(1, n + 1):
        columns[match_row[j] - 1] = j - 1
    total = 0
    for i in range(n):
        c = cost[i][columns[i]]
        if c is None:
            raise MatchingInfeasibleError("solver matched a forbidden pair")
        total += c
    return columns, total


def max_weight_perfect_matching(graph: BucketedGraph) -> PerfectMatching:
    """Maximum-weight perfect matching of the bucketed graph, computed as a
    minimum-cost assignment on the negated weights."""
    size = graph.side_size
    cost: list[list[int | None]] = []
    for left in range(size):
        row: list[int | None] = []
        for right in range(size):
            agent, copy = graph.right_label(right)
            w = graph.weight(left, agent, copy)
            row.append(None if w is None else -w)
        cost.append(row)
    columns, total_cost = solve_min_cost_assignment(cost)
    return PerfectMatching(pairs=tuple(columns), total_weight=-total_cost)


def assignment_by_copy(graph: BucketedGraph, matching: PerfectMatching) -> list[list[int | None]]:
    """table[agent][copy-1] = original item matched to that agent copy, or
    None when the copy got a dummy."""
    table: list[list[int | None]] = [[None] * graph.m_eff for _ in range(graph.n)]
    for left, right in enumerate(matching.pairs):
        agent, copy = graph.right_label(right)
        if left < graph.m_eff:
            table[agent][copy - 1] = graph.items[left]
    return table


def ef1_po_restricted(inst: Instance) -> Allocation:
    """EF1 and Pareto-optimal allocation for restricted additive valuations.

    Every item someone values goes to an agent valuing it; items nobody
    values stay unallocated (the allocation is then marked partial).
    """
    graph = build_bucketed_graph(inst)
    bundles: list[set[int]] = [set() for _ in range(inst.n)]
    if graph.m_eff:
        matching = max_weight_perfect_matching(graph)
        for left in range(graph.m_eff):
            agent, _ = graph.right_label(matching.pairs[left])
            bundles[agent].add(graph.items[left])
    return Allocation.from_bundles(bundles, inst.m)


# ---------------------------------------------------------------------------
# Multiplicative rounding: trade value resolution for fewer buckets


def _as_fraction(alpha) -> Fraction:
    if isinstance(alpha, float):
        raise ParfairError("alpha must be an exact rational, not a float")
    frac = Fraction(alpha)
    if not 0 < frac < 1:
        raise ParfairError(f"alpha must lie strictly between 0 and 1, got {frac}")
    return frac


def rounded_value(value: int, alpha) -> int:
    """Round a positive value down to its interval representative: the
    smallest integer at least (1/alpha)^k, for the largest k with
    (1/alpha)^k <= value. The result lies in (alpha * value, value]."""
    frac = _as_fraction(alpha)
    if value <= 0:
        raise ParfairError(f"rounding needs a positive value, got {value}")
    inv = 1 / frac
    power = Fraction(1)
    while power * inv <= value:
        power *= inv
    return math.ceil(power)


def rounding_interval_count(max_value: int, alpha) -> int:
    """Number of intervals the rounding can create for values in
    [1, max_value]: ceil(log_{1/alpha}(max_value + 1))."""
    frac = _as_fraction(alpha)
    inv = 1 / frac
    power = Fraction(1)
    count = 0
    while power < max_value + 1:
        power *= inv
        count += 1
    return count


def alpha_round(inst: Instance, alpha) -> Instance:
    """Round every positive value down to its interval representative; zero
    stays zero. Preserves the valuation class (rounding is by inherent value
    for restricted instances, since equal values round equally)."""
    frac = _as_fraction(alpha)
    cache: dict[int, int] = {}

    def rv(value: int) -> int:
        if value not in cache:
            cache[value] = rounded_value(value, frac)
        return cache[value]

    rows = tuple(tuple(rv(v) if v > 0 else 0 for v in row) for row in inst.values)
    return Instance(n=inst.n, m=inst.m, values=rows, valuation_class=inst.valuation_class)
