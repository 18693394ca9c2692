"""Direct allocation procedures: Round-Robin, the two-agent ratio-split
algorithm, striping for identical agents, and welfare maximization."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import pram
from .model import Allocation, Instance, ParfairError, ValuationClass

__all__ = [
    "AgentOrder",
    "identity_order",
    "round_robin",
    "round_robin_trace",
    "ef1_fpo_two_agents",
    "two_agent_ratio_order",
    "ef1_identical",
    "welfare_max_allocation",
]


@dataclass(frozen=True)
class AgentOrder:
    """A strict picking order over agents (0-based permutation)."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(self.sigma))
        if sorted(self.sigma) != list(range(len(self.sigma))):
            raise ParfairError(f"sigma is not a permutation of 0..{len(self.sigma) - 1}")


def identity_order(n: int) -> AgentOrder:
    return AgentOrder(sigma=tuple(range(n)))


def round_robin_trace(
    inst: Instance, order: AgentOrder | None = None
) -> tuple[Allocation, list[list[tuple[int, int | None]]]]:
    """Run Round-Robin and also return the pick trace.

    Agents pick in sigma-order in repeated rounds; each pick is the
    highest-value remaining item (ties to the smallest item index), and
    agents never pick items they value at zero. The trace holds, per round,
    (agent, picked item or None) entries. Items nobody values stay
    unallocated and the allocation is marked partial.
    """
    if order is None:
        order = identity_order(inst.n)
    if len(order.sigma) != inst.n:
        raise ParfairError(f"order covers {len(order.sigma)} agents, instance has {inst.n}")
    available = set(range(inst.m))
    bundles: list[set[int]] = [set() for _ in range(inst.n)]
    trace: list[list[tuple[int, int | None]]] = []
    while True:
        picks: list[tuple[int, int | None]] = []
        anything = False
        for agent in order.sigma:
            row = inst.values[agent]
            best = max(
                (j for j in available if row[j] > 0),
                key=lambda j: (row[j], -j),
                default=None,
            )
            picks.append((agent, best))
            if best is not None:
                available.discard(best)
                bundles[agent].add(best)
                anything = True
        trace.append(picks)
        if not anything:
            trace.pop()  # the empty closing round is not part of the schedule
            break
    return Allocation.from_bundles(bundles, inst.m), trace


def round_robin(inst: Instance, order: AgentOrder | None = None) -> Allocation:
    alloc, _ = round_robin_trace(inst, order)
    return alloc


# ---------------------------------------------------------------------------
# Two agents: EF1 + fractional-PO via a split in value-ratio order


def _two_agent_sort_key(inst: Instance, j: int) -> tuple:
    """Sort key realizing nonincreasing v1/v2 ratio order with exact
    arithmetic: infinite ratios first, zero-zero items last, ties by index."""
    v1, v2 = inst.values[0][j], inst.values[1][j]
    if v2 == 0:
        group = 0 if v1 > 0 else 2
        return (group, Fraction(0), j)
    return (1, -Fraction(v1, v2), j)


def two_agent_ratio_order(inst: Instance) -> tuple[int, ...]:
    """Item indices sorted by nonincreasing value ratio of agent 1 over
    agent 2 (the adjusted-winner line)."""
    if inst.n != 2:
        raise ParfairError(f"ratio order needs exactly 2 agents, got {inst.n}")
    keys = [_two_agent_sort_key(inst, j) for j in range(inst.m)]
    ordered, _, _ = pram.bitonic_sort(keys)
    return tuple(key[2] for key in ordered)


def _split_ef1_status(
    prefix1: list[int], prefix2: list[int], suf_max1: list[int], pre_max2: list[int], k: int, m: int
) -> tuple[bool, bool]:
    """(agent 1 content, agent 2 content) for the split giving items
    order[:k] to agent 1 and order[k:] to agent 2."""
    own1 = prefix1[k]
    other1 = prefix1[m] - prefix1[k]
    ok1 = own1 >= other1 - (suf_max1[k] if k < m else 0)
    own2 = prefix2[m] - prefix2[k]
    other2 = prefix2[k]
    ok2 = own2 >= other2 - (pre_max2[k] if k > 0 else 0)
    return ok1, ok2


def _find_ef1_split(inst: Instance, order: tuple[int, ...]) -> tuple[int, bool]:
    """Index of an EF1 prefix split in the given item order, plus whether the
    binary search degenerated and the linear fallback produced the answer."""
    m = inst.m
    prefix1 = [0] * (m + 1)
    prefix2 = [0] * (m + 1)
    for pos, j in enumerate(order):
        prefix1[pos + 1] = prefix1[pos] + inst.values[0][j]
        prefix2[pos + 1] = prefix2[pos] + inst.values[1][j]
    # suf_max1[k] = max value of agent 1 over order[k:], pre_max2[k] over order[:k]
    suf_max1 = [0] * (m + 1)
    for pos in range(m - 1, -1, -1):
        suf_max1[pos] = max(inst.values[0][order[pos]], suf_max1[pos + 1])
    pre_max2 = [0] * (m + 1)
    for pos in range(m):
        pre_max2[pos + 1] = max(pre_max2[pos], inst.values[1][order[pos]])

    def status(k: int) -> tuple[bool, bool]:
        return _split_ef1_status(prefix1, prefix2, suf_max1, pre_max2, k, m)

    lo, hi = 0, m
    while lo <= hi:
        mid = (lo + hi) // 2
        ok1, ok2 = status(mid)
        if ok1 and ok2:
            return mid, False
        if not ok1:
            lo = mid + 1  # agent 1 envies beyond one good: move the cut right
        else:
            hi = mid - 1
    # non-monotone corner: fall back to scanning all m+1 splits
    for k in range(m + 1):
        ok1, ok2 = status(k)
        if ok1 and ok2:
            return k, True
    raise ParfairError("no EF1 split exists; this contradicts the existence guarantee")


def ef1_fpo_two_agents(inst: Instance) -> Allocation:
    """EF1 allocation for two agents that is also a contiguous split in the
    exact ratio order (the fractional-PO certificate).

    Binary search over the m+1 prefix splits moves right while agent 1's
    EF1 condition fails and left while agent 2's fails; a linear scan backs
    it up should the search degenerate.
    """
    if inst.n != 2:
        raise ParfairError(f"ef1_fpo_two_agents needs exactly 2 agents, got {inst.n}")
    order = two_agent_ratio_order(inst)
    chosen, _ = _find_ef1_split(inst, order)
    return Allocation.from_bundles([set(order[:chosen]), set(order[chosen:])], inst.m)


# ---------------------------------------------------------------------------
# Identical agents: stripe the ranked items along the picking order


def ef1_identical(inst: Instance, order: AgentOrder | None = None) -> Allocation:
    """EF1 for identical agents: sort items by decreasing value and give the
    k-th ranked positively-valued item to the agent in slot (k-1) mod n.
    Reproduces Round-Robin exactly, including leaving zero-value items out.
    """
    if inst.valuation_class is not ValuationClass.IDENTICAL:
        raise ParfairError(
            f"ef1_identical needs the identical valuation class, got "
            f"{inst.valuation_class.value}"
        )
    if order is None:
        order = identity_order(inst.n)
    if len(order.sigma) != inst.n:
        raise ParfairError(f"order covers {len(order.sigma)} agents, instance has {inst.n}")
    row = inst.values[0]
    keys = [(-row[j], j) for j in range(inst.m) if row[j] > 0]
    ordered, _, _ = pram.bitonic_sort(keys)
    bundles: list[set[int]] = [set() for _ in range(inst.n)]
    for rank, (_, j) in enumerate(ordered):
        bundles[order.sigma[rank % inst.n]].add(j)
    return Allocation.from_bundles(bundles, inst.m)


# ---------------------------------------------------------------------------
# Welfare maximization (the envy-freeable allocation used with subsidies)


def welfare_max_allocation(inst: Instance) -> Allocation:
    """Give each item to an agent valuing it most (ties to the smallest
    agent index), via a per-item max reduction. Always complete."""
    bundles: list[set[int]] = [set() for _ in range(inst.n)]
    for j in range(inst.m):
        best, _ = pram.par_reduce([(inst.values[i][j], -i) for i in range(inst.n)], "max")
        bundles[-best[1]].add(j)
    return Allocation.from_bundles(bundles, inst.m)
