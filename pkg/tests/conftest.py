"""Shared fixtures and independent oracles used across the test suite.

The oracles here unroll definitions with plain loops and never touch the
parallel primitives, so they can serve as ground truth for them.
"""

from __future__ import annotations

import itertools
import math
import random

import pytest

from parfair.model import Allocation, Instance, PaymentConstraint, ValuationClass


@pytest.fixture
def paper_instance() -> Instance:
    return Instance(
        n=3,
        m=3,
        values=((1, 3, 2), (0, 1, 0), (2, 0, 2)),
        valuation_class=ValuationClass.ADDITIVE,
    )


@pytest.fixture
def paper_allocation() -> Allocation:
    # agent 1 gets item 3, agent 2 gets item 2, agent 3 gets item 1 (1-based)
    return Allocation.from_bundles([{2}, {1}, {0}], 3)


def random_complete_allocation(inst: Instance, seed: int) -> Allocation:
    rng = random.Random(seed)
    bundles: list[set[int]] = [set() for _ in range(inst.n)]
    for j in range(inst.m):
        bundles[rng.randrange(inst.n)].add(j)
    return Allocation.from_bundles(bundles, inst.m)


def all_complete_allocations(inst: Instance):
    for assignment in itertools.product(range(inst.n), repeat=inst.m):
        bundles: list[set[int]] = [set() for _ in range(inst.n)]
        for j, owner in enumerate(assignment):
            bundles[owner].add(j)
        yield Allocation.from_bundles(bundles, inst.m)


# ---------------------------------------------------------------------------
# Naive fairness oracles (triple loops over the definitions)


def naive_ef(inst: Instance, alloc: Allocation) -> bool:
    for i in range(inst.n):
        own = inst.bundle_value(i, alloc.bundles[i])
        for j in range(inst.n):
            if own < inst.bundle_value(i, alloc.bundles[j]):
                return False
    return True


def naive_ef1(inst: Instance, alloc: Allocation) -> bool:
    for i in range(inst.n):
        own = inst.bundle_value(i, alloc.bundles[i])
        for j in range(inst.n):
            if i == j:
                continue
            other = inst.bundle_value(i, alloc.bundles[j])
            if not alloc.bundles[j]:
                if own < 0:
                    return False
                continue
            if not any(own >= other - inst.values[i][g] for g in alloc.bundles[j]):
                return False
    return True


def naive_efx(inst: Instance, alloc: Allocation) -> bool:
    for i in range(inst.n):
        own = inst.bundle_value(i, alloc.bundles[i])
        for j in range(inst.n):
            if i == j:
                continue
            other = inst.bundle_value(i, alloc.bundles[j])
            if any(own < other - inst.values[i][g] for g in alloc.bundles[j]):
                return False
    return True


# ---------------------------------------------------------------------------
# Graph oracles


def bellman_ford_from(rows, source: int):
    """Single-source shortest paths over a dense matrix with math.inf for
    missing edges; diagonal treated as 0. Returns None on a negative cycle."""
    order = len(rows)
    dist = [math.inf] * order
    dist[source] = 0
    for _ in range(order - 1):
        for a in range(order):
            if dist[a] == math.inf:
                continue
            for b in range(order):
                w = rows[a][b]
                if w != math.inf and dist[a] + w < dist[b]:
                    dist[b] = dist[a] + w
    for a in range(order):
        if dist[a] == math.inf:
            continue
        for b in range(order):
            w = rows[a][b]
            if w != math.inf and dist[a] + w < dist[b]:
                return None
    return dist


def dfs_reachable(adjacency, source: int) -> set[int]:
    """Vertices reachable from source by a path of length >= 1."""
    order = len(adjacency)
    seen: set[int] = set()
    stack = [b for b in range(order) if adjacency[source][b]]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(b for b in range(order) if adjacency[v][b] and b not in seen)
    return seen


def random_constraints(inst: Instance, seed: int, count: int) -> tuple[PaymentConstraint, ...]:
    rng = random.Random(seed)
    cap = inst.payment_cap
    out = []
    for _ in range(count):
        out.append(
            PaymentConstraint(
                i=rng.randrange(inst.n),
                x=rng.randint(0, cap),
                j=rng.randrange(inst.n),
                y=rng.randint(0, cap),
            )
        )
    return tuple(out)
