"""Fair division with subsidies: envy-freeability, envy-eliminating
payments via shortest paths, and constrained payments via the payment
rejection grid.

Payments are nonnegative integers bounded by m * Delta (the most any agent
can value the whole item set), so the rejection grid has m * Delta + 1
dollar levels per agent, level 0 included.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import pram
from .model import (
    Allocation,
    Instance,
    ParfairError,
    PaymentConstraint,
    PaymentVector,
    envy_free_with_payments,
    require_effectively_complete,
)

__all__ = [
    "NotEnvyFreeableError",
    "PaymentConstraint",
    "PaymentVector",
    "RejectionGraph",
    "is_envy_freeable",
    "envy_eliminating_payments",
    "constrained_payments",
    "build_rejection_graph",
]

#: Grids up to this many vertices go through the explicit transitive-closure
#: route; larger ones use the output-equivalent worklist reachability.
DEFAULT_CLOSURE_CAP = 4096
#: Hard ceiling on grid vertices before we ask the caller to rescale values.
DEFAULT_GRID_LIMIT = 10**7


class NotEnvyFreeableError(ParfairError):
    """The allocation admits no envy-eliminating payment vector."""


def _closure_cap() -> int:
    return int(os.environ.get("PARFAIR_CLOSURE_CAP", DEFAULT_CLOSURE_CAP))


def _grid_limit() -> int:
    return int(os.environ.get("PARFAIR_GRID_CAP", DEFAULT_GRID_LIMIT))


def _bundle_values(inst: Instance, alloc: Allocation) -> list[list[int]]:
    return [
        [inst.bundle_value(i, alloc.bundles[j]) for j in range(inst.n)]
        for i in range(inst.n)
    ]


def _negated_envy_matrix(inst: Instance, alloc: Allocation) -> pram.SquareMatrix:
    bval = _bundle_values(inst, alloc)
    rows = [
        [-(bval[i][j] - bval[i][i]) for j in range(inst.n)]
        for i in range(inst.n)
    ]
    return pram.SquareMatrix.minplus(rows)


def is_envy_freeable(inst: Instance, alloc: Allocation) -> bool:
    """True iff some payment vector makes the allocation envy-free,
    equivalently iff the envy graph has no positive-weight directed cycle."""
    require_effectively_complete(inst, alloc)
    closure, _ = pram.apsp_minplus(_negated_envy_matrix(inst, alloc), allow_negative_cycles=True)
    return all(closure[i, i] >= 0 for i in range(inst.n))


def envy_eliminating_payments(inst: Instance, alloc: Allocation) -> PaymentVector:
    """Pay each agent the maximum total envy weight over directed paths
    starting at it (the empty path contributes 0, so payments are
    nonnegative and some agent is paid nothing)."""
    require_effectively_complete(inst, alloc)
    try:
        closure, _ = pram.apsp_minplus(_negated_envy_matrix(inst, alloc))
    except pram.NegativeCycleError:
        raise NotEnvyFreeableError(
            "allocation is not envy-freeable (positive-weight envy cycle)"
        ) from None
    q = []
    for i in range(inst.n):
        least, _ = pram.par_reduce([closure[i, j] for j in range(inst.n)], "min")
        q.append(int(-least))
    return PaymentVector(tuple(q))


# ---------------------------------------------------------------------------
# Constrained payments: the payment rejection grid


@dataclass(frozen=True)
class RejectionGraph:
    """Grid of (agent, dollar level) vertices with rejection edges.

    Vertex (i, j) has index i * (cap + 1) + j for j in 0..cap. An envy edge
    (k, l) -> (i, j) exists iff own_i + j < v_i(bundle_k) + l + 1; user
    constraints add their (i, x) -> (j, y) edge verbatim. F holds the
    initially rejected vertices: every (i, j) where agent i would still envy
    a zero-paid agent, i.e. j < max_k (v_i(bundle_k) - own_i). Payments are
    nonnegative, so those levels belong to no satisfying vector regardless of
    everything else. `rejected` marks everything reachable from F after
    transitive closure.
    """

    n: int
    cap: int
    F: frozenset[int]
    edges: pram.SquareMatrix
    rejected: tuple[bool, ...]

    @property
    def levels(self) -> int:
        return self.cap + 1

    def vertex(self, agent: int, level: int) -> int:
        return agent * self.levels + level

    def is_rejected(self, agent: int, level: int) -> bool:
        return self.rejected[self.vertex(agent, level)]


def _validate_constraints(constraints: Sequence[PaymentConstraint], n: int, cap: int) -> None:
    for c in constraints:
        if not (0 <= c.i < n and 0 <= c.j < n):
            raise ParfairError(f"constraint references agent out of range: {c}")
        if not (0 <= c.x <= cap and 0 <= c.y <= cap):
            raise ParfairError(
                f"constraint dollar levels must lie in 0..{cap}: {c}"
            )


def _initial_envy(bval: list[list[int]], n: int) -> list[int]:
    """Per agent, the worst envy against zero-paid opponents; levels below it
    are rejected outright (0 when the agent starts envy-free)."""
    return [max(max(bval[i]) - bval[i][i], 0) for i in range(n)]


def build_rejection_graph(
    inst: Instance,
    alloc: Allocation,
    constraints: Sequence[PaymentConstraint] = (),
) -> RejectionGraph:
    """Materialize the rejection grid, take its transitive closure, and mark
    every vertex reachable from F as rejected."""
    require_effectively_complete(inst, alloc)
    cap = inst.payment_cap
    _validate_constraints(constraints, inst.n, cap)
    bval = _bundle_values(inst, alloc)
    levels = cap + 1
    size = inst.n * levels
    adj = np.zeros((size, size), dtype=bool)
    # block (k -> i): edge at (source level l, target level j) iff
    # j - l <= bval[i][k] - own_i
    j_minus_l = -np.subtract.outer(np.arange(levels), np.arange(levels))
    for k in range(inst.n):
        for i in range(inst.n):
            bound = bval[i][k] - bval[i][i]
            block = j_minus_l <= bound
            adj[k * levels : (k + 1) * levels, i * levels : (i + 1) * levels] = block
    for c in constraints:
        adj[c.i * levels + c.x, c.j * levels + c.y] = True
    closure, _ = pram.transitive_closure(
        pram.SquareMatrix.boolean([tuple(row) for row in adj])
    )
    F = frozenset(
        i * levels + j
        for i, envy in enumerate(_initial_envy(bval, inst.n))
        for j in range(min(envy, levels))
    )
    rejected = [False] * size
    for f in F:
        rejected[f] = True
        for v in range(size):
            if closure[f, v]:
                rejected[v] = True
    return RejectionGraph(
        n=inst.n, cap=cap, F=F, edges=pram.SquareMatrix.boolean([tuple(r) for r in adj]),
        rejected=tuple(rejected),
    )


def _worklist_rejection_levels(
    inst: Instance,
    alloc: Allocation,
    constraints: Sequence[PaymentConstraint],
    cap: int,
) -> list[int]:
    """Highest rejected dollar level per agent (-1 if none), computed by
    worklist reachability over the implicit grid. Rejected sets are always
    downward-closed rows, so one bound per agent captures them exactly."""
    bval = _bundle_values(inst, alloc)
    n = inst.n
    hi = [-1] * n
    pending = deque()
    for i, envy in enumerate(_initial_envy(bval, n)):
        if envy > 0:
            hi[i] = min(envy - 1, cap)
            pending.append(i)
    by_source: dict[int, list[PaymentConstraint]] = {}
    for c in constraints:
        by_source.setdefault(c.i, []).append(c)

    def raise_to(agent: int, level: int) -> None:
        if level > hi[agent]:
            hi[agent] = min(level, cap)
            pending.append(agent)

    while pending:
        k = pending.popleft()
        l = hi[k]
        if l < 0:
            continue
        for i in range(n):
            # envy edge (k, l) -> (i, j) for all j <= bval[i][k] - own_i + l
            raise_to(i, min(bval[i][k] - bval[i][i] + l, cap))
        for c in by_source.get(k, ()):
            if hi[k] >= c.x:
                raise_to(c.j, c.y)
    return hi


def constrained_payments(
    inst: Instance,
    alloc: Allocation,
    constraints: Sequence[PaymentConstraint] = (),
) -> PaymentVector | None:
    """Componentwise-minimal envy-eliminating payment vector in [0, m*Delta]^n
    satisfying every constraint, or None when no satisfying vector exists.

    Small grids run the explicit transitive-closure construction; larger ones
    run an output-equivalent worklist reachability.
    """
    require_effectively_complete(inst, alloc)
    cap = inst.payment_cap
    _validate_constraints(constraints, inst.n, cap)
    size = inst.n * (cap + 1)
    if size > _grid_limit():
        raise ParfairError(
            f"rejection grid needs {size} vertices (limit {_grid_limit()}); "
            f"rescale the valuations to shrink m * Delta"
        )
    if size <= _closure_cap():
        graph = build_rejection_graph(inst, alloc, constraints)
        minima: list[int | None] = []
        for i in range(inst.n):
            level = next(
                (j for j in range(graph.levels) if not graph.is_rejected(i, j)), None
            )
            minima.append(level)
    else:
        hi = _worklist_rejection_levels(inst, alloc, constraints, cap)
        minima = [None if top >= cap else top + 1 for top in hi]
    if any(level is None for level in minima):
        return None
    vector = PaymentVector(tuple(minima))  # type: ignore[arg-type]
    # the two failure modes of the correctness argument must be impossible
    if not envy_free_with_payments(inst, alloc, vector.q):
        raise ParfairError("internal error: rejection output does not eliminate envy")
    if not all(c.satisfied_by(vector.q) for c in constraints):
        raise ParfairError("internal error: rejection output violates a constraint")
    return vector
