"""Reduction from lexicographically-first maximal matching to fixed-order
Round-Robin, with an empirical equivalence checker.

Left vertices become agents, right vertices become items, and the edge
(x_i, y_j) gets value m - j + 1, so an agent's favorite remaining item is
exactly its smallest-index free neighbor.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass

from .allocate import AgentOrder, round_robin_trace
from .model import Instance, ParfairError, ParseError, ValuationClass

__all__ = [
    "BipartiteGraph",
    "lfmm",
    "reduce_lfmm_to_rr",
    "check_equivalence",
    "random_degree_bounded_graph",
    "parse_graph_text",
    "graph_to_text",
]


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph with 0-based left/right vertex sets. The left side
    must be at least as large as the right, matching the reduction's setup.
    With degree_bound set, every vertex has degree at most the bound."""

    left: int
    right: int
    edges: frozenset[tuple[int, int]]
    degree_bound: int | None = None

    def __post_init__(self):
        if self.left < 0 or self.right < 0:
            raise ParfairError("vertex counts must be nonnegative")
        if self.left < self.right:
            raise ParfairError(
                f"left side ({self.left}) must be at least as large as the right "
                f"({self.right})"
            )
        object.__setattr__(self, "edges", frozenset(self.edges))
        degree: dict[tuple[str, int], int] = {}
        for (x, y) in self.edges:
            if not (0 <= x < self.left and 0 <= y < self.right):
                raise ParfairError(f"edge ({x + 1}, {y + 1}) out of range")
            degree[("L", x)] = degree.get(("L", x), 0) + 1
            degree[("R", y)] = degree.get(("R", y), 0) + 1
        if self.degree_bound is not None:
            offenders = [k for k, d in degree.items() if d > self.degree_bound]
            if offenders:
                raise ParfairError(
                    f"{len(offenders)} vertices exceed degree bound {self.degree_bound}"
                )

    def neighbors_of_left(self, x: int) -> list[int]:
        return sorted(y for (a, y) in self.edges if a == x)


def lfmm(graph: BipartiteGraph) -> dict[int, int]:
    """Lexicographically first maximal matching: scan left vertices in index
    order, matching each to its smallest-index unmatched neighbor."""
    taken: set[int] = set()
    matching: dict[int, int] = {}
    for x in range(graph.left):
        for y in graph.neighbors_of_left(x):
            if y not in taken:
                matching[x] = y
                taken.add(y)
                break
    return matching


def reduce_lfmm_to_rr(graph: BipartiteGraph) -> tuple[Instance, AgentOrder]:
    """Build the Round-Robin instance whose greedy picks replay the greedy
    matching: agent i values item j at m - j + 1 exactly when (x_i, y_j) is
    an edge, and the picking order is the left-vertex order."""
    max_degree = 0
    counts: dict[tuple[str, int], int] = {}
    for (x, y) in graph.edges:
        counts[("L", x)] = counts.get(("L", x), 0) + 1
        counts[("R", y)] = counts.get(("R", y), 0) + 1
    if counts:
        max_degree = max(counts.values())
    if max_degree > 3:
        warnings.warn(
            f"graph has a vertex of degree {max_degree} > 3; the reduction is still "
            f"well defined but leaves the bounded-degree regime",
            stacklevel=2,
        )
    n, m = graph.left, graph.right
    rows = [[0] * m for _ in range(n)]
    for (x, y) in graph.edges:
        rows[x][y] = m - y  # 1-based: m - j + 1
    inst = Instance(
        n=n,
        m=m,
        values=tuple(tuple(r) for r in rows),
        valuation_class=ValuationClass.RESTRICTED_ADDITIVE,
    )
    return inst, AgentOrder(sigma=tuple(range(n)))


def check_equivalence(graph: BipartiteGraph) -> bool:
    """Do the greedy matching and the first Round-Robin round agree? For
    every left vertex, its greedy match (or none) must equal the
    corresponding agent's first-round pick (or none)."""
    if graph.left == 0:
        return True
    matching = lfmm(graph)
    inst, order = reduce_lfmm_to_rr(graph)
    _, trace = round_robin_trace(inst, order)
    first_round = dict(trace[0]) if trace else {}
    for x in range(graph.left):
        if matching.get(x) != first_round.get(x):
            return False
    return True


def random_degree_bounded_graph(
    left: int, right: int, bound: int = 3, seed: int = 0, density: float = 0.5
) -> BipartiteGraph:
    """Seeded random bipartite graph with every degree at most `bound`."""
    if left < right:
        raise ParfairError("left side must be at least as large as the right")
    rng = random.Random(seed)
    pairs = [(x, y) for x in range(left) for y in range(right)]
    rng.shuffle(pairs)
    deg_l = [0] * left
    deg_r = [0] * right
    edges = set()
    for (x, y) in pairs:
        if deg_l[x] < bound and deg_r[y] < bound and rng.random() < density:
            edges.add((x, y))
            deg_l[x] += 1
            deg_r[y] += 1
    return BipartiteGraph(left=left, right=right, edges=frozenset(edges), degree_bound=bound)


# ---------------------------------------------------------------------------
# Graph file format (1-based in files)


def parse_graph_text(text: str) -> BipartiteGraph:
    """Parse:

        left 3
        right 2
        edge 1 1
        edge 1 2
    """
    from .model import _content_lines

    left = right = None
    edges = set()
    for lineno, line in _content_lines(text):
        parts = line.split()
        if parts[0] == "left" and len(parts) == 2:
            left = int(parts[1])
        elif parts[0] == "right" and len(parts) == 2:
            right = int(parts[1])
        elif parts[0] == "edge" and len(parts) == 3:
            if left is None or right is None:
                raise ParseError("edge before left/right declarations", lineno)
            try:
                x, y = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(f"non-integer edge endpoint in {line!r}", lineno) from None
            if not (1 <= x <= left and 1 <= y <= right):
                raise ParseError(f"edge ({x}, {y}) out of range", lineno)
            edges.add((x - 1, y - 1))
        else:
            raise ParseError(f"unrecognized graph line {line!r}", lineno)
    if left is None or right is None:
        raise ParseError("graph file must declare left and right sizes")
    try:
        return BipartiteGraph(left=left, right=right, edges=frozenset(edges))
    except ParfairError as exc:
        raise ParseError(str(exc)) from None


def graph_to_text(graph: BipartiteGraph) -> str:
    lines = [f"left {graph.left}", f"right {graph.right}"]
    lines.extend(f"edge {x + 1} {y + 1}" for (x, y) in sorted(graph.edges))
    return "\n".join(lines) + "\n"
