"""Deterministic fork-join parallel primitives with depth/work accounting.

Each primitive returns its value together with a CostMeter counting the
synchronous parallel steps (depth) and total element operations (work) of the
idealized execution. Results and meters are identical regardless of the
worker count; only wall-clock time may vary.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .model import ParfairError

__all__ = [
    "CostMeter",
    "SquareMatrix",
    "NegativeCycleError",
    "par_reduce",
    "bitonic_sort",
    "apsp_minplus",
    "transitive_closure",
    "get_worker_count",
    "set_worker_count",
]


class NegativeCycleError(ParfairError):
    """A min-plus closure drove some diagonal entry below zero."""


@dataclass(frozen=True)
class CostMeter:
    """Cost of one primitive execution.

    depth: number of synchronous parallel steps.
    work: total element operations across all steps.
    peak_width: largest number of operations in any single step (the
        "processor" count reported by benchmarks).
    rounds: matrix-squaring rounds, for the repeated-squaring primitives.
    """

    depth: int
    work: int
    peak_width: int
    rounds: int = 0

    def __post_init__(self):
        if self.depth > self.work:
            raise ParfairError(f"cost meter violates depth <= work: {self}")


# ---------------------------------------------------------------------------
# Worker pool. Parallelism never changes results; it only maps each step's
# independent element operations over threads.

_workers = 1
_pool: ThreadPoolExecutor | None = None

#: CREW semantics are modeled, not enforced; with PARFAIR_DEBUG set, each
#: parallel step asserts that no output cell has two writers.
_DEBUG = os.environ.get("PARFAIR_DEBUG", "") not in ("", "0")


def get_worker_count() -> int:
    return _workers


def set_worker_count(count: int) -> None:
    global _workers, _pool
    if count < 1:
        raise ParfairError(f"worker count must be >= 1, got {count}")
    if count != _workers and _pool is not None:
        _pool.shutdown(wait=True)
        _pool = None
    _workers = count


def _ensure_pool() -> ThreadPoolExecutor:
    global _pool
    if _pool is None:
        _pool = ThreadPoolExecutor(max_workers=_workers)
    return _pool


_env_workers = os.environ.get("PARFAIR_THREADS")
if _env_workers:
    set_worker_count(int(_env_workers))


def _map_step(fn: Callable[[int], object], count: int) -> list:
    """Apply fn to 0..count-1, possibly across worker threads. Results are
    placed by index, so scheduling cannot affect the output."""
    if _workers == 1 or count < 2 * _workers:
        return [fn(i) for i in range(count)]
    out: list = [None] * count
    chunk = -(-count // _workers)

    def run(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            out[i] = fn(i)

    pool = _ensure_pool()
    futures = [
        pool.submit(run, lo, min(lo + chunk, count)) for lo in range(0, count, chunk)
    ]
    for f in futures:
        f.result()
    return out


# ---------------------------------------------------------------------------
# Reduction


_REDUCE_IDENTITY = {
    "sum": 0,
    "min": math.inf,
    "max": -math.inf,
    "and": True,
    "or": False,
}


def _fold_op(op: str) -> Callable:
    if op == "sum":
        return lambda a, b: a + b
    if op == "min":
        return lambda a, b: a if a <= b else b
    if op == "max":
        return lambda a, b: a if a >= b else b
    if op == "and":
        return lambda a, b: a and b
    if op == "or":
        return lambda a, b: a or b
    raise ParfairError(f"unknown reduction op {op!r}")


def par_reduce(values: Iterable, op: str) -> tuple[object, CostMeter]:
    """Tournament-tree reduction. Depth is ceil(log2 k) for k elements
    (0 for k <= 1); an empty input yields the op's identity."""
    fold = _fold_op(op)
    items = list(values)
    k = len(items)
    if k == 0:
        return _REDUCE_IDENTITY[op], CostMeter(depth=0, work=0, peak_width=0)
    depth = work = peak = 0
    while len(items) > 1:
        pairs = len(items) // 2
        level = items  # snapshot for closures
        reduced = _map_step(lambda t: fold(level[2 * t], level[2 * t + 1]), pairs)
        if len(items) % 2:
            reduced.append(items[-1])
        items = reduced
        depth += 1
        work += pairs
        peak = max(peak, pairs)
    return items[0], CostMeter(depth=depth, work=work, peak_width=peak, rounds=depth)


# ---------------------------------------------------------------------------
# Bitonic sorting network


def bitonic_sort(keys: Sequence) -> tuple[list, tuple[int, ...], CostMeter]:
    """Sort keys nondecreasing with a bitonic network, padding to the next
    power of two with a reserved maximal sentinel.

    Returns (sorted keys, permutation, meter) where permutation[i] is the
    output position of input i. Ties break by original index, so the result
    equals a stable sort. Depth counts comparator stages:
    log2(K) * (log2(K)+1) / 2 for padded size K.
    """
    items = list(keys)
    k = len(items)
    if k <= 1:
        return items, tuple(range(k)), CostMeter(depth=0, work=0, peak_width=0)
    size_pow2 = 1 << (k - 1).bit_length()
    # slots: (sentinel flag, key, original index); sentinels sort last
    arr: list[tuple] = [(0, key, i) for i, key in enumerate(items)]
    arr += [(1, 0, k + pad) for pad in range(size_pow2 - k)]
    depth = work = 0
    half_width = size_pow2 // 2
    block = 2
    while block <= size_pow2:
        stride = block // 2
        while stride >= 1:
            pairs = [(i, i ^ stride) for i in range(size_pow2) if (i ^ stride) > i]
            if _DEBUG:
                touched = [i for pair in pairs for i in pair]
                assert len(touched) == len(set(touched)), "comparator stage writes a cell twice"

            def exchange(t: int, *, _pairs=pairs, _block=block) -> None:
                lo, hi = _pairs[t]
                ascending = (lo & _block) == 0
                if (arr[lo] > arr[hi]) == ascending:
                    arr[lo], arr[hi] = arr[hi], arr[lo]

            _map_step(exchange, len(pairs))
            depth += 1
            work += half_width
            stride //= 2
        block *= 2
    ordered = [(key, idx) for flag, key, idx in arr if flag == 0]
    perm = [0] * k
    for pos, (_, idx) in enumerate(ordered):
        perm[idx] = pos
    meter = CostMeter(depth=depth, work=work, peak_width=half_width)
    return [key for key, _ in ordered], tuple(perm), meter


# ---------------------------------------------------------------------------
# Matrix semirings: min-plus (shortest paths) and boolean (reachability)

_INT_INF = 1 << 55
_INF_THRESHOLD = 1 << 50
_MAX_FINITE = 1 << 30
_MAX_ORDER = 4096


@dataclass(frozen=True)
class SquareMatrix:
    """Square matrix over a declared semiring.

    kind "minplus": integer entries with math.inf as the absorbing element.
    kind "boolean": bool entries, or-and semiring.
    """

    order: int
    entries: tuple[tuple, ...]
    kind: str

    @classmethod
    def minplus(cls, rows: Sequence[Sequence]) -> "SquareMatrix":
        order = len(rows)
        out = []
        for i, row in enumerate(rows):
            if len(row) != order:
                raise ParfairError(f"row {i} has length {len(row)}, expected {order}")
            converted = []
            for v in row:
                if v == math.inf:
                    converted.append(math.inf)
                elif isinstance(v, int) and not isinstance(v, bool):
                    if abs(v) > _MAX_FINITE:
                        raise ParfairError(
                            f"min-plus entry {v} exceeds the supported magnitude "
                            f"{_MAX_FINITE}; rescale the weights"
                        )
                    converted.append(v)
                else:
                    raise ParfairError(f"min-plus entry must be int or +inf, got {v!r}")
            out.append(tuple(converted))
        return cls(order=order, entries=tuple(out), kind="minplus")

    @classmethod
    def boolean(cls, rows: Sequence[Sequence]) -> "SquareMatrix":
        order = len(rows)
        out = []
        for i, row in enumerate(rows):
            if len(row) != order:
                raise ParfairError(f"row {i} has length {len(row)}, expected {order}")
            out.append(tuple(bool(v) for v in row))
        return cls(order=order, entries=tuple(out), kind="boolean")

    def __getitem__(self, idx: tuple[int, int]):
        i, j = idx
        return self.entries[i][j]


def _ceil_log2(k: int) -> int:
    return (k - 1).bit_length() if k > 1 else 0


def _minplus_to_numpy(mat: SquareMatrix) -> np.ndarray:
    arr = np.full((mat.order, mat.order), _INT_INF, dtype=np.int64)
    for i, row in enumerate(mat.entries):
        for j, v in enumerate(row):
            if v != math.inf:
                arr[i, j] = v
    return arr


def _minplus_square(dist: np.ndarray) -> np.ndarray:
    order = dist.shape[0]
    out = np.empty_like(dist)
    for i in range(order):  # row-chunked to keep memory at O(order^2)
        out[i] = np.min(dist[i][:, None] + dist, axis=0)
    return np.where(out > _INF_THRESHOLD, _INT_INF, out)


def apsp_minplus(
    adj: SquareMatrix, *, allow_negative_cycles: bool = False
) -> tuple[SquareMatrix, CostMeter]:
    """All-pairs shortest paths by repeated min-plus squaring.

    The diagonal is initialized to 0 (empty paths), so entry (i, j) is the
    minimum weight over paths of any length. A diagonal entry below zero
    after closure signals a negative cycle; that raises NegativeCycleError
    unless the caller opts into cycle-detection mode.
    """
    if adj.kind != "minplus":
        raise ParfairError(f"apsp_minplus needs a min-plus matrix, got kind {adj.kind!r}")
    order = adj.order
    if order > _MAX_ORDER:
        raise ParfairError(f"matrix order {order} exceeds the supported {_MAX_ORDER}")
    steps = _ceil_log2(order)
    if order == 0:
        return adj, CostMeter(depth=0, work=0, peak_width=0)
    dist = _minplus_to_numpy(adj)
    idx = np.arange(order)
    dist[idx, idx] = np.minimum(dist[idx, idx], 0)
    rounds = 0
    for _ in range(steps):
        dist = _minplus_square(dist)
        rounds += 1
    has_negative = bool((dist[idx, idx] < 0).any())
    if has_negative and not allow_negative_cycles:
        raise NegativeCycleError("negative-weight cycle detected (diagonal below zero)")
    # accounting: each squaring runs order^2 reductions of order sums; the
    # final cycle check is one min-reduce over the diagonal
    product_depth = 1 + _ceil_log2(order)
    product_work = order**3 + order**2 * max(order - 1, 0)
    depth = rounds * product_depth + _ceil_log2(order)
    work = rounds * product_work + max(order - 1, 0)
    peak = order**3 if rounds else max(order - 1, 1 if depth else 0)
    meter = CostMeter(depth=depth, work=max(work, depth), peak_width=peak, rounds=rounds)
    rows = []
    for i in range(order):
        rows.append(
            tuple(math.inf if dist[i, j] >= _INF_THRESHOLD else int(dist[i, j]) for j in range(order))
        )
    return SquareMatrix(order=order, entries=tuple(rows), kind="minplus"), meter


def transitive_closure(adj: SquareMatrix) -> tuple[SquareMatrix, CostMeter]:
    """Reachability by paths of length >= 1, via boolean matrix squaring.

    Runs at most ceil(log2 order) squaring rounds (fewer if the relation
    stabilizes early); agrees with per-node depth-first search.
    """
    if adj.kind != "boolean":
        raise ParfairError(f"transitive_closure needs a boolean matrix, got kind {adj.kind!r}")
    order = adj.order
    if order == 0:
        return adj, CostMeter(depth=0, work=0, peak_width=0)
    reach = np.array(adj.entries, dtype=bool)
    rounds = 0
    for _ in range(_ceil_log2(order)):
        # float32 matmul is exact here: all partial sums are integers <= order
        product = (reach.astype(np.float32) @ reach.astype(np.float32)) > 0
        grown = reach | product
        rounds += 1
        if np.array_equal(grown, reach):
            break
        reach = grown
    product_depth = 2 + _ceil_log2(order)  # and-step, or-tree, merge or
    product_work = order**3 + order**2 * max(order - 1, 0) + order**2
    depth = rounds * product_depth
    work = rounds * product_work
    peak = order**3 if rounds else 0
    meter = CostMeter(depth=depth, work=work, peak_width=peak, rounds=rounds)
    rows = tuple(tuple(bool(x) for x in reach[i]) for i in range(order))
    return SquareMatrix(order=order, entries=rows, kind="boolean"), meter
