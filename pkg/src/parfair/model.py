"""Core domain types: instances, allocations, payments, file formats, and
brute-force oracles.

Conventions: agents and items are 0-based everywhere in code and 1-based in
files. All valuations are nonnegative integers, so every fairness comparison
is exact.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence


class ParfairError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstanceError(ParfairError):
    pass


class InvalidAllocationError(ParfairError):
    pass


class IncompleteAllocationError(ParfairError):
    """Raised when an operation requires a complete allocation but some
    positively-valued item is left unallocated."""


class EnumerationBoundError(ParfairError):
    """Raised when a brute-force oracle would exceed its enumeration guard."""


class ParseError(ParfairError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


#: Guard for brute-force enumeration loops (number of candidates).
ENUMERATION_CAP = 10**7


class ValuationClass(Enum):
    ADDITIVE = "additive"
    RESTRICTED_ADDITIVE = "restricted-additive"
    BINARY = "binary"
    IDENTICAL = "identical"

    @classmethod
    def from_token(cls, token: str) -> "ValuationClass":
        for member in cls:
            if member.value == token:
                return member
        raise ParseError(
            f"unknown valuation class {token!r}; expected one of "
            + ", ".join(m.value for m in cls)
        )


def column_inherent_values(
    values: Sequence[Sequence[int]], n: int, m: int
) -> list[int] | None:
    """Per-item inherent values, or None if some item has two distinct
    nonzero values (i.e. the matrix is not restricted additive).

    An item nobody values gets inherent value 0.
    """
    out = []
    for j in range(m):
        nonzero = {values[i][j] for i in range(n) if values[i][j] != 0}
        if len(nonzero) > 1:
            return None
        out.append(nonzero.pop() if nonzero else 0)
    return out


@dataclass(frozen=True)
class Instance:
    """A fair-division instance: n agents, m items, integer valuation matrix.

    `inherent_values` holds the distinct nonzero per-item values (decreasing)
    and is only present for restricted-additive instances; it is derived from
    the matrix when not supplied.
    """

    n: int
    m: int
    values: tuple[tuple[int, ...], ...]
    valuation_class: ValuationClass
    inherent_values: tuple[int, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidInstanceError(f"agent count must be a positive integer, got {self.n}")
        if not isinstance(self.m, int) or self.m < 0:
            raise InvalidInstanceError(f"item count must be a nonnegative integer, got {self.m}")
        rows = tuple(tuple(row) for row in self.values)
        object.__setattr__(self, "values", rows)
        if len(rows) != self.n:
            raise InvalidInstanceError(f"expected {self.n} value rows, got {len(rows)}")
        for i, row in enumerate(rows):
            if len(row) != self.m:
                raise InvalidInstanceError(
                    f"agent {i + 1}: expected {self.m} values, got {len(row)}"
                )
            for j, v in enumerate(row):
                if isinstance(v, bool) or not isinstance(v, int):
                    raise InvalidInstanceError(
                        f"value at agent {i + 1}, item {j + 1} is not an integer: {v!r}"
                    )
                if v < 0:
                    raise InvalidInstanceError(
                        f"value at agent {i + 1}, item {j + 1} is negative: {v}"
                    )
        self._check_class(rows)

    def _check_class(self, rows: tuple[tuple[int, ...], ...]) -> None:
        cls = self.valuation_class
        if cls is ValuationClass.BINARY:
            bad = [(i, j) for i in range(self.n) for j in range(self.m) if rows[i][j] > 1]
            if bad:
                i, j = bad[0]
                raise InvalidInstanceError(
                    f"binary instance has value {rows[i][j]} at agent {i + 1}, item {j + 1}"
                )
        if cls is ValuationClass.IDENTICAL:
            for i in range(1, self.n):
                if rows[i] != rows[0]:
                    raise InvalidInstanceError(
                        f"identical instance: agent {i + 1} row differs from agent 1"
                    )
        if cls is ValuationClass.RESTRICTED_ADDITIVE:
            per_item = column_inherent_values(rows, self.n, self.m)
            if per_item is None:
                for j in range(self.m):
                    nonzero = sorted({rows[i][j] for i in range(self.n) if rows[i][j]})
                    if len(nonzero) > 1:
                        raise InvalidInstanceError(
                            f"restricted-additive instance: item {j + 1} has distinct "
                            f"nonzero values {set(nonzero)}"
                        )
                raise InvalidInstanceError("restricted-additive class violated")
            derived = tuple(sorted({v for v in per_item if v}, reverse=True))
            if self.inherent_values is None:
                object.__setattr__(self, "inherent_values", derived)
            elif tuple(sorted(self.inherent_values, reverse=True)) != derived:
                raise InvalidInstanceError(
                    f"declared inherent values {self.inherent_values} do not match "
                    f"the matrix (expected {derived})"
                )
        elif self.inherent_values is not None:
            raise InvalidInstanceError(
                "inherent_values is only meaningful for restricted-additive instances"
            )

    @property
    def t(self) -> int:
        """Number of distinct nonzero inherent values (restricted additive)."""
        if self.inherent_values is None:
            raise InvalidInstanceError("t is only defined for restricted-additive instances")
        return len(self.inherent_values)

    @property
    def max_value(self) -> int:
        """Largest single-item value in the matrix (0 if there are no items)."""
        return max((v for row in self.values for v in row), default=0)

    @property
    def payment_cap(self) -> int:
        """Upper bound on any single agent's meaningful payment: m times the
        largest item value."""
        return self.m * self.max_value

    def value(self, agent: int, item: int) -> int:
        return self.values[agent][item]

    def bundle_value(self, agent: int, items: Iterable[int]) -> int:
        row = self.values[agent]
        return sum(row[j] for j in items)

    def items_valued_by_nobody(self) -> tuple[int, ...]:
        return tuple(
            j for j in range(self.m) if all(self.values[i][j] == 0 for i in range(self.n))
        )


@dataclass(frozen=True)
class Allocation:
    """An integral partition of items into per-agent bundles.

    `complete` is true iff the bundles cover every item. Partial allocations
    arise when algorithms leave items nobody values unallocated.
    """

    bundles: tuple[frozenset[int], ...]
    complete: bool

    @classmethod
    def from_bundles(cls, bundles: Iterable[Iterable[int]], m: int) -> "Allocation":
        sets = tuple(frozenset(b) for b in bundles)
        seen: set[int] = set()
        for i, b in enumerate(sets):
            for j in b:
                if not isinstance(j, int) or j < 0 or j >= m:
                    raise InvalidAllocationError(
                        f"agent {i + 1}: item index {j + 1} out of range 1..{m}"
                    )
                if j in seen:
                    raise InvalidAllocationError(
                        f"item {j + 1} assigned to more than one agent"
                    )
                seen.add(j)
        return cls(bundles=sets, complete=len(seen) == m)

    @property
    def n(self) -> int:
        return len(self.bundles)

    def allocated(self) -> frozenset[int]:
        out: set[int] = set()
        for b in self.bundles:
            out |= b
        return frozenset(out)

    def unallocated(self, m: int) -> tuple[int, ...]:
        got = self.allocated()
        return tuple(j for j in range(m) if j not in got)


@dataclass(frozen=True)
class BundleValue:
    """An agent's additive value for a bundle of items."""

    agent: int
    bundle: frozenset[int]
    value: int

    @classmethod
    def compute(cls, inst: Instance, agent: int, bundle: Iterable[int]) -> "BundleValue":
        b = frozenset(bundle)
        return cls(agent=agent, bundle=b, value=inst.bundle_value(agent, b))


@dataclass(frozen=True)
class PaymentVector:
    """Nonnegative integer payment per agent."""

    q: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(self.q))
        for i, qi in enumerate(self.q):
            if not isinstance(qi, int) or isinstance(qi, bool) or qi < 0:
                raise ParfairError(f"payment for agent {i + 1} must be a nonnegative integer")

    def __iter__(self):
        return iter(self.q)

    def __len__(self):
        return len(self.q)


@dataclass(frozen=True)
class PaymentConstraint:
    """Implication on payments: if agent i is paid more than x dollars, then
    agent j must be paid more than y dollars. i == j is allowed."""

    i: int
    x: int
    j: int
    y: int

    def satisfied_by(self, q: Sequence[int]) -> bool:
        return not (q[self.i] > self.x) or q[self.j] > self.y


def check_allocation_against(inst: Instance, alloc: Allocation) -> None:
    """Validate an allocation's shape against an instance."""
    if alloc.n != inst.n:
        raise InvalidAllocationError(f"allocation has {alloc.n} bundles, instance has {inst.n} agents")
    for b in alloc.bundles:
        for j in b:
            if j < 0 or j >= inst.m:
                raise InvalidAllocationError(f"item index {j + 1} out of range 1..{inst.m}")


def effectively_complete(inst: Instance, alloc: Allocation) -> bool:
    """True if every unallocated item has zero value to every agent.

    Fairness and efficiency predicates are insensitive to such leftovers, and
    several algorithms legitimately leave them out.
    """
    if alloc.complete:
        return True
    worthless = set(inst.items_valued_by_nobody())
    return all(j in worthless for j in alloc.unallocated(inst.m))


def require_effectively_complete(inst: Instance, alloc: Allocation) -> None:
    check_allocation_against(inst, alloc)
    if not effectively_complete(inst, alloc):
        missing = [
            j + 1
            for j in alloc.unallocated(inst.m)
            if any(inst.values[i][j] > 0 for i in range(inst.n))
        ]
        raise IncompleteAllocationError(
            f"allocation leaves positively-valued items unallocated: {missing}"
        )


def envy_weight(inst: Instance, alloc: Allocation, i: int, j: int) -> int:
    """Weight of the envy edge i -> j: v_i(bundle_j) - v_i(bundle_i)."""
    return inst.bundle_value(i, alloc.bundles[j]) - inst.bundle_value(i, alloc.bundles[i])


def envy_free_with_payments(inst: Instance, alloc: Allocation, q: Sequence[int]) -> bool:
    """Does the payment vector eliminate all envy from the allocation?"""
    own = [inst.bundle_value(i, alloc.bundles[i]) for i in range(inst.n)]
    for i in range(inst.n):
        for j in range(inst.n):
            if own[i] + q[i] < inst.bundle_value(i, alloc.bundles[j]) + q[j]:
                return False
    return True


# ---------------------------------------------------------------------------
# Validation entry point for raw (file-shaped) data


def validate_instance(raw: Mapping[str, object]) -> Instance:
    """Build an Instance from a raw mapping with keys n, m, class, values and
    optionally inherent_values. Raises InvalidInstanceError on any violation."""
    try:
        n = raw["n"]
        m = raw["m"]
        cls_token = raw["class"]
        values = raw["values"]
    except KeyError as exc:
        raise InvalidInstanceError(f"missing field {exc.args[0]!r}") from None
    if isinstance(cls_token, ValuationClass):
        vclass = cls_token
    else:
        vclass = ValuationClass.from_token(str(cls_token))
    inherent = raw.get("inherent_values")
    if not isinstance(n, int) or not isinstance(m, int):
        raise InvalidInstanceError("n and m must be integers")
    if not isinstance(values, Sequence):
        raise InvalidInstanceError("values must be a sequence of rows")
    return Instance(
        n=n,
        m=m,
        values=tuple(tuple(row) for row in values),  # type: ignore[arg-type]
        valuation_class=vclass,
        inherent_values=tuple(inherent) if inherent is not None else None,  # type: ignore[arg-type]
    )


# ---------------------------------------------------------------------------
# Brute-force oracles (ground truth; intentionally simple and sequential)


def _utility_profile(inst: Instance, assignment: Sequence[int]) -> list[int]:
    out = [0] * inst.n
    for j, owner in enumerate(assignment):
        out[owner] += inst.values[owner][j]
    return out


def pareto_dominates(profile_a: Sequence[int], profile_b: Sequence[int]) -> bool:
    """a dominates b: at least as good for everyone, better for someone."""
    ge = all(x >= y for x, y in zip(profile_a, profile_b))
    gt = any(x > y for x, y in zip(profile_a, profile_b))
    return ge and gt


def brute_force_po_check(inst: Instance, alloc: Allocation) -> bool:
    """Is the allocation Pareto optimal among all complete integral
    allocations? Enumerates all n^m assignments; guarded by ENUMERATION_CAP."""
    require_effectively_complete(inst, alloc)
    if inst.n**inst.m > ENUMERATION_CAP:
        raise EnumerationBoundError(
            f"{inst.n}^{inst.m} allocations exceed the enumeration guard {ENUMERATION_CAP}"
        )
    target = [inst.bundle_value(i, alloc.bundles[i]) for i in range(inst.n)]
    for assignment in itertools.product(range(inst.n), repeat=inst.m):
        if pareto_dominates(_utility_profile(inst, assignment), target):
            return False
    return True


def brute_force_min_payments(
    inst: Instance,
    alloc: Allocation,
    constraints: Sequence[PaymentConstraint] = (),
    cap: int | None = None,
) -> PaymentVector | None:
    """Componentwise-minimal envy-eliminating, constraint-satisfying payment
    vector in [0, cap]^n, or None if no such vector exists.

    The feasible set is closed under componentwise minimum (envy constraints
    are difference constraints; implications are min-closed), which the oracle
    re-verifies by checking that the collected minimum is itself feasible.
    """
    require_effectively_complete(inst, alloc)
    if cap is None:
        cap = inst.payment_cap
    if (cap + 1) ** inst.n > ENUMERATION_CAP:
        raise EnumerationBoundError(
            f"({cap}+1)^{inst.n} payment vectors exceed the enumeration guard {ENUMERATION_CAP}"
        )
    bval = [
        [inst.bundle_value(i, alloc.bundles[j]) for j in range(inst.n)]
        for i in range(inst.n)
    ]

    def feasible(q: Sequence[int]) -> bool:
        for i in range(inst.n):
            base = bval[i][i] + q[i]
            for j in range(inst.n):
                if base < bval[i][j] + q[j]:
                    return False
        return all(c.satisfied_by(q) for c in constraints)

    mins: list[int] | None = None
    for q in itertools.product(range(cap + 1), repeat=inst.n):
        if feasible(q):
            mins = list(q) if mins is None else [min(a, b) for a, b in zip(mins, q)]
    if mins is None:
        return None
    if not feasible(mins):  # min-closure sanity check
        raise ParfairError("feasible set unexpectedly not closed under componentwise minimum")
    return PaymentVector(tuple(mins))


# ---------------------------------------------------------------------------
# Random generators (deterministic functions of their parameters and seed)


def random_instance(
    n: int,
    m: int,
    valuation_class: ValuationClass = ValuationClass.ADDITIVE,
    seed: int = 0,
    value_range: tuple[int, int] = (1, 10),
    density: float = 1.0,
    t: int | None = None,
) -> Instance:
    """Seeded random instance of the requested valuation class.

    `density` is the probability that an agent positively values an item.
    `t` caps the number of distinct inherent values (restricted additive
    only); the realized count can be lower if chance thins some value out.
    """
    lo, hi = value_range
    if lo < 0 or hi < lo:
        raise ParfairError(f"invalid value range {value_range}")
    if not 0.0 <= density <= 1.0:
        raise ParfairError(f"density must lie in [0, 1], got {density}")
    lo = max(lo, 1)  # nonzero draws come from [max(lo,1), hi]
    if hi < lo:
        hi = lo
    rng = random.Random(seed)

    def draw() -> int:
        return rng.randint(lo, hi)

    cls = valuation_class
    if cls is ValuationClass.BINARY:
        rows = [[1 if rng.random() < density else 0 for _ in range(m)] for _ in range(n)]
    elif cls is ValuationClass.IDENTICAL:
        base = [draw() if rng.random() < density else 0 for _ in range(m)]
        rows = [list(base) for _ in range(n)]
    elif cls is ValuationClass.RESTRICTED_ADDITIVE:
        want_t = min(t if t is not None else 3, m, hi - lo + 1)
        pool = rng.sample(range(lo, hi + 1), want_t) if want_t > 0 else []
        item_value = [rng.choice(pool) if pool else 0 for _ in range(m)]
        rows = [
            [item_value[j] if rng.random() < density else 0 for j in range(m)]
            for _ in range(n)
        ]
    else:
        rows = [[draw() if rng.random() < density else 0 for _ in range(m)] for _ in range(n)]
    return Instance(n=n, m=m, values=tuple(tuple(r) for r in rows), valuation_class=cls)


# ---------------------------------------------------------------------------
# File formats. All indices are 1-based in files; '#' starts a comment.


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def parse_instance_text(text: str) -> Instance:
    """Parse the instance file format:

        n 3
        m 3
        class additive
        values
        1 3 2
        0 1 0
        2 0 2

    The values section holds n rows of m integers and is omitted when m = 0.
    """
    lines = _content_lines(text)
    pos = 0

    def expect(keyword: str) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"unexpected end of file, expected {keyword!r}")
        lineno, line = lines[pos]
        parts = line.split()
        if parts[0] != keyword:
            raise ParseError(f"expected {keyword!r}, found {parts[0]!r}", lineno)
        pos += 1
        return lineno, parts[1:]

    def one_int(keyword: str) -> int:
        lineno, rest = expect(keyword)
        if len(rest) != 1:
            raise ParseError(f"{keyword} takes exactly one integer", lineno)
        try:
            return int(rest[0])
        except ValueError:
            raise ParseError(f"{keyword} is not an integer: {rest[0]!r}", lineno) from None

    n = one_int("n")
    m = one_int("m")
    lineno, rest = expect("class")
    if len(rest) != 1:
        raise ParseError("class takes exactly one token", lineno)
    try:
        vclass = ValuationClass.from_token(rest[0])
    except ParseError as exc:
        raise ParseError(str(exc), lineno) from None
    rows: list[list[int]] = []
    if m > 0:
        expect("values")
        for _ in range(n):
            if pos >= len(lines):
                raise ParseError(f"expected {n} value rows, found {len(rows)}")
            lineno, line = lines[pos]
            pos += 1
            parts = line.split()
            try:
                row = [int(p) for p in parts]
            except ValueError:
                raise ParseError(f"non-integer value in row: {line!r}", lineno) from None
            if len(row) != m:
                raise ParseError(f"expected {m} values in row, got {len(row)}", lineno)
            rows.append(row)
    else:
        rows = [[] for _ in range(n)]
    if pos < len(lines):
        raise ParseError(f"trailing content: {lines[pos][1]!r}", lines[pos][0])
    try:
        return Instance(n=n, m=m, values=tuple(tuple(r) for r in rows), valuation_class=vclass)
    except InvalidInstanceError as exc:
        raise ParseError(str(exc)) from None


def instance_to_text(inst: Instance) -> str:
    lines = [f"n {inst.n}", f"m {inst.m}", f"class {inst.valuation_class.value}"]
    if inst.m > 0:
        lines.append("values")
        lines.extend(" ".join(str(v) for v in row) for row in inst.values)
    return "\n".join(lines) + "\n"


def parse_allocation_text(text: str, inst: Instance) -> Allocation:
    """Parse an allocation file: one line per agent with 1-based item indices,
    '-' for an empty bundle."""
    lines = _content_lines(text)
    if len(lines) != inst.n:
        raise ParseError(f"expected {inst.n} bundle lines, found {len(lines)}")
    bundles: list[set[int]] = []
    for lineno, line in lines:
        if line == "-":
            bundles.append(set())
            continue
        try:
            items = [int(p) for p in line.split()]
        except ValueError:
            raise ParseError(f"non-integer item index in {line!r}", lineno) from None
        for item in items:
            if item < 1 or item > inst.m:
                raise ParseError(f"item index {item} out of range 1..{inst.m}", lineno)
        bundles.append({item - 1 for item in items})
    try:
        return Allocation.from_bundles(bundles, inst.m)
    except InvalidAllocationError as exc:
        raise ParseError(str(exc)) from None


def allocation_to_text(alloc: Allocation) -> str:
    lines = []
    for bundle in alloc.bundles:
        lines.append(" ".join(str(j + 1) for j in sorted(bundle)) if bundle else "-")
    return "\n".join(lines) + "\n"


def parse_payments_text(text: str, n: int) -> PaymentVector:
    lines = _content_lines(text)
    if len(lines) != n:
        raise ParseError(f"expected {n} payment lines, found {len(lines)}")
    q = []
    for lineno, line in lines:
        try:
            q.append(int(line))
        except ValueError:
            raise ParseError(f"non-integer payment {line!r}", lineno) from None
        if q[-1] < 0:
            raise ParseError(f"negative payment {q[-1]}", lineno)
    return PaymentVector(tuple(q))


def payments_to_text(payments: PaymentVector) -> str:
    return "\n".join(str(qi) for qi in payments.q) + "\n"


def parse_constraints_text(text: str, n: int, cap: int) -> tuple[PaymentConstraint, ...]:
    """Parse constraint records 'i x j y' (agents 1-based): if agent i is paid
    more than x, agent j must be paid more than y."""
    out = []
    for lineno, line in _content_lines(text):
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(f"expected 'i x j y', got {line!r}", lineno)
        try:
            i, x, j, y = (int(p) for p in parts)
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", lineno) from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"agent index out of range 1..{n} in {line!r}", lineno)
        if not (0 <= x <= cap and 0 <= y <= cap):
            raise ParseError(f"dollar level out of range 0..{cap} in {line!r}", lineno)
        out.append(PaymentConstraint(i=i - 1, x=x, j=j - 1, y=y))
    return tuple(out)


def constraints_to_text(constraints: Sequence[PaymentConstraint]) -> str:
    lines = [f"{c.i + 1} {c.x} {c.j + 1} {c.y}" for c in constraints]
    return "\n".join(lines) + ("\n" if lines else "")
