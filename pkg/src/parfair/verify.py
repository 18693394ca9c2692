"""Fairness verification: envy graphs and the EF / EF1 / EFX checkers.

Each checker mirrors the parallel tournament shape: per-pair (or per-item)
bits combined with reductions. Failure witnesses report the
lexicographically smallest violating ordered pair.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import pram
from .model import Allocation, Instance, require_effectively_complete

__all__ = ["EnvyGraph", "FairnessReport", "Witness", "envy_graph", "check_ef", "check_ef1", "check_efx"]


@dataclass(frozen=True)
class EnvyGraph:
    """Complete weighted digraph over agents; entry (i, j) is
    v_i(bundle_j) - v_i(bundle_i), so positive weight means i envies j."""

    n: int
    weights: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Witness:
    """A violating ordered pair (envier, envied).

    `items` depends on the property: empty for EF; the envied bundle for EF1
    (no single removal pacifies the envier); the single offending item for
    EFX (its removal leaves envy).
    """

    envier: int
    envied: int
    items: tuple[int, ...] = ()


@dataclass(frozen=True)
class FairnessReport:
    property: str  # "EF" | "EF1" | "EFX"
    holds: bool
    witness: Witness | None = None


def _bundle_value_matrix(inst: Instance, alloc: Allocation) -> list[list[int]]:
    """B[i][j] = agent i's value for agent j's bundle, each via parallel sum."""
    out = []
    for i in range(inst.n):
        row_vals = inst.values[i]
        row = []
        for j in range(inst.n):
            total, _ = pram.par_reduce([row_vals[g] for g in alloc.bundles[j]], "sum")
            row.append(int(total))
        out.append(row)
    return out


def envy_graph(inst: Instance, alloc: Allocation) -> EnvyGraph:
    from .model import check_allocation_against

    check_allocation_against(inst, alloc)
    bval = _bundle_value_matrix(inst, alloc)
    weights = tuple(
        tuple(bval[i][j] - bval[i][i] for j in range(inst.n)) for i in range(inst.n)
    )
    return EnvyGraph(n=inst.n, weights=weights)


def check_ef(inst: Instance, alloc: Allocation) -> FairnessReport:
    """Envy-freeness: every agent weakly prefers its own bundle."""
    require_effectively_complete(inst, alloc)
    bval = _bundle_value_matrix(inst, alloc)
    bits = []
    pairs = []
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            bits.append(bval[i][i] >= bval[i][j])
            pairs.append((i, j))
    holds, _ = pram.par_reduce(bits, "and")
    if holds:
        return FairnessReport(property="EF", holds=True)
    envier, envied = next(p for p, bit in zip(pairs, bits) if not bit)
    return FairnessReport(property="EF", holds=False, witness=Witness(envier, envied))


def _pair_bits_ef1(inst: Instance, alloc: Allocation, bval, i: int, j: int) -> list[bool]:
    bundle = sorted(alloc.bundles[j])
    if not bundle:
        return [bval[i][i] >= 0]  # empty envied bundle: vacuously fine
    row = inst.values[i]
    return [bval[i][i] >= bval[i][j] - row[g] for g in bundle]


def check_ef1(inst: Instance, alloc: Allocation) -> FairnessReport:
    """EF1: for each envied bundle some single good's removal kills the envy.

    Per-item bits, per-pair OR, global AND — the same tournament shape the
    parallel argument uses.
    """
    require_effectively_complete(inst, alloc)
    bval = _bundle_value_matrix(inst, alloc)
    pair_bits = []
    pairs = []
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            bits = _pair_bits_ef1(inst, alloc, bval, i, j)
            ok, _ = pram.par_reduce(bits, "or")
            pair_bits.append(bool(ok))
            pairs.append((i, j))
    holds, _ = pram.par_reduce(pair_bits, "and")
    if holds:
        return FairnessReport(property="EF1", holds=True)
    envier, envied = next(p for p, bit in zip(pairs, pair_bits) if not bit)
    witness = Witness(envier, envied, items=tuple(sorted(alloc.bundles[envied])))
    return FairnessReport(property="EF1", holds=False, witness=witness)


def check_efx(inst: Instance, alloc: Allocation) -> FairnessReport:
    """EFX: removing any single good from an envied bundle kills the envy.
    Same structure as EF1 with the per-pair OR replaced by AND."""
    require_effectively_complete(inst, alloc)
    bval = _bundle_value_matrix(inst, alloc)
    pair_bits = []
    pair_info = []
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            bits = _pair_bits_ef1(inst, alloc, bval, i, j)
            ok, _ = pram.par_reduce(bits, "and")
            pair_bits.append(bool(ok))
            pair_info.append((i, j, bits))
    holds, _ = pram.par_reduce(pair_bits, "and")
    if holds:
        return FairnessReport(property="EFX", holds=True)
    for (i, j, bits), ok in zip(pair_info, pair_bits):
        if not ok:
            bundle = sorted(alloc.bundles[j])
            offending = next(g for g, bit in zip(bundle, bits) if not bit)
            return FairnessReport(
                property="EFX", holds=False, witness=Witness(i, j, items=(offending,))
            )
    raise AssertionError("unreachable: failing EFX check without a failing pair")
