"""Fair division of indivisible goods with deterministic-parallel primitives.

Submodules: model (types, files, oracles), pram (instrumented parallel
primitives), verify (EF/EF1/EFX), allocate (Round-Robin and friends),
matching (bucketed matching for restricted additive values), subsidy
(envy-eliminating and constrained payments), hardness (the greedy-matching
reduction), cli.
"""

from .model import (
    Allocation,
    BundleValue,
    Instance,
    ParfairError,
    PaymentConstraint,
    PaymentVector,
    ValuationClass,
    brute_force_min_payments,
    brute_force_po_check,
    random_instance,
    validate_instance,
)
from .pram import CostMeter, SquareMatrix, apsp_minplus, bitonic_sort, par_reduce, transitive_closure
from .verify import EnvyGraph, FairnessReport, check_ef, check_ef1, check_efx, envy_graph
from .allocate import (
    AgentOrder,
    ef1_fpo_two_agents,
    ef1_identical,
    round_robin,
    welfare_max_allocation,
)
from .matching import alpha_round, build_bucketed_graph, ef1_po_restricted, max_weight_perfect_matching
from .subsidy import constrained_payments, envy_eliminating_payments, is_envy_freeable
from .hardness import BipartiteGraph, check_equivalence, lfmm, reduce_lfmm_to_rr

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "AgentOrder",
    "BipartiteGraph",
    "BundleValue",
    "CostMeter",
    "EnvyGraph",
    "FairnessReport",
    "Instance",
    "ParfairError",
    "PaymentConstraint",
    "PaymentVector",
    "SquareMatrix",
    "ValuationClass",
    "alpha_round",
    "apsp_minplus",
    "bitonic_sort",
    "brute_force_min_payments",
    "brute_force_po_check",
    "build_bucketed_graph",
    "check_ef",
    "check_ef1",
    "check_efx",
    "check_equivalence",
    "constrained_payments",
    "ef1_fpo_two_agents",
    "ef1_identical",
    "ef1_po_restricted",
    "envy_eliminating_payments",
    "envy_graph",
    "is_envy_freeable",
    "lfmm",
    "max_weight_perfect_matching",
    "par_reduce",
    "random_instance",
    "reduce_lfmm_to_rr",
    "round_robin",
    "transitive_closure",
    "validate_instance",
    "welfare_max_allocation",
]
