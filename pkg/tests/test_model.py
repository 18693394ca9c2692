import itertools

import pytest

from conftest import all_complete_allocations, random_complete_allocation

from parfair.model import (
    Allocation,
    EnumerationBoundError,
    Instance,
    InvalidAllocationError,
    InvalidInstanceError,
    ParseError,
    PaymentConstraint,
    ValuationClass,
    allocation_to_text,
    brute_force_min_payments,
    brute_force_po_check,
    constraints_to_text,
    envy_free_with_payments,
    instance_to_text,
    parse_allocation_text,
    parse_constraints_text,
    parse_instance_text,
    parse_payments_text,
    payments_to_text,
    random_instance,
    validate_instance,
)


def test_validate_binary_identity_matrix():
    inst = validate_instance({"n": 2, "m": 2, "class": "binary", "values": [[1, 0], [0, 1]]})
    assert inst.valuation_class is ValuationClass.BINARY


def test_restricted_additive_rejects_two_nonzero_values():
    with pytest.raises(InvalidInstanceError, match="item 1"):
        validate_instance(
            {"n": 2, "m": 2, "class": "restricted-additive", "values": [[2, 0], [3, 0]]}
        )


def test_paper_instance_is_valid_additive(paper_instance):
    assert paper_instance.max_value == 3
    assert paper_instance.payment_cap == 9


def test_negative_and_non_integer_values_rejected():
    with pytest.raises(InvalidInstanceError, match="negative"):
        Instance(1, 1, ((-1,),), ValuationClass.ADDITIVE)
    with pytest.raises(InvalidInstanceError, match="not an integer"):
        Instance(1, 1, ((1.5,),), ValuationClass.ADDITIVE)


def test_dimension_mismatch_rejected():
    with pytest.raises(InvalidInstanceError, match="expected 2 values"):
        Instance(1, 2, ((1,),), ValuationClass.ADDITIVE)
    with pytest.raises(InvalidInstanceError, match="value rows"):
        Instance(2, 1, ((1,),), ValuationClass.ADDITIVE)


def test_identical_rows_must_match():
    with pytest.raises(InvalidInstanceError, match="differs"):
        Instance(2, 1, ((1,), (2,)), ValuationClass.IDENTICAL)


def test_inherent_values_derived_and_checked():
    inst = Instance(2, 3, ((5, 0, 2), (5, 2, 0)), ValuationClass.RESTRICTED_ADDITIVE)
    assert inst.inherent_values == (5, 2)
    assert inst.t == 2
    with pytest.raises(InvalidInstanceError, match="inherent"):
        Instance(2, 1, ((1,), (1,)), ValuationClass.ADDITIVE, inherent_values=(1,))


def test_allocation_disjointness_and_range():
    with pytest.raises(InvalidAllocationError, match="more than one"):
        Allocation.from_bundles([{0}, {0}], 2)
    with pytest.raises(InvalidAllocationError, match="out of range"):
        Allocation.from_bundles([{5}], 2)
    partial = Allocation.from_bundles([{0}, set()], 2)
    assert not partial.complete
    assert partial.unallocated(2) == (1,)


# ---------------------------------------------------------------------------
# Pareto oracle


def test_po_single_agent_always_true():
    inst = Instance(1, 3, ((1, 2, 3),), ValuationClass.ADDITIVE)
    assert brute_force_po_check(inst, Allocation.from_bundles([{0, 1, 2}], 3))


def test_po_swap_dominates():
    inst = Instance(2, 2, ((1, 0), (0, 1)), ValuationClass.ADDITIVE)
    bad = Allocation.from_bundles([{1}, {0}], 2)
    good = Allocation.from_bundles([{0}, {1}], 2)
    assert not brute_force_po_check(inst, bad)
    assert brute_force_po_check(inst, good)


def test_po_paper_allocation(paper_instance, paper_allocation):
    assert brute_force_po_check(paper_instance, paper_allocation)


def test_po_guard_trips():
    inst = random_instance(6, 10, seed=1)
    alloc = random_complete_allocation(inst, 2)
    with pytest.raises(EnumerationBoundError):
        brute_force_po_check(inst, alloc)


def test_po_agrees_with_double_loop_definition():
    # independent re-statement: compare every pair of allocations directly,
    # over every shape with n^m <= 256
    shapes = [(2, 4), (3, 4), (4, 4), (2, 8), (3, 5), (4, 3), (16, 2)]
    for seed, (n, m) in enumerate(shapes):
        inst = random_instance(n, m, seed=seed, value_range=(0, 4))
        assert inst.n**inst.m <= 256
        allocs = list(all_complete_allocations(inst))
        profiles = [
            [inst.bundle_value(i, a.bundles[i]) for i in range(inst.n)] for a in allocs
        ]
        for idx, alloc in enumerate(allocs):
            expected = True
            for other in profiles:
                ge = all(x >= y for x, y in zip(other, profiles[idx]))
                gt = any(x > y for x, y in zip(other, profiles[idx]))
                if ge and gt:
                    expected = False
                    break
            assert brute_force_po_check(inst, alloc) == expected


# ---------------------------------------------------------------------------
# Minimal payments oracle


def test_min_payments_zero_when_no_envy():
    inst = Instance(2, 2, ((5, 1), (1, 5)), ValuationClass.ADDITIVE)
    alloc = Allocation.from_bundles([{0}, {1}], 2)
    assert brute_force_min_payments(inst, alloc).q == (0, 0)


def test_min_payments_paper_values(paper_instance, paper_allocation):
    assert brute_force_min_payments(paper_instance, paper_allocation).q == (1, 0, 1)
    constrained = brute_force_min_payments(
        paper_instance, paper_allocation, (PaymentConstraint(i=0, x=0, j=1, y=0),)
    )
    assert constrained.q == (2, 1, 2)


def test_min_payments_properties():
    for seed in range(25):
        inst = random_instance(3, 3, seed=seed, value_range=(0, 3), density=0.8)
        alloc = random_complete_allocation(inst, seed + 100)
        result = brute_force_min_payments(inst, alloc)
        if result is None:
            continue
        assert envy_free_with_payments(inst, alloc, result.q)
        # every other feasible vector is componentwise >= the reported one
        cap = inst.payment_cap
        for q in itertools.product(range(cap + 1), repeat=inst.n):
            if envy_free_with_payments(inst, alloc, q):
                assert all(a <= b for a, b in zip(result.q, q))


def test_min_payments_guard_trips(paper_instance, paper_allocation):
    with pytest.raises(EnumerationBoundError):
        brute_force_min_payments(paper_instance, paper_allocation, cap=10**4)


# ---------------------------------------------------------------------------
# Generators


def test_random_instance_empty_items():
    inst = random_instance(2, 0, seed=3)
    assert inst.m == 0 and inst.values == ((), ())


def test_random_instance_deterministic():
    a = random_instance(4, 6, ValuationClass.RESTRICTED_ADDITIVE, seed=7, t=2, density=0.5)
    b = random_instance(4, 6, ValuationClass.RESTRICTED_ADDITIVE, seed=7, t=2, density=0.5)
    assert a == b
    c = random_instance(4, 6, ValuationClass.RESTRICTED_ADDITIVE, seed=8, t=2, density=0.5)
    assert a != c  # overwhelmingly likely for this size


def test_random_restricted_instances_validate():
    for seed in range(20):
        inst = random_instance(3, 5, ValuationClass.RESTRICTED_ADDITIVE, seed=seed, t=2, density=0.5)
        # reconstructing through the validator must accept the same data
        again = validate_instance(
            {"n": inst.n, "m": inst.m, "class": "restricted-additive", "values": inst.values}
        )
        assert again == inst


def test_random_classes_respect_invariants():
    binary = random_instance(3, 6, ValuationClass.BINARY, seed=0, density=0.5)
    assert all(v in (0, 1) for row in binary.values for v in row)
    ident = random_instance(3, 6, ValuationClass.IDENTICAL, seed=0)
    assert len(set(ident.values)) == 1


# ---------------------------------------------------------------------------
# Serialization round trips


def test_instance_round_trip():
    for seed, cls in enumerate(ValuationClass):
        inst = random_instance(3, 4, cls, seed=seed, density=0.7, t=2)
        assert parse_instance_text(instance_to_text(inst)) == inst


def test_instance_round_trip_no_items():
    inst = random_instance(2, 0, seed=0)
    assert parse_instance_text(instance_to_text(inst)) == inst


def test_allocation_round_trip(paper_instance):
    alloc = Allocation.from_bundles([{2}, set(), {0, 1}], 3)
    text = allocation_to_text(alloc)
    assert "-" in text  # empty bundle marker
    assert parse_allocation_text(text, paper_instance) == alloc


def test_payments_and_constraints_round_trip():
    from parfair.model import PaymentVector

    payments = PaymentVector((0, 3, 1))
    assert parse_payments_text(payments_to_text(payments), 3) == payments
    constraints = (PaymentConstraint(0, 1, 2, 3), PaymentConstraint(1, 0, 1, 9))
    assert parse_constraints_text(constraints_to_text(constraints), 3, 9) == constraints


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as err:
        parse_instance_text("n 2\nm 1\nclass additive\nvalues\n1\nx\n")
    assert "line" in str(err.value)
    with pytest.raises(ParseError, match="class"):
        parse_instance_text("n 1\nm 0\nclass nope\n")
