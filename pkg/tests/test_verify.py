import pytest

from conftest import (
    all_complete_allocations,
    naive_ef,
    naive_ef1,
    naive_efx,
    random_complete_allocation,
)

from parfair.model import (
    Allocation,
    IncompleteAllocationError,
    Instance,
    ValuationClass,
    random_instance,
)
from parfair.verify import check_ef, check_ef1, check_efx, envy_graph


def test_envy_graph_paper_example(paper_instance, paper_allocation):
    g = envy_graph(paper_instance, paper_allocation)
    assert g.weights[0][1] == 1
    assert g.weights[0][2] == -1
    assert g.weights[2][0] == 0
    assert g.weights[2][1] == -2
    assert all(g.weights[i][i] == 0 for i in range(3))


def test_envy_graph_weight_identity():
    for seed in range(30):
        inst = random_instance(4, 5, seed=seed, value_range=(0, 6), density=0.7)
        alloc = random_complete_allocation(inst, seed + 1)
        g = envy_graph(inst, alloc)
        for i in range(inst.n):
            own = inst.bundle_value(i, alloc.bundles[i])
            for j in range(inst.n):
                assert g.weights[i][j] + own == inst.bundle_value(i, alloc.bundles[j])


def test_envy_graph_single_agent():
    inst = Instance(1, 2, ((1, 2),), ValuationClass.ADDITIVE)
    g = envy_graph(inst, Allocation.from_bundles([{0, 1}], 2))
    assert g.weights == ((0,),)


def test_envy_graph_all_equal_bundle_values():
    inst = Instance(2, 2, ((3, 3), (1, 1)), ValuationClass.ADDITIVE)
    g = envy_graph(inst, Allocation.from_bundles([{0}, {1}], 2))
    assert g.weights == ((0, 0), (0, 0))


# ---------------------------------------------------------------------------
# EF


def test_ef_favorite_items():
    inst = Instance(2, 2, ((5, 1), (1, 5)), ValuationClass.ADDITIVE)
    assert check_ef(inst, Allocation.from_bundles([{0}, {1}], 2)).holds


def test_ef_paper_witness(paper_instance, paper_allocation):
    report = check_ef(paper_instance, paper_allocation)
    assert not report.holds
    assert (report.witness.envier, report.witness.envied) == (0, 1)


def test_ef_single_agent():
    inst = Instance(1, 1, ((3,),), ValuationClass.ADDITIVE)
    assert check_ef(inst, Allocation.from_bundles([{0}], 1)).holds


def test_checkers_reject_truly_incomplete():
    inst = Instance(2, 2, ((1, 1), (1, 1)), ValuationClass.ADDITIVE)
    partial = Allocation.from_bundles([{0}, set()], 2)
    with pytest.raises(IncompleteAllocationError):
        check_ef(inst, partial)


def test_checkers_accept_worthless_leftovers():
    inst = Instance(2, 2, ((1, 0), (1, 0)), ValuationClass.ADDITIVE)
    partial = Allocation.from_bundles([{0}, set()], 2)
    assert not partial.complete
    assert check_ef1(inst, partial).holds


# ---------------------------------------------------------------------------
# EF1 / EFX examples


def test_ef1_examples():
    inst = Instance(2, 2, ((3, 1), (3, 1)), ValuationClass.ADDITIVE)
    assert check_ef1(inst, Allocation.from_bundles([{0}, {1}], 2)).holds

    inst = Instance(2, 3, ((1, 1, 1), (1, 1, 1)), ValuationClass.ADDITIVE)
    report = check_ef1(inst, Allocation.from_bundles([set(), {0, 1, 2}], 3))
    assert not report.holds
    assert (report.witness.envier, report.witness.envied) == (0, 1)
    assert report.witness.items == (0, 1, 2)


def test_efx_examples():
    inst = Instance(2, 3, ((3, 2, 2), (3, 2, 2)), ValuationClass.ADDITIVE)
    assert check_efx(inst, Allocation.from_bundles([{0}, {1, 2}], 3)).holds

    inst = Instance(2, 3, ((1, 3, 1), (1, 3, 1)), ValuationClass.ADDITIVE)
    report = check_efx(inst, Allocation.from_bundles([{0}, {1, 2}], 3))
    assert not report.holds
    assert report.witness.items == (2,)  # dropping the cheap item leaves envy


def test_ef_implies_efx_implies_ef1_exhaustive():
    for seed in range(6):
        inst = random_instance(3, 3, seed=seed, value_range=(0, 4), density=0.8)
        for alloc in all_complete_allocations(inst):
            ef = check_ef(inst, alloc).holds
            efx = check_efx(inst, alloc).holds
            ef1 = check_ef1(inst, alloc).holds
            if ef:
                assert efx
            if efx:
                assert ef1


def test_checkers_agree_with_naive_oracles():
    import random as _random

    rng = _random.Random(99)
    for trial in range(300):
        n = rng.randint(1, 5)
        m = rng.randint(0, 8)
        inst = random_instance(n, m, seed=trial, value_range=(0, 6), density=0.75)
        alloc = random_complete_allocation(inst, trial + 7)
        assert check_ef(inst, alloc).holds == naive_ef(inst, alloc)
        assert check_ef1(inst, alloc).holds == naive_ef1(inst, alloc)
        assert check_efx(inst, alloc).holds == naive_efx(inst, alloc)


def test_witnesses_reverify():
    for seed in range(120):
        inst = random_instance(4, 6, seed=seed, value_range=(0, 5), density=0.8)
        alloc = random_complete_allocation(inst, seed + 3)
        ef = check_ef(inst, alloc)
        if not ef.holds:
            i, j = ef.witness.envier, ef.witness.envied
            assert inst.bundle_value(i, alloc.bundles[i]) < inst.bundle_value(i, alloc.bundles[j])
        ef1 = check_ef1(inst, alloc)
        if not ef1.holds:
            i, j = ef1.witness.envier, ef1.witness.envied
            own = inst.bundle_value(i, alloc.bundles[i])
            other = inst.bundle_value(i, alloc.bundles[j])
            assert ef1.witness.items == tuple(sorted(alloc.bundles[j]))
            for g in ef1.witness.items:
                assert own < other - inst.values[i][g]
        efx = check_efx(inst, alloc)
        if not efx.holds:
            i, j = efx.witness.envier, efx.witness.envied
            (g,) = efx.witness.items
            own = inst.bundle_value(i, alloc.bundles[i])
            assert own < inst.bundle_value(i, alloc.bundles[j]) - inst.values[i][g]


def test_witness_is_lexicographically_smallest():
    inst = Instance(3, 3, ((0, 5, 5), (0, 5, 5), (1, 1, 1)), ValuationClass.ADDITIVE)
    alloc = Allocation.from_bundles([{0}, {1}, {2}], 3)
    report = check_ef(inst, alloc)
    assert (report.witness.envier, report.witness.envied) == (0, 1)
