import pytest

from fopz.services import ksum
from fopz.services.ksum import KSumInstance
from fopz.utils.errors import CapExceededError, KSumFormatError, ReductionError


def random_weighted(rng, k, n, bound=8, max_mult=4):
    lists = []
    for _ in range(k):
        values = rng.integers(-bound, bound + 1, size=n).tolist()
        lists.append({int(v): int(rng.integers(1, max_mult + 1)) for v in values})
    return KSumInstance.from_weighted(lists, int(rng.integers(-bound, bound + 1)))


def test_solve_examples():
    assert ksum.solve(KSumInstance.from_values([[1, 2], [3], [-4]], 0))
    assert not ksum.solve(KSumInstance.from_values([[1], [1], [1]], 5))


def test_solve_empty_list():
    assert not ksum.solve(KSumInstance.from_values([[1], []], 1))


def test_solve_cap():
    inst = KSumInstance.from_values([range(20)] * 4, 1000)
    with pytest.raises(CapExceededError):
        ksum.solve(inst, cap=100)


def test_count_examples():
    assert ksum.count(KSumInstance.from_weighted([{0: 2}, {0: 3}, {0: 1}], 0)) == 6
    assert ksum.count(KSumInstance.from_values([[1, -1], [1, -1], [0]], 0)) == 2


def test_from_values_merges_repeats():
    inst = KSumInstance.from_values([[0, 0, 1], [0]], 0)
    assert inst.lists[0] == ((0, 2), (1, 1))
    assert ksum.count(inst) == 2


def test_instance_validation():
    with pytest.raises(KSumFormatError):
        KSumInstance((((1, 1),),), 0)
    with pytest.raises(KSumFormatError):
        KSumInstance((((1, 1), (1, 2)), ((0, 1),)), 0)
    with pytest.raises(KSumFormatError):
        KSumInstance((((1, 0),), ((0, 1),)), 0)


def test_solve_and_count_match_brute(rng):
    for _ in range(200):
        k = int(rng.integers(2, 5))
        inst = random_weighted(rng, k, int(rng.integers(1, 7)))
        expected = ksum.brute_count(inst)
        assert ksum.count(inst) == expected
        assert ksum.solve(inst) == (expected > 0)


def test_allints_examples():
    report = ksum.count_allints_3(KSumInstance.from_values([[0, 1], [0], [0]], 0))
    assert report.per_first_element == {0: 1, 1: 0}
    assert report.total == 1
    weighted = ksum.count_allints_3(KSumInstance.from_weighted([{0: 1}, {0: 2}, {0: 2}], 0))
    assert weighted.per_first_element[0] == 4


def test_allints_requires_three_lists():
    with pytest.raises(KSumFormatError):
        ksum.count_allints_3(KSumInstance.from_values([[0], [0]], 0))


def test_allints_matches_per_value_brute(rng):
    for _ in range(50):
        inst = random_weighted(rng, 3, int(rng.integers(1, 12)))
        report = ksum.count_allints_3(inst)
        for a, _ in inst.lists[0]:
            rest = KSumInstance((((a, 1),),) + inst.lists[1:], inst.target)
            assert report.per_first_element[a] == ksum.brute_count(rest)
        assert report.total == ksum.brute_count(inst)


def test_expand_bounded_unit_multiplicities():
    inst = KSumInstance.from_values([[1, 2], [3], [-4]], 0)
    expansion = ksum.expand_bounded(inst, 1)
    assert expansion.targets == (0,)
    assert ksum.count_bounded_expansion(inst, 1) == ksum.count(inst)


def test_expand_bounded_rejects_heavy():
    inst = KSumInstance.from_weighted([{0: 3}, {0: 1}], 0)
    with pytest.raises(ReductionError):
        ksum.expand_bounded(inst, 2)


def test_bounded_expansion_preserves_count(rng):
    for _ in range(60):
        inst = random_weighted(rng, int(rng.integers(2, 4)), int(rng.integers(1, 5)), max_mult=3)
        assert ksum.count_bounded_expansion(inst, inst.max_multiplicity) == ksum.brute_count(inst)


def test_heavylight_examples():
    unit = KSumInstance.from_values([[1, 2], [3, -1], [-4, 0]], 0)
    assert ksum.count_heavylight(unit, 1) == ksum.count(unit)
    heavy = KSumInstance.from_weighted([{0: 10}, {0: 1}, {0: 1}], 0)
    assert ksum.count_heavylight(heavy, 2) == 10


def test_heavylight_rejects_even_k():
    with pytest.raises(ReductionError):
        ksum.count_heavylight(KSumInstance.from_values([[0], [0]], 0), 1)


@pytest.mark.parametrize("theta", [1, 2, 5])
def test_heavylight_matches_brute(rng, theta):
    for _ in range(40):
        k = 3 if rng.random() < 0.7 else 5
        inst = random_weighted(rng, k, int(rng.integers(1, 5)), bound=5, max_mult=8)
        assert ksum.count_heavylight(inst, theta) == ksum.brute_count(inst)
