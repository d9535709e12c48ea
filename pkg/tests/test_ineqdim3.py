import pytest

from fopz.scripts.generate import random_dataset, random_dim3_formula
from fopz.services import baseline, ineqdim3
from fopz.services.dataset import bind
from fopz.services.formula import parse
from fopz.utils.errors import CapExceededError, EngineInapplicableError, PrefixError

from conftest import make_instance, scalars

SUMSET = (
    "forall a in A forall b in B exists c in C: "
    "c[1] <= a[1] + b[1] and a[1] + b[1] <= c[1] + t"
)


def dim3_instance(rng, shape, n, d=1):
    text = random_dim3_formula(rng, shape, d=d)
    return bind(parse(text), random_dataset(rng, 3, n, d, bound=8))


def test_sumset_trivial_true():
    inst = make_instance(SUMSET, {"A": scalars([0]), "B": scalars([0]), "C": scalars([0])}, {"t": 0})
    assert ineqdim3.decide_ineqdim3(inst)


def test_one_uncovered_pair():
    inst = make_instance(
        "forall a in A forall b in B exists c in C: a[1] + b[1] <= c[1]",
        {"A": scalars([0, 1]), "B": scalars([0, 1]), "C": scalars([1])},
    )
    assert not ineqdim3.decide_ineqdim3(inst)
    _, counts = ineqdim3.incidence_counts(inst)
    assert counts.total == 3
    assert counts.per_first == (2, 1)


def test_exists_forall_exists():
    text = "exists a in A forall b in B exists c in C: a[1] + b[1] <= c[1]"
    sets = {"A": scalars([5, 0]), "B": scalars([0, 1]), "C": scalars([1])}
    assert ineqdim3.decide_ineqdim3(make_instance(text, sets))
    sets["A"] = scalars([5])
    assert not ineqdim3.decide_ineqdim3(make_instance(text, sets))


def test_build_projects_into_three_coordinates():
    inst = make_instance(SUMSET, {"A": scalars([1, 2]), "B": scalars([3]), "C": scalars([4])}, {"t": 2})
    normal = ineqdim3.build(inst)
    assert len(normal.keys) == 2
    assert all(len(p) == 3 for p in normal.A + normal.B + normal.C)
    assert len(normal.A) == 2
    for a, a_ in zip(inst.sets[0], normal.A):
        for b, b_ in zip(inst.sets[1], normal.B):
            expected = any(inst.holds((a, b, c)) for c in inst.sets[2])
            assert normal.covered(a_, b_) == expected


def test_too_many_inequalities():
    inst = make_instance(
        "forall a in A forall b in B exists c in C: "
        "a[1] <= c[1] and b[1] <= c[1] and a[1] + b[1] <= c[1] and a[1] - b[1] <= c[1]",
        {"A": scalars([1]), "B": scalars([1]), "C": scalars([1])},
    )
    with pytest.raises(EngineInapplicableError):
        ineqdim3.decide_ineqdim3(inst)
    assert not ineqdim3.applicable(inst)


def test_wrong_prefix():
    inst = make_instance(
        "exists a in A exists b in B exists c in C: a[1] + b[1] <= c[1]",
        {"A": scalars([1]), "B": scalars([1]), "C": scalars([1])},
    )
    with pytest.raises(PrefixError):
        ineqdim3.decide_ineqdim3(inst)


def test_empty_sets():
    text = "forall a in A forall b in B exists c in C: a[1] + b[1] <= c[1]"
    assert ineqdim3.decide_ineqdim3(make_instance(text, {"A": [], "B": scalars([1]), "C": []}))
    assert not ineqdim3.decide_ineqdim3(make_instance(text, {"A": scalars([1]), "B": scalars([1]), "C": []}))
    exists = "exists a in A forall b in B exists c in C: a[1] + b[1] <= c[1]"
    assert ineqdim3.decide_ineqdim3(make_instance(exists, {"A": scalars([1]), "B": [], "C": []}))


@pytest.mark.parametrize("shape", ["AAE", "EAE", "EEA", "AEA"])
def test_matches_brute(rng, shape):
    for _ in range(25):
        d = int(rng.integers(1, 3))
        inst = dim3_instance(rng, shape, int(rng.integers(1, 6)), d)
        assert ineqdim3.decide_ineqdim3(inst) == baseline.brute_decide(inst)


@pytest.mark.parametrize("shape", ["AAE", "EAE"])
def test_direct_counts_match_brute(rng, shape):
    for _ in range(15):
        inst = dim3_instance(rng, shape, int(rng.integers(1, 6)))
        _, counts = ineqdim3.incidence_counts(inst)
        assert counts == ineqdim3.brute_counts(inst)


@pytest.mark.parametrize("text", [
    "forall a in A forall b in B exists c in C: a[1] + 2*b[1] <= c[1] + 3",
    "exists a in A forall b in B exists c in C: a[1] - b[1] > c[1]",
])
def test_reduction_strategy_matches_direct(rng, text):
    for _ in range(2):
        sets = {name: scalars(rng.integers(-4, 5, size=int(rng.integers(1, 4))).tolist()) for name in "ABC"}
        inst = make_instance(text, sets)
        _, direct = ineqdim3.incidence_counts(inst, "direct")
        _, reduced = ineqdim3.incidence_counts(inst, "reduction")
        assert reduced == direct
        assert ineqdim3.decide_ineqdim3(inst, "reduction", family_cap=20000) == baseline.brute_decide(inst)


@pytest.mark.parametrize("shape", ["AAE", "EAE"])
@pytest.mark.parametrize("hyperplanes", [2, 3])
def test_counting_strategies_agree_on_random_formulas(rng, shape, hyperplanes):
    checked = 0
    for _ in range(10):
        d = int(rng.integers(1, 3))
        text = random_dim3_formula(rng, shape, d=d, hyperplanes=hyperplanes, constant=6)
        inst = bind(parse(text), random_dataset(rng, 3, int(rng.integers(1, 4)), d, bound=4))
        expected = ineqdim3.brute_counts(inst)
        _, direct = ineqdim3.incidence_counts(inst, "direct")
        assert direct == expected
        try:
            _, reduced = ineqdim3.incidence_counts(inst, "reduction", family_cap=20000)
        except CapExceededError:
            continue
        assert reduced.per_first == expected.per_first
        assert reduced.total == expected.total
        checked += 1
    assert checked >= 3


@pytest.mark.parametrize("shape", ["EEA", "AEA"])
def test_reduction_strategy_decides_negated_shapes(rng, shape):
    for _ in range(6):
        inst = dim3_instance(rng, shape, int(rng.integers(1, 4)))
        try:
            assert ineqdim3.decide_ineqdim3(inst, "reduction", family_cap=20000) == baseline.brute_decide(inst)
        except CapExceededError:
            continue


def test_unknown_strategy():
    inst = make_instance(SUMSET, {"A": scalars([0]), "B": scalars([0]), "C": scalars([0])}, {"t": 0})
    with pytest.raises(ValueError):
        ineqdim3.incidence_counts(inst, "sideways")
