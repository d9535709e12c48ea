import pytest

from fopz.services import baseline
from fopz.utils.errors import CapExceededError, PrefixError

from conftest import make_instance, random_instance, scalars

THREE_SUM = "exists a in A exists b in B exists c in C: a[1] + b[1] = c[1]"
ZERO_SUM = "exists a in A exists b in B exists c in C: a[1] + b[1] + c[1] = 0"

HAUSDORFF = (
    "exists s in A^2 forall b in B^2 exists c in C^2: "
    "b[1] + s[1] - c[1] <= g and c[1] - b[1] - s[1] <= g and "
    "b[2] + s[2] - c[2] <= g and c[2] - b[2] - s[2] <= g"
)


def test_brute_decide_three_sum():
    inst = make_instance(THREE_SUM, {"A": scalars([1, 5]), "B": scalars([2]), "C": scalars([3])})
    assert baseline.brute_decide(inst)


def test_brute_decide_forall_exists():
    inst = make_instance(
        "forall a in A exists b in B: a[1] <= b[1]",
        {"A": scalars([1, 9]), "B": scalars([5])},
    )
    assert not baseline.brute_decide(inst)


def test_brute_decide_vacuity():
    exists = make_instance("exists a in A exists b in B: a[1] <= b[1]", {"A": [], "B": scalars([1])})
    forall = make_instance("forall a in A exists b in B: a[1] <= b[1]", {"A": [], "B": []})
    assert not baseline.brute_decide(exists)
    assert baseline.brute_decide(forall)


def test_brute_count_examples():
    zeros = {"A": scalars([0]), "B": scalars([0]), "C": scalars([0])}
    assert baseline.brute_count(make_instance(ZERO_SUM, zeros)) == 1
    assert baseline.brute_count(make_instance(ZERO_SUM, dict(zeros, A=scalars([0, 0])))) == 2
    never = make_instance(
        "exists a in A exists b in B: a[1] + b[1] >= 1 and a[1] + b[1] <= 0",
        {"A": scalars([0, 1]), "B": scalars([0])},
    )
    assert baseline.brute_count(never) == 0


def test_brute_count_per_first_positions():
    inst = make_instance(ZERO_SUM, {"A": scalars([0, 1, 0]), "B": scalars([0, -1]), "C": scalars([0])})
    assert baseline.brute_count_per_first(inst) == [1, 1, 1]


def test_brute_count_rejects_forall():
    inst = make_instance("forall a in A: a[1] >= 0", {"A": scalars([1])})
    with pytest.raises(PrefixError):
        baseline.brute_count(inst)


def test_decide_existential_examples():
    inst = make_instance(THREE_SUM, {"A": scalars([-1, 2]), "B": scalars([3]), "C": scalars([2])})
    assert baseline.decide_existential(inst) == baseline.brute_decide(inst)
    assert baseline.decide_existential(inst)
    empty = make_instance(THREE_SUM, {"A": [], "B": [], "C": []})
    assert not baseline.decide_existential(empty)


def test_decide_existential_rejects_forall():
    inst = make_instance("forall a in A exists b in B: a[1] <= b[1]", {"A": scalars([1]), "B": scalars([1])})
    with pytest.raises(PrefixError):
        baseline.decide_existential(inst)


def test_decide_existential_cap():
    inst = make_instance(
        "exists a in A exists b in B exists c in C exists e in E: a[1] + b[1] + c[1] + e[1] = 1000",
        {name: scalars(range(10)) for name in "ABCE"},
    )
    with pytest.raises(CapExceededError):
        baseline.decide_existential(inst, cap=50)


@pytest.mark.parametrize("B, expected", [([2], True), ([1], False)])
def test_decide_two_quant_forall_exists(B, expected):
    inst = make_instance("forall a in A exists b in B: b[1] >= a[1]", {"A": scalars([1, 2]), "B": scalars(B)})
    assert baseline.decide_two_quant(inst) is expected


def test_decide_two_quant_exists_forall():
    inst = make_instance("exists a in A forall b in B: a[1] > b[1]", {"A": scalars([5]), "B": scalars([1, 4])})
    assert baseline.decide_two_quant(inst)


def test_decide_two_quant_needs_two():
    inst = make_instance(THREE_SUM, {"A": scalars([1]), "B": scalars([1]), "C": scalars([2])})
    with pytest.raises(PrefixError):
        baseline.decide_two_quant(inst)


def test_decide_general_hausdorff_toy():
    inst = make_instance(HAUSDORFF, {"A": [[0, 0]], "B": [[1, 1]], "C": [[1, 1]]}, {"g": 0})
    assert baseline.decide_general(inst)
    shifted = make_instance(HAUSDORFF, {"A": [[0, 0]], "B": [[1, 1]], "C": [[2, 1]]}, {"g": 0})
    assert not baseline.decide_general(shifted)


def test_decide_general_vacuous_forall():
    inst = make_instance(
        "forall a in A forall b in B exists c in C: a[1] + b[1] <= c[1]",
        {"A": [], "B": scalars([1]), "C": scalars([0])},
    )
    assert baseline.decide_general(inst)


@pytest.mark.parametrize("shape", ["E", "EE", "EEE", "EEEE"])
def test_decide_existential_matches_brute(rng, shape):
    for _ in range(40):
        d = int(rng.integers(1, 3))
        inst = random_instance(rng, shape, n=int(rng.integers(0, 6)), d=d, duplicates=True)
        assert baseline.decide_existential(inst) == baseline.brute_decide(inst)


@pytest.mark.parametrize("shape", ["EE", "EA", "AE", "AA"])
def test_decide_two_quant_matches_brute(rng, shape):
    for _ in range(60):
        inst = random_instance(rng, shape, n=int(rng.integers(0, 7)), d=int(rng.integers(1, 3)))
        assert baseline.decide_two_quant(inst) == baseline.brute_decide(inst)


@pytest.mark.parametrize("shape", ["EAE", "AAE", "AEA", "EEA", "AEAE", "EAAE"])
def test_decide_general_matches_brute(rng, shape):
    for _ in range(25):
        inst = random_instance(rng, shape, n=int(rng.integers(1, 5)), d=int(rng.integers(1, 3)))
        assert baseline.decide_general(inst) == baseline.brute_decide(inst)
