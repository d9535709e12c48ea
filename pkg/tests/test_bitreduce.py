from itertools import product

import pytest

from fopz.services import baseline, bitreduce, ksum
from fopz.services.bitreduce import PrefixParams, VectorEncoder, VectorKSumInstance
from fopz.utils.errors import CapExceededError, PrefixError, ReductionError

from conftest import make_instance, scalars

THREE_SUM = "exists a in A exists b in B exists c in C: a[1] + b[1] = c[1]"
RELATIONS = [">=", ">", "<=", "<"]


def inequality_formula(rng, k, disjuncts):
    """Prefix ∃x1..∃xk over S1..Sk with one random inequality per disjunct."""
    names = [f"x{j}" for j in range(1, k + 1)]
    prefix = " ".join(f"exists {name} in S{name[1:]}" for name in names)
    clauses = []
    for _ in range(disjuncts):
        terms = " + ".join(f"{int(rng.integers(1, 3)) * (1 if rng.random() < 0.5 else -1)}*{name}[1]" for name in names)
        relation = RELATIONS[int(rng.integers(0, len(RELATIONS)))]
        clauses.append(f"({terms.replace('+ -', '- ')} {relation} {int(rng.integers(-6, 7))})")
    return f"{prefix}: {' or '.join(clauses)}"


def inequality_instance(rng, k, disjuncts, n, duplicates=True):
    text = inequality_formula(rng, k, disjuncts)
    sets = {}
    for j in range(1, k + 1):
        values = rng.integers(-5, 6, size=n).tolist()
        if duplicates and n > 1:
            values[-1] = values[0]
        sets[f"S{j}"] = scalars(values)
    return make_instance(text, sets)


# ===============================
# BIT TRICK
# ===============================

def test_prefix_examples():
    assert bitreduce.prefix(13, 2, 4) == 3
    assert bitreduce.prefix(13, 0, 4) == 0
    assert bitreduce.prefix(13, 4, 4) == 13


@pytest.mark.parametrize("x, ell", [(-1, 2), (16, 2), (3, 5)])
def test_prefix_rejects_out_of_range(x, ell):
    with pytest.raises(ReductionError):
        bitreduce.prefix(x, ell, 4)


def test_find_unique_lb_examples():
    assert bitreduce.find_unique_lb((5, 3), 6, 4) == (4, 2)
    assert bitreduce.find_unique_lb((1, 1), 5, 4) is None


def test_certificate_is_unique(rng):
    B = 6
    for _ in range(300):
        k = int(rng.integers(2, 6))
        xs = rng.integers(0, (1 << B) // k, size=k).tolist()
        z = int(rng.integers(0, 1 << B))
        found = bitreduce.find_certificate(xs, z, B)
        matches = [
            (ell, b, w)
            for ell in range(1, B + 1)
            for b in range(1, k + 1)
            for w in range((k - 1) // 2 + 1)
            if sum(bitreduce.prefix(x, ell, B) for x in xs) == bitreduce.prefix(z, ell, B) + b
            and sum(bitreduce.prefix(x, ell - 1, B) for x in xs) == bitreduce.prefix(z, ell - 1, B) - w
        ]
        if sum(xs) > z:
            assert matches == [found]
        else:
            assert found is None
            assert matches == []
        assert bool(bitreduce.bit_trick_pairs(xs, z, B)) == (sum(xs) > z)


# ===============================
# MAPS
# ===============================

def test_maps_grid_matches_exactly_once(rng):
    for _ in range(30):
        inst = inequality_instance(rng, 3, 1, 3)
        clause = inst.normal.disjuncts[0]
        maps = bitreduce.ineq_to_eq_maps(clause, inst.names, inst.sets)
        for combo in product(*inst.sets):
            holds = all(atom.holds(dict(zip(inst.names, combo))) for atom in clause)
            hits = 0
            for ells, carries, deficits in maps.grid():
                projected = [maps.project(j, v, ells) for j, v in enumerate(combo)]
                total = tuple(sum(parts) for parts in zip(*projected))
                if total == maps.target(ells, carries, deficits):
                    hits += 1
            assert hits == (1 if holds else 0)
            assert (maps.certificate(combo) is not None) == holds


def test_maps_reject_small_shift():
    inst = make_instance("exists a in A exists b in B: a[1] + b[1] >= 3", {"A": scalars([9]), "B": scalars([0])})
    clause = inst.normal.disjuncts[0]
    with pytest.raises(ReductionError):
        bitreduce.ineq_to_eq_maps(clause, inst.names, inst.sets, PrefixParams(B=20, M=2, k=2, m=1))
    with pytest.raises(ReductionError):
        bitreduce.ineq_to_eq_maps(clause, inst.names, inst.sets, PrefixParams(B=2, M=10, k=2, m=1))
    with pytest.raises(ReductionError):
        bitreduce.ineq_to_eq_maps(clause, inst.names, inst.sets, PrefixParams(B=20, M=10, k=3, m=1))


# ===============================
# VECTOR ENCODING
# ===============================

def test_encode_example():
    encoder = VectorEncoder(k=3, bound=2, dimension=2)
    assert encoder.base == 13
    assert encoder.encode((-1, 2)) == 109
    assert encoder.decode(109) == (-1, 2)
    assert bitreduce.decode_vector_value(109, 3, 2, 2) == (-1, 2)


def vector_brute_count(v):
    total = 0
    for combo in product(*v.lists):
        if tuple(map(sum, zip(*(vec for vec, _ in combo)))) == v.target:
            weight = 1
            for _, m in combo:
                weight *= m
            total += weight
    return total


def test_encode_vector_instance_preserves_counts(rng):
    for _ in range(80):
        k = int(rng.integers(2, 4))
        d = int(rng.integers(1, 4))
        lists = [rng.integers(-3, 4, size=(int(rng.integers(1, 5)), d)).tolist() for _ in range(k)]
        target = rng.integers(-4, 5, size=d).tolist()
        v = VectorKSumInstance.from_vectors(lists, target)
        assert ksum.count(bitreduce.encode_vector_instance(v)) == vector_brute_count(v)


def test_encode_dimension_one_is_affine():
    v = VectorKSumInstance.from_vectors([[[1], [2]], [[3]], [[-4]]], [0])
    scalar = bitreduce.encode_vector_instance(v)
    assert ksum.count(scalar) == 1


def test_encode_rejects_small_bound():
    v = VectorKSumInstance.from_vectors([[[5]], [[1]]], [6])
    with pytest.raises(ReductionError):
        bitreduce.encode_vector_instance(v, bound=2)


# ===============================
# FAMILIES
# ===============================

def test_counting_single_equality():
    zeros = {"A": scalars([0]), "B": scalars([0]), "C": scalars([0])}
    family = bitreduce.compile_counting(make_instance(THREE_SUM, zeros))
    assert bitreduce.count_family(family) == 1


def test_unsatisfiable_family_has_no_solvable_instance():
    inst = make_instance(
        "exists a in A exists b in B: a[1] + b[1] >= 1 and a[1] + b[1] <= 0",
        {"A": scalars([0, 3, -2]), "B": scalars([1, -1])},
    )
    family = bitreduce.compile_decision(inst)
    assert len(family) > 0
    assert not any(ksum.solve(entry.instance) for entry in family.entries)


def test_compile_requires_existential():
    inst = make_instance("forall a in A exists b in B: a[1] <= b[1]", {"A": scalars([1]), "B": scalars([1])})
    with pytest.raises(PrefixError):
        bitreduce.compile_decision(inst)


def test_compile_caps():
    inst = make_instance(THREE_SUM, {"A": scalars([1]), "B": scalars([2]), "C": scalars([3])})
    with pytest.raises(CapExceededError):
        bitreduce.compile_decision(inst, family_cap=10)
    with pytest.raises(CapExceededError):
        bitreduce.compile_counting(inst, family_cap=10)


def test_counting_subset_cap(rng):
    inst = inequality_instance(rng, 2, 3, 2)
    if len(inst.normal.disjuncts) > 1:
        with pytest.raises(CapExceededError):
            bitreduce.compile_counting(inst, ie_cap=1)


@pytest.mark.parametrize("k, disjuncts", [(2, 1), (2, 2), (3, 1)])
def test_decision_family_matches_brute(rng, k, disjuncts):
    for _ in range(12):
        inst = inequality_instance(rng, k, disjuncts, int(rng.integers(1, 4)))
        assert bitreduce.solve_family(bitreduce.compile_decision(inst)) == baseline.brute_decide(inst)


@pytest.mark.parametrize("k, disjuncts", [(2, 1), (2, 2), (3, 1)])
def test_counting_family_matches_brute(rng, k, disjuncts):
    for _ in range(12):
        inst = inequality_instance(rng, k, disjuncts, int(rng.integers(1, 4)))
        assert bitreduce.count_family(bitreduce.compile_counting(inst)) == baseline.brute_count(inst)


def clause_instance(rng, k, disjuncts, atoms, d, n=3, bound=3):
    """Random ∃^k instance over S1..Sk ⊆ Z^d with ``atoms`` inequalities per disjunct."""
    names = [f"x{j}" for j in range(1, k + 1)]
    prefix = " ".join(f"exists {name} in S{name[1:]}^{d}" for name in names)
    clauses = []
    for _ in range(disjuncts):
        parts = []
        for _ in range(atoms):
            terms = " + ".join(
                f"{int(rng.integers(1, 3)) * (1 if rng.random() < 0.5 else -1)}*{name}[{int(rng.integers(1, d + 1))}]"
                for name in names
            )
            relation = RELATIONS[int(rng.integers(0, len(RELATIONS)))]
            parts.append(f"{terms.replace('+ -', '- ')} {relation} {int(rng.integers(-4, 5))}")
        clauses.append(f"({' and '.join(parts)})")
    sets = {f"S{j}": rng.integers(-bound, bound + 1, size=(n, d)).tolist() for j in range(1, k + 1)}
    sets["S1"][-1] = list(sets["S1"][0])
    return make_instance(f"{prefix}: {' or '.join(clauses)}", sets)


def has_merged_projection(family):
    return any(m > 1 for entry in family.entries for lst in entry.instance.lists for _, m in lst)


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("atoms", [1, 2])
@pytest.mark.parametrize("k", [2, 3, 4])
def test_families_match_brute_across_shapes(rng, k, atoms, d):
    disjuncts = 2 if atoms == 1 else 1
    trials = 3 if k == 4 else 6
    checked = merged = 0
    for _ in range(trials):
        inst = clause_instance(rng, k, disjuncts, atoms, d)
        try:
            decision = bitreduce.compile_decision(inst, family_cap=20000)
            counting = bitreduce.compile_counting(inst, family_cap=20000)
        except CapExceededError:
            continue
        assert bitreduce.solve_family(decision) == baseline.brute_decide(inst)
        assert bitreduce.count_family(counting) == baseline.brute_count(inst)
        checked += 1
        merged += has_merged_projection(counting)
    assert checked >= 1
    assert merged * 10 >= checked


def test_solve_family_threads(rng):
    inst = inequality_instance(rng, 2, 2, 3)
    family = bitreduce.compile_decision(inst)
    assert bitreduce.solve_family(family, threads=4) == bitreduce.solve_family(family, threads=1)


def test_per_first_counts():
    inst = make_instance(
        THREE_SUM,
        {"A": scalars([0, 1, 0, 4]), "B": scalars([0, 1]), "C": scalars([1, 0])},
    )
    family = bitreduce.compile_counting(inst, track_first=True)
    assert bitreduce.count_family_per_first(family, 4) == baseline.brute_count_per_first(inst)


def test_per_first_needs_tracking():
    inst = make_instance(THREE_SUM, {"A": scalars([0]), "B": scalars([0]), "C": scalars([0])})
    family = bitreduce.compile_counting(inst)
    with pytest.raises(ReductionError):
        bitreduce.count_family_per_first(family, 1)


def test_family_round_trip(tmp_path, rng):
    inst = inequality_instance(rng, 2, 2, 3)
    family = bitreduce.compile_counting(inst)
    manifest = bitreduce.write_family(family, tmp_path / "family")
    assert manifest.name == "manifest.json"
    again = bitreduce.read_family(tmp_path / "family")
    assert again.mode == "counting"
    assert len(again) == len(family)
    assert bitreduce.count_family(again) == bitreduce.count_family(family)
