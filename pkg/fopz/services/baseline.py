"""Reference deciders for bound instances.

- brute force decision and witness counting by nested enumeration
- meet-in-the-middle existential solver over range indices
- the ∀∃ two-quantifier solver (other two-quantifier shapes by negation)
- the general solver enumerating all but the last two quantifiers
"""

from itertools import product
from typing import Dict, List, Sequence, Set, Tuple

from fopz.config.settings import SUM_CAP
from fopz.services import rangeindex
from fopz.services.dataset import Instance
from fopz.services.formula import Atom, Quantifier, Vector
from fopz.utils.errors import CapExceededError, PrefixError

# per atom: ((coordinate, coefficient), ...)
CoefficientRows = Tuple[Tuple[Tuple[int, int], ...], ...]


# ===============================
# PROJECTIONS
# ===============================

def coefficient_rows(clause: Sequence[Atom], name: str) -> CoefficientRows:
    """Coefficients of variable ``name`` in each atom of a co-clause."""
    return tuple(tuple(sorted(atom.form.coefficients_for(name).items())) for atom in clause)


def project(rows: CoefficientRows, vector: Sequence[int]) -> Tuple[int, ...]:
    """(c_{i,j}ᵀ a_j)_i for one quantified vector."""
    return tuple(sum(c * vector[i - 1] for i, c in row) for row in rows)


def thresholds(clause: Sequence[Atom]) -> Tuple[int, ...]:
    """S_i with atoms read as Σ_j c_{i,j}ᵀ a_j >= S_i."""
    return tuple(-atom.form.constant for atom in clause)


def _add(u: Sequence[int], v: Sequence[int]) -> Tuple[int, ...]:
    return tuple(x + y for x, y in zip(u, v))


def _sum_set(projected: Sequence[Set[Tuple[int, ...]]], m: int, cap: int) -> Set[Tuple[int, ...]]:
    sums = {(0,) * m}
    for points in projected:
        if len(sums) * len(points) > cap:
            raise CapExceededError(f"intermediate sum count exceeds cap {cap}")
        sums = {_add(s, p) for s in sums for p in points}
    return sums


# ===============================
# BRUTE FORCE
# ===============================

def _enumerate(inst: Instance, env: Dict[str, Vector], depth: int) -> bool:
    if depth == inst.k:
        return inst.normal.holds(env)
    q = inst.prefix[depth]

    def branch(vector: Vector) -> bool:
        env[q.name] = vector
        return _enumerate(inst, env, depth + 1)

    if q.quantifier is Quantifier.EXISTS:
        return any(branch(v) for v in inst.sets[depth])
    return all(branch(v) for v in inst.sets[depth])


def brute_decide(inst: Instance) -> bool:
    """Truth value by full nested enumeration."""
    return _enumerate(inst, {}, 0)


def brute_count(inst: Instance) -> int:
    """Number of satisfying position tuples of an existential instance."""
    if not inst.is_existential:
        raise PrefixError("counting requires existential prefix")
    return sum(1 for combo in product(*inst.sets) if inst.holds(combo))


def brute_count_per_first(inst: Instance) -> List[int]:
    """Witness count for each position of the first set."""
    if not inst.is_existential:
        raise PrefixError("counting requires existential prefix")
    return [
        sum(1 for rest in product(*inst.sets[1:]) if inst.holds((first,) + rest))
        for first in inst.sets[0]
    ]


# ===============================
# EXISTENTIAL SOLVER
# ===============================

def _clause_satisfiable(inst: Instance, clause: Sequence[Atom], cap: int) -> bool:
    m = len(clause)
    if m == 0:
        return True
    projected = []
    for name, vectors in zip(inst.names, inst.sets):
        rows = coefficient_rows(clause, name)
        projected.append({project(rows, v) for v in vectors})

    split = (inst.k + 1) // 2
    left = _sum_set(projected[:split], m, cap)
    right = _sum_set(projected[split:], m, cap)
    index = rangeindex.build(left, dimension=m)
    S = thresholds(clause)
    return any(index.exists_dominating(tuple(s - x for s, x in zip(S, r))) for r in right)


def decide_existential(inst: Instance, cap: int = SUM_CAP) -> bool:
    """Meet-in-the-middle decision of an all-∃ instance.

    Per co-clause, sums of the first ⌈k/2⌉ projected sets go into a range
    index; each sum r of the remaining sets asks for a stored sum dominating
    S - r.

    Args:
        inst: instance whose prefix is all ∃
        cap: bound on the number of intermediate sums

    Returns:
        Truth value, equal to brute_decide
    """
    if not inst.is_existential:
        raise PrefixError("decide_existential requires an all-exists prefix")
    if inst.has_empty_set:
        return False
    return any(_clause_satisfiable(inst, clause, cap) for clause in inst.normal.disjuncts)


# ===============================
# TWO QUANTIFIERS
# ===============================

def _decide_forall_exists(inst: Instance) -> bool:
    first, second = inst.sets
    if not first:
        return True
    if not second:
        return False
    name1, name2 = inst.names
    indexes = []
    for clause in inst.normal.disjuncts:
        if not clause:
            return True
        rows2 = coefficient_rows(clause, name2)
        index = rangeindex.build([project(rows2, v) for v in second], dimension=len(clause))
        indexes.append((index, coefficient_rows(clause, name1), thresholds(clause)))

    for a1 in dict.fromkeys(first):
        found = False
        for index, rows1, S in indexes:
            shift = project(rows1, a1)
            if index.exists_dominating(tuple(s - x for s, x in zip(S, shift))):
                found = True
                break
        if not found:
            return False
    return True


def decide_two_quant(inst: Instance, cap: int = SUM_CAP) -> bool:
    """Decide a k = 2 instance; ∀∀ and ∃∀ go through the negation."""
    if inst.k != 2:
        raise PrefixError(f"decide_two_quant requires k = 2, got k = {inst.k}")
    q1, q2 = inst.quantifiers
    if q2 is Quantifier.FORALL:
        return not decide_two_quant(inst.negated(), cap)
    if q1 is Quantifier.EXISTS:
        return decide_existential(inst, cap)
    return _decide_forall_exists(inst)


def decide_single(inst: Instance, cap: int = SUM_CAP) -> bool:
    if inst.quantifiers[0] is Quantifier.EXISTS:
        return decide_existential(inst, cap)
    return not decide_existential(inst.negated(), cap)


def decide_general(inst: Instance, cap: int = SUM_CAP) -> bool:
    """Enumerate the first k-2 quantified sets and finish with the two-quantifier solver."""
    if inst.k == 1:
        return decide_single(inst, cap)
    if inst.k == 2:
        return decide_two_quant(inst, cap)
    branches = (decide_general(inst.fix_first(v), cap) for v in dict.fromkeys(inst.sets[0]))
    if inst.quantifiers[0] is Quantifier.EXISTS:
        return any(branches)
    return all(branches)
