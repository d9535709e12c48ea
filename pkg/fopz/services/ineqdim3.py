"""Decision of Q∀∃ formulas with at most three distinct inequalities.

Every atom is one of three hyperplane inequalities ℓ_u(a, b, c) <= r_u or
its negation. Splitting ℓ_u = α_uᵀa + β_uᵀb + γ_uᵀc projects the sets into
Z³ so that a co-clause holds iff a' + b' lies in an orthant with apex c'.
Orthants are clipped to congruent cubes, the cube union is decomposed into
disjoint boxes, and the pairs (a, b) covered by some c are counted per a as
box incidences of a' + b'.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Sequence, Tuple

from fopz.config.settings import FAMILY_CAP, IE_SUBSET_CAP
from fopz.services import bitreduce, rangeindex
from fopz.services.dataset import Instance
from fopz.services.decompose import decompose_cubes_3d
from fopz.services.formula import (
    Atom,
    InequalityKey,
    LinearForm,
    NormalizedFormula,
    Quantifier,
    QuantifiedVar,
    Relation,
    Vector,
    inequality_key,
)
from fopz.services.geometry import Box, CubeSet, orthant_to_cube
from fopz.services.metrics import metrics
from fopz.services.monitoring import log_event
from fopz.utils.errors import EngineInapplicableError, PrefixError

MAX_DIMENSION = 3

E, A = Quantifier.EXISTS, Quantifier.FORALL
DIRECT_SHAPES = {(A, A, E), (E, A, E)}
NEGATED_SHAPES = {(E, E, A), (A, E, A)}


@dataclass(frozen=True)
class Dim3Normal:
    """Projected sets and co-clause orthant patterns.

    ``clauses`` hold (VK, VJ): 1-based coordinates bounded above by c' and
    coordinates bounded below by c' + 1. A', B', C' keep input positions.
    """
    keys: Tuple[InequalityKey, ...]
    clauses: Tuple[Tuple[FrozenSet[int], FrozenSet[int]], ...]
    A: Tuple[Vector, ...]
    B: Tuple[Vector, ...]
    C: Tuple[Vector, ...]
    M: int

    def cubes(self) -> CubeSet:
        corners = {}
        for vk, vj in self.clauses:
            for c in dict.fromkeys(self.C):
                cube = orthant_to_cube(vk, vj, c, self.M)
                corners[tuple(int(x) for x in cube.lo)] = None
        return CubeSet(2 * self.M, tuple(corners))

    def covered(self, a: Vector, b: Vector) -> bool:
        s = tuple(x + y for x, y in zip(a, b))
        return any(
            all(s[u - 1] <= c[u - 1] for u in vk) and all(s[u - 1] >= c[u - 1] + 1 for u in vj)
            for vk, vj in self.clauses
            for c in self.C
        )


@dataclass(frozen=True)
class IncidenceCounts:
    """Covered (a, b) position pairs: total and per position of A."""
    total: int
    per_first: Tuple[int, ...]


def _split_key(primitive, names: Sequence[str]) -> List[Dict[int, int]]:
    parts = [dict() for _ in names]
    for (var, coord), coeff in primitive:
        parts[names.index(var)][coord] = coeff
    return parts


def _dot(coeffs: Dict[int, int], v: Sequence[int]) -> int:
    return sum(c * v[i - 1] for i, c in coeffs.items())


def _check_shape(inst: Instance):
    if inst.k != 3 or inst.quantifiers[1:] != (A, E):
        shape = "".join("∃" if q is E else "∀" for q in inst.quantifiers)
        raise PrefixError(f"inequality-dimension pipeline needs a Q∀∃ prefix, got {shape}")


def build(inst: Instance) -> Dim3Normal:
    """Project a Q∀∃ instance with at most three inequalities into Z³."""
    _check_shape(inst)
    keys = inst.normal.inequality_keys()
    if len(keys) > MAX_DIMENSION:
        raise EngineInapplicableError(
            f"inequality-dimension pipeline inapplicable: {len(keys)} distinct inequalities, at most {MAX_DIMENSION}"
        )
    position = {key: u for u, key in enumerate(keys, start=1)}

    clauses = {}
    for clause in inst.normal.disjuncts:
        vk, vj = set(), set()
        for atom in clause:
            key, positive = inequality_key(atom)
            (vk if positive else vj).add(position[key])
        if vk & vj:
            continue
        clauses[(frozenset(vk), frozenset(vj))] = None

    names = list(inst.names)
    split = [_split_key(primitive, names) for primitive, _ in keys]
    pad = (0,) * (MAX_DIMENSION - len(keys))
    A_ = tuple(tuple(_dot(alpha, a) for alpha, _, _ in split) + pad for a in inst.sets[0])
    B_ = tuple(tuple(_dot(beta, b) for _, beta, _ in split) + pad for b in inst.sets[1])
    C_ = tuple(
        tuple(-_dot(gamma, c) + r for (_, _, gamma), (_, r) in zip(split, keys)) + pad
        for c in inst.sets[2]
    )

    def norm(points):
        return max((sum(abs(x) for x in p) for p in points), default=0)

    M = max(1, 2 * (norm(A_) + norm(B_) + norm(C_)))
    return Dim3Normal(keys, tuple(clauses), A_, B_, C_, M)


# ===============================
# BOX INCIDENCE COUNTING
# ===============================

def count_direct(normal: Dim3Normal, boxes: Sequence[Box]) -> IncidenceCounts:
    """Range-count B' inside each box translated by -a'."""
    index = rangeindex.build(normal.B, dimension=MAX_DIMENSION)
    per_value = {}
    for a in dict.fromkeys(normal.A):
        offset = tuple(-x for x in a)
        per_value[a] = sum(index.count_in_box(box.translate(offset)) for box in boxes)
    per_first = tuple(per_value[a] for a in normal.A)
    return IncidenceCounts(sum(per_first), per_first)


def _sum_range(normal: Dim3Normal, u: int) -> Tuple[int, int]:
    lo = min(a[u] for a in normal.A) + min(b[u] for b in normal.B)
    hi = max(a[u] for a in normal.A) + max(b[u] for b in normal.B)
    return lo, hi


def box_constraints(normal: Dim3Normal, box: Box):
    """Binding integer bounds of a box over the data sums.

    Returns None when no data sum can lie in the box, else a tuple of
    (coordinate, side, bound) with side "lo" or "hi".
    """
    ranges = box.integer_ranges()
    if ranges is None:
        return None
    bounds = []
    for u, (lo, hi) in enumerate(ranges):
        s_lo, s_hi = _sum_range(normal, u)
        if lo > s_hi or hi < s_lo:
            return None
        if lo > s_lo:
            bounds.append((u, "lo", int(lo)))
        if hi < s_hi:
            bounds.append((u, "hi", int(hi)))
    return tuple(bounds)


def _group_instance(normal: Dim3Normal, signature, bound_vectors: List[Vector]) -> Instance:
    m = len(signature)
    prefix = (
        QuantifiedVar(E, "a", "A", MAX_DIMENSION),
        QuantifiedVar(E, "b", "B", MAX_DIMENSION),
        QuantifiedVar(E, "r", "R", m),
    )
    atoms = []
    for j, (u, side) in enumerate(signature, start=1):
        sign = 1 if side == "lo" else -1
        form = LinearForm.build({("a", u + 1): sign, ("b", u + 1): sign, ("r", j): -sign})
        atoms.append(Atom(form, Relation.GE).canonical())
    return Instance(NormalizedFormula(prefix, (tuple(atoms),)), (normal.A, normal.B, tuple(bound_vectors)))


def count_by_reduction(normal: Dim3Normal, boxes: Sequence[Box],
                       ie_cap: int = IE_SUBSET_CAP, family_cap: int = FAMILY_CAP) -> IncidenceCounts:
    """Box incidences via 3-SUM counting.

    Boxes with the same binding-bound pattern form one ∃³ instance whose
    third set holds their bound vectors; its per-a' witness counts come from
    the counting compilation and all-ints 3-SUM.
    """
    n_a, n_b = len(normal.A), len(normal.B)
    if n_a == 0 or n_b == 0:
        return IncidenceCounts(0, (0,) * n_a)

    groups: Dict[Tuple[Tuple[int, str], ...], List[Vector]] = {}
    for box in boxes:
        bounds = box_constraints(normal, box)
        if bounds is None:
            continue
        signature = tuple((u, side) for u, side, _ in bounds)
        groups.setdefault(signature, []).append(tuple(value for _, _, value in bounds))

    per_first = [0] * n_a
    for signature, vectors in sorted(groups.items()):
        if not signature:
            # box holds every data sum
            for i in range(n_a):
                per_first[i] += n_b * len(vectors)
            continue
        family = bitreduce.compile_counting(
            _group_instance(normal, signature, vectors), ie_cap, family_cap, track_first=True
        )
        for i, count in enumerate(bitreduce.count_family_per_first(family, n_a)):
            per_first[i] += count
    return IncidenceCounts(sum(per_first), tuple(per_first))


# ===============================
# DECISION
# ===============================

def incidence_counts(inst: Instance, strategy: str = "direct",
                     family_cap: int = FAMILY_CAP) -> Tuple[Dim3Normal, IncidenceCounts]:
    """Covered (a, b) pairs of a Q∀∃ instance, per position of the first set.

    ``family_cap`` bounds each k-SUM family of the reduction strategy.
    """
    normal = build(inst)
    with metrics.phase("decompose"):
        boxes = decompose_cubes_3d(normal.cubes()) if normal.C and normal.clauses else []
    with metrics.phase("count"):
        if strategy == "direct":
            counts = count_direct(normal, boxes)
        elif strategy == "reduction":
            counts = count_by_reduction(normal, boxes, family_cap=family_cap)
        else:
            raise ValueError(f"unknown counting strategy '{strategy}'")
    log_event(
        "ineqdim3_counts",
        strategy=strategy,
        dimension=len(normal.keys),
        cubes=len(normal.C) * len(normal.clauses),
        boxes=len(boxes),
        covered=counts.total,
    )
    return normal, counts


def decide_ineqdim3(inst: Instance, strategy: str = "direct", family_cap: int = FAMILY_CAP) -> bool:
    """Decide ∀∀∃ / ∃∀∃ directly, and ∃∃∀ / ∀∃∀ through the negation.

    Args:
        inst: three-quantifier instance with at most three distinct inequalities
        strategy: "direct" (range counting) or "reduction" (3-SUM counting)
        family_cap: bound on each k-SUM family of the reduction strategy

    Returns:
        Truth value
    """
    shape = inst.quantifiers
    if shape in NEGATED_SHAPES:
        return not decide_ineqdim3(inst.negated(), strategy, family_cap)
    if shape not in DIRECT_SHAPES:
        raise PrefixError("inequality-dimension pipeline needs a ∀∀∃, ∃∀∃, ∃∃∀ or ∀∃∀ prefix")

    _, counts = incidence_counts(inst, strategy, family_cap)
    n_b = len(inst.sets[1])
    if shape[0] is A:
        return counts.total == len(inst.sets[0]) * n_b
    return any(count == n_b for count in counts.per_first)


def applicable(inst: Instance) -> bool:
    if inst.k != 3 or (inst.quantifiers not in DIRECT_SHAPES and inst.quantifiers not in NEGATED_SHAPES):
        return False
    return inst.normal.dimension <= MAX_DIMENSION


def brute_counts(inst: Instance) -> IncidenceCounts:
    """Per-position covered pair counts by direct enumeration."""
    _check_shape(inst)
    first, second, third = inst.sets
    per_first = tuple(
        sum(1 for b in second if any(inst.holds((a, b, c)) for c in third))
        for a in first
    )
    return IncidenceCounts(sum(per_first), per_first)

