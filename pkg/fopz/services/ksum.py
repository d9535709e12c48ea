"""k-SUM over multisets: decision, weighted counting, all-ints counting,
bounded-multiplicity expansion and heavy-light counting.

Every list holds distinct values with positive multiplicities; a witness is a
choice of one value per list summing to the target, weighted by the product
of the chosen multiplicities.
"""

from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from fopz.config.settings import SUM_CAP
from fopz.services.prom_metrics import ksum_instances_solved_total
from fopz.utils.errors import CapExceededError, KSumFormatError, ReductionError

WeightedList = Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class KSumInstance:
    lists: Tuple[WeightedList, ...]
    target: int

    def __post_init__(self):
        if len(self.lists) < 2:
            raise KSumFormatError(f"k-SUM needs k >= 2 lists, got {len(self.lists)}")
        for j, lst in enumerate(self.lists):
            values = [v for v, _ in lst]
            if len(set(values)) != len(values):
                raise KSumFormatError(f"list {j + 1} repeats a value; merge repeats into multiplicities")
            if any(m < 1 for _, m in lst):
                raise KSumFormatError(f"list {j + 1} has a multiplicity below 1")

    @classmethod
    def from_values(cls, lists: Sequence[Iterable[int]], target: int) -> "KSumInstance":
        """Merge repeated values into multiplicities."""
        return cls.from_weighted([Counter(int(v) for v in lst) for lst in lists], target)

    @classmethod
    def from_weighted(cls, lists: Sequence[Mapping[int, int]], target: int) -> "KSumInstance":
        return cls(tuple(tuple(sorted((int(v), int(m)) for v, m in lst.items())) for lst in lists), int(target))

    @property
    def k(self) -> int:
        return len(self.lists)

    @property
    def size(self) -> int:
        return sum(len(lst) for lst in self.lists)

    @property
    def max_multiplicity(self) -> int:
        return max((m for lst in self.lists for _, m in lst), default=1)

    def with_target(self, target: int) -> "KSumInstance":
        return KSumInstance(self.lists, int(target))


@dataclass(frozen=True)
class WitnessReport:
    """Total witness count, optionally per value of the first list (all-ints)."""
    total: int
    per_first_element: Optional[Dict[int, int]] = None


# ===============================
# SUM TABLES
# ===============================

def _sum_set(lists: Sequence[WeightedList], cap: int) -> Set[int]:
    sums = {0}
    for lst in lists:
        if len(sums) * len(lst) > cap:
            raise CapExceededError(f"intermediate sum count exceeds cap {cap}")
        sums = {s + v for s in sums for v, _ in lst}
    return sums


def _weighted_sums(lists: Sequence[WeightedList], cap: int) -> Counter:
    sums = Counter({0: 1})
    for lst in lists:
        if len(sums) * len(lst) > cap:
            raise CapExceededError(f"intermediate sum count exceeds cap {cap}")
        nxt: Counter = Counter()
        for s, w in sums.items():
            for v, m in lst:
                nxt[s + v] += w * m
        sums = nxt
    return sums


def _split(k: int) -> int:
    return (k + 1) // 2


# ===============================
# SOLVERS
# ===============================

def solve(inst: KSumInstance, cap: int = SUM_CAP) -> bool:
    """Meet-in-the-middle decision: first ⌈k/2⌉ lists against the rest."""
    ksum_instances_solved_total.inc()
    if any(not lst for lst in inst.lists):
        return False
    split = _split(inst.k)
    left = _sum_set(inst.lists[:split], cap)
    right = _sum_set(inst.lists[split:], cap)
    t = inst.target
    return any(t - r in left for r in right)


def count(inst: KSumInstance, cap: int = SUM_CAP) -> int:
    """Exact weighted witness count."""
    ksum_instances_solved_total.inc()
    split = _split(inst.k)
    left = _weighted_sums(inst.lists[:split], cap)
    right = _weighted_sums(inst.lists[split:], cap)
    t = inst.target
    return sum(w * left.get(t - r, 0) for r, w in right.items())


def count_allints_3(inst: KSumInstance, cap: int = SUM_CAP) -> WitnessReport:
    """Per value a of the first list, the weighted number of (b, c) with a + b + c = t."""
    if inst.k != 3:
        raise KSumFormatError(f"all-ints counting is defined for k = 3, got k = {inst.k}")
    ksum_instances_solved_total.inc()
    pairs = _weighted_sums(inst.lists[1:], cap)
    per = {a: pairs.get(inst.target - a, 0) for a, _ in inst.lists[0]}
    total = sum(m * per[a] for a, m in inst.lists[0])
    return WitnessReport(total, per)


# ===============================
# MULTIPLICITY REMOVAL
# ===============================

@dataclass(frozen=True)
class BoundedExpansion:
    """Set lists (multiplicity 1) and the targets whose counts sum to the source count."""
    lists: Tuple[Tuple[int, ...], ...]
    targets: Tuple[int, ...]

    def instances(self) -> List[KSumInstance]:
        weighted = tuple(tuple((v, 1) for v in lst) for lst in self.lists)
        return [KSumInstance(weighted, t) for t in self.targets]


def expand_bounded(inst: KSumInstance, M: int) -> BoundedExpansion:
    """Scale values by D = k·M and spread multiplicity n_v over offsets 0..n_v-1.

    Copy sums decompose uniquely as D·Σv + Σr with 0 <= Σr <= k(M-1) < D, so
    the targets D·t + s, s in 0..k(M-1), partition the copy tuples of the
    source witnesses.
    """
    if M < 1:
        raise ReductionError("multiplicity bound must be >= 1")
    if inst.max_multiplicity > M:
        raise ReductionError(f"multiplicity {inst.max_multiplicity} exceeds bound {M}")
    D = inst.k * M
    lists = tuple(
        tuple(D * v + r for v, m in lst for r in range(m))
        for lst in inst.lists
    )
    targets = tuple(D * inst.target + s for s in range(inst.k * (M - 1) + 1))
    return BoundedExpansion(lists, targets)


def count_bounded_expansion(inst: KSumInstance, M: int, cap: int = SUM_CAP) -> int:
    return sum(count(expanded, cap) for expanded in expand_bounded(inst, M).instances())


def count_heavylight(inst: KSumInstance, theta: int, cap: int = SUM_CAP) -> int:
    """Weighted count split at multiplicity threshold ``theta``.

    Light tuples (every chosen multiplicity <= theta) are counted on the
    bounded expansion. A heavy tuple is charged to its first heavy position i:
    positions before i take light values, position i a heavy value a, the rest
    anything, and n_a multiplies the (k-1)-SUM count for target t - a.
    """
    k = inst.k
    if k < 3 or k % 2 == 0:
        raise ReductionError(f"heavy-light counting is defined for odd k >= 3, got k = {k}")
    if theta < 1:
        raise ReductionError("threshold must be >= 1")

    light = tuple(tuple((v, m) for v, m in lst if m <= theta) for lst in inst.lists)
    total = count_bounded_expansion(KSumInstance(light, inst.target), theta, cap)

    for i in range(k):
        heavy = [(v, m) for v, m in inst.lists[i] if m > theta]
        if not heavy:
            continue
        rest = light[:i] + inst.lists[i + 1:]
        split = _split(k - 1)
        left = _weighted_sums(rest[:split], cap)
        right = _weighted_sums(rest[split:], cap)
        for a, n_a in heavy:
            goal = inst.target - a
            total += n_a * sum(w * left.get(goal - r, 0) for r, w in right.items())
    return total


def brute_count(inst: KSumInstance) -> int:
    """Enumeration over all value tuples; reference for small instances."""
    total = 0
    for combo in product(*inst.lists):
        if sum(v for v, _ in combo) == inst.target:
            weight = 1
            for _, m in combo:
                weight *= m
            total += weight
    return total
