"""Built-in problems: Pareto sums, Hausdorff distance under translations,
sumset approximation, (max,+) convolution lower bounds and classic
k-SUM-style encodings.

Every problem has a direct algorithm and a formula route through the
dispatcher; the two are expected to agree.
"""

from bisect import bisect_right
from dataclasses import dataclass
from itertools import product
from operator import add
from typing import Callable, Dict, List, Mapping, Sequence, Set, Tuple

import numpy as np

from fopz.config.settings import SUM_CAP
from fopz.services import rangeindex
from fopz.services.dataset import Dataset, Instance, bind
from fopz.services.dispatch import decide_dispatch
from fopz.services.formula import Vector, parse
from fopz.services.geometry import INF, Box
from fopz.services.ksum import KSumInstance, solve
from fopz.services.monitoring import log_event
from fopz.utils.errors import CapExceededError, ConsistencyError, DatasetError, DimensionError

Points = Sequence[Sequence[int]]

INT64_HALF = 2 ** 62


# ===============================
# ENCODINGS
# ===============================

@dataclass(frozen=True)
class Encoding:
    """Formula text plus dataset; ``negate`` flips the formula's answer into the problem's."""
    text: str
    dataset: Dataset
    negate: bool = False

    def instance(self) -> Instance:
        return bind(parse(self.text), self.dataset)

    def decide(self, engine: str = "auto") -> bool:
        result = decide_dispatch(self.instance(), engine)
        return not result if self.negate else result


def _points(X: Points) -> Tuple[Vector, ...]:
    return tuple(tuple(int(x) for x in p) for p in X)


def _common_dimension(**sets: Points) -> int:
    dims = {len(p) for X in sets.values() for p in X}
    if len(dims) > 1:
        raise DimensionError(f"inputs mix dimensions {sorted(dims)}")
    return dims.pop() if dims else 1


def _conjunction(parts: List[str]) -> str:
    return " and ".join(parts)


def _fits_int64(*sets: Points) -> bool:
    """Every coordinate below 2^62 in magnitude, so pairwise sums stay inside int64."""
    return all(abs(int(x)) < INT64_HALF for X in sets for p in X for x in p)


def sumset(A: Points, B: Points, cap: int = SUM_CAP) -> Set[Vector]:
    """Distinct vectors a + b.

    Vectorized through numpy when the coordinates fit; Python ints otherwise.
    """
    if not A or not B:
        return set()
    if len(A) * len(B) > cap:
        raise CapExceededError(f"sumset of {len(A)}·{len(B)} vectors exceeds cap {cap}")
    if not _fits_int64(A, B):
        return {tuple(map(add, a, b)) for a in _points(A) for b in _points(B)}
    sums = (np.asarray(A, dtype=np.int64)[:, None, :] + np.asarray(B, dtype=np.int64)[None, :, :])
    rows = np.unique(sums.reshape(-1, sums.shape[-1]), axis=0)
    return {tuple(int(x) for x in row) for row in rows}


# ===============================
# PARETO SUMS
# ===============================

@dataclass(frozen=True)
class ParetoVerdict:
    inclusion: bool
    dominance: bool
    minimality: bool

    @property
    def is_pareto_sum(self) -> bool:
        return self.inclusion and self.dominance and self.minimality


def pareto_formula(d: int) -> str:
    body = _conjunction([f"c[{i}] >= a[{i}] + b[{i}]" for i in range(1, d + 1)])
    return f"forall a in A^{d} forall b in B^{d} exists c in C^{d}: {body}"


def pareto_encoding(A: Points, B: Points, C: Points) -> Encoding:
    d = _common_dimension(A=A, B=B, C=C)
    return Encoding(pareto_formula(d), Dataset.create({"A": A, "B": B, "C": C}))


def pareto_verify(A: Points, B: Points, C: Points, cross_check: bool = False) -> bool:
    """Every a + b is dominated by some c.

    Args:
        A, B, C: point sets of one dimension
        cross_check: also decide the ∀∀∃ formula and compare

    Returns:
        Dominance verdict
    """
    d = _common_dimension(A=A, B=B, C=C)
    index = rangeindex.build(_points(C), dimension=d)
    result = all(index.exists_dominating(s) for s in sumset(A, B))
    if cross_check:
        via_formula = pareto_encoding(A, B, C).decide()
        if via_formula != result:
            raise ConsistencyError(f"pareto dominance: index says {result}, formula says {via_formula}")
    return result


def pareto_front(points: Points) -> List[Vector]:
    """Maximal points under coordinatewise ≤, sorted descending."""
    ordered = sorted(set(_points(points)), reverse=True)
    if not ordered:
        return []
    if len(ordered[0]) == 2:
        front, best = [], None
        for p in ordered:
            if best is None or p[1] > best:
                front.append(p)
                best = p[1]
        return front
    # a dominator is lexicographically larger, so it is already kept
    front = []
    for p in ordered:
        if not any(all(x >= y for x, y in zip(q, p)) for q in front):
            front.append(p)
    return front


def _is_antichain(C: Tuple[Vector, ...]) -> bool:
    distinct = sorted(set(C), reverse=True)
    if not distinct:
        return True
    d = len(distinct[0])
    if d == 2:
        best = None
        for p in distinct:
            if best is not None and p[1] <= best:
                return False
            best = p[1]
        return True
    index = rangeindex.build(distinct, dimension=d)
    upper = (INF,) * d
    return all(
        index.count_in_box(Box.make(p, upper, (False,) * d, (True,) * d)) == 1
        for p in distinct
    )


def pareto_verify_extended(A: Points, B: Points, C: Points, cap: int = SUM_CAP) -> ParetoVerdict:
    """Inclusion C ⊆ A + B, dominance and minimality of C."""
    _common_dimension(A=A, B=B, C=C)
    points = _points(C)
    sums = sumset(A, B, cap)
    return ParetoVerdict(
        inclusion=all(c in sums for c in points),
        dominance=pareto_verify(A, B, C),
        minimality=_is_antichain(points),
    )


def pareto_compute(A: Points, B: Points, cap: int = SUM_CAP) -> List[Vector]:
    _common_dimension(A=A, B=B)
    front = pareto_front(sorted(sumset(A, B, cap)))
    log_event("pareto_compute", sizes=[len(A), len(B)], front=len(front))
    return front


def pareto_verify_via_compute(A: Points, B: Points, C: Points, cap: int = SUM_CAP) -> bool:
    """Dominance decided from the computed Pareto sum: each front point needs a dominator in C."""
    d = _common_dimension(A=A, B=B, C=C)
    index = rangeindex.build(_points(C), dimension=d)
    return all(index.exists_dominating(p) for p in pareto_compute(A, B, cap))


def pareto_verify_naive(A: Points, B: Points, C: Points) -> bool:
    return all(
        any(all(c[i] >= a[i] + b[i] for i in range(len(c))) for c in C)
        for a in A for b in B
    )


# ===============================
# HAUSDORFF UNDER TRANSLATIONS
# ===============================

def hausdorff_formula(d: int) -> str:
    parts = []
    for i in range(1, d + 1):
        parts.append(f"b[{i}] - c[{i}] - t[{i}] <= gamma")
        parts.append(f"c[{i}] + t[{i}] - b[{i}] <= gamma")
    return f"exists t in A^{d} forall b in B^{d} exists c in C^{d}: {_conjunction(parts)}"


def hausdorff_encoding(A: Points, B: Points, C: Points, gamma: int) -> Encoding:
    if gamma < 0:
        raise DatasetError("gamma must be non-negative")
    d = _common_dimension(A=A, B=B, C=C)
    return Encoding(hausdorff_formula(d), Dataset.create({"A": A, "B": B, "C": C}, {"gamma": gamma}))


def hausdorff_n_translations(A: Points, B: Points, C: Points, gamma: int, engine: str = "auto") -> bool:
    """min over τ ∈ A of max over b of min over c of ‖b - (c + τ)‖∞ is at most gamma."""
    return hausdorff_encoding(A, B, C, gamma).decide(engine)


def hausdorff_naive(A: Points, B: Points, C: Points, gamma: int) -> bool:
    return any(
        all(
            any(max(abs(bi - ci - ti) for bi, ci, ti in zip(b, c, t)) <= gamma for c in C)
            for b in B
        )
        for t in A
    )


# ===============================
# SUMSET APPROXIMATION
# ===============================

def _scalar_sums(A: Sequence[int], B: Sequence[int], cap: int) -> Set[int]:
    return {s[0] for s in sumset([(a,) for a in A], [(b,) for b in B], cap)}


def _merged_intervals(C: Sequence[int], t: int) -> Tuple[List[int], List[int]]:
    starts: List[int] = []
    ends: List[int] = []
    for c in sorted(set(C)):
        if ends and c <= ends[-1] + 1:
            ends[-1] = max(ends[-1], c + t)
        else:
            starts.append(c)
            ends.append(c + t)
    return starts, ends


def sumset_approx(A: Sequence[int], B: Sequence[int], C: Sequence[int], t: int, cap: int = SUM_CAP) -> bool:
    """A + B ⊆ C + {0, ..., t}.

    C + {0..t} is kept as a union of merged integer intervals; every sum is
    located by binary search on the interval starts.
    """
    if t < 0:
        raise DatasetError("t must be non-negative")
    starts, ends = _merged_intervals(C, t)
    for s in _scalar_sums(A, B, cap):
        i = bisect_right(starts, s) - 1
        if i < 0 or s > ends[i]:
            return False
    return True


def sumset_inclusion(A: Sequence[int], B: Sequence[int], C: Sequence[int], cap: int = SUM_CAP) -> bool:
    """C ⊆ A + B."""
    sums = _scalar_sums(A, B, cap)
    return all(c in sums for c in C)


def is_additive_approximation(A: Sequence[int], B: Sequence[int], C: Sequence[int], t: int,
                              cap: int = SUM_CAP) -> bool:
    """C is an additive t-approximation of A + B: C ⊆ A + B ⊆ C + {0..t}."""
    return sumset_inclusion(A, B, C, cap) and sumset_approx(A, B, C, t, cap)


def sumset_approx_formula() -> str:
    return "forall a in A forall b in B exists c in C: c[1] <= a[1] + b[1] and a[1] + b[1] <= c[1] + t"


def sumset_approx_encoding(A: Sequence[int], B: Sequence[int], C: Sequence[int], t: int) -> Encoding:
    sets = {"A": [[a] for a in A], "B": [[b] for b in B], "C": [[c] for c in C]}
    return Encoding(sumset_approx_formula(), Dataset.create(sets, {"t": t}))


def sumset_approx_naive(A: Sequence[int], B: Sequence[int], C: Sequence[int], t: int) -> bool:
    covered = {c + r for c in C for r in range(t + 1)}
    return all(a + b in covered for a in A for b in B)


def universal_3sum_formula() -> str:
    return "forall c in C exists a in A exists b in B: a[1] + b[1] = c[1]"


def universal_3sum_encoding(A: Sequence[int], B: Sequence[int], C: Sequence[int]) -> Encoding:
    sets = {"A": [[a] for a in A], "B": [[b] for b in B], "C": [[c] for c in C]}
    return Encoding(universal_3sum_formula(), Dataset.create(sets))


# ===============================
# (MAX,+) CONVOLUTION LOWER BOUND
# ===============================

@dataclass(frozen=True)
class MaxConvReport:
    """Bound verdict from the direct check and from both formula encodings."""
    direct: bool
    exists_forall_exists: bool
    forall_exists_exists: bool

    @property
    def consistent(self) -> bool:
        return self.direct == self.exists_forall_exists == self.forall_exists_exists


def _check_lengths(A: Sequence[int], B: Sequence[int], C: Sequence[int]) -> int:
    if not len(A) == len(B) == len(C):
        raise DatasetError(f"arrays must have equal length, got {len(A)}, {len(B)}, {len(C)}")
    return len(A)


def maxconv_lb(A: Sequence[int], B: Sequence[int], C: Sequence[int]) -> bool:
    """C[k] <= max over i + j = k of A[i] + B[j], for every k."""
    n = _check_lengths(A, B, C)
    return all(C[k] <= max(A[i] + B[k - i] for i in range(k + 1)) for k in range(n))


def _maxconv_shift(A: Sequence[int], B: Sequence[int], C: Sequence[int]) -> int:
    return 3 * max((abs(x) for x in list(A) + list(B) + list(C)), default=0) + 1


def maxconv_violation_encoding(A: Sequence[int], B: Sequence[int], C: Sequence[int]) -> Encoding:
    """∃k ∀i ∃j: i + j = k and C[k] > A[i] + B[j]; true iff the bound fails.

    Pairs are (index, value). B is padded with (-j, -M) so that i > k still
    finds a partner, which never blocks the strict inequality.
    """
    n = _check_lengths(A, B, C)
    M = _maxconv_shift(A, B, C)
    sets = {
        "A": [[i, a] for i, a in enumerate(A)],
        "B": [[j, b] for j, b in enumerate(B)] + [[-j, -M] for j in range(1, n)],
        "C": [[k, c] for k, c in enumerate(C)],
    }
    text = "exists c in C^2 forall a in A^2 exists b in B^2: a[1] + b[1] = c[1] and c[2] > a[2] + b[2]"
    return Encoding(text, Dataset.create(sets), negate=True)


def maxconv_cover_encoding(A: Sequence[int], B: Sequence[int], C: Sequence[int]) -> Encoding:
    """∀k ∃i ∃j: i + j = k and C[k] <= A[i] + B[j]; C is padded with (k, -M), k = n..2n-2."""
    n = _check_lengths(A, B, C)
    M = _maxconv_shift(A, B, C)
    sets = {
        "A": [[i, a] for i, a in enumerate(A)],
        "B": [[j, b] for j, b in enumerate(B)],
        "C": [[k, c] for k, c in enumerate(C)] + [[k, -M] for k in range(n, 2 * n - 1)],
    }
    text = "forall c in C^2 exists a in A^2 exists b in B^2: a[1] + b[1] = c[1] and c[2] <= a[2] + b[2]"
    return Encoding(text, Dataset.create(sets))


def maxconv_report(A: Sequence[int], B: Sequence[int], C: Sequence[int], engine: str = "auto") -> MaxConvReport:
    report = MaxConvReport(
        direct=maxconv_lb(A, B, C),
        exists_forall_exists=maxconv_violation_encoding(A, B, C).decide(engine),
        forall_exists_exists=maxconv_cover_encoding(A, B, C).decide(engine),
    )
    if not report.consistent:
        log_event("maxconv_mismatch", direct=report.direct,
                  violation=report.exists_forall_exists, cover=report.forall_exists_exists)
    return report


# ===============================
# CLASSIC ENCODINGS
# ===============================

def _scalars(name: str, values: Sequence[int]) -> Dict[str, List[List[int]]]:
    return {name: [[int(v)] for v in values]}


def three_sum_encoding(A: Sequence[int], B: Sequence[int], C: Sequence[int]) -> Encoding:
    sets = {**_scalars("A", A), **_scalars("B", B), **_scalars("C", C)}
    return Encoding("exists a in A exists b in B exists c in C: a[1] + b[1] = c[1]", Dataset.create(sets))


def three_sum_direct(A: Sequence[int], B: Sequence[int], C: Sequence[int]) -> bool:
    sums = set(C)
    return any(a + b in sums for a in A for b in B)


def ksum_encoding(lists: Sequence[Sequence[int]], target: int) -> Encoding:
    k = len(lists)
    if k < 2:
        raise DatasetError("k-SUM needs at least two lists")
    prefix = " ".join(f"exists x{j} in L{j}" for j in range(1, k + 1))
    total = " + ".join(f"x{j}[1]" for j in range(1, k + 1))
    sets: Dict[str, List[List[int]]] = {}
    for j, values in enumerate(lists, start=1):
        sets.update(_scalars(f"L{j}", values))
    return Encoding(f"{prefix}: {total} = target", Dataset.create(sets, {"target": target}))


def ksum_direct(lists: Sequence[Sequence[int]], target: int) -> bool:
    return solve(KSumInstance.from_values(lists, target))


def three_average_encoding(A: Sequence[int]) -> Encoding:
    """Formula true iff A has a three-term progression; the problem asks whether A is free of one."""
    text = ("exists a1 in A exists a2 in A exists a3 in A: "
            "a1[1] < a2[1] and a2[1] < a3[1] and a1[1] + a3[1] = 2*a2[1]")
    return Encoding(text, Dataset.create(_scalars("A", A)), negate=True)


def three_average_free_direct(A: Sequence[int]) -> bool:
    values = sorted(set(A))
    present = set(values)
    return not any(
        2 * values[j] - values[i] in present
        for i in range(len(values))
        for j in range(i + 1, len(values))
    )


def conv3sum_encoding(X: Sequence[int], Y: Sequence[int], Z: Sequence[int]) -> Encoding:
    """Sequences as (index, value) pairs: ∃i, j with X[i] + Y[j] = Z[i + j]."""
    sets = {
        "X": [[i, x] for i, x in enumerate(X)],
        "Y": [[j, y] for j, y in enumerate(Y)],
        "Z": [[k, z] for k, z in enumerate(Z)],
    }
    text = "exists a in X^2 exists b in Y^2 exists c in Z^2: a[1] + b[1] = c[1] and a[2] + b[2] = c[2]"
    return Encoding(text, Dataset.create(sets))


def conv3sum_direct(X: Sequence[int], Y: Sequence[int], Z: Sequence[int]) -> bool:
    return any(
        X[i] + Y[j] == Z[i + j]
        for i, j in product(range(len(X)), range(len(Y)))
        if i + j < len(Z)
    )


def _edge_tuples(edges: Sequence[Tuple[int, int]]) -> List[List[int]]:
    tuples = []
    for edge_id, (alpha, omega) in enumerate(edges):
        if alpha == omega:
            raise DatasetError(f"edge {edge_id} is a self-loop on node {alpha}")
        tuples.append([edge_id, int(alpha), int(omega)])
    return tuples


def triangle_encoding(edges: Sequence[Tuple[int, int]]) -> Encoding:
    """Directed edges as (id, tail, head); a triangle chains three heads into tails."""
    text = ("exists e1 in E^3 exists e2 in E^3 exists e3 in E^3: "
            "e1[3] = e2[2] and e2[3] = e3[2] and e3[3] = e1[2]")
    return Encoding(text, Dataset.create({"E": _edge_tuples(edges)}))


def triangle_direct(edges: Sequence[Tuple[int, int]]) -> bool:
    _edge_tuples(edges)
    succ: Dict[int, Set[int]] = {}
    for alpha, omega in edges:
        succ.setdefault(alpha, set()).add(omega)
    return any(
        u in succ.get(w, ())
        for u, heads in succ.items()
        for v in heads
        for w in succ.get(v, ())
    )


ClassicEntry = Tuple[Callable[..., Encoding], Callable[..., bool]]

CLASSIC_ENCODERS: Mapping[str, ClassicEntry] = {
    "3sum": (three_sum_encoding, three_sum_direct),
    "ksum": (ksum_encoding, ksum_direct),
    "3avg": (three_average_encoding, three_average_free_direct),
    "conv3sum": (conv3sum_encoding, conv3sum_direct),
    "triangle": (triangle_encoding, triangle_direct),
}


def classic_encoders() -> Dict[str, ClassicEntry]:
    """Name → (encoder, direct checker); ``encoder(...).decide()`` equals the checker."""
    return dict(CLASSIC_ENCODERS)


def solve_classic(name: str, *args, engine: str = "auto") -> bool:
    encoder, _ = CLASSIC_ENCODERS[name]
    return encoder(*args).decide(engine)
