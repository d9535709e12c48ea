"""Compilation of existential formulas into families of k-SUM instances.

A strict sum inequality Σx > z over B-bit nonnegative integers is certified
by the shortest bit prefix on which the sum already exceeds z: at that prefix
length ℓ the sum exceeds by a carry b in 1..k, and one bit shorter it falls
short by a deficit w in 0..⌊(k-1)/2⌋. Enumerating (ℓ, b, w) per atom turns a
co-clause of m inequalities into a grid of vector equalities, each tuple
satisfying the co-clause matching exactly one grid point. Vectors are then
packed into scalars digit by digit.
"""

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError

from fopz.config.settings import FAMILY_CAP, IE_SUBSET_CAP, SUM_CAP
from fopz.models.schemas import FamilyManifest, FamilyManifestEntry
from fopz.services import ksum
from fopz.services.baseline import coefficient_rows, project, thresholds
from fopz.services.dataset import Instance
from fopz.services.formula import Atom, Vector
from fopz.services.ksum import KSumInstance
from fopz.services.monitoring import log_event
from fopz.services.prom_metrics import ksum_instances_emitted_total
from fopz.utils import ksum_text
from fopz.utils.errors import CapExceededError, KSumFormatError, PrefixError, ReductionError


# ===============================
# BIT TRICK
# ===============================

def prefix(x: int, ell: int, B: int) -> int:
    """The ℓ most significant bits of a B-bit number: ⌊x / 2^(B-ℓ)⌋."""
    if x < 0 or x >= 1 << B:
        raise ReductionError(f"prefix argument {x} outside [0, 2^{B})")
    if not 0 <= ell <= B:
        raise ReductionError(f"prefix length {ell} outside 0..{B}")
    return x >> (B - ell)


def find_certificate(xs: Sequence[int], z: int, B: int) -> Optional[Tuple[int, int, int]]:
    """Unique (ℓ, b, w) with Σpre_ℓ(x) = pre_ℓ(z) + b and Σpre_{ℓ-1}(x) = pre_{ℓ-1}(z) - w.

    ℓ is the least prefix length on which the sum exceeds; b lies in 1..k and
    w in 0..⌊(k-1)/2⌋. Returns None when Σx <= z.
    """
    for value in list(xs) + [z]:
        prefix(value, B, B)
    if sum(xs) <= z:
        return None
    for ell in range(1, B + 1):
        excess = sum(prefix(x, ell, B) for x in xs) - prefix(z, ell, B)
        if excess > 0:
            deficit = prefix(z, ell - 1, B) - sum(prefix(x, ell - 1, B) for x in xs)
            return ell, excess, deficit
    raise AssertionError("sum exceeds z but no prefix length certifies it")


def find_unique_lb(xs: Sequence[int], z: int, B: int) -> Optional[Tuple[int, int]]:
    """(ℓ, b) of the certificate, or None when Σx <= z."""
    certificate = find_certificate(xs, z, B)
    return None if certificate is None else certificate[:2]


def bit_trick_pairs(xs: Sequence[int], z: int, B: int) -> List[Tuple[int, int]]:
    """All (ℓ, b) with b in 1..k and Σpre_ℓ(x) = pre_ℓ(z) + b; nonempty iff Σx > z."""
    k = len(xs)
    pairs = []
    for ell in range(1, B + 1):
        excess = sum(prefix(x, ell, B) for x in xs) - prefix(z, ell, B)
        if 1 <= excess <= k:
            pairs.append((ell, excess))
    return pairs


# ===============================
# INEQUALITY -> EQUALITY MAPS
# ===============================

@dataclass(frozen=True)
class PrefixParams:
    B: int
    M: int
    k: int
    m: int

    @property
    def max_deficit(self) -> int:
        return (self.k - 1) // 2

    @property
    def grid_size(self) -> int:
        return (self.B * self.k * (self.max_deficit + 1)) ** self.m


GridPoint = Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class IneqToEqMaps:
    """Maps f_j (per quantified variable) and targets g for one co-clause.

    Atom i reads Σ_j p_{i,j}(a_j) >= S_i. With x_j = M + p_{i,j}(a_j) and
    z_i = S_i - 1 + kM the atom becomes Σ_j x_j > z_i over nonnegative values.
    """
    rows: Tuple[Tuple[Tuple[Tuple[int, int], ...], ...], ...]
    thresholds: Tuple[int, ...]
    params: PrefixParams

    def values(self, j: int, vector: Sequence[int]) -> Tuple[int, ...]:
        return project(self.rows[j], vector)

    def shifted(self, j: int, vector: Sequence[int]) -> Tuple[int, ...]:
        return tuple(self.params.M + p for p in self.values(j, vector))

    def targets_z(self) -> Tuple[int, ...]:
        p = self.params
        return tuple(S - 1 + p.k * p.M for S in self.thresholds)

    def project(self, j: int, vector: Sequence[int], ells: Sequence[int]) -> Tuple[int, ...]:
        B = self.params.B
        xs = self.shifted(j, vector)
        return (tuple(prefix(x, ell, B) for x, ell in zip(xs, ells))
                + tuple(prefix(x, ell - 1, B) for x, ell in zip(xs, ells)))

    def target(self, ells: Sequence[int], carries: Sequence[int], deficits: Sequence[int]) -> Tuple[int, ...]:
        B = self.params.B
        zs = self.targets_z()
        return (tuple(prefix(z, ell, B) + b for z, ell, b in zip(zs, ells, carries))
                + tuple(prefix(z, ell - 1, B) - w for z, ell, w in zip(zs, ells, deficits)))

    def ell_grid(self) -> Iterator[Tuple[int, ...]]:
        return product(range(1, self.params.B + 1), repeat=self.params.m)

    def carry_grid(self) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        p = self.params
        carries = list(product(range(1, p.k + 1), repeat=p.m))
        deficits = list(product(range(0, p.max_deficit + 1), repeat=p.m))
        return product(carries, deficits)

    def grid(self) -> Iterator[GridPoint]:
        for ells in self.ell_grid():
            for carries, deficits in self.carry_grid():
                yield ells, carries, deficits

    def certificate(self, vectors: Sequence[Sequence[int]]) -> Optional[GridPoint]:
        """Grid point whose equality holds for this tuple, None if the co-clause fails."""
        B, m = self.params.B, self.params.m
        shifted = [self.shifted(j, v) for j, v in enumerate(vectors)]
        zs = self.targets_z()
        ells, carries, deficits = [], [], []
        for i in range(m):
            found = find_certificate([x[i] for x in shifted], zs[i], B)
            if found is None:
                return None
            ells.append(found[0])
            carries.append(found[1])
            deficits.append(found[2])
        return tuple(ells), tuple(carries), tuple(deficits)


def compute_prefix_params(rows: Sequence, S: Sequence[int], sets: Sequence[Sequence[Vector]], k: int) -> PrefixParams:
    """M and B from the actual data of one co-clause."""
    largest = max((abs(s) for s in S), default=0)
    for j, vectors in enumerate(sets):
        for v in vectors:
            largest = max([largest] + [abs(p) for p in project(rows[j], v)])
    M = 1 + largest
    top = max([k * 2 * M] + [s - 1 + k * M for s in S])
    return PrefixParams(B=top.bit_length(), M=M, k=k, m=len(S))


def ineq_to_eq_maps(clause: Sequence[Atom], names: Sequence[str], sets: Sequence[Sequence[Vector]],
                    params: Optional[PrefixParams] = None) -> IneqToEqMaps:
    """Build the maps of one co-clause over the given data.

    Args:
        clause: >= atoms
        names: quantified variable names in prefix order
        sets: data per variable, used to size M and B and to check params
        params: explicit parameters; computed from the data when omitted

    Returns:
        IneqToEqMaps
    """
    rows = tuple(coefficient_rows(clause, name) for name in names)
    S = thresholds(clause)
    k = len(names)
    if params is None:
        params = compute_prefix_params(rows, S, sets, k)
    if params.k != k or params.m != len(S):
        raise ReductionError(f"parameters for k={params.k}, m={params.m} used on k={k}, m={len(S)}")

    bound = max((abs(s) for s in S), default=0)
    for j, vectors in enumerate(sets):
        for v in vectors:
            bound = max([bound] + [abs(p) for p in project(rows[j], v)])
    if params.M < 1 + bound:
        raise ReductionError(f"shift M={params.M} must be at least {1 + bound}")
    top = max([k * 2 * params.M] + [s - 1 + k * params.M for s in S])
    if top >= 1 << params.B:
        raise ReductionError(f"bit length B={params.B} too small for values up to {top}")
    return IneqToEqMaps(rows, S, params)


# ===============================
# VECTOR -> SCALAR ENCODING
# ===============================

@dataclass(frozen=True)
class VectorKSumInstance:
    lists: Tuple[Tuple[Tuple[Vector, int], ...], ...]
    target: Vector

    def __post_init__(self):
        d = len(self.target)
        for j, lst in enumerate(self.lists):
            for v, m in lst:
                if len(v) != d:
                    raise ReductionError(f"list {j + 1} has a vector of dimension {len(v)}, expected {d}")
                if m < 1:
                    raise ReductionError(f"list {j + 1} has a multiplicity below 1")

    @classmethod
    def from_vectors(cls, lists: Sequence[Iterable[Sequence[int]]], target: Sequence[int]) -> "VectorKSumInstance":
        return cls.from_weighted([Counter(tuple(v) for v in lst) for lst in lists], target)

    @classmethod
    def from_weighted(cls, lists: Sequence[Dict[Vector, int]], target: Sequence[int]) -> "VectorKSumInstance":
        return cls(tuple(tuple(sorted(lst.items())) for lst in lists), tuple(target))

    @property
    def k(self) -> int:
        return len(self.lists)

    @property
    def dimension(self) -> int:
        return len(self.target)

    def bound(self) -> int:
        """Smallest U' with every entry <= U' and every target entry <= k·U' in absolute value."""
        entries = max((abs(x) for lst in self.lists for v, _ in lst for x in v), default=0)
        goal = max((abs(x) for x in self.target), default=0)
        return max(1, entries, -(-goal // self.k))


@dataclass(frozen=True)
class VectorEncoder:
    """enc(v) = Σ_i (v[i] + kU')·Base^i with Base = 2kU' + 1."""
    k: int
    bound: int
    dimension: int

    @property
    def base(self) -> int:
        return 2 * self.k * self.bound + 1

    def encode(self, v: Sequence[int]) -> int:
        shift = self.k * self.bound
        return sum((x + shift) * self.base ** i for i, x in enumerate(v))

    def encode_target(self, t: Sequence[int]) -> int:
        # k summands each shifted by kU' put every digit in a window of width < Base
        shift = self.k * self.k * self.bound
        return sum((x + shift) * self.base ** i for i, x in enumerate(t))

    def decode(self, value: int) -> Vector:
        shift = self.k * self.bound
        digits = []
        for _ in range(self.dimension):
            value, digit = divmod(value, self.base)
            digits.append(digit - shift)
        return tuple(digits)


def decode_vector_value(value: int, k: int, bound: int, dimension: int) -> Vector:
    return VectorEncoder(k, bound, dimension).decode(value)


def encode_vector_instance(v: VectorKSumInstance, bound: Optional[int] = None) -> KSumInstance:
    """Scalar instance whose witnesses are in bijection with those of ``v``.

    Args:
        v: vector instance
        bound: U'; defaults to the smallest admissible value

    Returns:
        KSumInstance with multiplicities preserved
    """
    needed = v.bound()
    if bound is None:
        bound = needed
    elif bound < needed:
        raise ReductionError(f"bound {bound} below required {needed}")
    encoder = VectorEncoder(v.k, bound, v.dimension)
    lists = [{encoder.encode(vec): m for vec, m in lst} for lst in v.lists]
    return KSumInstance.from_weighted(lists, encoder.encode_target(v.target))


# ===============================
# FAMILIES
# ===============================

@dataclass(frozen=True)
class FamilyEntry:
    instance: KSumInstance
    sign: int
    disjuncts: Tuple[int, ...]
    ells: Tuple[int, ...] = ()
    carries: Tuple[int, ...] = ()
    deficits: Tuple[int, ...] = ()
    # encoded value of every position of the first set, when tracked
    first_values: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class KSumFamily:
    entries: Tuple[FamilyEntry, ...]
    mode: str
    k: int

    def __len__(self) -> int:
        return len(self.entries)


def _merge_clauses(clauses: Sequence[Sequence[Atom]]) -> Tuple[Atom, ...]:
    return tuple(dict.fromkeys(atom for clause in clauses for atom in clause))


def _expand_clause(inst: Instance, clause: Sequence[Atom], sign: int, disjuncts: Tuple[int, ...],
                   maps: IneqToEqMaps, keep_multiplicity: bool, track_first: bool) -> Iterator[FamilyEntry]:
    k = inst.k
    for ells in maps.ell_grid():
        projected: List[Counter] = [
            Counter(maps.project(j, v, ells) for v in vectors) for j, vectors in enumerate(inst.sets)
        ]
        zs = maps.targets_z()
        B = maps.params.B
        goal = max(
            [prefix(z, ell, B) + k for z, ell in zip(zs, ells)]
            + [prefix(z, ell - 1, B) for z, ell in zip(zs, ells)],
            default=0,
        )
        largest = max((x for counter in projected for vec in counter for x in vec), default=0)
        encoder = VectorEncoder(k, max(1, largest, -(-goal // k)), 2 * len(clause))

        lists = []
        for counter in projected:
            if keep_multiplicity:
                lists.append({encoder.encode(vec): m for vec, m in counter.items()})
            else:
                lists.append({encoder.encode(vec): 1 for vec in counter})
        first_values = None
        if track_first:
            first_values = tuple(encoder.encode(maps.project(0, v, ells)) for v in inst.sets[0])

        for carries, deficits in maps.carry_grid():
            target = encoder.encode_target(maps.target(ells, carries, deficits))
            yield FamilyEntry(
                KSumInstance.from_weighted(lists, target),
                sign,
                disjuncts,
                tuple(ells),
                tuple(carries),
                tuple(deficits),
                first_values,
            )


def _require_existential(inst: Instance):
    if not inst.is_existential:
        raise PrefixError("compilation requires an all-exists prefix")
    if inst.k < 2:
        raise PrefixError("compilation to k-SUM requires k >= 2")


def iter_decision_family(inst: Instance, family_cap: int = FAMILY_CAP) -> Iterator[FamilyEntry]:
    """Decision entries, deduplicated; the formula is true iff some entry is solvable."""
    _require_existential(inst)
    planned = []
    total = 0
    for h, clause in enumerate(inst.normal.disjuncts):
        maps = ineq_to_eq_maps(clause, inst.names, inst.sets)
        total += maps.params.grid_size
        planned.append((h, clause, maps))
    if total > family_cap:
        raise CapExceededError(f"family of {total} instances exceeds cap {family_cap}")

    seen = set()
    for h, clause, maps in planned:
        for entry in _expand_clause(inst, clause, 1, (h,), maps, keep_multiplicity=False, track_first=False):
            if entry.instance in seen:
                continue
            seen.add(entry.instance)
            ksum_instances_emitted_total.inc()
            yield entry


def compile_decision(inst: Instance, family_cap: int = FAMILY_CAP) -> KSumFamily:
    """All decision entries of an existential instance.

    Args:
        inst: all-∃ instance, k >= 2
        family_cap: bound on the planned number of instances

    Returns:
        KSumFamily in decision mode (multiplicities dropped)
    """
    entries = tuple(iter_decision_family(inst, family_cap))
    log_event("compile_decision", k=inst.k, disjuncts=len(inst.normal.disjuncts), instances=len(entries))
    return KSumFamily(entries, "decision", inst.k)


def family_bound(inst: Instance) -> int:
    """H·max grid size, the planned decision family size bound."""
    sizes = [ineq_to_eq_maps(c, inst.names, inst.sets).params.grid_size for c in inst.normal.disjuncts]
    return len(sizes) * max(sizes, default=0)


def compile_counting(inst: Instance, ie_cap: int = IE_SUBSET_CAP, family_cap: int = FAMILY_CAP,
                     track_first: bool = False) -> KSumFamily:
    """Signed family whose weighted counts sum to the witness count.

    Each nonempty subset of co-clauses contributes its conjunction with sign
    (-1)^(|subset|+1). A tuple satisfying a conjunction matches one grid
    point, so the multiset counts of the entries count it once per subset.

    Args:
        inst: all-∃ instance, k >= 2
        ie_cap: bound on the number of co-clause subsets
        family_cap: bound on the total number of instances
        track_first: record per-position encodings of the first set (all-ints)

    Returns:
        KSumFamily in counting mode
    """
    _require_existential(inst)
    H = len(inst.normal.disjuncts)
    if (1 << H) - 1 > ie_cap:
        raise CapExceededError(f"{(1 << H) - 1} co-clause subsets exceed cap {ie_cap}")

    entries: List[FamilyEntry] = []
    planned = 0
    for size in range(1, H + 1):
        sign = 1 if size % 2 == 1 else -1
        for subset in combinations(range(H), size):
            clause = _merge_clauses([inst.normal.disjuncts[h] for h in subset])
            maps = ineq_to_eq_maps(clause, inst.names, inst.sets)
            planned += maps.params.grid_size
            if planned > family_cap:
                raise CapExceededError(f"family exceeds cap {family_cap}")
            entries.extend(_expand_clause(inst, clause, sign, subset, maps, True, track_first))

    ksum_instances_emitted_total.inc(len(entries))
    log_event("compile_counting", k=inst.k, disjuncts=H, instances=len(entries))
    return KSumFamily(tuple(entries), "counting", inst.k)


# ===============================
# FAMILY EVALUATION AND STORAGE
# ===============================

def solve_family(family: Union[KSumFamily, Iterable[FamilyEntry]], threads: int = 1, cap: int = SUM_CAP) -> bool:
    entries = family.entries if isinstance(family, KSumFamily) else family
    if threads <= 1:
        return any(ksum.solve(entry.instance, cap) for entry in entries)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return any(pool.map(lambda entry: ksum.solve(entry.instance, cap), entries))


def count_family(family: KSumFamily, cap: int = SUM_CAP) -> int:
    return sum(entry.sign * ksum.count(entry.instance, cap) for entry in family.entries)


def count_family_per_first(family: KSumFamily, n_first: int, cap: int = SUM_CAP) -> List[int]:
    """Per-position witness counts of the first set via all-ints 3-SUM counting."""
    if family.k != 3:
        raise PrefixError(f"per-element counting needs k = 3, got k = {family.k}")
    per = [0] * n_first
    for entry in family.entries:
        if entry.first_values is None:
            raise ReductionError("family was compiled without first-set tracking")
        report = ksum.count_allints_3(entry.instance, cap)
        for position, value in enumerate(entry.first_values):
            per[position] += entry.sign * report.per_first_element.get(value, 0)
    return per


def write_family(family: KSumFamily, out_dir: Union[str, Path]) -> Path:
    """One k-SUM text file per entry plus ``manifest.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    for i, entry in enumerate(family.entries):
        name = f"instance_{i:05d}.ksum"
        ksum_text.write(entry.instance, out / name)
        records.append(FamilyManifestEntry(
            file=name,
            sign=entry.sign,
            disjuncts=list(entry.disjuncts),
            ell=list(entry.ells),
            carry=list(entry.carries),
            deficit=list(entry.deficits),
        ))
    manifest = FamilyManifest(mode=family.mode, k=family.k, entries=records)
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest.model_dump(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def read_family(out_dir: Union[str, Path]) -> KSumFamily:
    out = Path(out_dir)
    try:
        manifest = FamilyManifest.model_validate_json((out / "manifest.json").read_text(encoding="utf-8"))
    except OSError as e:
        raise KSumFormatError(f"cannot read family manifest in {out}: {e}") from e
    except ValidationError as e:
        raise KSumFormatError(f"malformed family manifest: {e.errors()[0]['msg']}") from e
    entries = tuple(
        FamilyEntry(
            ksum_text.read(out / record.file),
            record.sign,
            tuple(record.disjuncts),
            tuple(record.ell),
            tuple(record.carry),
            tuple(record.deficit),
        )
        for record in manifest.entries
    )
    return KSumFamily(entries, manifest.mode, manifest.k)
