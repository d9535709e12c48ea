"""Finite input sets, free-variable values and the universe bound.

Datasets are read from and written to a small JSON format::

    {"sets": {"A": [[1], [5]]}, "free": {"t": 3}, "universe": 10}

Duplicate vectors are kept: witness counts are over positions.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from pydantic import ValidationError

from fopz.config.settings import DNF_CAP
from fopz.models.schemas import DatasetFile
from fopz.services.formula import (
    Formula,
    NormalizedFormula,
    Quantifier,
    QuantifiedVar,
    Vector,
    substitute_free,
    to_dnf,
)
from fopz.services.monitoring import log_event
from fopz.utils.errors import AssignmentError, DatasetError, DimensionError

VectorSet = Tuple[Vector, ...]


@dataclass(frozen=True)
class Dataset:
    sets: Dict[str, VectorSet] = field(default_factory=dict)
    free: Dict[str, int] = field(default_factory=dict)
    universe: int = 1

    @classmethod
    def create(cls, sets: Mapping[str, Sequence[Sequence[int]]],
               free: Optional[Mapping[str, int]] = None,
               universe: Optional[int] = None) -> "Dataset":
        """Validate and freeze raw sets.

        Args:
            sets: set name to list of integer vectors
            free: free-variable values
            universe: bound U; defaults to the largest absolute value present

        Returns:
            Dataset
        """
        frozen: Dict[str, VectorSet] = {}
        largest = 0
        for name, vectors in sets.items():
            converted = tuple(tuple(int(x) for x in v) for v in vectors)
            dims = {len(v) for v in converted}
            if len(dims) > 1:
                raise DimensionError(f"set '{name}' mixes vector dimensions {sorted(dims)}")
            if 0 in dims:
                raise DimensionError(f"set '{name}' contains an empty vector")
            for v in converted:
                largest = max([largest] + [abs(x) for x in v])
            frozen[name] = converted
        free_values = {name: int(value) for name, value in (free or {}).items()}
        largest = max([largest] + [abs(x) for x in free_values.values()])

        if universe is None:
            universe = max(1, largest)
        elif universe < 1:
            raise DatasetError("universe must be a positive integer")
        elif largest > universe:
            raise DatasetError(f"value of absolute size {largest} outside universe [-{universe}, {universe}]")
        return cls(frozen, free_values, int(universe))

    def dimension_of(self, name: str) -> Optional[int]:
        vectors = self.sets[name]
        return len(vectors[0]) if vectors else None

    def to_json(self) -> str:
        """Deterministic serialization (sorted keys, compact separators)."""
        payload = {
            "sets": {name: [list(v) for v in vectors] for name, vectors in self.sets.items()},
            "free": dict(self.free),
            "universe": self.universe,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def loads(text: str) -> Dataset:
    try:
        raw = DatasetFile.model_validate_json(text)
    except ValidationError as e:
        raise DatasetError(f"malformed dataset: {e.errors()[0]['msg']}") from e
    return Dataset.create(raw.sets, raw.free, raw.universe)


def load(path: Union[str, Path]) -> Dataset:
    """Read and validate a dataset file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetError(f"cannot read dataset {path}: {e}") from e
    return loads(text)


def save(d: Dataset, path: Union[str, Path]):
    Path(path).write_text(d.to_json() + "\n", encoding="utf-8")


# ===============================
# BOUND INSTANCES
# ===============================

@dataclass(frozen=True)
class Instance:
    """Closed normalized formula together with its sets in prefix order."""
    normal: NormalizedFormula
    sets: Tuple[VectorSet, ...]

    @property
    def prefix(self) -> Tuple[QuantifiedVar, ...]:
        return self.normal.prefix

    @property
    def k(self) -> int:
        return len(self.sets)

    @property
    def quantifiers(self) -> Tuple[Quantifier, ...]:
        return self.normal.quantifiers

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(q.name for q in self.prefix)

    @property
    def has_empty_set(self) -> bool:
        return any(len(s) == 0 for s in self.sets)

    @property
    def is_existential(self) -> bool:
        return all(q is Quantifier.EXISTS for q in self.quantifiers)

    @property
    def is_universal(self) -> bool:
        return all(q is Quantifier.FORALL for q in self.quantifiers)

    def fix_first(self, vector: Vector) -> "Instance":
        """Bind the first quantified variable to a concrete vector."""
        return Instance(self.normal.bind_variable(self.prefix[0].name, vector), self.sets[1:])

    def negated(self) -> "Instance":
        """Instance deciding the logical negation."""
        return Instance(self.normal.negated(), self.sets)

    def holds(self, assignment: Sequence[Vector]) -> bool:
        return self.normal.holds(dict(zip(self.names, assignment)))


def bind(f: Formula, d: Dataset, cap: int = DNF_CAP) -> Instance:
    """Attach dataset sets and free values to a formula.

    Args:
        f: formula, possibly with free variables
        d: dataset providing every quantified set and free value
        cap: DNF disjunct cap

    Returns:
        Instance with sets ordered as the prefix
    """
    sets = []
    for q in f.prefix:
        if q.set_name not in d.sets:
            raise DatasetError(f"set '{q.set_name}' is not in the dataset")
        dim = d.dimension_of(q.set_name)
        if dim is not None and dim != q.dimension:
            raise DimensionError(
                f"set '{q.set_name}' has dimension {dim} but '{q.name}' is declared with {q.dimension}"
            )
        sets.append(d.sets[q.set_name])

    missing = [name for name in f.free_vars if name not in d.free]
    if missing:
        raise AssignmentError(f"dataset has no value for free variables {missing}")
    closed = substitute_free(f, {name: d.free[name] for name in f.free_vars})
    normal = to_dnf(closed, cap)

    log_event(
        "bind",
        k=f.k,
        sizes=[len(s) for s in sets],
        disjuncts=len(normal.disjuncts),
    )
    return Instance(normal, tuple(sets))
