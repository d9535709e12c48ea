"""Random formulas, datasets and problem inputs.

Everything draws from ``numpy.random.default_rng(seed)`` so a seed fixes the
output byte for byte.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from fopz.services.dataset import Dataset
from fopz.utils.errors import FopzError

RELATIONS = ["<=", "<", "=", "!=", ">=", ">"]

PROBLEMS = ["formula", "dim3", "3sum", "pareto", "hausdorff", "maxconv", "sumset", "rects", "cubes"]


@dataclass(frozen=True)
class GeneratedProblem:
    """JSON-ready payload plus the formula text when the problem has one."""
    payload: Dict[str, Any]
    formula: Optional[str] = None


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_vectors(rng: np.random.Generator, n: int, d: int, bound: int) -> List[List[int]]:
    return rng.integers(-bound, bound + 1, size=(n, d)).tolist()


def random_values(rng: np.random.Generator, n: int, bound: int) -> List[int]:
    return rng.integers(-bound, bound + 1, size=n).tolist()


def with_duplicates(rng: np.random.Generator, vectors: List[List[int]], share: float = 0.3) -> List[List[int]]:
    """Overwrite a share of positions with copies of earlier ones."""
    out = [list(v) for v in vectors]
    for i in range(1, len(out)):
        if rng.random() < share:
            out[i] = list(out[int(rng.integers(0, i))])
    return out


# ===============================
# FORMULAS
# ===============================

def _prefix_text(shape: str, d: int) -> Tuple[str, List[str]]:
    names = [f"x{j}" for j in range(1, len(shape) + 1)]
    parts = []
    for name, q in zip(names, shape):
        keyword = "exists" if q in "E∃" else "forall"
        parts.append(f"{keyword} {name} in S{name[1:]}^{d}")
    return " ".join(parts), names


def _linear_text(terms: Sequence[Tuple[int, str]]) -> str:
    pieces = []
    for coeff, ref in terms:
        body = ref if abs(coeff) == 1 else f"{abs(coeff)}*{ref}"
        if not pieces:
            pieces.append(body if coeff > 0 else f"-{body}")
        else:
            pieces.append(f"{'+' if coeff > 0 else '-'} {body}")
    return " ".join(pieces)


def _random_form(rng: np.random.Generator, names: List[str], d: int, coeff: int) -> List[Tuple[int, str]]:
    terms = []
    for name in names:
        for i in range(1, d + 1):
            c = int(rng.integers(-coeff, coeff + 1))
            if c:
                terms.append((c, f"{name}[{i}]"))
    if not terms:
        name = names[int(rng.integers(0, len(names)))]
        terms.append((1, f"{name}[{int(rng.integers(1, d + 1))}]"))
    return terms


def _atom_text(terms: List[Tuple[int, str]], relation: str, rhs: int) -> str:
    return f"{_linear_text(terms)} {relation} {rhs}"


def random_formula(rng: np.random.Generator, shape: str, d: int = 1, disjuncts: int = 2,
                   atoms: int = 2, coeff: int = 2, constant: int = 10) -> str:
    """Prenex formula with a random DNF-shaped matrix.

    Args:
        rng: generator
        shape: quantifier letters, E for exists and A for forall
        d: dimension of every quantified set
        disjuncts: number of disjuncts in the matrix
        atoms: atoms per disjunct
        coeff: coefficient magnitude bound
        constant: right-hand side magnitude bound

    Returns:
        Formula text
    """
    prefix, names = _prefix_text(shape, d)
    clauses = []
    for _ in range(disjuncts):
        parts = []
        for _ in range(atoms):
            terms = _random_form(rng, names, d, coeff)
            relation = RELATIONS[int(rng.integers(0, len(RELATIONS)))]
            parts.append(_atom_text(terms, relation, int(rng.integers(-constant, constant + 1))))
        clauses.append(" and ".join(parts))
    body = " or ".join(f"({c})" for c in clauses) if len(clauses) > 1 else clauses[0]
    return f"{prefix}: {body}"


def random_dim3_formula(rng: np.random.Generator, shape: str, d: int = 1, hyperplanes: int = 3,
                        disjuncts: int = 2, atoms: int = 2, coeff: int = 2, constant: int = 10) -> str:
    """Formula whose atoms use at most ``hyperplanes`` (ℓ, r) inequalities and their negations."""
    prefix, names = _prefix_text(shape, d)
    planes = [
        (_random_form(rng, names, d, coeff), int(rng.integers(-constant, constant + 1)))
        for _ in range(hyperplanes)
    ]
    clauses = []
    for _ in range(disjuncts):
        parts = []
        for _ in range(atoms):
            terms, rhs = planes[int(rng.integers(0, len(planes)))]
            relation = "<=" if rng.random() < 0.5 else ">"
            parts.append(_atom_text(terms, relation, rhs))
        clauses.append(" and ".join(parts))
    body = " or ".join(f"({c})" for c in clauses) if len(clauses) > 1 else clauses[0]
    return f"{prefix}: {body}"


def random_dataset(rng: np.random.Generator, k: int, n: int, d: int = 1, bound: int = 20,
                   duplicates: bool = False, sizes: Optional[Sequence[int]] = None) -> Dataset:
    """Sets S1..Sk for formulas produced by :func:`random_formula`."""
    sets = {}
    for j in range(1, k + 1):
        size = n if sizes is None else sizes[j - 1]
        vectors = random_vectors(rng, size, d, bound)
        sets[f"S{j}"] = with_duplicates(rng, vectors) if duplicates else vectors
    return Dataset.create(sets)


# ===============================
# GEOMETRY
# ===============================

def random_rectangles(rng: np.random.Generator, n: int, span: int = 20, max_side: int = 8) -> List[Tuple[int, int, int, int]]:
    rects = []
    for _ in range(n):
        x0, y0 = (int(v) for v in rng.integers(0, span, size=2))
        w, h = (int(v) for v in rng.integers(1, max_side + 1, size=2))
        rects.append((x0, y0, x0 + w, y0 + h))
    return rects


def random_cubes(rng: np.random.Generator, n: int, span: int = 12) -> List[Tuple[int, int, int]]:
    return [tuple(int(v) for v in rng.integers(0, span, size=3)) for _ in range(n)]


def stacked_cubes(n: int, side: int = 4) -> List[Tuple[int, int, int]]:
    """Staircase tower: every cube shifted by one unit on each axis from the last."""
    return [(i, i, i * (side - 1)) for i in range(n)]


def gridded_cubes(n: int, side: int = 4) -> List[Tuple[int, int, int]]:
    """Cubes on a lattice with pitch side - 1, so neighbours overlap by one unit."""
    per_axis = max(1, round(n ** (1 / 3)) + 1)
    pitch = side - 1
    corners = []
    for i in range(per_axis):
        for j in range(per_axis):
            for k in range(per_axis):
                if len(corners) < n:
                    corners.append((i * pitch, j * pitch, k * pitch))
    return corners


# ===============================
# PROBLEMS
# ===============================

def generate_problem(problem: str, n: int, seed: int, d: int = 2, bound: int = 20) -> GeneratedProblem:
    """Random input for one ``gen`` problem name."""
    rng = rng_for(seed)
    if problem == "formula":
        text = random_formula(rng, "EAE", d=1)
        return GeneratedProblem(_dataset_payload(random_dataset(rng, 3, n, 1, bound)), text)
    if problem == "dim3":
        text = random_dim3_formula(rng, "AAE", d=1)
        return GeneratedProblem(_dataset_payload(random_dataset(rng, 3, n, 1, bound)), text)
    if problem == "3sum":
        text = "exists a in S1 exists b in S2 exists c in S3: a[1] + b[1] = c[1]"
        return GeneratedProblem(_dataset_payload(random_dataset(rng, 3, n, 1, bound)), text)
    if problem == "pareto":
        return GeneratedProblem({
            "A": random_vectors(rng, n, d, bound),
            "B": random_vectors(rng, n, d, bound),
            "C": random_vectors(rng, n, d, 2 * bound),
        })
    if problem == "hausdorff":
        return GeneratedProblem({
            "A": random_vectors(rng, n, d, bound),
            "B": random_vectors(rng, n, d, bound),
            "C": random_vectors(rng, n, d, bound),
            "gamma": int(rng.integers(0, bound + 1)),
        })
    if problem == "maxconv":
        return GeneratedProblem({
            "A": random_values(rng, n, bound),
            "B": random_values(rng, n, bound),
            "C": random_values(rng, n, 2 * bound),
        })
    if problem == "sumset":
        return GeneratedProblem({
            "A": random_values(rng, n, bound),
            "B": random_values(rng, n, bound),
            "C": random_values(rng, n, 2 * bound),
            "t": int(rng.integers(0, bound + 1)),
        })
    if problem == "rects":
        return GeneratedProblem({"rects": [list(r) for r in random_rectangles(rng, n)]})
    if problem == "cubes":
        return GeneratedProblem({"side": 4, "corners": [list(c) for c in random_cubes(rng, n)]})
    raise FopzError(f"unknown problem '{problem}'; choose from {', '.join(PROBLEMS)}")


def _dataset_payload(d: Dataset) -> Dict[str, Any]:
    return {
        "sets": {name: [list(v) for v in vectors] for name, vectors in d.sets.items()},
        "free": dict(d.free),
        "universe": d.universe,
    }
