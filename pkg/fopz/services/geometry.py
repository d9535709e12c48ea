"""Boxes with open/closed endpoints, congruent cube sets and membership oracles.

Coordinates are integers or ±inf; query points may be integers or
``fractions.Fraction`` values, so every membership test is exact.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, List, Optional, Sequence, Set, Tuple, Union

from pydantic import ValidationError

from fopz.models.schemas import BoxModel, CubeSetModel
from fopz.utils.errors import GeometryError

INF = math.inf

Coordinate = Union[int, float]
Number = Union[int, Fraction]


def rational(numerator: int, denominator: int = 1) -> Fraction:
    return Fraction(numerator, denominator)


# ===============================
# BOXES
# ===============================

@dataclass(frozen=True)
class Box:
    lo: Tuple[Coordinate, ...]
    hi: Tuple[Coordinate, ...]
    lo_open: Tuple[bool, ...]
    hi_open: Tuple[bool, ...]

    def __post_init__(self):
        d = len(self.lo)
        if not (len(self.hi) == len(self.lo_open) == len(self.hi_open) == d):
            raise GeometryError("box endpoint lists differ in length")
        for i in range(d):
            lo, hi = self.lo[i], self.hi[i]
            if lo == INF or hi == -INF:
                raise GeometryError(f"empty interval in dimension {i + 1}")
            if lo > hi:
                raise GeometryError(f"lo > hi in dimension {i + 1}: {lo} > {hi}")
            if lo == hi and (self.lo_open[i] or self.hi_open[i]):
                raise GeometryError(f"degenerate interval in dimension {i + 1} must be closed")
            if (lo == -INF and not self.lo_open[i]) or (hi == INF and not self.hi_open[i]):
                raise GeometryError(f"infinite endpoint in dimension {i + 1} must be open")

    @classmethod
    def make(cls, lo: Sequence[Coordinate], hi: Sequence[Coordinate],
             lo_open: Sequence[bool], hi_open: Sequence[bool]) -> "Box":
        """Constructor that forces infinite endpoints open."""
        return cls(
            tuple(lo),
            tuple(hi),
            tuple(bool(o) or x == -INF for x, o in zip(lo, lo_open)),
            tuple(bool(o) or x == INF for x, o in zip(hi, hi_open)),
        )

    @classmethod
    def closed(cls, lo: Sequence[int], hi: Sequence[int]) -> "Box":
        d = len(lo)
        return cls(tuple(lo), tuple(hi), (False,) * d, (False,) * d)

    @classmethod
    def point(cls, p: Sequence[int]) -> "Box":
        return cls.closed(p, p)

    @property
    def dimension(self) -> int:
        return len(self.lo)

    @property
    def is_full_dimensional(self) -> bool:
        return all(lo < hi for lo, hi in zip(self.lo, self.hi))

    @property
    def is_bounded(self) -> bool:
        return all(math.isfinite(x) for x in self.lo + self.hi)

    def contains(self, p: Sequence[Number]) -> bool:
        if len(p) != self.dimension:
            raise GeometryError(f"point of dimension {len(p)} queried on a {self.dimension}-box")
        for x, lo, hi, lo_open, hi_open in zip(p, self.lo, self.hi, self.lo_open, self.hi_open):
            if x < lo or (x == lo and lo_open):
                return False
            if x > hi or (x == hi and hi_open):
                return False
        return True

    def volume(self) -> Union[int, float]:
        """Lebesgue measure; 0 for degenerate boxes, inf for unbounded full-dimensional ones."""
        if not self.is_full_dimensional:
            return 0
        total = 1
        for lo, hi in zip(self.lo, self.hi):
            total *= hi - lo
        return total

    def translate(self, offset: Sequence[int]) -> "Box":
        return Box(
            tuple(lo + o for lo, o in zip(self.lo, offset)),
            tuple(hi + o for hi, o in zip(self.hi, offset)),
            self.lo_open,
            self.hi_open,
        )

    def integer_ranges(self) -> Optional[List[Tuple[Coordinate, Coordinate]]]:
        """Closed integer range per dimension, or None when no lattice point is inside."""
        ranges = []
        for lo, hi, lo_open, hi_open in zip(self.lo, self.hi, self.lo_open, self.hi_open):
            lo_int = lo + 1 if (lo_open and lo != -INF) else lo
            hi_int = hi - 1 if (hi_open and hi != INF) else hi
            if lo_int > hi_int:
                return None
            ranges.append((lo_int, hi_int))
        return ranges

    # --- JSON codecs ---
    def to_model(self) -> BoxModel:
        return BoxModel(
            lo=[None if x == -INF else int(x) for x in self.lo],
            hi=[None if x == INF else int(x) for x in self.hi],
            lo_open=list(self.lo_open),
            hi_open=list(self.hi_open),
        )

    @classmethod
    def from_model(cls, model: BoxModel) -> "Box":
        return cls.make(
            [-INF if x is None else x for x in model.lo],
            [INF if x is None else x for x in model.hi],
            model.lo_open,
            model.hi_open,
        )

    def describe(self) -> str:
        parts = []
        for lo, hi, lo_open, hi_open in zip(self.lo, self.hi, self.lo_open, self.hi_open):
            parts.append(f"{'(' if lo_open else '['}{lo},{hi}{')' if hi_open else ']'}")
        return "x".join(parts)


def boxes_to_json(boxes: Iterable[Box]) -> str:
    return json.dumps([b.to_model().model_dump() for b in boxes], separators=(",", ":"))


def boxes_from_json(text: str) -> List[Box]:
    try:
        raw = json.loads(text)
        if not isinstance(raw, list):
            raise GeometryError("expected a JSON array of boxes")
        return [Box.from_model(BoxModel.model_validate(item)) for item in raw]
    except (ValueError, ValidationError) as e:
        if isinstance(e, GeometryError):
            raise
        raise GeometryError(f"malformed box list: {e}") from e


# ===============================
# CONGRUENT CUBES
# ===============================

@dataclass(frozen=True)
class CubeSet:
    side: int
    corners: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.side < 1:
            raise GeometryError("cube side must be a positive integer")
        dims = {len(c) for c in self.corners}
        if len(dims) > 1:
            raise GeometryError(f"cube corners mix dimensions {sorted(dims)}")

    @classmethod
    def from_cubes(cls, cubes: Sequence[Tuple[Sequence[int], int]]) -> "CubeSet":
        """Build from (corner, side) pairs; all sides must agree."""
        sides = {int(side) for _, side in cubes}
        if len(sides) > 1:
            raise GeometryError(f"cubes are not congruent: sides {sorted(sides)}")
        if not sides:
            raise GeometryError("empty cube list has no side length")
        return cls(sides.pop(), tuple(tuple(int(x) for x in corner) for corner, _ in cubes))

    @property
    def dimension(self) -> int:
        return len(self.corners[0]) if self.corners else 3

    def boxes(self) -> List[Box]:
        return [Box.closed(c, tuple(x + self.side for x in c)) for c in self.corners]

    def contains(self, p: Sequence[Number]) -> bool:
        return cube_union_contains(self, p)

    def to_json(self) -> str:
        return CubeSetModel(side=self.side, corners=[list(c) for c in self.corners]).model_dump_json()

    @classmethod
    def from_json(cls, text: str) -> "CubeSet":
        try:
            model = CubeSetModel.model_validate_json(text)
        except ValidationError as e:
            raise GeometryError(f"malformed cube set: {e.errors()[0]['msg']}") from e
        return cls(model.side, tuple(tuple(c) for c in model.corners))


def cube_union_contains(cubes: CubeSet, p: Sequence[Number]) -> bool:
    s = cubes.side
    return any(all(c <= x <= c + s for c, x in zip(corner, p)) for corner in cubes.corners)


# ===============================
# ORTHANTS
# ===============================

def orthant_contains(vk: Set[int], vj: Set[int], c: Sequence[int], s: Sequence[int]) -> bool:
    """s[u] <= c[u] for u in VK and s[u] >= c[u] + 1 for u in VJ (1-based)."""
    return all(s[u - 1] <= c[u - 1] for u in vk) and all(s[u - 1] >= c[u - 1] + 1 for u in vj)


def orthant_to_cube(vk: Iterable[int], vj: Iterable[int], c: Sequence[int], M: int) -> Box:
    """Closed cube of side 2M agreeing with the orthant on every sum with ‖s‖∞ <= M.

    Args:
        vk: coordinates (1-based) bounded above by c
        vj: coordinates (1-based) bounded below by c + 1
        c: apex of the orthant
        M: data bound, at least twice the largest 1-norm of a data triple

    Returns:
        Box
    """
    vk, vj = set(vk), set(vj)
    if vk & vj:
        raise GeometryError(f"orthant coordinates overlap: {sorted(vk & vj)}")
    lo, hi = [], []
    for u in range(1, len(c) + 1):
        if u in vk:
            lo.append(-2 * M + c[u - 1])
            hi.append(c[u - 1])
        elif u in vj:
            lo.append(c[u - 1] + 1)
            hi.append(2 * M + c[u - 1] + 1)
        else:
            lo.append(-M)
            hi.append(M)
    return Box.closed(lo, hi)


# ===============================
# ARRANGEMENT ORACLE
# ===============================

def axis_pieces(values: Iterable[int]) -> List[Tuple[Box, Number]]:
    """1-D pieces induced by sorted distinct coordinates: points and open gaps, with a sample each."""
    coords = sorted(set(values))
    pieces: List[Tuple[Box, Number]] = []
    for i, x in enumerate(coords):
        pieces.append((Box.point((x,)), x))
        if i + 1 < len(coords):
            nxt = coords[i + 1]
            pieces.append((Box((x,), (nxt,), (True,), (True,)), Fraction(x + nxt, 2)))
    return pieces


def grid_arrangement_oracle(cubes: CubeSet) -> List[Tuple[Box, bool]]:
    """Every cell, face, edge and vertex of the coordinate grid, classified inside/outside.

    The grid is induced by all distinct cube coordinates per axis; pieces
    outside the bounding box of the cubes are outside and not listed.
    """
    if not cubes.corners:
        return []
    d = cubes.dimension
    per_axis = [
        axis_pieces([c[u] for c in cubes.corners] + [c[u] + cubes.side for c in cubes.corners])
        for u in range(d)
    ]
    result = []
    for combo in product(*per_axis):
        box = Box(
            tuple(piece.lo[0] for piece, _ in combo),
            tuple(piece.hi[0] for piece, _ in combo),
            tuple(piece.lo_open[0] for piece, _ in combo),
            tuple(piece.hi_open[0] for piece, _ in combo),
        )
        sample = tuple(x for _, x in combo)
        result.append((box, cube_union_contains(cubes, sample)))
    return result


def arrangement_sample_points(boxes: Sequence[Box]) -> List[Tuple[Number, ...]]:
    """Grid vertices and piece midpoints of the arrangement of box coordinates, one unit beyond the extremes."""
    if not boxes:
        return []
    d = boxes[0].dimension
    samples_per_axis = []
    for u in range(d):
        values = set()
        for b in boxes:
            for x in (b.lo[u], b.hi[u]):
                if math.isfinite(x):
                    values.add(int(x))
        if values:
            values.add(min(values) - 1)
            values.add(max(values) + 1)
        samples_per_axis.append([x for _, x in axis_pieces(values)] or [0])
    return list(product(*samples_per_axis))
