"""Partitions of rectangle unions and congruent-cube unions into disjoint boxes.

Both decompositions run the same labeled column sweep: the plane is cut
into alternating vertical lines and open strips at the rectangle x
coordinates, each column is swept bottom-up, and pieces with equal labels
are merged inside a column and then across consecutive columns. Every
emitted box is a product of intervals whose openness comes from whether its
ends sit on a line or inside a strip, so boxes never share a point.
"""

from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from sortedcontainers import SortedList

from fopz.services.geometry import Box, CubeSet, grid_arrangement_oracle
from fopz.services.prom_metrics import boxes_emitted_total
from fopz.utils.errors import GeometryError

Rect = Tuple[int, int, int, int]  # x0, y0, x1, y1, all closed
Label = Hashable
# (lo, hi, lo_open, hi_open)
Interval = Tuple[int, int, bool, bool]

FULL = "full"


# ===============================
# LABELS
# ===============================

class CoverState:
    """Plain coverage: a point is labeled covered while any rectangle holds it."""

    def __init__(self):
        self.active = 0

    def add(self, tag):
        self.active += 1

    def remove(self, tag):
        self.active -= 1

    def label(self) -> Optional[Label]:
        return True if self.active else None


class SlabState:
    """Coverage inside one slab by full, upper and lower cube parts.

    Tags are (FULL, None), ("upper", U) for a part covering [U, top) and
    ("lower", L) for a part covering (bot, L]. The label is FULL when the open
    slab interval is covered entirely, otherwise (min U, max L) with None for
    an absent side.
    """

    def __init__(self):
        self.full = 0
        self.uppers = SortedList()
        self.lowers = SortedList()

    def add(self, tag):
        kind, z = tag
        if kind == FULL:
            self.full += 1
        elif kind == "upper":
            self.uppers.add(z)
        else:
            self.lowers.add(z)

    def remove(self, tag):
        kind, z = tag
        if kind == FULL:
            self.full -= 1
        elif kind == "upper":
            self.uppers.remove(z)
        else:
            self.lowers.remove(z)

    def label(self) -> Optional[Label]:
        if self.full:
            return FULL
        upper = self.uppers[0] if self.uppers else None
        lower = self.lowers[-1] if self.lowers else None
        if upper is None and lower is None:
            return None
        if upper is not None and lower is not None and upper <= lower:
            return FULL
        return upper, lower


# ===============================
# LABELED COLUMN SWEEP
# ===============================

def _column_pieces(active: Sequence[Tuple[Rect, object]], state) -> List[Tuple[Interval, Label]]:
    """Maximal equally-labeled y intervals of one column."""
    starts: Dict[int, List[object]] = {}
    ends: Dict[int, List[object]] = {}
    for (_, y0, _, y1), tag in active:
        starts.setdefault(y0, []).append(tag)
        ends.setdefault(y1, []).append(tag)
    ys = sorted(set(starts) | set(ends))

    # (is_point, lo, hi, label) in increasing y
    raw = []
    for i, y in enumerate(ys):
        for tag in starts.get(y, ()):
            state.add(tag)
        raw.append((True, y, y, state.label()))
        for tag in ends.get(y, ()):
            state.remove(tag)
        if i + 1 < len(ys):
            raw.append((False, y, ys[i + 1], state.label()))

    pieces = []
    run = None
    for is_point, lo, hi, label in raw:
        if run is not None and run[4] == label:
            run[1] = hi
            run[3] = not is_point
            continue
        if run is not None and run[4] is not None:
            pieces.append(((run[0], run[1], run[2], run[3]), run[4]))
        run = [lo, hi, not is_point, not is_point, label]
    if run is not None and run[4] is not None:
        pieces.append(((run[0], run[1], run[2], run[3]), run[4]))
    return pieces


def labeled_sweep(rects: Sequence[Tuple[Rect, object]], state_factory) -> List[Tuple[Box, Label]]:
    """Partition the union of tagged closed rectangles into boxes of constant label.

    Args:
        rects: closed rectangles (x0, y0, x1, y1) with a tag each
        state_factory: builds a fresh label state per column

    Returns:
        (Box, label) pairs; boxes are pairwise disjoint and cover the union
    """
    if not rects:
        return []
    xs = sorted({r[0] for r, _ in rects} | {r[2] for r, _ in rects})

    out: List[Tuple[Box, Label]] = []
    open_runs: Dict[Tuple[Interval, Label], int] = {}

    def close(key: Tuple[Interval, Label], first: int, last: int):
        (y_lo, y_hi, y_lo_open, y_hi_open), label = key
        x_lo = xs[first // 2]
        x_hi = xs[last // 2] if last % 2 == 0 else xs[last // 2 + 1]
        box = Box((x_lo, y_lo), (x_hi, y_hi), (first % 2 == 1, y_lo_open), (last % 2 == 1, y_hi_open))
        out.append((box, label))

    entering: Dict[int, List[int]] = {}
    leaving: Dict[int, List[int]] = {}
    for j, (r, _) in enumerate(rects):
        entering.setdefault(r[0], []).append(j)
        leaving.setdefault(r[2], []).append(j)

    # indices of the rectangles spanning the current column, ordered by x0
    active = SortedList(key=lambda j: (rects[j][0][0], j))
    n_columns = 2 * len(xs) - 1
    for c in range(n_columns):
        x = xs[c // 2]
        if c % 2 == 0:
            active.update(entering.get(x, ()))
        else:
            for j in leaving.get(x, ()):
                active.remove(j)
        keys = set(_column_pieces([rects[j] for j in active], state_factory()))
        for key in [key for key in open_runs if key not in keys]:
            close(key, open_runs.pop(key), c - 1)
        for key in keys:
            open_runs.setdefault(key, c)
    for key, first in open_runs.items():
        close(key, first, n_columns - 1)
    return out


# ===============================
# 2D
# ===============================

def _as_rect(b: Box) -> Rect:
    if b.dimension != 2:
        raise GeometryError(f"expected a rectangle, got a {b.dimension}-box")
    if not b.is_bounded or any(b.lo_open) or any(b.hi_open):
        raise GeometryError(f"rectangle {b.describe()} must be closed and bounded")
    if not b.is_full_dimensional:
        raise GeometryError(f"rectangle {b.describe()} has zero area")
    return int(b.lo[0]), int(b.lo[1]), int(b.hi[0]), int(b.hi[1])


def decompose_rectilinear_2d(rects: Sequence[Box]) -> List[Box]:
    """Disjoint boxes whose union is exactly the union of closed rectangles."""
    if not rects:
        raise GeometryError("rectangle list is empty")
    tagged = [(_as_rect(b), None) for b in rects]
    boxes = [box for box, _ in labeled_sweep(tagged, CoverState)]
    boxes_emitted_total.labels(dimension="2").inc(len(boxes))
    return boxes


# ===============================
# 3D
# ===============================

@dataclass(frozen=True)
class SlabLayout:
    """Slicing planes base + q·side, q = 0, 1, ..."""
    base: int
    side: int

    def bottom(self, q: int) -> int:
        return self.base + q * self.side

    def top(self, q: int) -> int:
        return self.base + (q + 1) * self.side


def _extrude(rect_box: Box, z_lo: int, z_hi: int, lo_open: bool, hi_open: bool) -> Box:
    return Box(
        rect_box.lo + (z_lo,),
        rect_box.hi + (z_hi,),
        rect_box.lo_open + (lo_open,),
        rect_box.hi_open + (hi_open,),
    )


def _slab_tags(cubes: CubeSet, layout: SlabLayout) -> Dict[int, List[Tuple[Rect, object]]]:
    s = cubes.side
    slabs: Dict[int, List[Tuple[Rect, object]]] = {}
    for x, y, z in cubes.corners:
        footprint = (x, y, x + s, y + s)
        q, rem = divmod(z - layout.base, s)
        if rem == 0:
            slabs.setdefault(q, []).append((footprint, (FULL, None)))
        else:
            slabs.setdefault(q, []).append((footprint, ("upper", z)))
            slabs.setdefault(q + 1, []).append((footprint, ("lower", z + s)))
    return slabs


def _plane_rects(cubes: CubeSet, layout: SlabLayout) -> Dict[int, List[Tuple[Rect, object]]]:
    s = cubes.side
    planes: Dict[int, List[Tuple[Rect, object]]] = {}
    for x, y, z in cubes.corners:
        q, rem = divmod(z - layout.base, s)
        touched = [q, q + 1] if rem == 0 else [q + 1]
        for p in touched:
            planes.setdefault(layout.bottom(p), []).append(((x, y, x + s, y + s), None))
    return planes


def decompose_cubes_3d(cubes: CubeSet) -> List[Box]:
    """Disjoint boxes whose union is exactly the union of congruent cubes.

    Space is sliced by planes at integer multiples of the side above the
    lowest cube bottom, so each cube is either a full slab column or an
    upper part of one slab plus a lower part of the next. Each open slab is
    handled by a labeled sweep over cube footprints, each slicing plane by
    the plain 2D decomposition of the footprints touching it.
    """
    if cubes.dimension != 3:
        raise GeometryError(f"cube decomposition is defined for d = 3, got d = {cubes.dimension}")
    if not cubes.corners:
        return []
    corners = list(dict.fromkeys(cubes.corners))
    cubes = CubeSet(cubes.side, tuple(corners))
    layout = SlabLayout(min(z for _, _, z in corners), cubes.side)

    boxes: List[Box] = []
    for q, tagged in sorted(_slab_tags(cubes, layout).items()):
        bot, top = layout.bottom(q), layout.top(q)
        for rect_box, label in labeled_sweep(tagged, SlabState):
            if label == FULL:
                boxes.append(_extrude(rect_box, bot, top, True, True))
                continue
            upper, lower = label
            if upper is not None:
                boxes.append(_extrude(rect_box, upper, top, False, True))
            if lower is not None:
                boxes.append(_extrude(rect_box, bot, lower, True, False))

    for plane, tagged in sorted(_plane_rects(cubes, layout).items()):
        for rect_box, _ in labeled_sweep(tagged, CoverState):
            boxes.append(_extrude(rect_box, plane, plane, False, False))

    boxes_emitted_total.labels(dimension="3").inc(len(boxes))
    return boxes


def covered_volume(boxes: Sequence[Box]) -> int:
    """Sum of volumes of the full-dimensional boxes."""
    return sum(b.volume() for b in boxes)


def membership_count(boxes: Sequence[Box], p) -> int:
    return sum(1 for b in boxes if b.contains(p))


def oracle_volume(cubes: CubeSet) -> int:
    """Covered volume from the grid arrangement: inside open cells only."""
    return sum(box.volume() for box, inside in grid_arrangement_oracle(cubes) if inside)


def partition_holds(boxes: Sequence[Box], inside, points) -> bool:
    """Every point lies in exactly one box when ``inside(p)``, otherwise in none."""
    return all(membership_count(boxes, p) == (1 if inside(p) else 0) for p in points)
