"""Static orthogonal range index over integer points in Z^m.

Points form a multiset. Two backends share one interface: a layered range
tree (one sorted auxiliary array per node on the last axis) and a linear scan,
picked by size unless requested explicitly.
"""

from bisect import bisect_left, bisect_right
from collections import Counter
from itertools import accumulate
from typing import Iterable, List, Optional, Sequence, Tuple

from fopz.config.settings import SCAN_THRESHOLD
from fopz.services.geometry import INF, Box
from fopz.utils.errors import DimensionError

Point = Tuple[int, ...]
Range = Tuple[float, float]


class RangeIndex:
    """Common interface; use :func:`build` to construct."""

    backend = "abstract"

    def __init__(self, dimension: Optional[int], size: int):
        self.dimension = dimension
        self.size = size

    def _check(self, length: int):
        if self.dimension is not None and length != self.dimension:
            raise DimensionError(f"query of dimension {length} on a {self.dimension}-dimensional index")

    def exists_dominating(self, q: Sequence[int]) -> bool:
        """True iff some stored point p satisfies p >= q coordinatewise."""
        self._check(len(q))
        if self.size == 0:
            return False
        return self._count([(x, INF) for x in q], stop_at_first=True) > 0

    def count_in_box(self, box: Box) -> int:
        """Multiset count of stored points inside the box."""
        self._check(box.dimension)
        if self.size == 0:
            return 0
        ranges = box.integer_ranges()
        if ranges is None:
            return 0
        return self._count(ranges, stop_at_first=False)

    def count_ranges(self, ranges: Sequence[Range]) -> int:
        """Multiset count inside closed per-axis ranges (±inf allowed)."""
        self._check(len(ranges))
        if self.size == 0 or any(lo > hi for lo, hi in ranges):
            return 0
        return self._count(list(ranges), stop_at_first=False)

    def _count(self, ranges: List[Range], stop_at_first: bool) -> int:
        raise NotImplementedError


class ScanIndex(RangeIndex):
    """Linear scan over distinct points with multiplicities; also the test oracle."""

    backend = "scan"

    def __init__(self, weighted: List[Tuple[Point, int]], dimension: Optional[int]):
        super().__init__(dimension, sum(w for _, w in weighted))
        self.weighted = weighted

    def _count(self, ranges: List[Range], stop_at_first: bool) -> int:
        total = 0
        for p, w in self.weighted:
            if all(lo <= x <= hi for x, (lo, hi) in zip(p, ranges)):
                total += w
                if stop_at_first:
                    return total
        return total


class _SortedAxis:
    """Last-axis structure: sorted keys with prefix sums of weights."""

    __slots__ = ("keys", "prefix")

    def __init__(self, weighted: List[Tuple[Point, int]], axis: int):
        items = sorted((p[axis], w) for p, w in weighted)
        self.keys = [key for key, _ in items]
        self.prefix = [0] + list(accumulate(w for _, w in items))

    def count(self, lo: float, hi: float) -> int:
        i = bisect_left(self.keys, lo)
        j = bisect_right(self.keys, hi)
        return self.prefix[j] - self.prefix[i] if j > i else 0


class _TreeNode:
    __slots__ = ("low", "high", "left", "right", "aux")

    def __init__(self, low, high, left, right, aux):
        self.low = low
        self.high = high
        self.left = left
        self.right = right
        self.aux = aux


class LayeredRangeTree(RangeIndex):
    """Range tree: balanced tree on axis 0 whose nodes carry a tree on the remaining axes."""

    backend = "tree"

    def __init__(self, weighted: List[Tuple[Point, int]], dimension: int):
        super().__init__(dimension, sum(w for _, w in weighted))
        self.root = self._build(weighted, 0)

    def _build(self, weighted: List[Tuple[Point, int]], axis: int):
        if axis == self.dimension - 1:
            return _SortedAxis(weighted, axis)
        ordered = sorted(weighted, key=lambda item: item[0][axis])
        return self._build_node(ordered, axis, 0, len(ordered))

    def _build_node(self, ordered: List[Tuple[Point, int]], axis: int, start: int, end: int) -> _TreeNode:
        chunk = ordered[start:end]
        aux = self._build(chunk, axis + 1)
        if end - start == 1:
            left = right = None
        else:
            mid = (start + end) // 2
            left = self._build_node(ordered, axis, start, mid)
            right = self._build_node(ordered, axis, mid, end)
        return _TreeNode(ordered[start][0][axis], ordered[end - 1][0][axis], left, right, aux)

    def _count(self, ranges: List[Range], stop_at_first: bool) -> int:
        return self._query(self.root, 0, ranges, stop_at_first)

    def _query(self, node, axis: int, ranges: List[Range], stop_at_first: bool) -> int:
        if isinstance(node, _SortedAxis):
            lo, hi = ranges[axis]
            return node.count(lo, hi)
        lo, hi = ranges[axis]
        if node.high < lo or node.low > hi:
            return 0
        if lo <= node.low and node.high <= hi:
            return self._query(node.aux, axis + 1, ranges, stop_at_first)
        total = self._query(node.left, axis, ranges, stop_at_first)
        if stop_at_first and total:
            return total
        return total + self._query(node.right, axis, ranges, stop_at_first)


def build(points: Iterable[Sequence[int]], dimension: Optional[int] = None,
          backend: str = "auto", scan_threshold: int = SCAN_THRESHOLD) -> RangeIndex:
    """Build an index over a multiset of points.

    Args:
        points: integer vectors of one common dimension (duplicates counted)
        dimension: expected dimension, required to type-check queries on empty input
        backend: "tree", "scan" or "auto" (scan below ``scan_threshold`` points)
        scan_threshold: size under which "auto" picks the scan backend

    Returns:
        RangeIndex
    """
    counts = Counter(tuple(int(x) for x in p) for p in points)
    dims = {len(p) for p in counts}
    if len(dims) > 1:
        raise DimensionError(f"points mix dimensions {sorted(dims)}")
    if dims:
        found = dims.pop()
        if dimension is not None and found != dimension:
            raise DimensionError(f"points have dimension {found}, expected {dimension}")
        dimension = found
    if dimension is not None and dimension < 1:
        raise DimensionError("range index dimension must be >= 1")

    weighted = sorted(counts.items())
    total = sum(counts.values())
    if backend == "auto":
        backend = "scan" if total < scan_threshold else "tree"
    if backend == "scan" or not weighted:
        return ScanIndex(weighted, dimension)
    if backend == "tree":
        return LayeredRangeTree(weighted, dimension)
    raise ValueError(f"unknown range index backend '{backend}'")


def exists_dominating(idx: RangeIndex, q: Sequence[int]) -> bool:
    return idx.exists_dominating(q)


def count_in_box(idx: RangeIndex, b: Box) -> int:
    return idx.count_in_box(b)
