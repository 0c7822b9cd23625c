"""Finite stand-ins for compact subsets of the unit cube and the Hausdorff metric.

A :class:`CompactSet` is a deduplicated, lexicographically sorted cloud of
points in ``[0, 1]^d`` together with a ``resolution``: the radius of the net
the cloud is meant to realize (0 when the set is exactly the finite cloud).
The ground metric is Euclidean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

#: Coordinates within this distance of [0, 1] are clipped; closer points merge.
TOL = 1e-12

Point = tuple[float, ...]


class DimensionError(ValueError):
    """Operands live in cubes of different dimension."""


def _as_array(points, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        # a flat list is a list of 1-d points unless dim says otherwise
        arr = arr.reshape(1, -1) if dim is not None and dim > 1 else arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"expected an (n, d) array of points, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionError(f"points have dimension {arr.shape[1]}, expected {dim}")
    return arr


def _normalize(arr: np.ndarray) -> np.ndarray:
    """Clip to the cube, sort lexicographically, merge points closer than TOL."""
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite coordinate")
    if np.any(arr < -TOL) or np.any(arr > 1 + TOL):
        bad = arr[np.any((arr < -TOL) | (arr > 1 + TOL), axis=1)][0]
        raise ValueError(f"point {tuple(bad)} lies outside [0,1]^{arr.shape[1]}")
    arr = np.clip(arr, 0.0, 1.0)
    order = np.lexsort(arr.T[::-1])
    arr = arr[order]
    if len(arr) < 2:
        return arr
    if arr.shape[1] == 1:
        keep = np.empty(len(arr), dtype=bool)
        keep[0] = True
        keep[1:] = np.diff(arr[:, 0]) > TOL
        return arr[keep]
    keys = np.round(arr / TOL).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    return arr[np.sort(first)]


@dataclass(frozen=True, eq=False)
class CompactSet:
    """Nonempty finite point cloud in ``[0,1]^dim``.

    Build instances with :meth:`from_points`; the constructor expects an
    already normalized ``(n, dim)`` array.
    """

    points: np.ndarray
    dim: int
    resolution: float = 0.0

    def __post_init__(self):
        if self.points.ndim != 2 or self.points.shape[1] != self.dim:
            raise DimensionError("points array does not match dim")
        if len(self.points) == 0:
            raise ValueError("a compact set must be nonempty")
        if self.resolution < 0:
            raise ValueError("resolution must be nonnegative")
        self.points.setflags(write=False)

    @classmethod
    def from_points(cls, points, dim: int | None = None, resolution: float = 0.0) -> "CompactSet":
        arr = _as_array(points, dim)
        if len(arr) == 0:
            raise ValueError("a compact set must be nonempty")
        return cls(_normalize(arr), arr.shape[1], float(resolution))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return (tuple(float(c) for c in p) for p in self.points)

    def __repr__(self) -> str:
        return f"CompactSet(n={len(self)}, dim={self.dim}, resolution={self.resolution:g})"

    def same_points(self, other: "CompactSet") -> bool:
        return self.dim == other.dim and self.points.shape == other.points.shape and bool(
            np.all(self.points == other.points)
        )

    def diameter(self) -> float:
        if self.dim == 1:
            return float(self.points[-1, 0] - self.points[0, 0])
        return _directed(self.points, self.points, largest=True)[0]

    def with_resolution(self, resolution: float) -> "CompactSet":
        return CompactSet(self.points, self.dim, float(resolution))


@dataclass(frozen=True)
class HausdorffReport:
    """Hausdorff distance with the point pairs realizing both directed distances."""

    distance: float
    witness_ab: tuple[Point, Point]
    witness_ba: tuple[Point, Point]
    directed_ab: float = 0.0
    directed_ba: float = 0.0

    def __float__(self) -> float:
        return self.distance


@dataclass(frozen=True)
class IntervalUnion:
    """Pieces of a subset of [0, 1] as (lo, hi) bounds, in descending order.

    Pieces may touch at an endpoint: the neighbourhoods built by
    :func:`thicken` are open, so two pieces of a gap exactly ``2 * delta``
    apart share a bound that neither contains.
    """

    intervals: tuple[tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        prev_lo = None
        for lo, hi in self.intervals:
            if lo > hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")
            if prev_lo is not None and not hi <= prev_lo:
                raise ValueError("intervals must be disjoint and sorted descending")
            prev_lo = lo

    def __len__(self) -> int:
        return len(self.intervals)

    def contains(self, x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in self.intervals)

    def total_length(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)


def _check_pair(a: CompactSet, b: CompactSet) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _nearest_1d(queries: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distance from each query to the sorted 1-d targets, and the nearest index."""
    idx = np.searchsorted(targets, queries)
    lo = np.clip(idx - 1, 0, len(targets) - 1)
    hi = np.clip(idx, 0, len(targets) - 1)
    d_lo = np.abs(queries - targets[lo])
    d_hi = np.abs(targets[hi] - queries)
    take_hi = d_hi < d_lo
    return np.where(take_hi, d_hi, d_lo), np.where(take_hi, hi, lo)


def _nearest(queries: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if queries.shape[1] == 1:
        t = targets[:, 0]
        if len(t) > 1 and np.any(t[1:] < t[:-1]):
            order = np.argsort(t, kind="stable")
            dist, idx = _nearest_1d(queries[:, 0], t[order])
            return dist, order[idx]
        return _nearest_1d(queries[:, 0], t)
    # blocked brute force keeps the distance matrix small; exact, no ANN
    block = max(1, 4_000_000 // max(1, len(targets)))
    dist = np.empty(len(queries))
    arg = np.empty(len(queries), dtype=np.intp)
    for start in range(0, len(queries), block):
        q = queries[start:start + block]
        sq = ((q[:, None, :] - targets[None, :, :]) ** 2).sum(axis=2)
        j = sq.argmin(axis=1)
        arg[start:start + block] = j
        dist[start:start + block] = np.sqrt(sq[np.arange(len(q)), j])
    return dist, arg


def _directed(src: np.ndarray, dst: np.ndarray, largest: bool = False) -> tuple[float, int, int]:
    """sup over src of the distance to dst, with the realizing indices."""
    if largest:
        # farthest pair, used for the diameter
        sq = ((src[:, None, :] - dst[None, :, :]) ** 2).sum(axis=2)
        i, j = np.unravel_index(sq.argmax(), sq.shape)
        return float(np.sqrt(sq[i, j])), int(i), int(j)
    dist, arg = _nearest(src, dst)
    i = int(dist.argmax())
    return float(dist[i]), i, int(arg[i])


def _pt(row: np.ndarray) -> Point:
    return tuple(float(c) for c in row)


def hausdorff_distance(a: CompactSet, b: CompactSet) -> HausdorffReport:
    """Exact Hausdorff distance between two finite clouds."""
    _check_pair(a, b)
    dab, i, j = _directed(a.points, b.points)
    dba, k, m = _directed(b.points, a.points)
    return HausdorffReport(
        distance=max(dab, dba),
        witness_ab=(_pt(a.points[i]), _pt(b.points[j])),
        witness_ba=(_pt(b.points[k]), _pt(a.points[m])),
        directed_ab=dab,
        directed_ba=dba,
    )


def directed_distance(a: CompactSet, b: CompactSet) -> float:
    """sup_{x in a} d(x, b)."""
    _check_pair(a, b)
    return _directed(a.points, b.points)[0]


def distance_point_set(x: Sequence[float], a: CompactSet) -> float:
    q = _as_array([list(np.atleast_1d(np.asarray(x, dtype=float)))])
    if q.shape[1] != a.dim:
        raise DimensionError(f"point has dimension {q.shape[1]}, set has {a.dim}")
    dist, _ = _nearest(q, a.points)
    return float(dist[0])


def union(a: CompactSet, b: CompactSet) -> CompactSet:
    _check_pair(a, b)
    merged = np.vstack([a.points, b.points])
    return CompactSet(_normalize(merged), a.dim, max(a.resolution, b.resolution))


def union_all(sets: Iterable[CompactSet]) -> CompactSet:
    sets = list(sets)
    if not sets:
        raise ValueError("union of no sets")
    dim = sets[0].dim
    for s in sets[1:]:
        if s.dim != dim:
            raise DimensionError(f"dimension mismatch: {dim} vs {s.dim}")
    merged = np.vstack([s.points for s in sets])
    return CompactSet(_normalize(merged), dim, max(s.resolution for s in sets))


class _Grid:
    """Hash grid answering 'is any stored point strictly within r?'."""

    def __init__(self, r: float, dim: int):
        self.r = r
        self.dim = dim
        self.cells: dict[tuple[int, ...], list[np.ndarray]] = {}
        self._offsets = np.array(np.meshgrid(*[[-1, 0, 1]] * dim)).T.reshape(-1, dim)

    def _key(self, p: np.ndarray) -> tuple[int, ...]:
        return tuple(int(c) for c in np.floor(p / self.r))

    def near(self, p: np.ndarray) -> bool:
        base = np.floor(p / self.r).astype(np.int64)
        r2 = self.r * self.r
        for off in self._offsets:
            bucket = self.cells.get(tuple(int(c) for c in base + off))
            if bucket:
                for q in bucket:
                    if float(((q - p) ** 2).sum()) < r2:
                        return True
        return False

    def add(self, p: np.ndarray) -> None:
        self.cells.setdefault(self._key(p), []).append(p)


def renet(a: CompactSet, r: float) -> CompactSet:
    """Greedy r-net of ``a``: sweep in sorted order, keep a point unless a kept
    point lies strictly within ``r`` of it."""
    if not r > 0:
        raise ValueError("net radius must be positive")
    pts = a.points
    if len(pts) == 1:
        return CompactSet(pts, a.dim, a.resolution + r)
    if a.dim == 1:
        xs = pts[:, 0]
        keep = [0]
        last = xs[0]
        for i in range(1, len(xs)):
            if xs[i] - last >= r:
                keep.append(i)
                last = xs[i]
        kept = pts[keep]
    else:
        grid = _Grid(r, a.dim)
        rows = []
        for p in pts:
            if not grid.near(p):
                grid.add(p)
                rows.append(p)
        kept = np.array(rows)
    return CompactSet(np.ascontiguousarray(kept), a.dim, a.resolution + r)


def thicken(a: CompactSet, delta: float) -> IntervalUnion:
    """Union of the open balls B(x, delta), x in a, merged and clipped to [0,1].

    Interval endpoints are reported as closed bounds of the open union.
    """
    if a.dim != 1:
        raise DimensionError("thicken is defined for d = 1 only")
    if not delta > 0:
        raise ValueError("delta must be positive")
    return thicken_intervals([(float(x), float(x)) for x in a.points[:, 0]], delta)


def thicken_intervals(intervals: Iterable[tuple], delta) -> IntervalUnion:
    """Open delta-neighbourhood of a finite union of closed intervals.

    Works with floats or Fractions; two pieces merge when their gap is
    strictly less than ``2 * delta``.
    """
    pieces = sorted((lo, hi) for lo, hi in intervals)
    if not pieces:
        return IntervalUnion(())
    merged: list[list] = []
    for lo, hi in pieces:
        lo, hi = lo - delta, hi + delta
        if merged and lo < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    zero, one = (Fraction(0), Fraction(1)) if isinstance(delta, Fraction) else (0.0, 1.0)
    clipped = [(max(lo, zero), min(hi, one)) for lo, hi in merged]
    return IntervalUnion(tuple(reversed(clipped)))


def embed_set(a: CompactSet, dim: int) -> CompactSet:
    """A x {0}^(dim-1) for a 1-d set A."""
    if a.dim != 1:
        raise DimensionError("only 1-d sets embed along the first axis")
    if dim < 1:
        raise ValueError("target dimension must be positive")
    pts = np.zeros((len(a), dim))
    pts[:, 0] = a.points[:, 0]
    return CompactSet(_normalize(pts), dim, a.resolution)


def interval_net(lo: float, hi: float, r: float) -> np.ndarray:
    """Points of [lo, hi] spaced at most r apart, endpoints included."""
    if hi <= lo:
        return np.array([lo])
    n = max(1, int(np.ceil((hi - lo) / r)))
    return np.linspace(lo, hi, n + 1)
