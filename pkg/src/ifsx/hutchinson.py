"""Hutchinson operator, attractor computation and invariance checks."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import (
    CompactSet,
    DimensionError,
    _Grid,
    _as_array,
    _directed,
    _normalize,
    hausdorff_distance,
    renet,
)
from .maps import CONTRACTION, WEAK, ContractiveMap, exact_fixed_point, fixed_point


@dataclass(frozen=True)
class FunctionSystem:
    """Ordered, nonempty family of self-maps of ``[0,1]^dim``."""

    maps: tuple[ContractiveMap, ...]
    dim: int
    kind: str

    @classmethod
    def of(cls, maps: Sequence[ContractiveMap]) -> "FunctionSystem":
        maps = tuple(maps)
        if not maps:
            raise ValueError("a function system needs at least one map")
        dim = maps[0].dim
        for m in maps:
            if m.dim != dim:
                raise DimensionError("all maps of a system must share the dimension")
        kind = CONTRACTION
        for m in maps:
            if m.kind == WEAK or not m.lipschitz().upper_bound < 1:
                kind = WEAK
        return cls(maps, dim, kind)

    def __post_init__(self):
        if self.kind == CONTRACTION:
            for m in self.maps:
                if not m.lipschitz().upper_bound < 1:
                    raise ValueError(f"{m} is not a certified contraction")

    def __len__(self) -> int:
        return len(self.maps)

    def lipschitz(self) -> float:
        return max(m.lipschitz().upper_bound for m in self.maps)


@dataclass(frozen=True)
class AttractorResult:
    attractor: CompactSet
    iterations: int
    final_step: float
    residual: float
    converged: bool
    tolerance: float
    ghost_steps: int = 0


def step(sys: FunctionSystem, a: CompactSet, resolution: float | None = None) -> CompactSet:
    """One application of the Hutchinson operator, optionally re-netted."""
    if a.dim != sys.dim:
        raise DimensionError(f"system acts on dimension {sys.dim}, set has {a.dim}")
    imgs = np.vstack([np.clip(m(a.points), 0.0, 1.0) for m in sys.maps])
    res = a.resolution * min(1.0, sys.lipschitz())
    out = CompactSet(_normalize(imgs), a.dim, res)
    return renet(out, resolution) if resolution else out


def verify_invariance(sys: FunctionSystem, a: CompactSet, tol: float | None = None) -> float:
    """d_H(S(A), A); the caller compares against its tolerance."""
    return hausdorff_distance(step(sys, a), a).distance


class _Net:
    """Points kept so far, with a strict 'within r' membership test."""

    def __init__(self, r: float, dim: int):
        self.r = r
        self.dim = dim
        self.rows: list[np.ndarray] = []
        if dim == 1:
            self.xs: list[float] = []
        else:
            self.grid = _Grid(r, dim)

    def near(self, p: np.ndarray) -> bool:
        if self.dim == 1:
            x = float(p[0])
            i = bisect.bisect_left(self.xs, x)
            if i < len(self.xs) and self.xs[i] - x < self.r:
                return True
            return i > 0 and x - self.xs[i - 1] < self.r
        return self.grid.near(p)

    def add(self, p: np.ndarray) -> None:
        self.rows.append(p)
        if self.dim == 1:
            bisect.insort(self.xs, float(p[0]))
        else:
            self.grid.add(p)

    def __len__(self) -> int:
        return len(self.rows)


def _seed_points(sys: FunctionSystem) -> np.ndarray:
    rows = []
    for m in sys.maps:
        try:
            p = exact_fixed_point(m)
        except (TypeError, ValueError):
            p = fixed_point(m)
        rows.append([float(v) for v in p])
    return _as_array(rows, sys.dim)


def _pull_in(sys: FunctionSystem, seed: CompactSet, r: float) -> CompactSet:
    """Iterate a seed set until it lies within r of the attractor.

    Every kept point must belong (up to r) to the attractor, which only a
    contraction rate can guarantee for arbitrary starting points.
    """
    if seed.dim != sys.dim:
        raise DimensionError(f"system acts on dimension {sys.dim}, seed has {seed.dim}")
    lip = sys.lipschitz()
    if sys.kind != CONTRACTION or not lip < 1:
        raise ValueError("custom seed sets need a contraction system")
    reach = float(np.sqrt(sys.dim))  # diameter of the cube
    a = seed
    while reach > r / 2:
        a = step(sys, a, resolution=r / 4)
        reach *= lip
    return a


def attractor(
    sys: FunctionSystem,
    tol: float = 1e-6,
    max_iter: int = 1_000_000,
    resolution: float = 1e-4,
    seed: CompactSet | None = None,
    max_points: int = 2_000_000,
) -> AttractorResult:
    """Net approximation of the attractor of ``sys``.

    The iteration starts from the members' fixed points (which lie in the
    attractor) and applies the Hutchinson operator to the points added in the
    previous round only; an image is kept unless a kept point lies strictly
    within ``resolution`` of it. Every kept point is an orbit point, the kept
    set only grows, and the loop ends when a round adds nothing, at which
    point d_H(S(A), A) <= resolution.

    Orbits of maps with constant close to 1 (and of weak maps) creep: they
    move by less than ``resolution`` per step near an attracting point, so a
    plain net would cut them short. Images that fall inside the current net
    are therefore followed along that member's orbit until they leave the net
    (and are kept) or the step drops below ``(1 - L) * resolution``, after
    which the rest of the orbit stays within ``resolution`` of the current
    point. Weak members use ``tol`` as that threshold instead. A walk also
    stops when it enters a cell of width ``resolution / 4`` that an earlier
    walk of the same map has crossed: the rest of its orbit then shadows the
    earlier one to within a cell. Weak members skip this shortcut since their
    orbits need not draw together.
    """
    if not (tol > 0 and resolution > 0):
        raise ValueError("tol and resolution must be positive")
    r = float(resolution)
    net = _Net(r, sys.dim)
    frontier = []
    if seed is None:
        seed_pts = _seed_points(sys)
    else:
        seed_pts = _pull_in(sys, seed, r).points
    for p in _normalize(np.clip(seed_pts, 0.0, 1.0)):
        if not net.near(p):
            net.add(p)
            frontier.append(p)
    stops = []
    for m in sys.maps:
        lm = m.lipschitz().upper_bound
        if lm <= 0.5:
            stops.append(None)  # plain net is already within 2 * resolution
        else:
            stops.append(max(tol, (1 - lm) * r) if lm < 1 else tol)
    # shadowing only contracts for maps with a constant below 1
    walked = [dict() if m.lipschitz().upper_bound < 1 else None for m in sys.maps]
    cell = r / 4
    walks = 0
    ghost_steps = 0
    rounds = 0
    last_added = np.vstack(frontier)
    previous_size = 0
    exhausted = False
    while frontier:
        if rounds >= max_iter or len(net) > max_points or ghost_steps >= max_iter:
            exhausted = True
            break
        rounds += 1
        block = np.vstack(frontier)
        new = []
        for m, stop, seen in zip(sys.maps, stops, walked):
            imgs = np.clip(m(block), 0.0, 1.0)
            for y in imgs:
                if not net.near(y):
                    net.add(y)
                    new.append(y)
                elif stop is not None:
                    c = y
                    walks += 1
                    while ghost_steps < max_iter:
                        c2 = np.clip(m(c[None, :])[0], 0.0, 1.0)
                        ghost_steps += 1
                        moved = float(np.sqrt(((c2 - c) ** 2).sum()))
                        c = c2
                        if moved <= stop:
                            break
                        if not net.near(c):
                            net.add(c)
                            new.append(c)
                            break
                        if seen is not None:
                            key = tuple(np.floor(c / cell).astype(np.int64))
                            if seen.setdefault(key, walks) != walks:
                                break
        previous_size = len(net) - len(new)
        if new:
            last_added = np.vstack(new)
        frontier = new

    pts = np.vstack(net.rows)
    lip = sys.lipschitz()
    res = r / (1 - lip) if lip < 1 else r
    a = CompactSet(_normalize(pts), sys.dim, res)
    if exhausted:
        # distance from the last batch of additions to what preceded it
        before = pts[:previous_size] if previous_size else pts
        final_step = _directed(last_added, before)[0]
    else:
        final_step = 0.0
    residual = verify_invariance(sys, a)
    converged = not exhausted and final_step <= tol
    if converged and sys.kind == CONTRACTION:
        converged = lip / (1 - lip) * final_step <= tol
    return AttractorResult(
        attractor=a,
        iterations=rounds,
        final_step=final_step,
        residual=residual,
        converged=converged,
        tolerance=tol + 2 * r,
        ghost_steps=ghost_steps,
    )


def _hausdorff_arrays(a: np.ndarray, b: np.ndarray) -> float:
    return max(_directed(a, b)[0], _directed(b, a)[0])


def image_continuity_probe(
    map_seq: Sequence[Callable],
    set_seq: Sequence,
    limit_map: Callable,
    limit_set,
) -> list[tuple[int, float]]:
    """Distances d_H(S_k[E_k], S[E]) for k = 1, 2, ...

    Maps are any callables on ``(n, d)`` arrays (continuous maps need not be
    contractions here) and sets are :class:`CompactSet` instances or arrays.
    Images are not clipped to the cube.
    """
    if len(map_seq) != len(set_seq):
        raise ValueError(f"{len(map_seq)} maps but {len(set_seq)} sets")

    def pts(s):
        return s.points if isinstance(s, CompactSet) else _as_array(s)

    limit = np.asarray(limit_map(pts(limit_set)), dtype=float)
    out = []
    for k, (s_k, e_k) in enumerate(zip(map_seq, set_seq), start=1):
        e = pts(e_k)
        if e.shape[1] != limit.shape[1]:
            raise DimensionError("sequence and limit differ in dimension")
        out.append((k, _hausdorff_arrays(np.asarray(s_k(e), dtype=float), limit)))
    return out
