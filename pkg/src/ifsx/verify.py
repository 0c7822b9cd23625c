"""Desk-scale probes of the separation results.

``separation_search`` samples random n-map contraction systems and records
how close their attractors come to a target set. The coverage audits replay
the pigeonhole counts behind the separation arguments on concrete candidate
systems, by exhaustive enumeration over the finite truncations.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geometry import CompactSet, DimensionError, _nearest, hausdorff_distance
from .hutchinson import FunctionSystem, attractor
from .maps import (
    Affine,
    Constant,
    ContractiveMap,
    Logistic,
    PiecewiseLinear,
    embed,
    exact_fixed_point,
)
from .witnesses import IntervalWitness, LadderWitness

SLOPE_BOUND = 0.95


def worker_count() -> int:
    """Parallelism cap from IFSX_THREADS (unset or 0 means one per CPU)."""
    raw = os.environ.get("IFSX_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"IFSX_THREADS must be a non-negative integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("IFSX_THREADS must be non-negative")
    return n or (os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# random systems


def _slope(rng: np.random.Generator) -> float:
    while True:
        s = rng.uniform(-SLOPE_BOUND, SLOPE_BOUND)
        if s != 0.0:
            return s


def random_affine(rng: np.random.Generator) -> Affine:
    a = _slope(rng)
    lo, hi = (0.0, 1.0 - a) if a > 0 else (-a, 1.0)
    return Affine(a, rng.uniform(lo, hi))


def random_pwl(rng: np.random.Generator, max_nodes: int = 4) -> PiecewiseLinear:
    m = int(rng.integers(2, max_nodes + 1))
    xs = np.concatenate([[0.0], np.sort(rng.uniform(0.0, 1.0, m - 2)), [1.0]])
    slopes = np.array([_slope(rng) for _ in range(m - 1)])
    ys = np.concatenate([[0.0], np.cumsum(slopes * np.diff(xs))])
    ys -= ys.min()
    ys += rng.uniform(0.0, 1.0 - ys.max())
    return PiecewiseLinear(tuple(zip(xs.tolist(), np.clip(ys, 0.0, 1.0).tolist())))


def random_system(rng: np.random.Generator, n: int, dim: int = 1) -> FunctionSystem:
    maps = []
    for _ in range(n):
        f = random_affine(rng) if rng.random() < 0.5 else random_pwl(rng)
        maps.append(embed(f, dim))
    return FunctionSystem.of(maps)


def _fixed_points(sys: FunctionSystem) -> np.ndarray:
    return np.array([[float(v) for v in exact_fixed_point(m)] for m in sys.maps])


# ---------------------------------------------------------------------------
# separation search


@dataclass(frozen=True)
class TraceRow:
    trial: int
    distance: float
    status: str  # evaluated, bounded, nonconverged


@dataclass(frozen=True)
class SearchReport:
    trials: int
    best_distance: float
    best_system: FunctionSystem | None
    threshold: float
    violated: bool
    seed: int
    best_trial: int | None = None
    evaluated: int = 0
    bounded: int = 0
    nonconverged: int = 0
    trace: tuple[TraceRow, ...] = field(default=(), repr=False)


def _run_trials(F: CompactSet, n: int, trial_ids, seed: int, tol: float, resolution: float, max_iter: int):
    best = (math.inf, None)
    rows = []
    for t in trial_ids:
        rng = np.random.default_rng([seed, t])
        sys = random_system(rng, n, F.dim)
        z = _fixed_points(sys)
        probe = np.vstack([z] + [m(z) for m in sys.maps])
        lower = float(_nearest(probe, F.points)[0].max())
        # the computed attractor sits within r / (1 - L) of the true one
        slack = resolution / (1 - sys.lipschitz()) + tol
        if lower - slack > best[0]:
            rows.append(TraceRow(t, lower, "bounded"))
            continue
        res = attractor(sys, tol=tol, max_iter=max_iter, resolution=resolution)
        if not res.converged:
            rows.append(TraceRow(t, math.nan, "nonconverged"))
            continue
        d = hausdorff_distance(res.attractor, F).distance
        rows.append(TraceRow(t, d, "evaluated"))
        if (d, t) < (best[0], best[1] if best[1] is not None else math.inf):
            best = (d, t)
    return best, rows


def separation_search(
    F: CompactSet,
    delta: float,
    n: int,
    trials: int,
    seed: int,
    tol: float = 1e-6,
    resolution: float = 1e-4,
    max_iter: int = 1_000_000,
    workers: int | None = None,
) -> SearchReport:
    """Minimum d_H(attractor, F) over ``trials`` random n-map systems.

    Trial t draws its system from ``default_rng([seed, t])``. A trial is
    skipped without computing its attractor when the distance from its fixed
    points (and their images) to F already exceeds the best distance found so
    far by more than the attractor error bound; such trials cannot lower the
    minimum, so the result does not depend on trial order or worker count.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    if trials < 0:
        raise ValueError("trials must be non-negative")
    workers = workers or worker_count()
    ids = list(range(trials))
    if workers <= 1 or trials < 2 * workers:
        results = [_run_trials(F, n, ids, seed, tol, resolution, max_iter)]
    else:
        chunks = [ids[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_run_trials, F, n, c, seed, tol, resolution, max_iter) for c in chunks]
            results = [f.result() for f in futures]
    best_d, best_t = math.inf, None
    rows: list[TraceRow] = []
    for (d, t), part in results:
        rows.extend(part)
        if t is not None and (d, t) < (best_d, best_t if best_t is not None else math.inf):
            best_d, best_t = d, t
    rows.sort(key=lambda r: r.trial)
    best_sys = None
    if best_t is not None:
        best_sys = random_system(np.random.default_rng([seed, best_t]), n, F.dim)
    return SearchReport(
        trials=trials,
        best_distance=best_d,
        best_system=best_sys,
        threshold=float(delta),
        violated=best_d < delta,
        seed=seed,
        best_trial=best_t,
        evaluated=sum(r.status == "evaluated" for r in rows),
        bounded=sum(r.status == "bounded" for r in rows),
        nonconverged=sum(r.status == "nonconverged" for r in rows),
        trace=tuple(rows),
    )


def inversion_distance(F: CompactSet, sys: FunctionSystem, tol: float = 1e-6, resolution: float = 1e-4) -> float:
    """d_H between F and the computed attractor of a system that generates it."""
    res = attractor(sys, tol=tol, resolution=resolution)
    return hausdorff_distance(res.attractor, F).distance


# ---------------------------------------------------------------------------
# coverage audits


@dataclass(frozen=True)
class CoverageReport:
    targets: tuple
    per_map_hits: tuple[int, ...]
    uncovered: tuple
    capacity: int
    bounds: dict
    details: dict = field(default_factory=dict)

    @property
    def margin(self) -> int:
        return len(self.targets) - self.capacity

    @property
    def passed(self) -> bool:
        return bool(self.uncovered) and sum(self.per_map_hits) <= self.capacity and all(self.bounds.values())


def coverage_audit_ladder(
    w: LadderWitness,
    sys: FunctionSystem,
    tol: float = 1e-6,
    resolution: float | None = None,
) -> CoverageReport:
    """Which delta-balls around the points of a free block the images meet.

    The candidate attractor is split into blocks A_j (points within delta of
    F_j). The free block m is the first block holding no fixed point of the
    system; each map's image of each A_j is checked against the k balls
    B(y, delta), y in F_m. ``resolution`` defaults to delta / 2 so that net
    points stand in for the attractor to within the ball radius.
    """
    if sys.dim != 1:
        raise DimensionError("ladder coverage audits run in d = 1")
    delta = float(w.delta)
    r = resolution if resolution is not None else delta / 2
    res = attractor(sys, tol=tol, resolution=r)
    pts = res.attractor.points
    blocks = [np.array([float(p) for p in blk]) for blk in w.x]
    allpts = np.concatenate(blocks)

    def block_of(v: np.ndarray) -> np.ndarray:
        d = np.abs(v[:, None] - allpts[None, :])
        j = d.argmin(axis=1)
        return np.where(d[np.arange(len(v)), j] < delta, j // w.k, -1)

    fixed = _fixed_points(sys)[:, 0]
    fixed_blocks = sorted({int(b) for b in block_of(fixed) if b >= 0})
    free = next(j for j in range(w.n + 1) if j not in fixed_blocks) if len(fixed_blocks) <= w.n else None
    src_blocks = block_of(pts[:, 0])
    targets = blocks[free] if free is not None else np.array([])
    per_map = []
    matrix = {}
    any_ball = []
    hit_any = np.zeros(len(targets), dtype=bool)
    for i, f in enumerate(sys.maps):
        img = f(pts)[:, 0]
        near_all = (np.abs(img[:, None] - allpts[None, :]) < delta).any(axis=0)
        any_ball.append(int(near_all.sum()))
        hits = np.zeros(len(targets), dtype=bool)
        for j in sorted(set(src_blocks.tolist())):
            sub = img[src_blocks == j]
            met = (np.abs(sub[:, None] - targets[None, :]) < delta).any(axis=0) if len(targets) else hits
            matrix[(i, j)] = int(met.sum())
            hits |= met
        per_map.append(int(hits.sum()))
        hit_any |= hits
    uncovered = tuple(float(y) for y, h in zip(targets, hit_any) if not h)
    capacity = w.n * w.n
    bounds = {
        "free block exists": free is not None,
        "one ball per map and block": all(v <= 1 for (i, j), v in matrix.items() if j >= 0),
    }
    return CoverageReport(
        targets=tuple(float(y) for y in targets),
        per_map_hits=tuple(per_map),
        uncovered=uncovered,
        capacity=capacity,
        bounds=bounds,
        details={
            "free_block": free,
            "fixed_point_blocks": fixed_blocks,
            "hits_by_source_block": matrix,
            "balls_met_anywhere": tuple(any_ball),
            "attractor_points": len(pts),
        },
    )


def image_interval(f: ContractiveMap, lo, hi) -> tuple:
    """Exact image of [lo, hi] under a 1-d map, as (min, max)."""
    if f.dim != 1:
        raise DimensionError("interval images are 1-d only")
    xs = [lo, hi]
    if isinstance(f, PiecewiseLinear):
        xs += [x for x, _ in f.nodes if lo < x < hi]
    elif isinstance(f, Logistic) and lo < Fraction(1, 2) < hi:
        xs.append(Fraction(1, 2))
    try:
        vals = [f.evaluate_exact(x) for x in xs]
    except TypeError:
        vals = [f.scalar(float(x)) for x in xs]
    return min(vals), max(vals)


def _merge(pieces):
    out: list[list] = []
    for lo, hi in sorted(pieces):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return out


def _covered(target, merged) -> bool:
    return any(lo <= target[0] and target[1] <= hi for lo, hi in merged)


def coverage_audit_intervals(w: IntervalWitness, sys: FunctionSystem, group: int) -> CoverageReport:
    """Full covers of the intervals of one group by images of the truncation.

    Images of every component (and of the limit point 0) are computed exactly
    and classed by the source group: earlier, same, or later (0 counts as
    later). Each "at most" bound is checked by enumeration: one map covers at
    most sum_{i<g} k_i targets from earlier groups and at most one from its
    own group, and later groups together cover none.
    """
    if not 1 <= group <= w.depth:
        raise ValueError(f"group must lie in 1..{w.depth}")
    n = len(sys)
    if n >= group:
        raise ValueError(f"a {n}-map system is audited against groups beyond {n}, got {group}")
    if sys.dim != 1:
        raise DimensionError("interval coverage audits run in d = 1")
    targets = w.intervals[group - 1]
    earlier = sum(w.k_seq[: group - 1])
    sources = [(g + 1, iv) for g, grp in enumerate(w.intervals) for iv in grp]
    sources.append((w.depth + 1, (Fraction(0), Fraction(0))))
    comps = _merge([(lo, hi) for _, (lo, hi) in sources])
    per_map = []
    by_class = []
    later_images = []
    all_images = []
    escapes = 0
    for f in sys.maps:
        cls: dict[str, list] = {"earlier": [], "same": [], "later": []}
        for g, (lo, hi) in sources:
            img = image_interval(f, lo, hi)
            key = "earlier" if g < group else "same" if g == group else "later"
            cls[key].append(img)
            if not any(a <= img[0] and img[1] <= b for a, b in comps):
                escapes += 1
        counts = {k: sum(_covered(t, _merge(v)) for t in targets) for k, v in cls.items()}
        by_class.append(counts)
        later_images += cls["later"]
        mine = cls["earlier"] + cls["same"] + cls["later"]
        all_images += mine
        per_map.append(sum(_covered(t, _merge(mine)) for t in targets))
    union = _merge(all_images)
    uncovered = tuple(t for t in targets if not _covered(t, union))
    later_union = _merge(later_images)
    capacity = n * earlier + n
    bounds = {
        "earlier groups": all(c["earlier"] <= earlier for c in by_class),
        "same group": all(c["same"] <= 1 for c in by_class),
        "later groups": sum(_covered(t, later_union) for t in targets) == 0,
        "capacity below group size": capacity < w.k_seq[group - 1],
    }
    return CoverageReport(
        targets=tuple(targets),
        per_map_hits=tuple(per_map),
        uncovered=uncovered,
        capacity=capacity,
        bounds=bounds,
        details={"by_class": tuple(by_class), "escaping_images": escapes, "group": group},
    )


def constant_system(points) -> FunctionSystem:
    return FunctionSystem.of([Constant(p) for p in points])
