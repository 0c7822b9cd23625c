"""Explicit compact sets separating the attractor families.

Three constructions are built in exact rational arithmetic and audited
condition by condition:

* ``build_prop_p``: a convergent sequence X that is the attractor of a
  two-map weak system (a contraction g through the points plus a constant),
  truncated at a finite depth.
* ``build_ladder``: n + 1 blocks of k = n^2 + 1 points whose union F is the
  attractor of n + 1 piecewise-linear contractions, while n maps cannot hit
  every one of the k delta-balls of some block.
* ``build_interval_witness``: a cascade of groups of closed intervals
  shrinking to 0, together with ``build_epsilon_system``, a two-map
  contraction system whose attractor is epsilon-close to the cascade.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .geometry import CompactSet, embed_set, hausdorff_distance, interval_net, thicken_intervals
from .hutchinson import AttractorResult, FunctionSystem, attractor
from .maps import (
    Affine,
    Constant,
    ContractiveMap,
    PiecewiseLinear,
    empirical_lipschitz_exact,
    extend_from_finite,
)


class WitnessError(ValueError):
    pass


@dataclass(frozen=True)
class AuditItem:
    condition: str
    passed: bool
    margin: Fraction | float | None = None
    note: str = ""


@dataclass(frozen=True)
class AuditReport:
    items: tuple[AuditItem, ...]

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    def failures(self) -> list[AuditItem]:
        return [i for i in self.items if not i.passed]

    def __getitem__(self, condition: str) -> AuditItem:
        for i in self.items:
            if i.condition == condition:
                return i
        raise KeyError(condition)

    def __iter__(self):
        return iter(self.items)


def _fmin(values) -> Fraction | None:
    values = list(values)
    return min(values) if values else None


def _to_set(xs: Sequence[Fraction]) -> CompactSet:
    return CompactSet.from_points(np.array([float(x) for x in xs]).reshape(-1, 1))


# ---------------------------------------------------------------------------
# convergent sequence attractor of a weak two-map system


@dataclass(frozen=True)
class PropPWitness:
    x_points: tuple[Fraction, ...]  # x_1 > x_2 > ... > x_N
    sentinel: Fraction
    interval_tops: tuple[Fraction, ...]  # t_1, ..., t_{depth+1}
    counts: tuple[int, ...]
    depth: int
    system: FunctionSystem
    audit: AuditReport

    @property
    def points(self) -> tuple[Fraction, ...]:
        """X = {0} u {x_n} u {sentinel}, ascending."""
        return (Fraction(0), self.sentinel, *reversed(self.x_points))

    def compact_set(self, dim: int = 1) -> CompactSet:
        return embed_set(_to_set(self.points), dim) if dim > 1 else _to_set(self.points)


def prop_p_counts(depth: int) -> list[int]:
    ks = [2]
    for n in range(2, depth + 1):
        ks.append(n * sum(ks) + 1)
    return ks[:depth]


def build_prop_p(depth: int) -> PropPWitness:
    """Points placed annulus by annulus, I_n \\ I_{n+1} = (t_{n+1}, t_n].

    Annulus n receives k_n points starting exactly at t_n. Its k_n gaps sum to
    the annulus width and vary linearly around the mean width h_n, by at most
    a quarter of the drop to the next mean, so the gaps decrease strictly
    inside the annulus and across annulus boundaries.
    """
    if depth < 2:
        raise WitnessError("depth must be at least 2")
    if depth > 6:
        raise WitnessError("depth > 6 exceeds the exact-arithmetic budget (denominators grow doubly exponentially)")
    tops = [Fraction(1, 2)]
    for _ in range(depth):
        t = tops[-1]
        tops.append(t - t * t)
    ks = prop_p_counts(depth)
    widths = [tops[n] - tops[n + 1] for n in range(depth)]
    means = [w / k for w, k in zip(widths, ks)]
    drops = []
    for n in range(depth):
        d = means[n] - means[n + 1] if n + 1 < depth else means[n]
        if d <= 0:
            raise WitnessError(f"placement infeasible at annulus {n + 1}: mean gap does not shrink")
        drops.append(d)
    for n in range(depth - 1):
        last = means[n] - drops[n] / 4
        first_next = means[n + 1] + drops[n + 1] / 4
        if not last > first_next:
            raise WitnessError(f"placement infeasible between annulus {n + 1} and {n + 2}")

    xs: list[Fraction] = []
    x = tops[0]
    for n in range(depth):
        k = ks[n]
        c = drops[n] / (2 * (k - 1))
        for j in range(1, k + 1):
            xs.append(x)
            x -= means[n] + c * (Fraction(k + 1, 2) - j)
    sentinel = x
    if sentinel != tops[depth]:
        raise WitnessError("gap schedule does not close the last annulus")

    g = extend_from_finite([Fraction(0), *reversed(xs)], [Fraction(0), sentinel, *reversed(xs[1:])])
    h = Constant(xs[0])
    system = FunctionSystem.of([g, h])
    audit = _audit_prop_p(xs, sentinel, tops, ks, g, h)
    return PropPWitness(tuple(xs), sentinel, tuple(tops), tuple(ks), depth, system, audit)


def _audit_prop_p(xs, sentinel, tops, ks, g, h) -> AuditReport:
    items = []
    seq = [*xs, sentinel]
    items.append(AuditItem("a", all(x <= Fraction(1, 2) for x in seq), Fraction(1, 2) - max(seq)))
    dec = [a - b for a, b in zip(seq, seq[1:])]
    items.append(AuditItem("b", all(d > 0 for d in dec), _fmin(dec)))
    drops = [a - b for a, b in zip(dec, dec[1:])]
    items.append(AuditItem("c", all(d > 0 for d in drops), _fmin(drops)))
    counted = []
    for n in range(len(ks)):
        counted.append(sum(1 for x in seq if tops[n + 1] < x <= tops[n]))
    items.append(AuditItem("d", counted == list(ks), note=f"counts {counted}"))
    ok_e = ks[0] == 2 and all(ks[n] > (n + 1) * sum(ks[:n]) for n in range(1, len(ks)))
    margins = [ks[n] - (n + 1) * sum(ks[:n]) for n in range(1, len(ks))]
    items.append(AuditItem("e", ok_e, min(margins)))
    slope = g.max_slope()
    items.append(AuditItem("g contraction", slope < 1, 1 - slope))
    body = [Fraction(0), *xs]
    image = {g.evaluate_exact(x) for x in body} | {h.evaluate_exact(x) for x in [*body, sentinel]}
    target = {Fraction(0), *seq}
    items.append(AuditItem("invariance", image == target, note="g[X minus sentinel] u h[X] = X"))
    return AuditReport(tuple(items))


# ---------------------------------------------------------------------------
# ladder of point blocks


@dataclass(frozen=True)
class LadderWitness:
    n: int
    k: int
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    x: tuple[tuple[Fraction, ...], ...]  # x[i][j], blocks i = 0..n
    delta: Fraction
    system: FunctionSystem
    audit: AuditReport

    @property
    def blocks(self) -> tuple[tuple[Fraction, ...], ...]:
        return self.x

    @property
    def points(self) -> tuple[Fraction, ...]:
        return tuple(p for blk in self.x for p in blk)

    def compact_set(self, dim: int = 1) -> CompactSet:
        if 4 * self.delta < Fraction(1, 10**9):
            raise WitnessError("ladder spacing below 1e-9 cannot be represented as a float cloud")
        s = _to_set(self.points)
        return embed_set(s, dim) if dim > 1 else s

    def block_sets(self) -> list[CompactSet]:
        return [_to_set(blk) for blk in self.x]


def build_ladder(n: int) -> LadderWitness:
    if n < 1:
        raise WitnessError("n must be at least 1")
    if n > 8:
        raise WitnessError("n > 8 exceeds the exact-arithmetic budget for ladder parameters")
    k = n * n + 1
    nine = Fraction(9, 10)
    ratio = nine ** (k - 2) / (2 * (k - 1))
    # a_1 scaled so that condition 1's left side is exactly 1/2
    c = sum(10 * (k - 1) * 2**i for i in range(n)) + (k - 1) * sum(ratio**i for i in range(n + 1))
    a1 = 1 / (2 * c)
    a = [a1 * ratio**i for i in range(n + 1)]
    b = [10 * a1 * (k - 1) * 2**i for i in range(n)]
    x: list[list[Fraction]] = []
    start = Fraction(0)
    for i in range(n + 1):
        blk = [start]
        for j in range(1, k):
            blk.append(blk[-1] + a[i] * nine ** (j - 1))
        x.append(blk)
        if i < n:
            start = blk[-1] + b[i]
    delta = a[n] * nine ** (k - 2) / 4
    pts = [p for blk in x for p in blk]
    maps = []
    for i in range(n + 1):
        own = {p: j for j, p in enumerate(x[i])}
        vals = []
        for p in pts:
            j = own.get(p)
            if j is None:
                vals.append(x[i][0])
            else:
                vals.append(x[i][min(j + 1, k - 1)])
        maps.append(extend_from_finite(pts, vals))
    system = FunctionSystem.of(maps)
    audit = _audit_ladder(n, k, a, b, x, delta, maps)
    return LadderWitness(n, k, tuple(a), tuple(b), tuple(tuple(blk) for blk in x), delta, system, audit)


def _audit_ladder(n, k, a, b, x, delta, maps) -> AuditReport:
    nine = Fraction(9, 10)
    items = []
    lhs = sum(b) + sum(a) * (k - 1)
    items.append(AuditItem("condition 1", lhs < 1, 1 - lhs))
    m2 = [a[i] * nine ** (k - 2) - (k - 1) * a[i + 1] for i in range(n)]
    items.append(AuditItem("condition 2", all(v > 0 for v in m2), _fmin(m2)))
    items.append(AuditItem("condition 3", b[0] == 10 * a[0] * (k - 1)))
    items.append(AuditItem("condition 4", all(b[i + 1] == 2 * b[i] for i in range(n - 1))))
    rec = x[0][0] == 0
    for i in range(n + 1):
        rec &= all(x[i][j + 1] == x[i][j] + a[i] * nine**j for j in range(k - 1))
        if i < n:
            rec &= x[i + 1][0] == x[i][-1] + b[i]
    items.append(AuditItem("x recurrence", rec))
    pts = [p for blk in x for p in blk]
    items.append(AuditItem("unit interval", pts[-1] < 1, 1 - pts[-1]))
    gaps = [q - p for p, q in zip(pts, pts[1:])]
    items.append(AuditItem("delta", min(gaps) == 4 * delta, min(gaps), "minimal spacing equals 4 delta"))
    image = set()
    for f in maps:
        image |= {f.evaluate_exact(p) for p in pts}
    items.append(AuditItem("invariance", image == set(pts), note="F = union f_i[F]"))
    slopes = [f.max_slope() for f in maps]
    items.append(AuditItem("slopes", all(s < 1 for s in slopes), 1 - max(slopes)))
    emp = [empirical_lipschitz_exact(f, pts) for f in maps]
    items.append(AuditItem("empirical lipschitz", all(e < 1 for e in emp), 1 - max(emp)))
    return AuditReport(tuple(items))


# ---------------------------------------------------------------------------
# interval cascade


def k_sequence(n: int) -> int:
    if n < 1:
        raise ValueError("n must be at least 1")
    ks = [1]
    for m in range(2, n + 1):
        ks.append(m * sum(ks) + 1 + m)
    return ks[n - 1]


def _eps(n: int) -> Fraction:
    return Fraction(1, 2 ** (n + 1) * (n + 1))


@dataclass(frozen=True)
class IntervalWitness:
    k_seq: tuple[int, ...]
    lengths: tuple[Fraction, ...]
    intervals: tuple[tuple[tuple[Fraction, Fraction], ...], ...]  # [group][j] = (lo, hi)
    depth: int
    anchor: Fraction
    tail_bound: Fraction
    audit: AuditReport

    def all_intervals(self) -> list[tuple[Fraction, Fraction]]:
        return [iv for grp in self.intervals for iv in grp]

    @property
    def min_endpoint(self) -> Fraction:
        return self.intervals[-1][-1][0]

    def compact_set(self, resolution: float) -> CompactSet:
        """The truncation together with 0, netted at ``resolution``."""
        parts = [np.array([0.0])]
        for lo, hi in self.all_intervals():
            parts.append(interval_net(float(lo), float(hi), resolution))
        return CompactSet.from_points(np.concatenate(parts).reshape(-1, 1), resolution=resolution)


def build_interval_witness(depth: int) -> IntervalWitness:
    """Groups laid right to left from the anchor 1/2.

    Group n holds k_n intervals of length l_n separated by gaps l_n, the
    next group starts one gap l_{n+1} below, and lengths shrink by
        l_{n+1} = eps_n l_n / (2 k_{n+1} + eps_{n+1}),  eps_n = 1 / (2^(n+1) (n+1)),
    which makes the bottom of group n equal eps_n l_n, so it tends to 0.
    """
    if depth < 2:
        raise WitnessError("depth must be at least 2")
    if depth > 8:
        raise WitnessError("depth > 8 exceeds the exact-arithmetic budget for interval sizes")
    ks = [k_sequence(m) for m in range(1, depth + 1)]
    anchor = Fraction(1, 2)
    lengths = [anchor / (2 * ks[0] - 1 + _eps(1))]
    for m in range(1, depth):
        lengths.append(_eps(m) * lengths[-1] / (2 * ks[m] + _eps(m + 1)))
    groups = []
    top = anchor
    for m in range(depth):
        ell = lengths[m]
        grp = tuple((top - (2 * j - 1) * ell, top - 2 * (j - 1) * ell) for j in range(1, ks[m] + 1))
        groups.append(grp)
        if m + 1 < depth:
            top = grp[-1][0] - lengths[m + 1]
    tail = Fraction(8, 15) * _eps(depth) * lengths[-1]
    audit = _audit_intervals(ks, lengths, groups, tail, depth)
    return IntervalWitness(tuple(ks), tuple(lengths), tuple(groups), depth, anchor, tail, audit)


def _audit_intervals(ks, lengths, groups, tail, depth) -> AuditReport:
    items = []
    equal = all(hi - lo == lengths[m] for m, grp in enumerate(groups) for lo, hi in grp)
    margins = []
    for m in range(depth):
        below = sum(ks[q] * lengths[q] for q in range(m + 1, depth)) + tail
        margins.append(lengths[m] - (m + 1) * below)
    items.append(AuditItem("condition 1", equal and all(v > 0 for v in margins), _fmin(margins)))
    flat = [iv for grp in groups for iv in grp]
    order = all(b[1] < a[0] for a, b in zip(flat, flat[1:]))
    items.append(AuditItem("condition 2", order))
    intra = all(grp[j][0] - grp[j + 1][1] == lengths[m] for m, grp in enumerate(groups) for j in range(len(grp) - 1))
    inter = all(groups[m][-1][0] - groups[m + 1][0][1] == lengths[m + 1] for m in range(depth - 1))
    items.append(AuditItem("condition 3", intra and inter))
    bottoms = [grp[-1][0] for grp in groups]
    inside = flat[0][1] <= 1 and flat[-1][0] > 0
    shrinking = all(q < p for p, q in zip(bottoms, bottoms[1:]))
    closed_form = all(bottoms[m] == _eps(m + 1) * lengths[m] for m in range(depth))
    items.append(AuditItem("condition 4", inside and shrinking and closed_form, flat[-1][0],
                           "bottom of group n equals eps_n * l_n"))
    counts = [len(grp) for grp in groups]
    items.append(AuditItem("group sizes", counts == list(ks), note=f"k = {counts}"))
    cap = [ks[m] - ((m + 1) * sum(ks[:m]) + m + 1) for m in range(1, depth)]
    items.append(AuditItem("capacity", all(v > 0 for v in cap), _fmin(cap),
                           "n * sum_{i<n} k_i + n < k_n for 2 <= n <= depth; n = 1 has k_1 = 1 and one-map attractors are singletons"))
    return AuditReport(tuple(items))


# ---------------------------------------------------------------------------
# epsilon-close contraction pair


def y_sequence(start, epsilon, cap: int = 10_000_000):
    """y_1 = start, y_{i+1} = max(0, y_i - epsilon / (i + 1)), up to the first 0.

    Returns the list and the 1-based index of its first zero.
    """
    if not (start > 0 and epsilon > 0):
        raise ValueError("start and epsilon must be positive")
    ys = [start]
    zero = start - start
    i = 1
    while ys[-1] > 0:
        if i >= cap:
            raise RuntimeError(f"y sequence did not reach 0 within {cap} terms")
        ys.append(max(zero, ys[-1] - epsilon / (i + 1)))
        i += 1
    return ys, len(ys)


@dataclass(frozen=True)
class Prescription:
    label: str
    x: float
    value: float
    status: str  # honored, coincides, dropped, substituted


@dataclass(frozen=True)
class EpsilonSystem:
    epsilon: float
    n_swallow: int
    alpha: float
    y_seq: tuple[float, ...]
    i0: int
    f1: PiecewiseLinear
    f2: Affine
    attractor: AttractorResult
    target: CompactSet
    distance: float
    prescriptions: tuple[Prescription, ...]
    audit: AuditReport
    system: FunctionSystem = field(repr=False, default=None)


Y_CHAIN_CAP = 10_000_000


def epsilon_range(w: IntervalWitness) -> tuple[float, float]:
    """Open-closed range (lo, hi] of epsilon values the truncation supports."""
    lo = float(w.min_endpoint) / 2
    hi = 2 * (1 - float(w.intervals[0][-1][1]))
    return lo, hi


def build_epsilon_system(
    w: IntervalWitness,
    epsilon: float,
    tol: float = 1e-6,
    resolution: float = 1e-4,
    max_iter: int = 1_000_000,
) -> EpsilonSystem:
    eps_exact = Fraction(epsilon)
    lo_eps, hi_eps = epsilon_range(w)
    groups = w.intervals
    depth = w.depth
    lengths = w.lengths
    # least n for which every gap below max I_n^{k_n} is shorter than 2 eps
    n_sw = None
    for n in range(1, depth + 1):
        below = [lengths[n]] if n < depth else []
        below.append(w.min_endpoint)
        if max(below) < 2 * eps_exact:
            n_sw = n
            break
    if n_sw is None or not eps_exact > 0:
        raise WitnessError(f"epsilon {epsilon} outside the feasible range ({lo_eps:.3g}, {hi_eps:.3g}]")
    top_n = groups[n_sw - 1][-1][1]
    y1 = float(top_n + eps_exact / 2)
    if y1 > 1:
        raise WitnessError(f"epsilon {epsilon} outside the feasible range ({lo_eps:.3g}, {hi_eps:.3g}]")
    alpha = top_n + eps_exact
    # the chain needs about exp(y1 / eps) terms (harmonic growth)
    if y1 / float(epsilon) > math.log(Y_CHAIN_CAP) + 1:
        raise WitnessError(f"epsilon {epsilon} needs a y chain longer than {Y_CHAIN_CAP} terms")
    try:
        ys, i0 = y_sequence(y1, float(epsilon), cap=Y_CHAIN_CAP)
    except RuntimeError as exc:
        raise WitnessError(str(exc)) from None

    prescribed: list[tuple[str, float, float]] = []
    for i in range(len(ys) - 1):
        prescribed.append((f"y_{i + 1}", ys[i], ys[i + 1]))
    prescribed.append(("zero", 0.0, 0.0))
    if n_sw >= 2:
        lo, hi = groups[n_sw - 1][-2]
        prescribed.append((f"I_{n_sw}^(k-1) min", float(lo), y1))
        prescribed.append((f"I_{n_sw}^(k-1) max", float(hi), y1))
    for m in range(1, n_sw):
        lo, hi = groups[m - 1][-1]
        nlo, nhi = groups[m][0]
        prescribed.append((f"I_{m}^k min", float(lo), float(nlo)))
        prescribed.append((f"I_{m}^k max", float(hi), float(nhi)))
        if m >= 2:
            v = groups[m - 1][-1][0] + min(eps_exact, lengths[m - 1] - lengths[m]) / 2
            prescribed.append((f"I_{m}^(k-1) min", float(groups[m - 1][-2][0]), float(v)))
    flagged = ("I_1^1 max (substituted target max I_2^1)", float(groups[0][0][1]), float(groups[1][0][1]))

    nodes: dict[float, float] = {}
    keys: list[float] = []
    records = []

    def place(label, x, v, substituted=False):
        # abscissae closer than 1e-12 are the same node
        i = bisect.bisect_left(keys, x - 1e-12)
        if i < len(keys) and keys[i] < x + 1e-12:
            status = "coincides" if abs(nodes[keys[i]] - v) < 1e-12 else "dropped"
            records.append(Prescription(label, x, v, status))
            return
        keys.insert(i, x)
        nodes[x] = v
        records.append(Prescription(label, x, v, "substituted" if substituted else "honored"))

    for label, x, v in prescribed:
        place(label, x, v)
    place(*flagged, substituted=True)

    xs = sorted(nodes)
    f1 = PiecewiseLinear(tuple((x, nodes[x]) for x in xs))
    i1_lo, i1_hi = groups[0][0]
    f2 = Affine((i1_hi - i1_lo) / w.anchor, i1_lo)
    system = FunctionSystem.of([f1, f2])
    res = attractor(system, tol=tol, max_iter=max_iter, resolution=resolution)
    target = w.compact_set(resolution)
    dist = hausdorff_distance(res.attractor, target).distance

    items = []
    s1 = f1.max_slope()
    items.append(AuditItem("f1 contraction", s1 < 1, 1 - float(s1)))
    s2 = abs(f2.a)
    items.append(AuditItem("f2 contraction", s2 < 1, 1 - s2))
    vals = np.array([nodes[x] for x in xs])
    pos = np.array(xs) > 0
    items.append(AuditItem("f1 no fixed point above 0", bool(np.all(vals[pos] < np.array(xs)[pos]))))
    swallow = thicken_intervals([(Fraction(0), Fraction(0)), *w.all_intervals()], eps_exact)
    bottom_piece = swallow.intervals[-1]
    items.append(AuditItem("swallow", bottom_piece[0] == 0 and bottom_piece[1] == alpha,
                           note=f"tail merges into [0, {float(alpha):.6g})"))
    dropped = [r for r in records if r.status == "dropped"]
    items.append(AuditItem("prescriptions", True, note=f"{len(dropped)} dropped, see prescriptions"))
    slack = 2 * (tol + resolution)
    items.append(AuditItem("closeness", res.converged and dist <= float(epsilon) + slack,
                           float(epsilon) + slack - dist))
    return EpsilonSystem(
        epsilon=float(epsilon),
        n_swallow=n_sw,
        alpha=float(alpha),
        y_seq=tuple(ys),
        i0=i0,
        f1=f1,
        f2=f2,
        attractor=res,
        target=target,
        distance=dist,
        prescriptions=tuple(records),
        audit=AuditReport(tuple(items)),
        system=system,
    )


def witness_maps(w) -> list[ContractiveMap]:
    return list(w.system.maps)
