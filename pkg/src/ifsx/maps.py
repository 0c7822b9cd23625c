"""Contraction and weak-contraction self-maps of the unit cube.

Every map is an immutable value. One-dimensional variants also evaluate
exactly on :class:`fractions.Fraction` inputs when their parameters are
rational, which is what the witness audits rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Sequence

import numpy as np

from .geometry import TOL, CompactSet, DimensionError, _normalize

CONTRACTION = "contraction"
WEAK = "weak"
KINDS = (CONTRACTION, WEAK)


class FixedPointError(RuntimeError):
    """Fixed-point iteration ran out of steps; ``best`` holds the last iterate."""

    def __init__(self, message: str, best):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class LipschitzCertificate:
    upper_bound: float
    attained_on: tuple | None = None
    method: str = "analytic"
    weak_only: bool = False
    exact: Fraction | None = None

    @property
    def margin(self) -> float:
        return 1.0 - self.upper_bound


def _num(v):
    """Keep Fractions and ints exact, everything else becomes float."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    return float(v)


def _f(v) -> float:
    return float(v)


class ContractiveMap:
    """Base class; subclasses are frozen dataclasses."""

    kind: str
    dim: int = 1

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate on an ``(n, dim)`` float array."""
        raise NotImplementedError

    def evaluate_exact(self, x: Fraction) -> Fraction:
        raise TypeError(f"{type(self).__name__} has no exact evaluation")

    def lipschitz(self) -> LipschitzCertificate:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError

    def scalar(self, x: float) -> float:
        """Evaluate a 1-d map at a single float."""
        return float(self(np.array([[x]], dtype=float))[0, 0])


@dataclass(frozen=True)
class Affine(ContractiveMap):
    """x -> a*x + b on [0, 1]."""

    a: Real
    b: Real
    kind: str = CONTRACTION

    def __post_init__(self):
        object.__setattr__(self, "a", _num(self.a))
        object.__setattr__(self, "b", _num(self.b))
        if not abs(self.a) < 1:
            raise ValueError(f"affine slope {self.a} is not contractive")
        lo, hi = sorted((self.b, self.a + self.b))
        if lo < -TOL or hi > 1 + TOL:
            raise ValueError(f"affine map {self.a}*x + {self.b} leaves [0,1]")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")

    def __call__(self, x):
        return np.clip(_f(self.a) * np.asarray(x, dtype=float) + _f(self.b), 0.0, 1.0)

    def evaluate_exact(self, x):
        return self.a * x + self.b

    def lipschitz(self):
        a = abs(self.a)
        return LipschitzCertificate(float(a), exact=a if isinstance(a, Fraction) else None)

    def to_config(self):
        return {"type": "affine", "a": self.a, "b": self.b, "kind": self.kind}


@dataclass(frozen=True)
class Constant(ContractiveMap):
    c: tuple
    kind: str = CONTRACTION

    def __post_init__(self):
        c = self.c if isinstance(self.c, (tuple, list)) else (self.c,)
        c = tuple(_num(v) for v in c)
        if not c:
            raise ValueError("constant map needs a target point")
        if any(v < -TOL or v > 1 + TOL for v in c):
            raise ValueError(f"constant {c} outside the unit cube")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "dim", len(c))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.array([_f(v) for v in self.c]), x.shape).copy()

    def evaluate_exact(self, x):
        if self.dim != 1:
            raise TypeError("exact evaluation is 1-d only")
        return self.c[0]

    def lipschitz(self):
        return LipschitzCertificate(0.0, exact=Fraction(0))

    def to_config(self):
        c = self.c[0] if self.dim == 1 else list(self.c)
        return {"type": "constant", "c": c, "kind": self.kind}


@dataclass(frozen=True)
class PiecewiseLinear(ContractiveMap):
    """Linear interpolation through ``nodes``; constant outside their hull."""

    nodes: tuple
    kind: str = CONTRACTION
    _xs: np.ndarray = field(init=False, repr=False, compare=False)
    _ys: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple((_num(x), _num(y)) for x, y in self.nodes)
        if not nodes:
            raise ValueError("piecewise-linear map needs at least one node")
        for (x0, _), (x1, _) in zip(nodes, nodes[1:]):
            if not x1 > x0:
                raise ValueError(f"node abscissae must be strictly increasing ({x0}, {x1})")
        for x, y in nodes:
            if y < -TOL or y > 1 + TOL:
                raise ValueError(f"node value {y} at {x} outside [0,1]")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "_xs", np.array([_f(x) for x, _ in nodes]))
        object.__setattr__(self, "_ys", np.array([_f(y) for _, y in nodes]))
        bound = self.max_slope()
        # a segment of slope >= 1 breaks even the weak inequality
        if not bound < 1:
            raise ValueError(f"segment slope {float(bound)} is not contractive")

    def slopes(self) -> list:
        out = []
        for (x0, y0), (x1, y1) in zip(self.nodes, self.nodes[1:]):
            out.append((y1 - y0) / (x1 - x0))
        return out

    def max_slope(self):
        s = [abs(v) for v in self.slopes()]
        return max(s) if s else Fraction(0)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, Fraction) and isinstance(y, Fraction) for x, y in self.nodes)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, self._xs, self._ys)

    def evaluate_exact(self, x):
        nodes = self.nodes
        if x <= nodes[0][0]:
            return nodes[0][1]
        if x >= nodes[-1][0]:
            return nodes[-1][1]
        lo, hi = 0, len(nodes) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if nodes[mid][0] <= x:
                lo = mid
            else:
                hi = mid
        (x0, y0), (x1, y1) = nodes[lo], nodes[hi]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def lipschitz(self):
        slopes = self.slopes()
        if not slopes:
            return LipschitzCertificate(0.0, exact=Fraction(0))
        mags = [abs(s) for s in slopes]
        i = max(range(len(mags)), key=lambda j: mags[j])
        pair = (self.nodes[i][0], self.nodes[i + 1][0])
        exact = mags[i] if isinstance(mags[i], Fraction) else None
        return LipschitzCertificate(float(mags[i]), attained_on=pair, exact=exact)

    def to_config(self):
        return {"type": "pwl", "nodes": [[x, y] for x, y in self.nodes], "kind": self.kind}


@dataclass(frozen=True)
class Logistic(ContractiveMap):
    """x -> x - x**2: a weak contraction of [0, 1] that is not a contraction."""

    kind: str = WEAK

    def __post_init__(self):
        if self.kind != WEAK:
            raise ValueError("the logistic map x - x^2 is weak, not a contraction")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x - x * x

    def evaluate_exact(self, x):
        return x - x * x

    def lipschitz(self):
        # |f(x)-f(y)| / |x-y| = |1-(x+y)|, sup 1 near x = y = 0, never attained
        return LipschitzCertificate(1.0, method="analytic", weak_only=True)

    def to_config(self):
        return {"type": "logistic", "kind": self.kind}


@dataclass(frozen=True)
class Embedded(ContractiveMap):
    """(x1, ..., xd) -> (f(x1), 0, ..., 0) for a 1-d map f."""

    inner: ContractiveMap
    target_dim: int
    kind: str = field(init=False)

    def __post_init__(self):
        if self.inner.dim != 1:
            raise DimensionError("only 1-d maps embed")
        if self.target_dim < 1:
            raise ValueError("target dimension must be positive")
        object.__setattr__(self, "kind", self.inner.kind)
        object.__setattr__(self, "dim", self.target_dim)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        out[:, :1] = self.inner(x[:, :1])
        return out

    def lipschitz(self):
        return self.inner.lipschitz()

    def to_config(self):
        return {"type": "embedded", "inner": self.inner.to_config(), "dim": self.target_dim}


# ---------------------------------------------------------------------------
# operations


def _check_domain(f: ContractiveMap, arr: np.ndarray) -> None:
    if arr.shape[1] != f.dim:
        raise DimensionError(f"map acts on dimension {f.dim}, got {arr.shape[1]}")
    if np.any(arr < -TOL) or np.any(arr > 1 + TOL):
        raise ValueError("input outside the unit cube")


def apply(f: ContractiveMap, x: Sequence[float]) -> tuple[float, ...]:
    arr = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1)
    _check_domain(f, arr)
    return tuple(float(v) for v in f(arr)[0])


def image(f: ContractiveMap, a: CompactSet) -> CompactSet:
    if a.dim != f.dim:
        raise DimensionError(f"map acts on dimension {f.dim}, set has {a.dim}")
    out = np.clip(f(a.points), 0.0, 1.0)
    return CompactSet(_normalize(out), a.dim, a.resolution * min(1.0, f.lipschitz().upper_bound))


def lipschitz_upper_bound(f: ContractiveMap) -> LipschitzCertificate:
    return f.lipschitz()


def _pairwise_ratio(f: ContractiveMap, pts: np.ndarray):
    fx = f(pts)
    best, pair = -1.0, None
    # row blocks keep memory bounded for clouds of a few thousand points
    block = max(1, 2_000_000 // len(pts))
    for s in range(0, len(pts), block):
        p = pts[s:s + block]
        q = fx[s:s + block]
        dx = np.sqrt(((p[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
        dy = np.sqrt(((q[:, None, :] - fx[None, :, :]) ** 2).sum(axis=2))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dx > 0, dy / dx, -1.0)
        i, j = np.unravel_index(ratio.argmax(), ratio.shape)
        if ratio[i, j] > best:
            best = float(ratio[i, j])
            pair = (tuple(map(float, p[i])), tuple(map(float, pts[j])))
    return best, pair


def empirical_lipschitz(f: ContractiveMap, s: CompactSet) -> LipschitzCertificate:
    """Largest ratio d(f(x), f(y)) / d(x, y) over distinct pairs of ``s``."""
    if len(s) < 2:
        raise ValueError("empirical Lipschitz estimate needs at least two points")
    if s.dim != f.dim:
        raise DimensionError(f"map acts on dimension {f.dim}, set has {s.dim}")
    best, pair = _pairwise_ratio(f, s.points)
    return LipschitzCertificate(best, attained_on=pair, method="empirical")


def empirical_lipschitz_exact(f: ContractiveMap, xs: Sequence[Fraction]) -> Fraction:
    """Exact max secant ratio of a 1-d map over finitely many rationals."""
    xs = sorted(set(xs))
    if len(xs) < 2:
        raise ValueError("need at least two points")
    ys = [f.evaluate_exact(x) for x in xs]
    best = Fraction(0)
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            r = abs(ys[j] - ys[i]) / (xs[j] - xs[i])
            if r > best:
                best = r
    return best


def fixed_point(f: ContractiveMap, tol: float = 1e-12, max_iter: int = 1_000_000) -> tuple[float, ...]:
    """Picard iteration from the cube centre.

    Contractions stop on the a-posteriori bound L/(1-L) * step <= tol; weak
    maps stop on step <= tol, which certifies d(p, f(p)) <= tol but carries
    no rate, so slow weak maps can exhaust ``max_iter``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    bound = f.lipschitz().upper_bound
    certified = f.kind == CONTRACTION and bound < 1
    x = np.full((1, f.dim), 0.5)
    for _ in range(max_iter):
        y = f(x)
        step = float(np.sqrt(((y - x) ** 2).sum()))
        x = y
        if certified:
            if bound / (1 - bound) * step <= tol or step == 0.0:
                return tuple(float(v) for v in x[0])
        elif step <= tol:
            return tuple(float(v) for v in x[0])
    raise FixedPointError(f"no fixed point within {max_iter} iterations", tuple(float(v) for v in x[0]))


def exact_fixed_point(f: ContractiveMap) -> tuple:
    """Closed-form fixed point for the supported variants."""
    if isinstance(f, Affine):
        return (f.b / (1 - f.a),)
    if isinstance(f, Constant):
        return f.c
    if isinstance(f, Logistic):
        return (Fraction(0),)
    if isinstance(f, Embedded):
        p = exact_fixed_point(f.inner)[0]
        return (p,) + (Fraction(0),) * (f.target_dim - 1)
    if isinstance(f, PiecewiseLinear):
        return (_pwl_fixed_point(f),)
    raise TypeError(f"no closed form for {type(f).__name__}")


def _pwl_fixed_point(g: PiecewiseLinear):
    nodes = list(g.nodes)
    zero, one = (Fraction(0), Fraction(1)) if g.is_exact else (0.0, 1.0)
    if nodes[0][0] > zero:
        nodes.insert(0, (zero, nodes[0][1]))
    if nodes[-1][0] < one:
        nodes.append((one, nodes[-1][1]))
    for (x0, y0), (x1, y1) in zip(nodes, nodes[1:]):
        h0, h1 = y0 - x0, y1 - x1
        if h0 == 0:
            return x0
        if h0 * h1 < 0 or h1 == 0:
            # g(x) - x is linear on the segment with a root inside
            return x0 + h0 * (x1 - x0) / (h0 - h1)
    raise ValueError("piecewise-linear map has no fixed point in its domain")


def extend_from_finite(domain_points: Sequence, values: Sequence, kind: str | None = None) -> PiecewiseLinear:
    """Interpolate a prescription on finitely many reals, clamping outside the hull.

    The Lipschitz constant of the result is the largest slope between
    consecutive prescribed points, so a prescription whose secants are all
    below 1 extends to a contraction with the same constant.
    """
    if len(domain_points) != len(values) or not domain_points:
        raise ValueError("domain and values must be nonempty and of equal length")
    pairs = list(zip(domain_points, values))
    for (x0, _), (x1, _) in zip(pairs, pairs[1:]):
        if x1 == x0:
            raise ValueError(f"duplicate domain point {x0}")
        if x1 < x0:
            raise ValueError("domain points must be strictly increasing")
    return PiecewiseLinear(tuple(pairs), kind or CONTRACTION)


def embed(f: ContractiveMap, d: int) -> ContractiveMap:
    if d == 1 and f.dim == 1:
        return f
    return Embedded(f, d)


# ---------------------------------------------------------------------------
# structured-text map descriptions


def _encode(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return float(v)


def _encode_config(cfg):
    if isinstance(cfg, dict):
        return {k: _encode_config(v) for k, v in cfg.items()}
    if isinstance(cfg, (list, tuple)):
        return [_encode_config(v) for v in cfg]
    if isinstance(cfg, (Fraction, float)):
        return _encode(cfg)
    return cfg


def map_to_config(f: ContractiveMap) -> dict:
    return _encode_config(f.to_config())


_MAP_KEYS = {
    "affine": {"type", "a", "b", "kind"},
    "constant": {"type", "c", "kind"},
    "pwl": {"type", "nodes", "kind"},
    "logistic": {"type", "kind"},
    "embedded": {"type", "inner", "dim", "kind"},
}


def _decode_number(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("non-finite number")
        return v
    raise ValueError(f"not a number: {v!r}")


def map_from_config(cfg: dict) -> ContractiveMap:
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise ValueError(f"map description needs a 'type': {cfg!r}")
    t = cfg["type"]
    if t not in _MAP_KEYS:
        raise ValueError(f"unknown map type {t!r}")
    unknown = set(cfg) - _MAP_KEYS[t]
    if unknown:
        raise ValueError(f"unknown keys for {t} map: {sorted(unknown)}")
    kind = cfg.get("kind", WEAK if t == "logistic" else CONTRACTION)
    if t == "affine":
        return Affine(_decode_number(cfg["a"]), _decode_number(cfg["b"]), kind)
    if t == "constant":
        c = cfg["c"]
        c = tuple(_decode_number(v) for v in c) if isinstance(c, list) else (_decode_number(c),)
        return Constant(c, kind)
    if t == "pwl":
        nodes = tuple((_decode_number(x), _decode_number(y)) for x, y in cfg["nodes"])
        return PiecewiseLinear(nodes, kind)
    if t == "logistic":
        return Logistic(kind)
    inner = map_from_config(cfg["inner"])
    g = Embedded(inner, int(cfg["dim"]))
    if "kind" in cfg and cfg["kind"] != g.kind:
        raise ValueError("embedded map kind must match its inner map")
    return g
