"""Polygonal approximation of weak contractions by genuine contractions.

A weak contraction ``f`` of [0, 1] is interpolated at 0, 1 and the first
``k`` rationals of a fixed enumeration. Every secant of a weak contraction
has slope of magnitude strictly below 1, so the interpolant is a contraction
whose constant is the largest of finitely many such secants. As ``k`` grows
the interpolants converge uniformly to ``f`` and their attractors converge to
the attractor of the weak system in the Hausdorff metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .geometry import hausdorff_distance
from .hutchinson import AttractorResult, FunctionSystem, attractor
from .maps import CONTRACTION, ContractiveMap, LipschitzCertificate, PiecewiseLinear


class NotConvergedError(RuntimeError):
    def __init__(self, message: str, result: AttractorResult):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class RationalEnumeration:
    points: tuple[Fraction, ...]
    level: int


def farey_rationals():
    """Reduced fractions of (0, 1) by increasing denominator, then numerator."""
    q = 2
    while True:
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)
        q += 1


def rational_enumeration(k: int) -> RationalEnumeration:
    if k < 1:
        raise ValueError("k must be at least 1")
    pts = []
    for r in farey_rationals():
        pts.append(r)
        if len(pts) == k:
            break
    return RationalEnumeration(tuple(pts), pts[-1].denominator)


def _node_value(f: ContractiveMap, q: Fraction):
    try:
        v = f.evaluate_exact(q)
    except TypeError:
        return f.scalar(float(q))
    return v if isinstance(v, Fraction) else float(v)


def polygonal_approximant(f: ContractiveMap, k: int) -> PiecewiseLinear:
    """Polygonal chain through (q, f(q)) for q in {0, 1} and the first k rationals."""
    if f.dim != 1:
        raise ValueError("polygonal approximants are defined for d = 1 only")
    nodes = sorted({Fraction(0), Fraction(1), *rational_enumeration(k).points})
    return PiecewiseLinear(tuple((q, _node_value(f, q)) for q in nodes), CONTRACTION)


class NotContractiveError(ValueError):
    pass


def approximant_lipschitz(g: PiecewiseLinear) -> LipschitzCertificate:
    """Largest secant slope over node pairs; for a polygonal chain this is the
    largest segment slope. Raises unless it is strictly below 1."""
    cert = g.lipschitz()
    bound = cert.exact if cert.exact is not None else cert.upper_bound
    if not bound < 1:
        raise NotContractiveError(f"approximant has secant slope {float(bound)} >= 1")
    return cert


def sup_norm_gap(f: ContractiveMap, g: ContractiveMap, samples: int = 10_001) -> float:
    xs = np.linspace(0.0, 1.0, samples).reshape(-1, 1)
    return float(np.abs(f(xs) - g(xs)).max())


@dataclass(frozen=True)
class StudyEntry:
    k: int
    lipschitz: tuple[float, ...]
    hausdorff: float
    sup_gap: float
    iterations: int

    @property
    def lipschitz_max(self) -> float:
        return max(self.lipschitz)


@dataclass(frozen=True)
class ApproximationStudy:
    entries: tuple[StudyEntry, ...]
    reference: AttractorResult

    def distances(self) -> list[float]:
        return [e.hausdorff for e in self.entries]

    def to_csv(self) -> str:
        rows = ["k,lipschitz_max,hausdorff"]
        for e in self.entries:
            rows.append(f"{e.k},{e.lipschitz_max:.17g},{e.hausdorff:.17g}")
        return "\n".join(rows) + "\n"


def approximation_study(
    sys: FunctionSystem,
    k_schedule: Sequence[int],
    tol: float = 1e-6,
    resolution: float = 1e-4,
    max_iter: int = 1_000_000,
) -> ApproximationStudy:
    if sys.dim != 1:
        raise ValueError("approximation studies run in d = 1")
    ks = list(k_schedule)
    if any(b <= a for a, b in zip(ks, ks[1:])) or not ks or ks[0] < 1:
        raise ValueError("k_schedule must be a strictly increasing list of positive integers")
    # tighter reference so the study measures the approximation, not the net
    ref = attractor(sys, tol=tol / 10, max_iter=max_iter, resolution=resolution)
    if not ref.converged:
        raise NotConvergedError("reference attractor did not converge", ref)
    entries = []
    for k in ks:
        approx = [polygonal_approximant(f, k) for f in sys.maps]
        certs = [approximant_lipschitz(g) for g in approx]
        res = attractor(FunctionSystem.of(approx), tol=tol, max_iter=max_iter, resolution=resolution)
        if not res.converged:
            raise NotConvergedError(f"approximant attractor did not converge at k={k}", res)
        d = hausdorff_distance(res.attractor, ref.attractor).distance
        gap = max(sup_norm_gap(f, g) for f, g in zip(sys.maps, approx))
        entries.append(StudyEntry(k, tuple(c.upper_bound for c in certs), d, gap, res.iterations))
    return ApproximationStudy(tuple(entries), ref)
