"""Attractors of iterated function systems and weak iterated function systems
on the unit cube, with exact constructions of sets separating their families."""

from .geometry import (
    CompactSet,
    DimensionError,
    HausdorffReport,
    IntervalUnion,
    directed_distance,
    hausdorff_distance,
    renet,
    thicken,
    union,
)
from .hutchinson import AttractorResult, FunctionSystem, attractor, image_continuity_probe, step, verify_invariance
from .maps import (
    Affine,
    Constant,
    Embedded,
    Logistic,
    PiecewiseLinear,
    embed,
    exact_fixed_point,
    extend_from_finite,
    fixed_point,
)
from .polygonal import approximation_study, polygonal_approximant, rational_enumeration

__version__ = "0.1.0"

__all__ = [
    "Affine",
    "AttractorResult",
    "CompactSet",
    "Constant",
    "DimensionError",
    "Embedded",
    "FunctionSystem",
    "HausdorffReport",
    "IntervalUnion",
    "Logistic",
    "PiecewiseLinear",
    "approximation_study",
    "attractor",
    "directed_distance",
    "embed",
    "exact_fixed_point",
    "extend_from_finite",
    "fixed_point",
    "hausdorff_distance",
    "image_continuity_probe",
    "polygonal_approximant",
    "rational_enumeration",
    "renet",
    "step",
    "thicken",
    "union",
    "verify_invariance",
]
