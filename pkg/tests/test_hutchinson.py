from fractions import Fraction

import numpy as np
import pytest

from ifsx.geometry import CompactSet, DimensionError, hausdorff_distance
from ifsx.hutchinson import FunctionSystem, attractor, image_continuity_probe, step, verify_invariance
from ifsx.maps import Affine, Constant, Logistic, embed
from ifsx.polygonal import polygonal_approximant, sup_norm_gap
from ifsx.witnesses import build_ladder
from oracles import cantor_endpoints

HALF = Fraction(1, 2)


def S(*xs):
    return CompactSet.from_points(list(xs))


def test_system_kind():
    assert FunctionSystem.of([Affine(0.5, 0)]).kind == "contraction"
    assert FunctionSystem.of([Logistic(), Constant(HALF)]).kind == "weak"
    with pytest.raises(ValueError):
        FunctionSystem.of([])
    with pytest.raises(DimensionError):
        FunctionSystem.of([Affine(0.5, 0), Constant((0.1, 0.2))])


def test_step_examples():
    assert step(FunctionSystem.of([Constant(0.3)]), S(0.1, 0.9)).same_points(S(0.3))
    halves = FunctionSystem.of([Affine(HALF, 0), Affine(HALF, HALF)])
    assert step(halves, S(0.0, 1.0)).same_points(S(0.0, 0.5, 1.0))


def test_step_is_monotone():
    rng = np.random.default_rng(5)
    sys = FunctionSystem.of([Affine(0.3, 0.1), Logistic()])
    for _ in range(20):
        b = rng.random(15)
        a = b[:7]
        sa, sb = step(sys, S(*a)), step(sys, S(*b))
        assert set(sa.points[:, 0]) <= set(sb.points[:, 0])


def test_single_map_singleton():
    res = attractor(FunctionSystem.of([Affine(HALF, Fraction(1, 4))]))
    assert res.converged and res.attractor.same_points(S(0.5))


def test_cantor_against_expanded_oracle():
    sys = FunctionSystem.of([Affine(Fraction(1, 3), 0), Affine(Fraction(1, 3), Fraction(2, 3))])
    res = attractor(sys, tol=1e-6, resolution=1e-4)
    oracle = S(*[float(x) for x in cantor_endpoints(8)])
    assert res.converged
    assert hausdorff_distance(res.attractor, oracle).distance <= 2 * (1e-4 + 1e-6)


def test_halves_fill_the_interval():
    sys = FunctionSystem.of([Affine(HALF, 0), Affine(HALF, HALF)])
    res = attractor(sys, tol=1e-6, resolution=1e-4)
    grid = S(*np.linspace(0, 1, 10_001))
    assert hausdorff_distance(res.attractor, grid).distance <= 1e-4 + 1e-6


def test_weak_system_accumulates_at_zero():
    res = attractor(FunctionSystem.of([Logistic(), Constant(HALF)]), tol=1e-6, resolution=1e-4)
    assert res.converged
    pts = res.attractor.points[:, 0]
    assert pts.min() == 0.0 and pts.max() == 0.5
    assert res.residual <= res.tolerance


def test_two_dimensional_attractor():
    sys = FunctionSystem.of([embed(Affine(Fraction(1, 3), 0), 2), embed(Affine(Fraction(1, 3), Fraction(2, 3)), 2)])
    res = attractor(sys, resolution=1e-3)
    assert res.attractor.dim == 2 and np.all(res.attractor.points[:, 1] == 0)


def test_uniqueness_from_different_seeds():
    sys = FunctionSystem.of([Affine(0.4, 0.0), Affine(-0.3, 0.9), Affine(0.2, 0.4)])
    a = attractor(sys, resolution=1e-3)
    b = attractor(sys, resolution=1e-3, seed=S(0.0, 1.0, 0.37))
    assert hausdorff_distance(a.attractor, b.attractor).distance <= 2 * (1e-3 + 1e-6) / (1 - 0.4)


def test_exhaustion_reports_non_convergence():
    halves = FunctionSystem.of([Affine(HALF, 0), Affine(HALF, HALF)])
    res = attractor(halves, resolution=1e-4, max_iter=3)
    assert not res.converged and res.final_step > 0


def test_invariance_values():
    w = build_ladder(2)
    F = w.compact_set()
    assert verify_invariance(w.system, F) == 0.0
    assert verify_invariance(FunctionSystem.of([Constant(0.3)]), S(0.3)) == 0.0
    assert verify_invariance(FunctionSystem.of([Constant(0.3)]), S(0.3, 0.4)) > 0


def test_continuity_probe_affine_sequence():
    seq = [lambda x, k=k: x / 2 + 1 / k for k in range(1, 101)]
    sets = [S(1 / k) if k > 1 else np.array([[1.0]]) for k in range(1, 101)]
    out = image_continuity_probe(seq, sets, lambda x: x / 2, S(0.0))
    assert [k for k, _ in out] == list(range(1, 101))
    for k, d in out:
        assert d == pytest.approx(3 / (2 * k), abs=1e-12)


def test_continuity_probe_constant_and_mismatch():
    f = Affine(0.5, 0.2)
    out = image_continuity_probe([f] * 5, [S(0.3)] * 5, f, S(0.3))
    assert all(d == 0 for _, d in out)
    with pytest.raises(ValueError):
        image_continuity_probe([f] * 2, [S(0.3)], f, S(0.3))


def test_continuity_probe_polygonal_approximants():
    E = S(*np.linspace(0, 1, 201))
    ks = [1, 2, 4, 8, 16, 32]
    approx = [polygonal_approximant(Logistic(), k) for k in ks]
    out = image_continuity_probe(approx, [E] * len(ks), Logistic(), E)
    ds = [d for _, d in out]
    for d, g in zip(ds, approx):
        assert d <= sup_norm_gap(Logistic(), g) + 1e-12
    assert all(b <= a + 1e-9 for a, b in zip(ds, ds[1:]))
