from fractions import Fraction

import numpy as np
import pytest

from ifsx.geometry import CompactSet
from ifsx.hutchinson import FunctionSystem
from ifsx.maps import Affine, Logistic
from ifsx.verify import (
    constant_system,
    coverage_audit_intervals,
    coverage_audit_ladder,
    image_interval,
    inversion_distance,
    random_system,
    separation_search,
    worker_count,
)
from ifsx.witnesses import build_interval_witness, build_ladder

F = Fraction


@pytest.fixture(scope="module")
def ladder2():
    return build_ladder(2)


def test_random_systems_are_contractions():
    rng = np.random.default_rng(0)
    for _ in range(50):
        sys = random_system(rng, 3)
        assert sys.kind == "contraction" and len(sys) == 3
        assert sys.lipschitz() < 1


def test_worker_count(monkeypatch):
    monkeypatch.setenv("IFSX_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("IFSX_THREADS", "0")
    assert worker_count() >= 1


def test_single_map_search_bounded_by_half_diameter(ladder2):
    F_ = ladder2.compact_set()
    rep = separation_search(F_, float(ladder2.delta), 1, 200, seed=7)
    pts = F_.points[:, 0]
    assert rep.best_distance >= (pts.max() - pts.min()) / 2 - 1e-12
    assert not rep.violated
    assert rep.evaluated + rep.bounded + rep.nonconverged == 200


def test_search_is_deterministic(ladder2):
    F_ = ladder2.compact_set()
    a = separation_search(F_, float(ladder2.delta), 2, 60, seed=42)
    b = separation_search(F_, float(ladder2.delta), 2, 60, seed=42)
    assert a.best_distance == b.best_distance and a.best_trial == b.best_trial
    assert a.trace == b.trace


def test_search_edge_cases(ladder2):
    F_ = ladder2.compact_set()
    rep = separation_search(F_, 0.1, 2, 0, seed=1)
    assert rep.best_system is None and rep.best_distance == float("inf") and not rep.violated
    with pytest.raises(ValueError):
        separation_search(F_, 0.0, 2, 5, seed=1)


def test_inversion_recovers_the_witness(ladder2):
    d = inversion_distance(ladder2.compact_set(), ladder2.system, tol=1e-6, resolution=1e-4)
    assert d <= 2 * (1e-6 + 1e-4)


def test_ladder_coverage_with_too_few_maps(ladder2):
    sys = FunctionSystem.of(list(ladder2.system.maps[:2]))
    rep = coverage_audit_ladder(ladder2, sys)
    assert rep.details["free_block"] == 2
    assert rep.details["fixed_point_blocks"] == [0, 1]
    assert len(rep.uncovered) == ladder2.k
    assert rep.passed and sum(rep.per_map_hits) <= rep.capacity


def test_ladder_coverage_constant_maps(ladder2):
    sys = constant_system([float(p) for p in ladder2.points[:2]])
    rep = coverage_audit_ladder(ladder2, sys)
    assert rep.details["balls_met_anywhere"] == (1, 1)
    assert rep.passed


def test_image_interval():
    assert image_interval(Logistic(), F(1, 4), F(3, 4)) == (F(3, 16), F(1, 4))
    assert image_interval(Affine(F(-1, 2), F(1, 2)), F(0), F(1)) == (0, F(1, 2))


def test_interval_coverage_earlier_class():
    w = build_interval_witness(4)
    (a, b), (c, d) = w.intervals[0][0], w.intervals[1][0]
    s = (d - c) / (b - a)
    f = Affine(s, c - s * a)
    rep = coverage_audit_intervals(w, FunctionSystem.of([f]), 2)
    assert rep.details["by_class"][0]["earlier"] == 1
    assert rep.per_map_hits == (1,)
    assert rep.capacity == 2 < w.k_seq[1]
    assert rep.passed and len(rep.uncovered) == w.k_seq[1] - 1


def test_interval_coverage_own_system_deeper_group():
    w = build_interval_witness(4)
    sys = constant_system([float(w.intervals[0][0][0]), float(w.intervals[1][0][0])])
    rep = coverage_audit_intervals(w, sys, 3)
    assert all(rep.bounds.values()) and rep.uncovered
    with pytest.raises(ValueError):
        coverage_audit_intervals(w, sys, 2)
    with pytest.raises(ValueError):
        coverage_audit_intervals(w, sys, 9)
