from fractions import Fraction

import pytest

from ifsx.hutchinson import FunctionSystem, attractor
from ifsx.maps import Affine, Constant, Logistic, PiecewiseLinear, extend_from_finite
from ifsx.polygonal import (
    NotContractiveError,
    NotConvergedError,
    approximant_lipschitz,
    approximation_study,
    polygonal_approximant,
    rational_enumeration,
)
from oracles import farey_prefix

F = Fraction


def test_enumeration_examples():
    assert rational_enumeration(1).points == (F(1, 2),)
    assert rational_enumeration(3).points == (F(1, 2), F(1, 3), F(2, 3))
    assert rational_enumeration(40).points == tuple(farey_prefix(40))
    for k in range(1, 30):
        assert rational_enumeration(k + 1).points[:k] == rational_enumeration(k).points
    with pytest.raises(ValueError):
        rational_enumeration(0)


def test_logistic_approximants():
    g = polygonal_approximant(Logistic(), 1)
    assert g.nodes == ((0, 0), (F(1, 2), F(1, 4)), (1, 0))
    assert g.slopes() == [F(1, 2), F(-1, 2)]
    assert approximant_lipschitz(g).exact == F(1, 2)
    g3 = polygonal_approximant(Logistic(), 3)
    vals = dict(g3.nodes)
    assert vals[F(1, 3)] == F(2, 9) and vals[F(2, 3)] == F(2, 9)
    assert len(g3.slopes()) == 4 and g3.max_slope() < 1


def test_node_agreement_is_exact():
    for k in (5, 17, 64):
        g = polygonal_approximant(Logistic(), k)
        for x, y in g.nodes:
            assert y == x - x * x


def test_pwl_reproduced_past_its_node_level():
    f = PiecewiseLinear(((0, F(1, 4)), (F(1, 2), F(1, 2)), (1, F(1, 8))))
    for k in (1, 5, 20):
        g = polygonal_approximant(f, k)
        for x, _ in g.nodes:
            assert g.evaluate_exact(x) == f.evaluate_exact(x)


def test_lipschitz_certificates():
    assert approximant_lipschitz(polygonal_approximant(Constant(F(1, 3)), 4)).exact == 0
    assert approximant_lipschitz(extend_from_finite([0, 1], [0, 0.999])).upper_bound == pytest.approx(0.999)
    # a chain with a steep segment cannot even be constructed
    with pytest.raises(ValueError):
        extend_from_finite([0, F(1, 2)], [0, F(3, 4)])
    assert issubclass(NotContractiveError, ValueError)


def test_all_pwl_system_gives_zero_distance():
    f1 = PiecewiseLinear(((0, 0), (F(1, 2), F(1, 4)), (1, F(1, 4))))
    f2 = Affine(F(1, 2), F(1, 2))
    study = approximation_study(FunctionSystem.of([f1, f2]), [1, 3, 7])
    assert all(d <= 1e-12 for d in study.distances())


def test_single_weak_map_fixed_point_gap():
    study = approximation_study(FunctionSystem.of([Logistic()]), [1, 4, 16])
    assert len(study.reference.attractor) == 1
    assert all(d == 0.0 for d in study.distances())  # both fixed points are exactly 0


def test_study_csv_format():
    study = approximation_study(FunctionSystem.of([Logistic(), Constant(F(1, 2))]), [1, 2, 4])
    lines = study.to_csv().splitlines()
    assert lines[0] == "k,lipschitz_max,hausdorff"
    assert lines[1] == "1,0.5,0.0625"


def test_study_validation():
    sys = FunctionSystem.of([Logistic()])
    with pytest.raises(ValueError):
        approximation_study(sys, [4, 2])
    with pytest.raises(NotConvergedError):
        approximation_study(FunctionSystem.of([Logistic(), Constant(F(1, 2))]), [2], max_iter=2)


def test_reference_attractor_is_the_orbit():
    res = attractor(FunctionSystem.of([Logistic(), Constant(F(1, 2))]), tol=1e-7)
    pts = set(res.attractor.points[:, 0].tolist())
    assert {0.5, 0.25, 0.1875} <= pts
