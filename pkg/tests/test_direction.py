import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compliantlfd import geometry as geo
from compliantlfd.core import MotionSample, Trajectory, preprocess
from compliantlfd.direction import (ConstraintSpec, build_constraint, constraint_polygons, learn_direction,
                                    select_feasible)
from compliantlfd.errors import NoUsableConstraintsError
from compliantlfd.pipeline import angle_between_deg, funnel_scenario, valley_scenario

T20 = np.tan(np.radians(20))


def contact(v, f):
    return MotionSample(np.asarray(v, float), np.asarray(f, float), True, np.zeros(3))


def free(v):
    return MotionSample(np.asarray(v, float), None, False, np.zeros(3))


def test_tan20():
    assert T20 == pytest.approx(0.36397, abs=1e-5)


def test_contact_constraint_example():
    rays = build_constraint(contact((1, 0, 0), (0, 0, 1)))
    expected = [(1, T20, 0), (1, -T20, 0), (0, -T20, 1), (0, T20, 1)]
    assert np.allclose(rays, expected, atol=1e-12)


def test_free_space_circle_example():
    rays = build_constraint(free((0, 0, 1)), ConstraintSpec(free_space_circle_points=4))
    want = {(T20, 0, 1), (-T20, 0, 1), (0, T20, 1), (0, -T20, 1)}
    assert {tuple(np.round(r, 9)) for r in rays} == {tuple(np.round(w, 9)) for w in want}


def test_alpha_to_zero_limit():
    rays = build_constraint(contact((1, 0, 0), (0, 0, 1)), ConstraintSpec(alpha_deg=1e-9))
    assert np.allclose(rays, [(1, 0, 0), (1, 0, 0), (0, 0, 1), (0, 0, 1)], atol=1e-9)


def test_antiparallel_force_falls_back_with_warning():
    with pytest.warns(RuntimeWarning):
        rays = build_constraint(contact((1, 0, 0), (1, 0, 0)))
    assert len(rays) == ConstraintSpec().free_space_circle_points


def test_spec_validation():
    for bad in ({"alpha_deg": 0}, {"alpha_deg": 90}, {"window": 0}, {"free_space_circle_points": 2}):
        with pytest.raises(ValueError):
            ConstraintSpec(**bad)


def straight_demo(direction, n=200, step=5e-4):
    d = np.asarray(direction, float) / np.linalg.norm(direction)
    pos = np.outer(np.arange(n) * step, d)
    return Trajectory(np.arange(n) / 100, pos, np.zeros((n, 3)))


def test_single_free_space_demo():
    res = learn_direction([preprocess(straight_demo((0, 0, -1)))])
    assert np.allclose(res.desired_direction, [0, 0, -1], atol=1e-6)


def test_no_usable_constraints():
    with pytest.raises(NoUsableConstraintsError):
        learn_direction([])


@pytest.fixture(scope="module")
def funnel_pair():
    sc = funnel_scenario()
    return [sc.demonstrate(i, 0) for i in range(2)]


@pytest.fixture(scope="module")
def valley_pair():
    sc = valley_scenario()
    return [sc.demonstrate(i, 0) for i in range(2)]


def _membership(res):
    phi = geo.vec_to_angular(res.rotation @ res.desired_direction)
    assert geo.point_in_polygon(phi, res.feasible_polygon, tol=1e-9)
    for p, keep in zip(res.polygons, res.inliers):
        if keep:
            assert geo.point_in_polygon(phi, p, tol=1e-9)


def test_valley_pair(valley_pair):
    res = learn_direction([preprocess(d.trajectory) for d in valley_pair])
    assert angle_between_deg(res.desired_direction, (0, 0, -1)) < 20
    _membership(res)


def test_funnel_pair(funnel_pair):
    res = learn_direction([preprocess(d.trajectory) for d in funnel_pair])
    assert angle_between_deg(res.desired_direction, (0, 0, -1)) < 20
    _membership(res)
    assert res.inlier_count <= len(res.polygons)


@settings(max_examples=10, deadline=None)
@given(st.permutations(range(4)))
def test_permutation_invariance(order):
    sc = funnel_scenario()
    samples = [preprocess(sc.demonstrate(i, 5).trajectory) for i in range(4)]
    base = learn_direction(samples).desired_direction
    perm = learn_direction([samples[i] for i in order]).desired_direction
    assert np.linalg.norm(base - perm) < 1e-9


@pytest.mark.parametrize("c", [0.25, 3.0, 1000.0])
def test_force_scale_invariance(funnel_pair, c):
    base = learn_direction([preprocess(d.trajectory) for d in funnel_pair]).desired_direction
    scaled = learn_direction([preprocess(d.trajectory.scaled_forces(c), 20, 2.0 * c) for d in funnel_pair])
    assert np.linalg.norm(base - scaled.desired_direction) < 1e-9


def test_outlier_polygon_ignored(funnel_pair):
    samples = [preprocess(d.trajectory) for d in funnel_pair]
    res = learn_direction(samples)
    far = np.array([[1.2, 1.2], [1.3, 1.2], [1.3, 1.3], [1.2, 1.3]])
    fs = select_feasible(res.polygons + [far])
    assert np.array_equal(fs.center, res.center)
    assert not fs.inliers[-1]


def test_adding_polygons_never_enlarges_feasible_set(funnel_pair):
    spec = ConstraintSpec()
    samples = [preprocess(d.trajectory) for d in funnel_pair]
    R = learn_direction(samples).rotation
    polys, _ = constraint_polygons(samples, R, spec)
    prev = None
    for k in range(len(polys) // 2, len(polys) + 1):
        fs = select_feasible(polys[:k])
        if prev is not None and np.array_equal(fs.inliers[:-1], prev.inliers) and fs.inliers[-1]:
            assert geo.polygon_area(fs.polygon) <= geo.polygon_area(prev.polygon) + 1e-9
        prev = fs


def test_degenerate_samples_skipped_with_warning():
    ms = [contact((1, 0, 0), (1, 0, 0)), free((0, 0, 1))]
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        res = learn_direction([ms])
    assert any(issubclass(w.category, RuntimeWarning) for w in rec)
    assert np.all(np.isfinite(res.desired_direction))
