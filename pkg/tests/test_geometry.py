
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from compliantlfd import geometry as geo
from compliantlfd.errors import ConflictingDemonstrationsError, DegenerateConstraintError, ProjectionDomainError

from oracles import (brute_hull_vertices, grid_chebyshev, lp_chebyshev, median_brute_force, random_convex_polygon,
                     unit_vectors_within, winding_inside)


# ---------------------------------------------------------------- projection

@pytest.mark.parametrize("p,a", [
    ((0, 0, 1), (0, 0)),
    ((1, 0, 0), (np.pi / 2, 0)),
    ((0, np.sqrt(0.5), np.sqrt(0.5)), (0, np.pi / 4)),
])
def test_vec_to_angular_examples(p, a):
    assert np.allclose(geo.vec_to_angular(np.array(p, float)), a, atol=1e-12)


@pytest.mark.parametrize("a,p", [((0, 0), (0, 0, 1)), ((np.pi / 2, 0), (1, 0, 0))])
def test_angular_to_vec_examples(a, p):
    assert np.allclose(geo.angular_to_vec(np.array(a, float)), p, atol=1e-12)


def test_projection_matches_arccos_formula():
    p = unit_vectors_within(2000, 150.0, seed=1)
    r = np.arccos(np.clip(p[:, 2], -1, 1))
    g = np.arctan2(p[:, 1], p[:, 0])
    expected = np.stack([r * np.cos(g), r * np.sin(g)], axis=1)
    assert np.allclose(geo.vec_to_angular(p), expected, atol=1e-7)


def test_near_antipodal_rejected():
    with pytest.raises(ProjectionDomainError):
        geo.vec_to_angular(np.array([np.sin(np.radians(155)), 0, np.cos(np.radians(155))]))


@settings(max_examples=200, deadline=None)
@given(st.floats(-np.pi, np.pi), st.floats(0, 1))
def test_angular_to_vec_unit_norm(ang, frac):
    rho = frac * np.pi
    v = geo.angular_to_vec(np.array([rho * np.cos(ang), rho * np.sin(ang)]))
    assert abs(np.linalg.norm(v) - 1) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_rotation_to_z_properties(x, y, z):
    v = np.array([x, y, z])
    assume(np.linalg.norm(v) > 1e-3)
    v /= np.linalg.norm(v)
    R = geo.rotation_to_z(v)
    assert np.allclose(R @ v, [0, 0, 1], atol=1e-12)
    assert np.allclose(R.T @ R, np.eye(3), atol=1e-12)
    assert abs(np.linalg.det(R) - 1) < 1e-12


def test_rotation_to_z_special_cases():
    assert np.allclose(geo.rotation_to_z(np.array([0, 0, 1.0])), np.eye(3))
    assert np.allclose(geo.rotation_to_z(np.array([1.0, 0, 0])) @ [1, 0, 0], [0, 0, 1])
    assert np.allclose(geo.rotation_to_z(np.array([0, 0, -1.0])), np.diag([1.0, -1, -1]))


# ---------------------------------------------------------------- polygons

def test_hull_square_and_interior():
    pts = np.array([[1, 1], [-1, -1], [1, -1], [-1, 1.0]])
    h = geo.convex_hull_quad(pts)
    assert len(h) == 4 and geo.polygon_area(h) == pytest.approx(4.0)
    tri = geo.convex_hull_quad(np.array([[0, 0], [4, 0], [0, 4], [1, 1.0]]))
    assert len(tri) == 3 and geo.polygon_area(tri) > 0


def test_hull_degenerate():
    with pytest.raises(DegenerateConstraintError):
        geo.convex_hull_quad(np.array([[0, 0], [1, 1], [2, 2], [3, 3.0]]))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000))
def test_hull_matches_brute_force(seed):
    pts = np.random.default_rng(seed).normal(size=(4, 2))
    h = geo.convex_hull_quad(pts)
    assert geo.polygon_area(h) > 0
    assert sorted(map(tuple, np.round(h, 12))) == sorted(map(tuple, np.round(brute_hull_vertices(pts), 12)))


def test_point_in_polygon_basics():
    rng = np.random.default_rng(0)
    for _ in range(20):
        poly = random_convex_polygon(rng)
        c = poly.mean(axis=0)
        assert geo.point_in_polygon(c, poly)
        rad = np.linalg.norm(poly - c, axis=1).max()
        assert not geo.point_in_polygon(c + np.array([2 * rad, 0]), poly)


def test_point_in_polygon_vs_winding():
    rng = np.random.default_rng(1)
    poly = random_convex_polygon(rng, 9)
    pts = rng.uniform(-2, 2, size=(10_000, 2))
    got = geo.points_in_polygon(pts, poly)
    want = np.array([winding_inside(p, poly) for p in pts])
    assert np.array_equal(got, want)


# ---------------------------------------------------------------- voting

def _square(cx, cy, h):
    return np.array([[cx - h, cy - h], [cx + h, cy - h], [cx + h, cy + h], [cx - h, cy + h]])


def test_vote_identical_and_disjoint():
    g = geo.VotingGrid(1.0)
    sq = _square(0, 0, np.radians(5))
    assert geo.vote([sq, sq], g).counts.max() == 2
    other = _square(np.radians(40), 0, np.radians(5))
    assert geo.vote([sq, other], g).counts.max() == 1


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000))
def test_vote_direct_recount(seed):
    rng = np.random.default_rng(seed)
    polys = [random_convex_polygon(rng, scale=0.4) for _ in range(4)]
    g = geo.vote(polys, geo.VotingGrid(2.0))
    pts = g.center_points()
    want = sum(geo.points_in_polygon(pts, p).astype(int) for p in polys).reshape(g.counts.shape)
    assert np.array_equal(g.counts, want)
    assert g.counts.max() <= len(polys)


def test_grid_geometry():
    g = geo.VotingGrid(1.0)
    assert g.counts.shape == (180, 180)
    assert np.degrees(g.centers[0]) == pytest.approx(-89.5)
    with pytest.raises(ValueError):
        geo.VotingGrid(7.0)


def _grid_with(cells, shape=(180, 180)):
    counts = np.zeros(shape, dtype=np.int64)
    for c in cells:
        counts[c] = 3
    return geo.VotingGrid(1.0, counts)


def test_vector_median_examples():
    assert geo.vector_median_cell(_grid_with([(5, 7)])) == (5, 7)
    # sums: (0,0) -> 2 + 2 = 4; (2,0) -> 2 + 2*sqrt(2)
    assert geo.vector_median_cell(_grid_with([(10, 10), (12, 10), (10, 12)])) == (10, 10)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), min_size=1, max_size=40, unique=True))
def test_vector_median_brute_force(cells):
    counts = np.zeros((180, 180), dtype=np.int64)
    for c in cells:
        counts[c] = 2
    assert geo.vector_median_cell(geo.VotingGrid(1.0, counts)) == median_brute_force(cells)


# ---------------------------------------------------------------- intersection

def test_intersect_self_and_offset():
    sq = _square(0.5, 0.5, 0.5)
    out = geo.intersect_convex([sq, sq])
    assert sorted(map(tuple, np.round(out, 9))) == sorted(map(tuple, np.round(sq, 9)))
    rect = geo.intersect_convex([sq, sq + [0.5, 0]])
    assert geo.polygon_area(rect) == pytest.approx(0.5)
    assert np.allclose(rect.min(axis=0), [0.5, 0]) and np.allclose(rect.max(axis=0), [1, 1])


def test_intersect_conflict_pair():
    a, b, c = _square(0, 0, 1), _square(0.5, 0, 1), _square(5, 0, 1)
    with pytest.raises(ConflictingDemonstrationsError) as info:
        geo.intersect_convex([a, b, c])
    assert info.value.pair == (0, 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_intersection_inside_every_input(seed):
    rng = np.random.default_rng(seed)
    polys = [random_convex_polygon(rng, center=rng.normal(scale=0.1, size=2)) for _ in range(3)]
    try:
        out = geo.intersect_convex(polys)
    except ConflictingDemonstrationsError:
        return
    for v in out:
        for p in polys:
            assert geo.point_in_polygon(v, p, tol=1e-9)


# ---------------------------------------------------------------- Chebyshev

def test_chebyshev_examples():
    r = geo.chebyshev_center(_square(0, 0, 1))
    assert np.allclose(r.center, [0, 0], atol=1e-12) and r.radius == pytest.approx(1.0)
    r = geo.chebyshev_center(np.array([[0, 0], [4, 0], [0, 3.0]]))
    assert np.allclose(r.center, [1, 1], atol=1e-12) and r.radius == pytest.approx(1.0)


def test_chebyshev_nonunique_lexicographic():
    rect = np.array([[0, 0], [4, 0], [4, 1], [0, 1.0]])
    r = geo.chebyshev_center(rect)
    assert np.allclose(r.center, [0.5, 0.5]) and r.radius == pytest.approx(0.5)


def test_chebyshev_degenerate():
    with pytest.raises(DegenerateConstraintError):
        geo.chebyshev_center(np.array([[0, 0], [1, 0], [2, 1e-14]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_chebyshev_inscribed_circle_fits(seed):
    poly = random_convex_polygon(np.random.default_rng(seed))
    r = geo.chebyshev_center(poly)
    n, b = geo._edge_halfplanes(poly)
    assert (b - n @ r.center).min() >= r.radius - 1e-9
    assert geo.point_in_polygon(r.center, poly)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 100_000))
def test_chebyshev_vs_grid_search(seed):
    poly = random_convex_polygon(np.random.default_rng(seed))
    r = geo.chebyshev_center(poly)
    _, radius, pitch = grid_chebyshev(poly, 400)
    assert r.radius >= radius - 1e-12
    assert r.radius - radius <= 2 * pitch


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_chebyshev_vs_lp_solver(seed):
    poly = random_convex_polygon(np.random.default_rng(seed))
    r = geo.chebyshev_center(poly)
    center, radius = lp_chebyshev(poly)
    assert r.radius == pytest.approx(radius, abs=1e-9)
    assert np.linalg.norm(r.center - center) < 1e-6
