"""Angular projection, alignment rotations and 2-D convex polygon machinery.

Unit directions are mapped to the plane with an azimuthal equidistant
projection about +z: the pole maps to the origin and the distance from the
origin equals the angle to +z. Polygons are ``(n, 2)`` float arrays with
counter-clockwise vertex order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ConflictingDemonstrationsError, DegenerateConstraintError, ProjectionDomainError

MAX_POLAR_ANGLE = np.deg2rad(150.0)
BOUNDARY_TOL = 1e-12
GRID_EXTENT_DEG = 90.0


# ---------------------------------------------------------------- projection

def vec_to_angular(p):
    """Map direction(s) ``p`` of shape (3,) or (n, 3) to angular coordinates.

    The polar angle is computed as ``atan2(hypot(px, py), pz)``, which equals
    ``arccos(pz)`` for unit vectors but stays accurate near the pole.
    """
    p = np.asarray(p, dtype=float)
    p = p / np.linalg.norm(p, axis=-1, keepdims=True)
    r = np.arctan2(np.hypot(p[..., 0], p[..., 1]), p[..., 2])
    if np.any(r > MAX_POLAR_ANGLE):
        raise ProjectionDomainError(
            f"near-antipodal sample: polar angle {np.rad2deg(np.max(r)):.1f} deg exceeds 150 deg"
        )
    gamma = np.arctan2(p[..., 1], p[..., 0])
    return np.stack([r * np.cos(gamma), r * np.sin(gamma)], axis=-1)


def angular_to_vec(a):
    """Inverse of :func:`vec_to_angular`; accepts (2,) or (n, 2)."""
    a = np.asarray(a, dtype=float)
    rho = np.hypot(a[..., 0], a[..., 1])
    if np.any(rho > np.pi + 1e-12):
        raise ProjectionDomainError("angular point lies outside the projection disk of radius pi")
    # sin(rho)/rho with the removable singularity at 0
    sinc = np.sinc(rho / np.pi)
    return np.stack([sinc * a[..., 0], sinc * a[..., 1], np.cos(rho)], axis=-1)


def _rodrigues_to_z(v):
    # valid for v[2] >= 0; well conditioned there
    k = np.array([v[1], -v[0], 0.0])  # v x z
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + kx + kx @ kx / (1.0 + v[2])


_FLIP_X = np.diag([1.0, -1.0, -1.0])


def rotation_to_z(v) -> np.ndarray:
    """Proper rotation ``R`` with ``R @ v == (0, 0, 1)``.

    Directions in the lower hemisphere are first turned by 180 deg about x,
    so ``v = (0, 0, -1)`` maps through that fixed half-turn.
    """
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    if v[2] >= 0:
        return _rodrigues_to_z(v)
    return _rodrigues_to_z(_FLIP_X @ v) @ _FLIP_X


# ---------------------------------------------------------------- polygons

def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def polygon_area(poly) -> float:
    poly = np.asarray(poly, dtype=float)
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def convex_hull(points) -> np.ndarray:
    """Counter-clockwise convex hull (Andrew's monotone chain), collinear points removed."""
    pts = sorted({(float(x), float(y)) for x, y in np.asarray(points, dtype=float)})
    if len(pts) <= 2:
        return np.array(pts, dtype=float).reshape(-1, 2)
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross2(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross2(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return _dedupe(np.array(lower[:-1] + upper[:-1], dtype=float))


def _dedupe(poly, tol=BOUNDARY_TOL):
    if len(poly) == 0:
        return poly
    keep = [poly[0]]
    for p in poly[1:]:
        if np.max(np.abs(p - keep[-1])) > tol:
            keep.append(p)
    if len(keep) > 1 and np.max(np.abs(keep[0] - keep[-1])) <= tol:
        keep.pop()
    return np.array(keep, dtype=float).reshape(-1, 2)


def convex_hull_quad(points) -> np.ndarray:
    """Order the projected corner points of one constraint into a convex polygon."""
    hull = convex_hull(points)
    if len(hull) < 3 or polygon_area(hull) <= 1e-12:
        raise DegenerateConstraintError("degenerate constraint: points are (nearly) collinear")
    return hull


def _edge_halfplanes(poly):
    """Unit outward normals ``n`` and offsets ``b`` so that inside means ``n @ x <= b``."""
    e = np.roll(poly, -1, axis=0) - poly
    n = np.stack([e[:, 1], -e[:, 0]], axis=1)
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    return n, np.einsum("ij,ij->i", n, poly)


def points_in_polygon(points, poly, tol=BOUNDARY_TOL) -> np.ndarray:
    """Boolean mask of ``points`` (n, 2) lying inside or on the convex polygon."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    n, b = _edge_halfplanes(np.asarray(poly, dtype=float))
    return np.all(points @ n.T - b <= tol, axis=1)


def point_in_polygon(pt, poly, tol=BOUNDARY_TOL) -> bool:
    return bool(points_in_polygon(np.asarray(pt, dtype=float)[None, :], poly, tol)[0])


# ---------------------------------------------------------------- voting grid

@dataclass
class VotingGrid:
    """Square grid over [-90, 90] deg in both angular coordinates.

    ``counts[i, j]`` belongs to the cell centred at ``(centers[i], centers[j])``
    (theta_x, theta_y), in radians.
    """

    resolution_deg: float = 1.0
    counts: np.ndarray = field(default=None, repr=False)
    n_polygons: int = 0

    def __post_init__(self):
        if not self.resolution_deg > 0:
            raise ValueError("grid resolution must be positive")
        n = int(round(2 * GRID_EXTENT_DEG / self.resolution_deg))
        if abs(n * self.resolution_deg - 2 * GRID_EXTENT_DEG) > 1e-9:
            raise ValueError("grid resolution must divide 180 deg evenly")
        if self.counts is None:
            self.counts = np.zeros((n, n), dtype=np.int64)
        elif self.counts.shape != (n, n):
            raise ValueError(f"counts must have shape {(n, n)}")

    @property
    def centers(self) -> np.ndarray:
        n = self.counts.shape[0]
        deg = -GRID_EXTENT_DEG + (np.arange(n) + 0.5) * self.resolution_deg
        return np.deg2rad(deg)

    def cell_center(self, cell) -> np.ndarray:
        c = self.centers
        return np.array([c[cell[0]], c[cell[1]]])

    def center_points(self) -> np.ndarray:
        c = self.centers
        gx, gy = np.meshgrid(c, c, indexing="ij")
        return np.stack([gx.ravel(), gy.ravel()], axis=1)


def vote(polys, grid: VotingGrid) -> VotingGrid:
    """Add one vote to every cell whose centre lies in each polygon."""
    polys = list(polys)
    if not polys:
        raise ValueError("vote needs at least one polygon")
    pts = grid.center_points()
    c = grid.centers
    counts = grid.counts.copy().ravel()
    for poly in polys:
        lo, hi = poly.min(axis=0), poly.max(axis=0)
        # restrict the membership test to the polygon's bounding box
        ix = np.flatnonzero((c >= lo[0] - BOUNDARY_TOL) & (c <= hi[0] + BOUNDARY_TOL))
        iy = np.flatnonzero((c >= lo[1] - BOUNDARY_TOL) & (c <= hi[1] + BOUNDARY_TOL))
        if ix.size == 0 or iy.size == 0:
            continue
        flat = (ix[:, None] * c.size + iy[None, :]).ravel()
        counts[flat[points_in_polygon(pts[flat], poly)]] += 1
    return VotingGrid(grid.resolution_deg, counts.reshape(grid.counts.shape), grid.n_polygons + len(polys))


def vector_median_cell(grid: VotingGrid) -> tuple[int, int]:
    """Vector median of the maximum-count cells.

    Distances are Euclidean in angular coordinates; on a uniform grid this is
    the same minimiser as in index space, which is what is used. Near-equal
    sums (relative 1e-12) resolve to the lexicographically smallest cell.
    """
    cells = np.argwhere(grid.counts == grid.counts.max())
    if len(cells) == 1:
        return int(cells[0, 0]), int(cells[0, 1])
    pts = cells.astype(float)
    sums = np.empty(len(pts))
    chunk = 1024
    for s in range(0, len(pts), chunk):
        d = pts[s : s + chunk, None, :] - pts[None, :, :]
        sums[s : s + chunk] = np.sqrt((d * d).sum(axis=2)).sum(axis=1)
    best = sums.min()
    tied = cells[sums <= best + 1e-12 * max(best, 1.0)]
    i, j = min(map(tuple, tied))
    return int(i), int(j)


# ---------------------------------------------------------------- intersection

def clip_halfplane(poly, normal, offset):
    """Keep the part of ``poly`` with ``normal @ x <= offset`` (one Sutherland-Hodgman pass)."""
    if len(poly) == 0:
        return poly
    d = poly @ normal - offset
    out = []
    m = len(poly)
    for k in range(m):
        p, q = poly[k], poly[(k + 1) % m]
        dp, dq = d[k], d[(k + 1) % m]
        if dp <= 0:
            out.append(p)
        if (dp < 0 < dq) or (dq < 0 < dp):
            out.append(p + (q - p) * (dp / (dp - dq)))
    return _dedupe(np.array(out, dtype=float).reshape(-1, 2))


def clip_convex(subject, clipper):
    """Intersection of two convex CCW polygons."""
    n, b = _edge_halfplanes(np.asarray(clipper, dtype=float))
    out = np.asarray(subject, dtype=float)
    for nk, bk in zip(n, b):
        out = clip_halfplane(out, nk, bk)
        if len(out) == 0:
            break
    return out


def _is_empty(poly):
    return len(poly) < 3 or polygon_area(poly) <= 0.0


def intersect_convex(polys) -> np.ndarray:
    """Sequentially clip the first polygon by all others.

    Raises :class:`ConflictingDemonstrationsError` when the result is empty
    or has zero area.
    """
    polys = [np.asarray(p, dtype=float) for p in polys]
    if not polys:
        raise ValueError("intersect_convex needs at least one polygon")
    out = polys[0]
    for i in range(1, len(polys)):
        out = clip_convex(out, polys[i])
        if _is_empty(out):
            pair = (i - 1, i)
            for j in range(i):
                if _is_empty(clip_convex(polys[j], polys[i])):
                    pair = (j, i)
                    break
            raise ConflictingDemonstrationsError(
                f"conflicting demonstrations: intersection became empty at polygon {i}", pair
            )
    return out


# ---------------------------------------------------------------- Chebyshev centre

@dataclass(frozen=True)
class ChebyshevResult:
    center: np.ndarray
    radius: float


def chebyshev_center(poly) -> ChebyshevResult:
    """Centre of the largest inscribed circle of a convex polygon.

    Solves ``max r s.t. n_i @ x + r <= b_i`` by enumerating the vertices of the
    3-variable LP (every triple of edge constraints). When the optimum is not
    unique the lexicographically smallest ``(theta_x, theta_y)`` is returned;
    it is always one of the enumerated vertices.
    """
    poly = np.asarray(poly, dtype=float)
    if len(poly) < 3 or polygon_area(poly) <= 1e-12:
        raise DegenerateConstraintError("degenerate polygon: area too small for a Chebyshev centre")
    n, b = _edge_halfplanes(poly)
    m = len(b)
    idx = np.array(list(combinations(range(m), 3)))
    A = np.concatenate([n[idx], np.ones(idx.shape + (1,))], axis=2)
    rhs = b[idx]
    det = np.linalg.det(A)
    ok = np.abs(det) > 1e-14
    sol = np.linalg.solve(A[ok], rhs[ok][..., None])[..., 0]
    scale = max(1.0, float(np.abs(poly).max()))
    slack = sol[:, :2] @ n.T + sol[:, 2:3] - b
    feasible = np.all(slack <= 1e-10 * scale, axis=1) & (sol[:, 2] >= -1e-12)
    sol = sol[feasible]
    r_best = sol[:, 2].max()
    opt = sol[sol[:, 2] >= r_best - 1e-12 * scale]
    x_min = opt[:, 0].min()
    opt = opt[opt[:, 0] <= x_min + 1e-12 * scale]
    best = opt[np.argmin(opt[:, 1])]
    return ChebyshevResult(center=best[:2].copy(), radius=float(max(r_best, 0.0)))
