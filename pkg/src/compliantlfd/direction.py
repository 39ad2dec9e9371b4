"""Learning the desired force direction from demonstrations.

Each motion sample yields a cone of feasible desired directions, spanned by
the direction of motion and the direction opposite the measured force and
widened sideways by the demonstrator error angle. The cones of all samples
are projected to the angular plane, outliers are removed by grid voting, and
the Chebyshev centre of the inliers' intersection is mapped back to 3-D.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import geometry as geo
from .core import DEFAULT_FORCE_THRESHOLD, DEFAULT_WINDOW, MotionSample
from .errors import DegenerateConstraintError, NoUsableConstraintsError, ProjectionDomainError

MIN_CROSS_NORM = 1e-6


@dataclass(frozen=True)
class ConstraintSpec:
    alpha_deg: float = 20.0
    window: int = DEFAULT_WINDOW
    force_threshold: float = DEFAULT_FORCE_THRESHOLD
    free_space_circle_points: int = 8
    grid_resolution_deg: float = 1.0

    def __post_init__(self):
        if not 0 < self.alpha_deg < 90:
            raise ValueError("alpha_deg must lie in (0, 90)")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not self.force_threshold > 0:
            raise ValueError("force_threshold must be positive")
        if self.free_space_circle_points < 3:
            raise ValueError("free_space_circle_points must be >= 3")

    @property
    def tan_alpha(self) -> float:
        return float(np.tan(np.deg2rad(self.alpha_deg)))


@dataclass
class DirectionResult:
    """Learned desired direction plus the intermediate quantities behind it.

    ``feasible_polygon`` and ``polygons`` live in the rotated frame where the
    pooled mean motion direction is +z (``rotation`` maps world to that frame).
    """

    desired_direction: np.ndarray
    feasible_polygon: np.ndarray
    inlier_count: int
    rotation: np.ndarray
    center: np.ndarray = None
    chebyshev_radius: float = 0.0
    polygons: list = field(default_factory=list, repr=False)
    polygon_demo: np.ndarray = field(default=None, repr=False)
    inliers: np.ndarray = field(default=None, repr=False)
    grid: Optional[geo.VotingGrid] = field(default=None, repr=False)
    median_cell: tuple = None


def orthonormal_complement(v):
    """Two unit vectors completing ``v`` to a right-handed orthonormal triad."""
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    helper = np.eye(3)[int(np.argmin(np.abs(v)))]
    e1 = np.cross(v, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(v, e1)


def free_space_rays(v_a, spec: ConstraintSpec) -> np.ndarray:
    e1, e2 = orthonormal_complement(v_a)
    psi = 2 * np.pi * np.arange(spec.free_space_circle_points) / spec.free_space_circle_points
    return v_a + spec.tan_alpha * (np.cos(psi)[:, None] * e1 + np.sin(psi)[:, None] * e2)


def build_constraint(ms: MotionSample, spec: ConstraintSpec = ConstraintSpec()) -> np.ndarray:
    """Rays (k, 3) spanning the feasible desired directions of one sample.

    In contact these are ``v_a + eps, v_a - eps, F - eps, F + eps`` with
    ``eps = tan(alpha) * unit(F x v_a)``. In free space, or when the force is
    (anti)parallel to the motion, a circle of ``tan(alpha)`` around ``v_a``.
    """
    v_a = np.asarray(ms.v_a_hat, dtype=float)
    if ms.in_contact:
        F = np.asarray(ms.F_hat, dtype=float)
        c = np.cross(F, v_a)
        cn = np.linalg.norm(c)
        if cn >= MIN_CROSS_NORM:
            eps = spec.tan_alpha * c / cn
            return np.array([v_a + eps, v_a - eps, F - eps, F + eps])
        warnings.warn(
            "measured force is (anti)parallel to the motion; using the free-space constraint",
            RuntimeWarning,
            stacklevel=2,
        )
    return free_space_rays(v_a, spec)


def pooled_mean_direction(demos: Sequence[Sequence[MotionSample]]) -> np.ndarray:
    """Mean of the per-demonstration mean window directions, normalized."""
    total = np.zeros(3)
    for demo in demos:
        s = np.sum([m.v_a_hat for m in demo], axis=0)
        total += s / np.linalg.norm(s)
    norm = np.linalg.norm(total)
    if norm < 1e-12:
        raise NoUsableConstraintsError("demonstrations move in opposing directions; no mean direction")
    return total / norm


def constraint_polygons(demos, rotation, spec: ConstraintSpec):
    """Project every sample's constraint into the rotated angular frame.

    Returns the polygons and, for each, the index of its demonstration.
    Samples whose constraint is degenerate or leaves the projection domain
    are skipped with a warning.
    """
    polys, owner = [], []
    skipped = 0
    for d, demo in enumerate(demos):
        for ms in demo:
            rays = build_constraint(ms, spec) @ rotation.T
            try:
                polys.append(geo.convex_hull_quad(geo.vec_to_angular(rays)))
            except (DegenerateConstraintError, ProjectionDomainError):
                skipped += 1
                continue
            owner.append(d)
    if skipped:
        warnings.warn(f"skipped {skipped} degenerate motion samples", RuntimeWarning, stacklevel=2)
    return polys, np.array(owner, dtype=int)


@dataclass
class FeasibleSet:
    center: np.ndarray
    radius: float
    polygon: np.ndarray
    inliers: np.ndarray
    grid: geo.VotingGrid
    cell: tuple


def select_feasible(polys, resolution_deg: float = 1.0) -> FeasibleSet:
    """Vote, keep the polygons containing the vector-median cell, intersect them
    and return the Chebyshev centre of the intersection (angular frame)."""
    grid = geo.vote(polys, geo.VotingGrid(resolution_deg))
    if grid.counts.max() == 0:
        raise NoUsableConstraintsError("no constraint polygon covers any grid cell")
    cell = geo.vector_median_cell(grid)
    g = grid.cell_center(cell)
    inliers = np.array([geo.point_in_polygon(g, p) for p in polys])
    phi = geo.intersect_convex([p for p, keep in zip(polys, inliers) if keep])
    try:
        cheb = geo.chebyshev_center(phi)
        center, radius = cheb.center, cheb.radius
    except DegenerateConstraintError:
        # sliver intersection: only the voted cell centre is known to be feasible
        center, radius = g, 0.0
    return FeasibleSet(center, radius, phi, inliers, grid, cell)


def learn_direction(
    demos: Sequence[Sequence[MotionSample]], spec: ConstraintSpec = ConstraintSpec()
) -> DirectionResult:
    """Learn the desired direction from one or more preprocessed demonstrations."""
    demos = [list(d) for d in demos]
    if not demos or any(len(d) == 0 for d in demos):
        raise NoUsableConstraintsError("need at least one demonstration with at least one motion sample")
    R = geo.rotation_to_z(pooled_mean_direction(demos))
    polys, owner = constraint_polygons(demos, R, spec)
    if not polys:
        raise NoUsableConstraintsError("no usable constraints: every motion sample was degenerate")
    fs = select_feasible(polys, spec.grid_resolution_deg)
    v = R.T @ geo.angular_to_vec(fs.center)
    return DirectionResult(
        desired_direction=v / np.linalg.norm(v),
        feasible_polygon=fs.polygon,
        inlier_count=int(fs.inliers.sum()),
        rotation=R,
        center=fs.center,
        chebyshev_radius=fs.radius,
        polygons=polys,
        polygon_demo=owner,
        inliers=fs.inliers,
        grid=fs.grid,
        median_cell=fs.cell,
    )
