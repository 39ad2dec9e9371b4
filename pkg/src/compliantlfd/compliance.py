"""Choosing the number and directions of compliant axes.

The mean motion direction of each demonstration is expressed in angular
coordinates around the learned desired direction. Three explanations are
scored with BIC: no compliance (residual = the point itself), one compliant
axis (residual = distance to the best line through the origin), and two
compliant axes (zero residual). Residuals follow an isotropic 2-D normal whose
per-component variance is ``sigma``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import geometry as geo
from .core import Trajectory, mean_actual_direction

PARAMETER_COUNTS = np.array([0, 1, 2])


@dataclass(frozen=True)
class ComplianceSpec:
    sigma: float = 0.03

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


@dataclass
class ComplianceResult:
    n_compliant: int
    bic: np.ndarray
    log_likelihood: np.ndarray
    n_observations: int
    u: Optional[np.ndarray] = None
    u_angle: Optional[float] = None
    compliant_axes: list = field(default_factory=list)

    def table(self):
        """Rows of (model, k, logL, bic)."""
        return [
            (i, int(PARAMETER_COUNTS[i]), float(self.log_likelihood[i]), float(self.bic[i]))
            for i in range(3)
        ]


def demo_angular_residuals(demos, desired_direction) -> np.ndarray:
    """Angular coordinates (n, 2) of each demonstration's mean motion direction
    in the frame where ``desired_direction`` is +z.

    ``demos`` holds :class:`Trajectory` objects or precomputed 3-D directions.
    """
    dirs = [mean_actual_direction(d) if isinstance(d, Trajectory) else np.asarray(d, float) for d in demos]
    if not dirs:
        raise ValueError("need at least one demonstration")
    R = geo.rotation_to_z(desired_direction)
    return geo.vec_to_angular(np.asarray(dirs) @ R.T).reshape(-1, 2)


def fit_line_u(phis) -> np.ndarray:
    """Unit direction of the total-least-squares line through the origin.

    This is the principal eigenvector of the scatter matrix. With equal
    eigenvalues (no preferred direction) the x-axis is returned. The sign
    makes the x component non-negative (the y component when x is zero).
    """
    phis = np.asarray(phis, dtype=float).reshape(-1, 2)
    S = phis.T @ phis
    if np.trace(S) <= 0:
        raise ValueError("all points at the origin; the line direction is undefined")
    w, V = np.linalg.eigh(S)
    if w[1] - w[0] <= 1e-12 * w[1]:
        return np.array([1.0, 0.0])
    u = V[:, 1]
    if u[0] < 0 or (u[0] == 0 and u[1] < 0):
        u = -u
    return u


def _gauss_loglik(residuals, sigma):
    # isotropic 2-D normal with covariance sigma * I
    sq = np.sum(np.asarray(residuals, dtype=float) ** 2)
    return -len(residuals) * np.log(2 * np.pi * sigma) - sq / (2 * sigma)


def select_model(phis, spec: ComplianceSpec = ComplianceSpec()) -> ComplianceResult:
    """Score the 0/1/2-axis models with ``BIC = ln(n) k - 2 ln L`` and pick the minimum.

    ``n`` counts scalar observations, two per demonstration. Exact ties go to
    the model with fewer axes.
    """
    phis = np.asarray(phis, dtype=float).reshape(-1, 2)
    m = len(phis)
    if m < 1:
        raise ValueError("need at least one angular residual")
    u = None
    if np.trace(phis.T @ phis) > 0:
        u = fit_line_u(phis)
        perp = np.array([-u[1], u[0]])
        eps1 = np.outer(phis @ perp, perp)
    else:
        eps1 = np.zeros_like(phis)
    loglik = np.array([
        _gauss_loglik(phis, spec.sigma),
        _gauss_loglik(eps1, spec.sigma),
        _gauss_loglik(np.zeros_like(phis), spec.sigma),
    ])
    n_obs = 2 * m
    bic = np.log(n_obs) * PARAMETER_COUNTS - 2 * loglik
    best = int(np.flatnonzero(bic == bic.min())[0])
    return ComplianceResult(
        n_compliant=best,
        bic=bic,
        log_likelihood=loglik,
        n_observations=n_obs,
        u=u if best == 1 else None,
        u_angle=float(np.arctan2(u[1], u[0])) if best == 1 else None,
    )


def compliant_axes_world(result: ComplianceResult, desired_direction, rotation=None) -> list:
    """World-frame compliant axes for a selected model.

    One axis: ``R^T (u_x, u_y, 0)``, perpendicular to the desired direction
    since ``R`` maps it to +z. Two axes: Gram-Schmidt of the world x-axis (the
    y-axis if x is nearly parallel) against the desired direction, completed
    so that ``a1 x a2 = desired_direction``.
    """
    d = np.asarray(desired_direction, dtype=float)
    d = d / np.linalg.norm(d)
    if result.n_compliant == 0:
        return []
    if result.n_compliant == 1:
        R = geo.rotation_to_z(d) if rotation is None else np.asarray(rotation, dtype=float)
        a = R.T @ np.array([result.u[0], result.u[1], 0.0])
        a = a - (a @ d) * d
        return [a / np.linalg.norm(a)]
    base = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    a1 = base - (base @ d) * d
    a1 /= np.linalg.norm(a1)
    a2 = np.cross(d, a1)
    return [a1, a2 / np.linalg.norm(a2)]


def learn_compliance(demos, desired_direction, spec: ComplianceSpec = ComplianceSpec()) -> ComplianceResult:
    """Residuals, model selection and world axes in one call."""
    phis = demo_angular_residuals(demos, desired_direction)
    result = select_model(phis, spec)
    R = geo.rotation_to_z(desired_direction)
    return replace(result, compliant_axes=compliant_axes_world(result, desired_direction, R))

