"""Cartesian impedance controller: stiffness from a motion model and a
feed-forward setpoint."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..core import MotionModel

AXIS_ORTHO_TOL = 1e-9


@dataclass
class ControllerState:
    """Setpoint, tool position and velocity plus the controller gains.

    ``external_force`` is an additional force on the tool (the demonstrator's
    hand); it is zero during reproduction.
    """

    setpoint: np.ndarray
    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    K: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    D: float = 0.7
    speed: float = 0.0
    dt: float = 0.01
    external_force: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.setpoint = np.asarray(self.setpoint, dtype=float)
        self.position = np.asarray(self.position, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)
        self.K = np.asarray(self.K, dtype=float)
        self.external_force = np.asarray(self.external_force, dtype=float)
        if self.K.shape != (3, 3) or not np.allclose(self.K, self.K.T, atol=1e-9):
            raise ValueError("K must be a symmetric 3x3 matrix")
        if not self.D > 0 or not self.dt > 0:
            raise ValueError("damping and dt must be positive")


def stiffness_basis(model: MotionModel) -> np.ndarray:
    """Orthonormal basis whose first columns are the compliant axes.

    The remaining columns complete the basis; the desired direction is always
    among them.
    """
    d = model.desired_direction / np.linalg.norm(model.desired_direction)
    axes = [np.asarray(a, float) for a in model.compliant_axes]
    for i, a in enumerate(axes):
        if abs(np.linalg.norm(a) - 1) > AXIS_ORTHO_TOL or abs(a @ d) > AXIS_ORTHO_TOL:
            raise ValueError(f"compliant axis {i} is not a unit vector orthogonal to the desired direction")
        for b in axes[:i]:
            if abs(a @ b) > AXIS_ORTHO_TOL:
                raise ValueError("compliant axes are not mutually orthogonal")
    cols = axes + [d]
    if len(cols) == 1:
        helper = np.eye(3)[int(np.argmin(np.abs(d)))]
        e1 = np.cross(d, helper)
        e1 /= np.linalg.norm(e1)
        cols = [e1, np.cross(d, e1), d]
    elif len(cols) == 2:
        e = np.cross(d, cols[0])
        cols = [cols[0], e / np.linalg.norm(e), d]
    return np.column_stack(cols)


def build_stiffness(model: MotionModel) -> np.ndarray:
    """``K = R V R^T`` with compliant stiffness on the compliant axes."""
    R = stiffness_basis(model)
    v = np.full(3, float(model.stiffness_stiff))
    v[: model.n_compliant] = model.stiffness_compliant
    K = (R * v) @ R.T
    return 0.5 * (K + K.T)


def controller_force(state: ControllerState) -> np.ndarray:
    """Spring towards the setpoint plus damping opposing the velocity."""
    return state.K @ (state.setpoint - state.position) - state.D * state.velocity


def advance_setpoint(state: ControllerState, desired_direction) -> ControllerState:
    """Move the setpoint ``speed * dt`` along the desired direction (no feedback)."""
    d = np.asarray(desired_direction, dtype=float)
    if abs(np.linalg.norm(d) - 1) > 1e-9:
        raise ValueError("desired_direction must be a unit vector")
    return replace(state, setpoint=state.setpoint + d * (state.speed * state.dt))


def controller_for_model(model: MotionModel, start, dt=0.01) -> ControllerState:
    start = np.asarray(start, dtype=float)
    return ControllerState(start.copy(), start.copy(), np.zeros(3), build_stiffness(model),
                           model.damping, model.speed, dt)
