"""Synthetic demonstrations and reproduction runs."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import MotionModel, Trajectory, write_trajectory_csv
from .controller import ControllerState, advance_setpoint, controller_for_model, controller_force
from .dynamics import Contact, step
from .environment import Environment

DEMO_DAMPING = 200.0
DEMO_FORCE = 10.0
SENSOR_NOISE = 0.05
STALL_DISPLACEMENT = 1e-7
# spring force (N) treated as jamming; 1.5x the demonstration push
MAX_SPRING_FORCE = 15.0
MODES = ("free", "stick", "slip", "wedged")


@dataclass
class SimTrace:
    """Per-step record of a simulation run (row 0 is the initial state)."""

    t: np.ndarray
    positions: np.ndarray
    setpoints: np.ndarray
    contact_forces: np.ndarray
    normal_forces: np.ndarray
    frictions: np.ndarray
    surface: np.ndarray
    mode: np.ndarray
    mu: float = 0.0
    status: str = ""
    name: str = ""

    def __len__(self):
        return self.t.size

    @property
    def mode_names(self):
        return [MODES[m] for m in self.mode]

    def to_trajectory(self, measured_forces=None) -> Trajectory:
        f = self.contact_forces if measured_forces is None else measured_forces
        return Trajectory(self.t, self.positions, f, 1.0 / float(np.median(np.diff(self.t))), self.name)

    def write_csv(self, path, measured_forces=None):
        """CSV with ``t,x,y,z,fx,fy,fz`` followed by the setpoint ``sx,sy,sz``."""
        traj = self.to_trajectory(measured_forces)
        write_trajectory_csv(traj, path, {"sx": self.setpoints[:, 0], "sy": self.setpoints[:, 1],
                                          "sz": self.setpoints[:, 2]})


class _Recorder:
    def __init__(self, state: ControllerState):
        self.t = [0.0]
        self.x = [state.position.copy()]
        self.s = [state.setpoint.copy()]
        self.f = [np.zeros(3)]
        self.fn = [0.0]
        self.ft = [np.zeros(3)]
        self.surf = [-1]
        self.mode = [0]

    def add(self, t, state: ControllerState, c: Contact):
        self.t.append(t)
        self.x.append(state.position.copy())
        self.s.append(state.setpoint.copy())
        self.f.append(c.force)
        self.fn.append(c.normal_force)
        self.ft.append(c.friction)
        self.surf.append(c.surface)
        self.mode.append(MODES.index(c.mode))

    def trace(self, mu, status, name) -> SimTrace:
        # times as integer multiples of dt keep the spacing exact
        return SimTrace(np.asarray(self.t), np.asarray(self.x), np.asarray(self.s), np.asarray(self.f),
                        np.asarray(self.fn), np.asarray(self.ft), np.asarray(self.surf, dtype=int),
                        np.asarray(self.mode, dtype=int), mu, status, name)


def cap_perturbation(direction, max_deg, rng) -> np.ndarray:
    """Uniform random unit vector within ``max_deg`` of ``direction``."""
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    if max_deg <= 0:
        return d
    cos_t = rng.uniform(np.cos(np.deg2rad(max_deg)), 1.0)
    psi = rng.uniform(0.0, 2 * np.pi)
    helper = np.eye(3)[int(np.argmin(np.abs(d)))]
    e1 = np.cross(d, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    sin_t = np.sqrt(max(0.0, 1 - cos_t ** 2))
    return cos_t * d + sin_t * (np.cos(psi) * e1 + np.sin(psi) * e2)


@dataclass
class Demonstration:
    trajectory: Trajectory
    trace: SimTrace
    applied_directions: np.ndarray
    approach: np.ndarray
    made_contact: bool


def simulate_demonstration(env: Environment, approach, force_mag=DEMO_FORCE, noise_deg=0.0, seed=None, *,
                           start, damping=DEMO_DAMPING, dt=0.01, max_time=4.0, window=20,
                           sensor_noise=SENSOR_NOISE, stall_steps=10, name="demo") -> Demonstration:
    """Simulate a demonstrator pushing the free tool with a constant-magnitude force.

    The push direction is redrawn once per ``window`` samples within
    ``noise_deg`` of ``approach``. The recorded force is the contact force
    (normal plus friction) plus zero-mean Gaussian sensor noise; the
    demonstrator's own force is not measured.
    """
    approach = np.asarray(approach, float)
    approach = approach / np.linalg.norm(approach)
    if noise_deg < 0:
        raise ValueError("noise_deg must be non-negative")
    rng = np.random.default_rng(seed)
    start = np.asarray(start, float)
    state = ControllerState(start.copy(), start.copy(), np.zeros(3), np.zeros((3, 3)), damping, 0.0, dt)
    rec = _Recorder(state)
    n_steps = int(round(max_time / dt))
    dirs = []
    still = 0
    status = "timeout"
    for k in range(n_steps):
        if k % window == 0:
            dirs.append(cap_perturbation(approach, noise_deg, rng))
        state.external_force = force_mag * dirs[-1]
        prev = state.position
        state, contact = step(state, env)
        state.setpoint = state.position.copy()
        rec.add((k + 1) * dt, state, contact)
        still = still + 1 if np.linalg.norm(state.position - prev) < STALL_DISPLACEMENT else 0
        if still >= stall_steps:
            status = "stalled"
            break
    trace = rec.trace(env.mu, status, name)
    noise = rng.normal(0.0, sensor_noise, size=trace.contact_forces.shape) if sensor_noise > 0 else 0.0
    measured = trace.contact_forces + noise
    made_contact = bool((trace.mode != 0).any())
    if env.surfaces and not made_contact:
        warnings.warn(f"{name}: demonstration never touched a surface", RuntimeWarning, stacklevel=2)
    traj = Trajectory(trace.t, trace.positions, measured, 1.0 / dt, name)
    return Demonstration(traj, trace, np.asarray(dirs), approach, made_contact)


def generate_demonstration(env: Environment, approach, force_mag=DEMO_FORCE, noise_deg=0.0, seed=None, *,
                           start, **kwargs) -> Trajectory:
    """Synthetic demonstration as a :class:`Trajectory` (see :func:`simulate_demonstration`)."""
    return simulate_demonstration(env, approach, force_mag, noise_deg, seed, start=start, **kwargs).trajectory


@dataclass
class ReproductionResult:
    trace: SimTrace
    success: bool
    status: str
    final_position: np.ndarray
    target_distance: float
    extra: dict = field(default_factory=dict)


def reproduce(model: MotionModel, env: Environment, start, max_time=10.0, *, dt=0.01, max_force=MAX_SPRING_FORCE,
              stall_steps=50, name="reproduction") -> ReproductionResult:
    """Drive the learned impedance controller from ``start``.

    Ends with ``success`` once the target region is reached, ``stuck`` when
    the spring force exceeds ``max_force`` or the tool does not move for
    ``stall_steps`` steps, and ``timeout`` after ``max_time``.
    """
    state = controller_for_model(model, start, dt)
    rec = _Recorder(state)
    status = "timeout"
    still = 0
    if env.in_target(state.position):
        status = "success"
    else:
        for k in range(int(round(max_time / dt))):
            state = advance_setpoint(state, model.desired_direction)
            prev = state.position
            state, contact = step(state, env)
            rec.add((k + 1) * dt, state, contact)
            if env.in_target(state.position):
                status = "success"
                break
            spring = np.linalg.norm(state.K @ (state.setpoint - state.position))
            still = still + 1 if np.linalg.norm(state.position - prev) < STALL_DISPLACEMENT else 0
            if spring > max_force or (model.speed > 0 and still >= stall_steps):
                status = "stuck"
                break
    trace = rec.trace(env.mu, status, name)
    final = trace.positions[-1]
    return ReproductionResult(trace, status == "success", status, final, env.target_distance(final),
                              {"controller_force": controller_force(state)})


def physics_violations(trace: SimTrace, env: Environment, tol=1e-6) -> list:
    """Coulomb consistency and non-penetration checks over a trace."""
    problems = []
    for k in range(len(trace)):
        mode = MODES[trace.mode[k]]
        ft = np.linalg.norm(trace.frictions[k])
        fn = trace.normal_forces[k]
        if mode == "slip" and abs(ft - env.mu * fn) > tol:
            problems.append((k, f"slip with |F_t|={ft:.9g} != mu*F_N={env.mu * fn:.9g}"))
        if mode == "stick" and ft > env.mu * fn + tol:
            problems.append((k, f"stick with |F_t|={ft:.9g} > mu*F_N={env.mu * fn:.9g}"))
        if fn < -tol:
            problems.append((k, f"negative normal force {fn:.9g}"))
        if env.surfaces:
            depth = env.signed_distances(trace.positions[k]).min()
            if depth < -tol:
                problems.append((k, f"penetration {depth:.3g} m"))
    return problems
