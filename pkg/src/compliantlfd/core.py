"""Trajectory containers, preprocessing into motion samples, and file formats.

Trajectories are stored column-wise as numpy arrays (``t``, ``positions``,
``forces``); :class:`Sample` is only a convenience view of a single row.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegenerateDirectionError, NoMotionError, TrajectoryError

TRAJECTORY_HEADER = ("t", "x", "y", "z", "fx", "fy", "fz")

DEFAULT_SAMPLE_RATE_HZ = 100.0
DEFAULT_WINDOW = 20
DEFAULT_FORCE_THRESHOLD = 2.0
MIN_WINDOW_DISPLACEMENT = 1e-6
MIN_NET_DISPLACEMENT = 1e-4
SPACING_JITTER = 0.10


def unit(v):
    """Return ``v`` normalized along its last axis."""
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


class Sample(NamedTuple):
    t: float
    position: np.ndarray
    measured_force: np.ndarray


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-stamped end-effector positions (m) and measured forces (N).

    Forces are gravity-compensated sensor readings in the world frame.
    """

    t: np.ndarray
    positions: np.ndarray
    forces: np.ndarray
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ
    name: str = ""

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).reshape(-1)
        pos = np.asarray(self.positions, dtype=float)
        frc = np.asarray(self.forces, dtype=float)
        if pos.shape != (t.size, 3) or frc.shape != (t.size, 3):
            raise TrajectoryError(
                f"trajectory {self.name!r}: expected positions/forces of shape "
                f"({t.size}, 3), got {pos.shape} and {frc.shape}"
            )
        if t.size < 2:
            raise TrajectoryError(f"trajectory {self.name!r}: need at least 2 samples")
        if not self.sample_rate_hz > 0:
            raise TrajectoryError("sample_rate_hz must be positive")
        finite = np.isfinite(t) & np.isfinite(pos).all(axis=1) & np.isfinite(frc).all(axis=1)
        if not finite.all():
            bad = int(np.flatnonzero(~finite)[0])
            raise TrajectoryError(
                f"trajectory {self.name!r}: non-finite value at sample {bad}"
            )
        dt = np.diff(t)
        if (dt <= 0).any():
            bad = int(np.flatnonzero(dt <= 0)[0]) + 1
            raise TrajectoryError(
                f"trajectory {self.name!r}: time not strictly increasing at sample {bad}"
            )
        nominal = 1.0 / self.sample_rate_hz
        off = np.abs(dt - nominal) > SPACING_JITTER * nominal
        if off.any():
            bad = int(np.flatnonzero(off)[0]) + 1
            raise TrajectoryError(
                f"trajectory {self.name!r}: spacing {dt[bad - 1]:.6g}s at sample {bad} "
                f"deviates more than 10% from 1/{self.sample_rate_hz:g} Hz"
            )
        for arr in (t, pos, frc):
            arr.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "forces", frc)

    def __len__(self):
        return self.t.size

    @property
    def samples(self):
        return [Sample(float(t), p, f) for t, p, f in zip(self.t, self.positions, self.forces)]

    @classmethod
    def from_samples(cls, samples: Sequence[Sample], sample_rate_hz=DEFAULT_SAMPLE_RATE_HZ, name=""):
        t = [s.t for s in samples]
        pos = [s.position for s in samples]
        frc = [s.measured_force for s in samples]
        return cls(np.array(t, float), np.array(pos, float), np.array(frc, float), sample_rate_hz, name)

    def scaled_forces(self, c: float) -> "Trajectory":
        return Trajectory(self.t, self.positions, self.forces * c, self.sample_rate_hz, self.name)


@dataclass(frozen=True, eq=False)
class MotionSample:
    """One averaging window of a demonstration.

    ``v_a_hat`` is the unit direction of motion over the window and ``F_hat``
    the unit direction opposite to the mean measured force (only present in
    contact). ``position`` is the position at the start of the window.
    """

    v_a_hat: np.ndarray
    F_hat: Optional[np.ndarray]
    in_contact: bool
    position: np.ndarray

    def __post_init__(self):
        if (self.F_hat is not None) != bool(self.in_contact):
            raise ValueError("F_hat must be present exactly when in_contact is true")


def preprocess(
    traj: Trajectory,
    window: int = DEFAULT_WINDOW,
    force_threshold: float = DEFAULT_FORCE_THRESHOLD,
) -> list[MotionSample]:
    """Average a trajectory over non-overlapping windows of ``window`` samples.

    The displacement of window ``k`` runs from its first sample to the first
    sample of the next window (the last sample for the final window), so the
    window displacements tile the path. Windows that move less than 1e-6 m are
    dropped; a window is in contact when the mean force magnitude reaches
    ``force_threshold``.
    """
    if int(window) != window or window < 1:
        raise ValueError(f"window must be a positive integer, got {window!r}")
    if not force_threshold > 0:
        raise ValueError("force_threshold must be positive")
    window = int(window)
    n = len(traj)
    out = []
    for k in range(n // window):
        i0 = k * window
        i1 = min(i0 + window, n - 1)
        disp = traj.positions[i1] - traj.positions[i0]
        dist = np.linalg.norm(disp)
        if dist < MIN_WINDOW_DISPLACEMENT:
            continue
        f = traj.forces[i0 : i0 + window]
        mean_f = f.mean(axis=0)
        mean_f_norm = np.linalg.norm(mean_f)
        in_contact = bool(np.linalg.norm(f, axis=1).mean() >= force_threshold) and mean_f_norm > 0
        out.append(
            MotionSample(
                v_a_hat=disp / dist,
                F_hat=-mean_f / mean_f_norm if in_contact else None,
                in_contact=in_contact,
                position=traj.positions[i0].copy(),
            )
        )
    if not out:
        raise NoMotionError(f"trajectory {traj.name!r}: no motion in any window of {window} samples")
    return out


def mean_actual_direction(traj: Trajectory) -> np.ndarray:
    """Unit vector of the net displacement from the first to the last sample."""
    disp = traj.positions[-1] - traj.positions[0]
    dist = np.linalg.norm(disp)
    if dist < MIN_NET_DISPLACEMENT:
        raise DegenerateDirectionError(
            f"trajectory {traj.name!r}: net displacement {dist:.3g} m is too small"
        )
    return disp / dist


@dataclass
class MotionModel:
    """Everything needed to reproduce a learned motion with an impedance controller."""

    desired_direction: np.ndarray
    n_compliant: int
    compliant_axes: list = field(default_factory=list)
    stiffness_stiff: float = 500.0
    stiffness_compliant: float = 0.0
    damping: float = 0.7
    speed: float = 0.05

    def __post_init__(self):
        self.desired_direction = np.asarray(self.desired_direction, dtype=float)
        self.compliant_axes = [np.asarray(a, dtype=float) for a in self.compliant_axes]
        self.validate()

    def validate(self):
        d = self.desired_direction
        if d.shape != (3,) or abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ValueError("desired_direction must be a unit 3-vector")
        if self.n_compliant not in (0, 1, 2) or len(self.compliant_axes) != self.n_compliant:
            raise ValueError("n_compliant must be 0, 1 or 2 and match compliant_axes")
        for i, a in enumerate(self.compliant_axes):
            if a.shape != (3,) or abs(np.linalg.norm(a) - 1.0) > 1e-9:
                raise ValueError(f"compliant axis {i} is not a unit 3-vector")
            if abs(a @ d) >= 1e-9:
                raise ValueError(f"compliant axis {i} is not orthogonal to the desired direction")
        if self.n_compliant == 2 and abs(self.compliant_axes[0] @ self.compliant_axes[1]) >= 1e-9:
            raise ValueError("compliant axes are not mutually orthogonal")
        if self.stiffness_stiff < 0 or self.stiffness_compliant < 0 or self.damping <= 0:
            raise ValueError("stiffness must be non-negative and damping positive")
        if self.speed < 0:
            raise ValueError("speed must be non-negative")

    def to_dict(self) -> dict:
        return {
            "desired_direction": self.desired_direction.tolist(),
            "n_compliant": int(self.n_compliant),
            "compliant_axes": [a.tolist() for a in self.compliant_axes],
            "stiffness_stiff": float(self.stiffness_stiff),
            "stiffness_compliant": float(self.stiffness_compliant),
            "damping": float(self.damping),
            "speed": float(self.speed),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MotionModel":
        keys = ("desired_direction", "n_compliant", "compliant_axes", "stiffness_stiff",
                "stiffness_compliant", "damping", "speed")
        missing = [k for k in keys if k not in d]
        if missing:
            raise ValueError(f"motion model is missing keys: {', '.join(missing)}")
        return cls(**{k: d[k] for k in keys})


def read_trajectory_csv(path, sample_rate_hz: Optional[float] = None) -> Trajectory:
    """Load a ``t,x,y,z,fx,fy,fz`` CSV.

    Extra trailing columns (e.g. setpoints of a simulator trace) are ignored.
    The sample rate is inferred from the median spacing when not given.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(h.strip() for h in next(reader))
        if header[:7] != TRAJECTORY_HEADER:
            raise TrajectoryError(f"{path}: header must start with {','.join(TRAJECTORY_HEADER)}")
        rows = [[float(v) for v in row[:7]] for row in reader if row]
    data = np.array(rows, dtype=float).reshape(-1, 7)
    if sample_rate_hz is None:
        if len(data) < 2:
            raise TrajectoryError(f"{path}: need at least 2 samples")
        sample_rate_hz = float(1.0 / np.median(np.diff(data[:, 0])))
    return Trajectory(data[:, 0], data[:, 1:4], data[:, 4:7], sample_rate_hz, name=path.stem)


def write_trajectory_csv(traj: Trajectory, path, extra: Optional[dict] = None):
    """Write a trajectory; ``extra`` maps additional column names to (N,) arrays."""
    cols = [traj.t[:, None], traj.positions, traj.forces]
    header = list(TRAJECTORY_HEADER)
    for name, values in (extra or {}).items():
        values = np.asarray(values, dtype=float).reshape(len(traj), -1)
        cols.append(values)
        header.append(name)
    data = np.hstack(cols)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in data:
            w.writerow([repr(float(v)) for v in row])


def save_model(model: MotionModel, path, extra: Optional[dict] = None):
    payload = model.to_dict()
    if extra:
        payload.update(extra)
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_model(path) -> MotionModel:
    return MotionModel.from_dict(json.loads(Path(path).read_text()))
