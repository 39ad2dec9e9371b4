"""Rigid surfaces and environment descriptions for the point-tool simulator.

Every surface bounds the free region; ``signed_distance`` is positive in free
space and negative when penetrating. ``closest`` returns the nearest surface
point and the unit normal pointing into free space.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import ConfigError


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def axis_rotation(axis, angle) -> np.ndarray:
    """Rodrigues rotation by ``angle`` radians about ``axis``."""
    k = _unit(axis)
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K


class Plane:
    kind = "plane"
    curved = False

    def __init__(self, point, normal):
        self.point = np.asarray(point, dtype=float)
        self.normal = _unit(normal)

    def signed_distance(self, p) -> float:
        return float((np.asarray(p) - self.point) @ self.normal)

    def closest(self, p):
        p = np.asarray(p, dtype=float)
        return p - self.signed_distance(p) * self.normal, self.normal.copy()

    def project(self, p):
        return self.closest(p)[0]

    def to_dict(self):
        return {"type": "plane", "point": self.point.tolist(), "normal": self.normal.tolist()}


class Funnel:
    """Surface of revolution opening along ``axis`` from ``apex``.

    The wall makes a local angle ``beta(rho)`` with the axis. ``straight``
    uses a constant angle; ``curved`` blends linearly from
    ``apex_half_angle_deg`` at the apex to ``mouth_half_angle_deg`` at
    ``mouth_radius``. Beyond the mouth the funnel has a flat rim.
    """

    kind = "funnel"
    curved = True
    APEX_SNAP = 1e-4

    def __init__(self, apex=(0, 0, 0), axis=(0, 0, 1), profile="curved", half_angle_deg=45.0,
                 apex_half_angle_deg=30.0, mouth_half_angle_deg=60.0, mouth_radius=0.06):
        if profile not in ("straight", "curved"):
            raise ConfigError(f"unknown funnel profile {profile!r}")
        self.apex = np.asarray(apex, dtype=float)
        self.axis = _unit(axis)
        self.profile = profile
        self.half_angle_deg = float(half_angle_deg)
        self.apex_half_angle_deg = float(apex_half_angle_deg)
        self.mouth_half_angle_deg = float(mouth_half_angle_deg)
        self.mouth_radius = float(mouth_radius)
        if profile == "straight":
            self._b0 = self._b1 = np.deg2rad(self.half_angle_deg)
        else:
            self._b0 = np.deg2rad(self.apex_half_angle_deg)
            self._b1 = np.deg2rad(self.mouth_half_angle_deg)
        angles = (self.half_angle_deg, self.apex_half_angle_deg, self.mouth_half_angle_deg)
        if not all(0 < a < 90 for a in angles):
            raise ConfigError("funnel half-angles must lie in (0, 90) degrees")
        self._k = (self._b1 - self._b0) / self.mouth_radius
        self.mouth_height = self._wall(self.mouth_radius)
        self._e1 = np.cross(self.axis, np.eye(3)[int(np.argmin(np.abs(self.axis)))])
        self._e1 /= np.linalg.norm(self._e1)

    # profile in the meridian plane: height of the wall above the apex at radius u
    def _wall(self, u):
        u = min(max(u, 0.0), self.mouth_radius)
        if abs(self._k) < 1e-12:
            return u / np.tan(self._b0)
        return (np.log(np.sin(self._b0 + self._k * u)) - np.log(np.sin(self._b0))) / self._k

    def wall_height(self, u) -> float:
        return self._wall(u)

    def wall_slope(self, u) -> float:
        if u > self.mouth_radius:
            return 0.0
        return 1.0 / np.tan(self._b0 + self._k * max(u, 0.0))

    def local(self, p):
        """(rho, h, radial unit vector) of ``p`` in the funnel frame."""
        rel = np.asarray(p, dtype=float) - self.apex
        h = rel @ self.axis
        radial = rel - h * self.axis
        rho = np.linalg.norm(radial)
        rhat = radial / rho if rho > 1e-15 else self._e1
        return rho, h, rhat

    def _closest_meridian(self, rho, h):
        gap = abs(h - self._wall(rho))
        if gap < 1e-15:
            return rho
        lo, hi = max(0.0, rho - gap), rho + gap
        res = minimize_scalar(
            lambda u: (u - rho) ** 2 + (self._wall(u) - h) ** 2,
            bounds=(lo, hi), method="bounded", options={"xatol": 1e-13},
        )
        u = float(res.x)
        for cand in (lo, hi, min(max(self.mouth_radius, lo), hi)):
            if (cand - rho) ** 2 + (self._wall(cand) - h) ** 2 < (u - rho) ** 2 + (self._wall(u) - h) ** 2:
                u = cand
        return u

    def closest(self, p):
        p = np.asarray(p, dtype=float)
        rho, h, rhat = self.local(p)
        u = self._closest_meridian(rho, h)
        q = self.apex + u * rhat + self._wall(u) * self.axis
        d = p - q
        dist = np.linalg.norm(d)
        if dist > 1e-9:
            n = d / dist if h >= self._wall(rho) else -d / dist
        else:
            slope = self.wall_slope(u)
            n = _unit(-slope * rhat + self.axis)
        return q, n

    def signed_distance(self, p) -> float:
        p = np.asarray(p, dtype=float)
        rho, h, _ = self.local(p)
        q, _ = self.closest(p)
        dist = float(np.linalg.norm(p - q))
        return dist if h >= self._wall(rho) else -dist

    def is_penetrating(self, p, tol=0.0) -> bool:
        rho, h, _ = self.local(p)
        return h - self._wall(rho) < -tol

    def project(self, p):
        return self.closest(p)[0]

    def crossed_apex(self, p_from, p_to) -> bool:
        """True when moving ``p_from -> p_to`` passes across the axis near the apex."""
        r0, _, d0 = self.local(p_from)
        r1, _, d1 = self.local(p_to)
        return r1 < self.APEX_SNAP or (r0 > 0 and r1 > 0 and d0 @ d1 < 0)

    def to_dict(self):
        return {
            "type": "funnel", "apex": self.apex.tolist(), "axis": self.axis.tolist(),
            "profile": self.profile, "half_angle_deg": self.half_angle_deg,
            "apex_half_angle_deg": self.apex_half_angle_deg,
            "mouth_half_angle_deg": self.mouth_half_angle_deg, "mouth_radius": self.mouth_radius,
        }


def surface_from_dict(d):
    kind = d.get("type")
    if kind == "plane":
        return Plane(d["point"], d["normal"])
    if kind == "funnel":
        keys = ("apex", "axis", "profile", "half_angle_deg", "apex_half_angle_deg",
                "mouth_half_angle_deg", "mouth_radius")
        return Funnel(**{k: d[k] for k in keys if k in d})
    raise ConfigError(f"unknown surface type {kind!r}")


@dataclass
class Environment:
    """Surfaces, friction coefficient and target region.

    The target region is a ball around ``target_center``, or, when
    ``target_axis`` is set, a cylinder of that radius around the line through
    the centre (e.g. the bottom line of a valley).
    """

    surfaces: list = field(default_factory=list)
    mu: float = 0.3
    target_center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    target_radius: float = 0.005
    target_axis: Optional[np.ndarray] = None
    name: str = "environment"
    description: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mu < 0:
            raise ConfigError("friction coefficient must be non-negative")
        if not self.target_radius > 0:
            raise ConfigError("target radius must be positive")
        self.target_center = np.asarray(self.target_center, dtype=float)
        if self.target_axis is not None:
            self.target_axis = _unit(self.target_axis)

    def signed_distances(self, p) -> np.ndarray:
        return np.array([s.signed_distance(p) for s in self.surfaces])

    def penetrating(self, p, tol=0.0) -> list:
        out = []
        for i, s in enumerate(self.surfaces):
            pen = s.is_penetrating(p, tol) if hasattr(s, "is_penetrating") else s.signed_distance(p) < -tol
            if pen:
                out.append(i)
        return out

    def target_distance(self, p) -> float:
        d = np.asarray(p, dtype=float) - self.target_center
        if self.target_axis is not None:
            d = d - (d @ self.target_axis) * self.target_axis
        return float(np.linalg.norm(d))

    def in_target(self, p) -> bool:
        return self.target_distance(p) <= self.target_radius

    def to_dict(self) -> dict:
        out = dict(self.description)
        out.update({
            "name": self.name,
            "mu": self.mu,
            "surfaces": [s.to_dict() for s in self.surfaces],
            "target": {
                "center": self.target_center.tolist(),
                "radius": self.target_radius,
                "axis": None if self.target_axis is None else self.target_axis.tolist(),
            },
        })
        return out


# ---------------------------------------------------------------- factories

def free_space(target=(0.0, 0.0, 0.0), target_radius=0.005, mu=0.3, name="free") -> Environment:
    return Environment([], mu, np.asarray(target, float), target_radius, None, name,
                       {"type": "free"})


def valley(bottom=(0.0, 0.0, 0.0), groove_axis=(0.0, 1.0, 0.0), up=(0.0, 0.0, 1.0), opening_deg=90.0,
           mu=0.3, target=None, target_radius=0.005, name="valley") -> Environment:
    """Two plates meeting along a groove line; the free region is the V between them.

    By default the target is the whole groove line (a cylinder of
    ``target_radius``); pass ``target`` for a point target instead.
    """
    g = _unit(groove_axis)
    up = _unit(np.asarray(up, float) - (np.asarray(up, float) @ g) * g)
    half = np.deg2rad(opening_deg) / 2
    side = np.cross(g, up)
    # plate A on the +side half, plate B on the -side half
    n_a = np.cos(half) * (-side) + np.sin(half) * up
    n_b = np.cos(half) * side + np.sin(half) * up
    plates = [Plane(bottom, n_a), Plane(bottom, n_b)]
    desc = {"type": "valley", "bottom": list(map(float, bottom)), "groove_axis": g.tolist(),
            "up": up.tolist(), "opening_deg": float(opening_deg)}
    if target is None:
        return Environment(plates, mu, np.asarray(bottom, float), target_radius, g, name, desc)
    return Environment(plates, mu, np.asarray(target, float), target_radius, None, name, desc)


def funnel(profile="curved", apex=(0.0, 0.0, 0.0), tilt_deg=0.0, tilt_axis=(0.0, 1.0, 0.0), mu=0.3,
           half_angle_deg=45.0, apex_half_angle_deg=30.0, mouth_half_angle_deg=60.0,
           mouth_radius=0.06, target_radius=0.005, name=None) -> Environment:
    axis = axis_rotation(tilt_axis, np.deg2rad(tilt_deg)) @ np.array([0.0, 0.0, 1.0])
    surf = Funnel(apex, axis, profile, half_angle_deg, apex_half_angle_deg, mouth_half_angle_deg, mouth_radius)
    desc = {"type": "funnel", "profile": profile, "apex": list(map(float, apex)), "tilt_deg": float(tilt_deg),
            "tilt_axis": list(map(float, tilt_axis)), "half_angle_deg": float(half_angle_deg),
            "apex_half_angle_deg": float(apex_half_angle_deg),
            "mouth_half_angle_deg": float(mouth_half_angle_deg), "mouth_radius": float(mouth_radius)}
    name = name or f"funnel-{profile}" + (f"-tilt{tilt_deg:g}" if tilt_deg else "")
    return Environment([surf], mu, np.asarray(apex, float), target_radius, None, name, desc)


def environment_from_dict(cfg: dict) -> Environment:
    """Build an environment from a JSON-style config (see README for the schema)."""
    cfg = dict(cfg)
    kind = cfg.get("type")
    mu = float(cfg.get("mu", 0.3))
    target = cfg.get("target") or {}
    radius = float(target.get("radius", 0.005))
    try:
        if kind == "free":
            env = free_space(target.get("center", (0, 0, 0)), radius, mu, cfg.get("name", "free"))
        elif kind == "valley":
            env = valley(cfg.get("bottom", (0, 0, 0)), cfg.get("groove_axis", (0, 1, 0)), cfg.get("up", (0, 0, 1)),
                         float(cfg.get("opening_deg", 90.0)), mu, target.get("center"), radius,
                         cfg.get("name", "valley"))
            if target.get("center") is not None and target.get("axis") is not None:
                env.target_axis = _unit(target["axis"])
        elif kind == "funnel":
            env = funnel(cfg.get("profile", "curved"), cfg.get("apex", (0, 0, 0)), float(cfg.get("tilt_deg", 0.0)),
                         cfg.get("tilt_axis", (0, 1, 0)), mu, float(cfg.get("half_angle_deg", 45.0)),
                         float(cfg.get("apex_half_angle_deg", 30.0)), float(cfg.get("mouth_half_angle_deg", 60.0)),
                         float(cfg.get("mouth_radius", 0.06)), radius, cfg.get("name"))
            if target.get("center") is not None:
                env.target_center = np.asarray(target["center"], float)
        elif kind == "custom":
            env = Environment([surface_from_dict(s) for s in cfg.get("surfaces", [])], mu,
                              np.asarray(target.get("center", (0, 0, 0)), float), radius,
                              target.get("axis"), cfg.get("name", "custom"), {"type": "custom"})
        else:
            raise ConfigError(f"unknown environment type {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid environment config: {exc}") from exc
    return env


def load_environment(path) -> Environment:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return environment_from_dict(cfg)
