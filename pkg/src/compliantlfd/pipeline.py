"""End-to-end learning plus the synthetic scenarios used for evaluation."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .compliance import ComplianceResult, ComplianceSpec, learn_compliance
from .core import MotionModel, Trajectory, preprocess
from .direction import ConstraintSpec, DirectionResult, learn_direction
from .errors import ConfigError
from .sim.environment import Environment, Funnel, environment_from_dict, free_space, funnel, valley
from .sim.runs import Demonstration, simulate_demonstration

DEFAULT_STIFFNESS = 500.0


@dataclass
class LearnedModel:
    model: MotionModel
    direction: DirectionResult
    compliance: ComplianceResult


def learn_motion_model(trajectories: Sequence[Trajectory], constraint_spec: ConstraintSpec = ConstraintSpec(),
                       compliance_spec: ComplianceSpec = ComplianceSpec(), *, speed=0.05,
                       stiffness_stiff=DEFAULT_STIFFNESS, stiffness_compliant=0.0, damping=0.7,
                       samples=None) -> LearnedModel:
    """Desired direction, then compliant axes, packed into a :class:`MotionModel`.

    ``samples`` may hold already preprocessed motion samples per trajectory.
    """
    if samples is None:
        samples = [preprocess(t, constraint_spec.window, constraint_spec.force_threshold) for t in trajectories]
    direction = learn_direction(samples, constraint_spec)
    compliance = learn_compliance(trajectories, direction.desired_direction, compliance_spec)
    model = MotionModel(direction.desired_direction, compliance.n_compliant, compliance.compliant_axes,
                        stiffness_stiff, stiffness_compliant, damping, speed)
    return LearnedModel(model, direction, compliance)


def angle_between_deg(a, b) -> float:
    a = np.asarray(a, float) / np.linalg.norm(a)
    b = np.asarray(b, float) / np.linalg.norm(b)
    return float(np.degrees(np.arctan2(np.linalg.norm(np.cross(a, b)), a @ b)))


# ---------------------------------------------------------------- scenarios

@dataclass
class DemoPlan:
    start: np.ndarray
    approach: np.ndarray
    group: int = 0


@dataclass
class Scenario:
    """An environment, how demonstrations are given in it, and where to reproduce from."""

    name: str
    env: Environment
    plans: list
    true_direction: np.ndarray
    force: float = 10.0
    noise_deg: float = 10.0
    max_time: float = 2.0
    repro_starts: list = field(default_factory=list)
    true_axes: list = field(default_factory=list)
    pair_groups: Optional[tuple] = None

    def demonstrate(self, i, seed=0, plan=None) -> Demonstration:
        plan = self.plans[i % len(self.plans)] if plan is None else plan
        return simulate_demonstration(self.env, plan.approach, self.force, self.noise_deg, [seed, i],
                                      start=plan.start, max_time=self.max_time, name=f"{self.name}-{i:03d}")

    def demonstrations(self, n, seed=0) -> list:
        return [self.demonstrate(i, seed) for i in range(n)]

    def group_of(self, i) -> int:
        return self.plans[i % len(self.plans)].group


def _funnel_point(env: Environment, rho, azimuth_deg, clearance):
    """Point ``clearance`` above the funnel wall at radius ``rho`` (funnel frame)."""
    f = env.surfaces[0]
    radial = f._e1 * np.cos(np.deg2rad(azimuth_deg)) + np.cross(f.axis, f._e1) * np.sin(np.deg2rad(azimuth_deg))
    return f.apex + rho * radial + (f.wall_height(rho) + clearance) * f.axis


def funnel_scenario(profile="curved", tilt_deg=0.0, mu=0.3, noise_deg=10.0, offset=0.035, clearance=0.015,
                    name=None, env=None) -> Scenario:
    """Demonstrations start above the wall at four azimuths 90 degrees apart
    and push along the funnel axis; groups alternate so that one demo of each
    group forms a perpendicular pair."""
    if env is None:
        env = funnel(profile, tilt_deg=tilt_deg, mu=mu, half_angle_deg=45.0, name=name)
    down = -env.surfaces[0].axis
    plans = [DemoPlan(_funnel_point(env, offset, az, clearance), down, k % 2) for k, az in enumerate((0, 90, 180, 270))]
    starts = [_funnel_point(env, 0.03, az, 0.01) for az in (45, 135, 225, 315)]
    starts += [_funnel_point(env, 0.045, az, 0.01) for az in (0, 120, 240)]
    return Scenario(env.name, env, plans, down, noise_deg=noise_deg, max_time=2.5, repro_starts=starts,
                    pair_groups=(0, 1))


def free_scenario(noise_deg=10.0) -> Scenario:
    env = free_space(target=(0.0, 0.0, 0.0))
    down = np.array([0.0, 0.0, -1.0])
    plans = [DemoPlan(np.array([0.0, 0.0, 0.1]), down)]
    return Scenario("free", env, plans, down, noise_deg=noise_deg, max_time=1.5,
                    repro_starts=[np.array([0.0, 0.0, 0.08]), np.array([0.0, 0.0, 0.05])])


def valley_scenario(mu=0.3, noise_deg=10.0) -> Scenario:
    """Demonstrations drop onto either plate and slide down to the groove."""
    env = valley(mu=mu)
    down = np.array([0.0, 0.0, -1.0])
    plans = [DemoPlan(np.array([s * 0.02, 0.0, 0.035]), down, k) for k, s in enumerate((1, -1))]
    starts = [np.array([0.02, 0.0, 0.035]), np.array([-0.02, 0.01, 0.035]), np.array([0.03, -0.01, 0.045]),
              np.array([-0.03, 0.0, 0.04])]
    return Scenario("valley", env, plans, down, noise_deg=noise_deg, max_time=2.0, repro_starts=starts,
                    true_axes=[np.array([1.0, 0.0, 0.0])])


VALLEY_SIDE_START = np.array([0.02, 0.0, 0.02])
VALLEY_SIDE_TARGET = np.array([0.02, 0.06, 0.02])


def valley_side_scenario(mu=0.3, noise_deg=0.0, misaligned=False) -> Scenario:
    """Demonstrations press onto one plate and slide along the groove direction.

    With ``misaligned`` the second demonstration also pushes down the slope,
    45 degrees away from the first in the plate.
    """
    env = valley(mu=mu, target=VALLEY_SIDE_TARGET, name="valley-side")
    n_a = env.surfaces[0].normal
    into = -n_a
    along = np.array([0.0, 1.0, 0.0])
    downslope = np.cross(along, n_a)
    downslope *= np.sign(downslope[2]) * -1
    first = 0.5 * into + along
    first /= np.linalg.norm(first)
    plans = [DemoPlan(VALLEY_SIDE_START.copy(), first, 0)]
    if misaligned:
        second = 0.5 * into + (along + downslope) / np.sqrt(2)
        plans.append(DemoPlan(VALLEY_SIDE_START.copy(), second / np.linalg.norm(second), 1))
    else:
        plans.append(DemoPlan(VALLEY_SIDE_START + np.array([0.01, 0.0, 0.01]), first, 1))
    return Scenario("valley-side", env, plans, first, noise_deg=noise_deg, max_time=1.5,
                    repro_starts=[VALLEY_SIDE_START.copy()], true_axes=[along])


SCENARIOS = {
    "free": free_scenario,
    "valley": valley_scenario,
    "valley-side": valley_side_scenario,
    "funnel": funnel_scenario,
    "funnel-straight-tilted": lambda **kw: funnel_scenario("straight", 15.0, name="funnel-straight-tilted", **kw),
}


def scenario(name, **kwargs) -> Scenario:
    try:
        return SCENARIOS[name](**kwargs)
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}") from None


def scenario_from_config(cfg: dict) -> Scenario:
    """Scenario for a JSON environment config.

    Demonstration plans, reproduction starts and the reference direction come
    from the optional ``demonstrations``, ``reproduction_starts`` and
    ``true_direction`` keys; missing ones are taken from the preset named by
    ``preset`` (default: the environment type).
    """
    env = environment_from_dict(cfg)
    preset = cfg.get("preset", cfg.get("type"))
    if preset not in SCENARIOS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(SCENARIOS)}")
    if env.surfaces and isinstance(env.surfaces[0], Funnel):
        sc = funnel_scenario(env=env)
        sc.name = env.name
    else:
        sc = scenario(preset)
        sc.env = env
    try:
        if "demonstrations" in cfg:
            sc.plans = [DemoPlan(np.asarray(d["start"], float), np.asarray(d["approach"], float), int(d.get("group", k)))
                        for k, d in enumerate(cfg["demonstrations"])]
            sc.pair_groups = None
        if "pair_groups" in cfg:
            sc.pair_groups = None if cfg["pair_groups"] is None else tuple(int(g) for g in cfg["pair_groups"])
        if "reproduction_starts" in cfg:
            sc.repro_starts = [np.asarray(s, float) for s in cfg["reproduction_starts"]]
        if "true_direction" in cfg:
            sc.true_direction = np.asarray(cfg["true_direction"], float)
        for key in ("force", "noise_deg", "max_time"):
            if key in cfg:
                setattr(sc, key, float(cfg[key]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario config: {exc}") from exc
    if not sc.plans:
        raise ConfigError("scenario has no demonstrations")
    return sc


def load_scenario(spec) -> Scenario:
    """Preset name or path to a JSON config."""
    if str(spec) in SCENARIOS:
        return scenario(str(spec))
    path = Path(spec)
    try:
        cfg = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{spec}: {exc}") from exc
    return scenario_from_config(cfg)


def scenario_config(sc: Scenario) -> dict:
    """JSON-ready config that rebuilds ``sc`` with :func:`scenario_from_config`."""
    cfg = sc.env.to_dict()
    cfg.pop("surfaces", None)
    cfg["preset"] = sc.name if sc.name in SCENARIOS else cfg.get("type")
    cfg.update({
        "force": sc.force, "noise_deg": sc.noise_deg, "max_time": sc.max_time,
        "true_direction": np.asarray(sc.true_direction, float).tolist(),
        "demonstrations": [{"start": p.start.tolist(), "approach": p.approach.tolist(), "group": p.group}
                           for p in sc.plans],
        "reproduction_starts": [np.asarray(s, float).tolist() for s in sc.repro_starts],
        "pair_groups": None if sc.pair_groups is None else list(sc.pair_groups),
    })
    return cfg


# ---------------------------------------------------------------- studies

def _prepared(demos, spec: ConstraintSpec):
    return [preprocess(d.trajectory, spec.window, spec.force_threshold) for d in demos]


def direction_error_study(sc: Scenario, n_demos=32, group_sizes=(2, 4, 8, 16), seed=0,
                          spec: ConstraintSpec = ConstraintSpec(), demos=None) -> dict:
    """Angular error (deg) of the learned direction for consecutive groups of each size."""
    demos = sc.demonstrations(n_demos, seed) if demos is None else demos
    samples = _prepared(demos, spec)
    out = {}
    for s in group_sizes:
        errs = []
        for g in range(len(demos) // s):
            res = learn_direction(samples[g * s:(g + 1) * s], spec)
            errs.append(angle_between_deg(res.desired_direction, sc.true_direction))
        out[s] = np.array(errs)
    return out


def resample_pairs(sc: Scenario, n_demos, n_subsets, rng, size=2) -> list:
    """Random index subsets; scenarios with ``pair_groups`` draw one demo per group."""
    idx = np.arange(n_demos)
    subsets = []
    for _ in range(n_subsets):
        if sc.pair_groups is not None and size == len(sc.pair_groups):
            subsets.append([int(rng.choice(idx[[sc.group_of(i) == g for i in idx]])) for g in sc.pair_groups])
        else:
            subsets.append([int(i) for i in rng.choice(idx, size=size, replace=False)])
    return subsets


def dof_study(sc: Scenario, n_demos=30, n_subsets=100, size=2, seed=0, spec: ConstraintSpec = ConstraintSpec(),
              compliance_spec: ComplianceSpec = ComplianceSpec(), demos=None) -> dict:
    """Model selected on random subsets; returns the choices and BIC rows."""
    demos = sc.demonstrations(n_demos, seed) if demos is None else demos
    samples = _prepared(demos, spec)
    rng = np.random.default_rng(seed)
    chosen, bics = [], []
    for sub in resample_pairs(sc, len(demos), n_subsets, rng, size):
        learned = learn_motion_model([demos[i].trajectory for i in sub], spec, compliance_spec,
                                     samples=[samples[i] for i in sub])
        chosen.append(learned.compliance.n_compliant)
        bics.append(learned.compliance.bic)
    chosen = np.array(chosen)
    return {"chosen": chosen, "bic": np.array(bics), "counts": np.bincount(chosen, minlength=3)}
