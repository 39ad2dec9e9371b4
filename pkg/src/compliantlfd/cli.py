"""Command line interface: gen-demo, learn, reproduce, eval.

Exit codes: 0 success, 2 no feasible desired direction, 3 reproduction
failure, 4 configuration or I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import plots
from .compliance import ComplianceSpec
from .core import load_model, read_trajectory_csv, save_model
from .direction import ConstraintSpec
from .errors import (CompliantLfDError, ConfigError, ConflictingDemonstrationsError, NoUsableConstraintsError)
from .pipeline import (angle_between_deg, direction_error_study, dof_study, learn_motion_model, load_scenario,
                       scenario, scenario_config)
from .sim.runs import physics_violations, reproduce

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_REPRODUCTION = 3
EXIT_CONFIG = 4


def _vec3(text):
    try:
        v = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from None
    if len(v) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    return np.array(v)


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    return out


def _scenario(args):
    sc = load_scenario(args.env)
    if getattr(args, "mu", None) is not None:
        if args.mu < 0:
            raise ConfigError("--mu must be non-negative")
        sc.env.mu = args.mu
    return sc


def _specs(args):
    try:
        cs = ConstraintSpec(alpha_deg=args.alpha_deg, window=args.window, force_threshold=args.force_threshold,
                            grid_resolution_deg=args.grid_res_deg)
        return cs, ComplianceSpec(sigma=args.sigma)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


# ---------------------------------------------------------------- commands

def cmd_gen_demo(args) -> int:
    sc = _scenario(args)
    if args.noise_deg is not None:
        sc.noise_deg = args.noise_deg
    out = _out_dir(args.out)
    n = args.n if args.n is not None else len(sc.plans)
    truth = {"environment": scenario_config(sc), "seed": args.seed, "demonstrations": []}
    for i in range(n):
        demo = sc.demonstrate(i, args.seed)
        path = out / f"demo_{i:03d}.csv"
        demo.trace.write_csv(path, demo.trajectory.forces)
        plan = sc.plans[i % len(sc.plans)]
        truth["demonstrations"].append({
            "file": path.name, "start": plan.start.tolist(), "approach": demo.approach.tolist(),
            "group": plan.group, "made_contact": demo.made_contact, "status": demo.trace.status,
            "true_direction": np.asarray(sc.true_direction, float).tolist(),
        })
        print(f"{path}: {len(demo.trajectory)} samples, contact={demo.made_contact}")
    _write_json(out / "ground_truth.json", truth)
    return EXIT_OK


def cmd_learn(args) -> int:
    cs, comp = _specs(args)
    trajs = [read_trajectory_csv(p) for p in args.demos]
    try:
        learned = learn_motion_model(trajs, cs, comp, speed=args.speed)
    except ConflictingDemonstrationsError as exc:
        print(f"error: {exc} (polygons {exc.pair})", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NoUsableConstraintsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    out = _out_dir(args.out)
    model = learned.model
    d, c = learned.direction, learned.compliance
    save_model(model, out / "model.json")
    report = {
        "demonstrations": [str(p) for p in args.demos],
        "desired_direction": model.desired_direction.tolist(),
        "n_compliant": model.n_compliant,
        "compliant_axes": [a.tolist() for a in model.compliant_axes],
        "feasible_polygon": d.feasible_polygon.tolist(),
        "chebyshev_center": d.center.tolist(),
        "chebyshev_radius": d.chebyshev_radius,
        "inliers": d.inlier_count,
        "polygons": len(d.polygons),
        "grid_max": int(d.grid.counts.max()),
        "bic": c.bic.tolist(),
        "log_likelihood": c.log_likelihood.tolist(),
        "n_observations": c.n_observations,
    }
    _write_json(out / "report.json", report)
    with (out / "bic.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model", "k", "logL", "bic"])
        for m, k, ll, b in c.table():
            w.writerow([m, k, repr(float(ll)), repr(float(b))])
    print("desired direction:", np.array2string(model.desired_direction, precision=4))
    print(f"inliers {d.inlier_count}/{len(d.polygons)}, grid max {report['grid_max']}")
    for m, k, ll, b in c.table():
        print(f"model {m} (k={k}): logL={ll:.3f} BIC={b:.3f}")
    print(f"compliant axes: {model.n_compliant}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    try:
        model = load_model(args.model)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"{args.model}: {exc}") from exc
    if args.speed is not None:
        model.speed = args.speed
    sc = _scenario(args)
    starts = args.start or sc.repro_starts
    if not starts:
        raise ConfigError("no start positions: pass --start or add reproduction_starts to the config")
    out = _out_dir(args.out)
    summary = []
    for i, s in enumerate(starts):
        res = reproduce(model, sc.env, s, args.max_time)
        path = out / f"trace_{i:03d}.csv"
        res.trace.write_csv(path)
        summary.append({"start": np.asarray(s).tolist(), "status": res.status, "success": res.success,
                        "final_position": res.final_position.tolist(), "target_distance": res.target_distance,
                        "steps": len(res.trace) - 1, "trace": path.name})
        print(f"start {np.round(s, 4)}: {res.status}, {res.target_distance * 1000:.1f} mm from target")
    _write_json(out / "summary.json", summary)
    return EXIT_OK if all(r["success"] for r in summary) else EXIT_REPRODUCTION


def cmd_eval(args) -> int:
    cs, comp = _specs(args)
    out = _out_dir(args.out)
    sc = _scenario(args)
    demos = sc.demonstrations(args.demos, args.seed)

    errs = direction_error_study(sc, group_sizes=tuple(args.group_sizes), spec=cs, demos=demos)
    with (out / "direction_errors.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["group_size", "group", "error_deg"])
        for s, e in errs.items():
            for g, v in enumerate(e):
                w.writerow([s, g, repr(float(v))])
    plots.error_boxplot(errs, out / "direction_errors.svg", assumed_error_deg=sc.noise_deg)
    for s, e in errs.items():
        print(f"group size {s:2d}: median error {np.median(e):.2f} deg, max {e.max():.2f} deg")

    first = learn_motion_model([d.trajectory for d in demos[:2]], cs, comp)
    plots.grid_heatmap(first.direction.grid, out / "voting_grid.svg", first.direction.median_cell)
    np.savetxt(out / "voting_grid.csv", first.direction.grid.counts, fmt="%d", delimiter=",")
    plots.polygon_plot(first.direction.polygons, out / "polygons.svg", first.direction.inliers,
                       first.direction.feasible_polygon, first.direction.center)

    bic_by = {}
    violations = sum(len(physics_violations(d.trace, sc.env)) for d in demos)
    with (out / "dof_bic.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "subset", "bic0", "bic1", "bic2", "chosen"])
        for name in args.dof_scenarios:
            dsc = scenario(name)
            if args.mu is not None:
                dsc.env.mu = args.mu
            ddemos = dsc.demonstrations(args.dof_demos, args.seed)
            violations += sum(len(physics_violations(d.trace, dsc.env)) for d in ddemos)
            res = dof_study(dsc, args.dof_demos, args.subsets, seed=args.seed, spec=cs, compliance_spec=comp,
                            demos=ddemos)
            bic_by[name] = res["bic"]
            for k, (b, ch) in enumerate(zip(res["bic"], res["chosen"])):
                w.writerow([name, k] + [repr(float(x)) for x in b] + [int(ch)])
            frac = res["counts"] / res["counts"].sum()
            print(f"{name}: model counts {res['counts'].tolist()} ({np.round(frac, 2).tolist()})")
    plots.bic_bars(bic_by, out / "bic.svg")
    print(f"physics violations: {violations}")
    _write_json(out / "eval_summary.json", {
        "direction_error_median": {str(s): float(np.median(e)) for s, e in errs.items()},
        "direction_error_max": {str(s): float(e.max()) for s, e in errs.items()},
        "dof_counts": {k: np.bincount(np.argmin(v, axis=1), minlength=3).tolist() for k, v in bic_by.items()},
        "first_pair_error_deg": angle_between_deg(first.model.desired_direction, sc.true_direction),
        "physics_violations": violations,
    })
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_learning_flags(p):
    p.add_argument("--alpha-deg", type=float, default=20.0, help="demonstrator error angle (deg)")
    p.add_argument("--sigma", type=float, default=0.03, help="residual variance for BIC (rad^2)")
    p.add_argument("--window", type=int, default=20, help="averaging window (samples)")
    p.add_argument("--force-threshold", type=float, default=2.0, help="contact threshold (N)")
    p.add_argument("--grid-res-deg", type=float, default=1.0, help="voting grid resolution (deg)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="compliantlfd", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-demo", help="simulate demonstrations and write trajectory CSVs")
    p.add_argument("--env", default="funnel", help="preset name or JSON config file")
    p.add_argument("--n", type=int, default=None, help="number of demonstrations (default: one per plan)")
    p.add_argument("--noise-deg", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="demos_out")
    p.set_defaults(func=cmd_gen_demo)

    p = sub.add_parser("learn", help="learn a motion model from trajectory CSVs")
    p.add_argument("demos", nargs="+", help="trajectory CSV files")
    _add_learning_flags(p)
    p.add_argument("--speed", type=float, default=0.05, help="setpoint speed of the model (m/s)")
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for a uniform interface")
    p.add_argument("--out", default="model_out")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("reproduce", help="run a learned model in a simulated environment")
    p.add_argument("--model", required=True)
    p.add_argument("--env", default="funnel", help="preset name or JSON config file")
    p.add_argument("--start", type=_vec3, action="append", help="start position x,y,z (repeatable)")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--speed", type=float, default=None, help="override the model's setpoint speed")
    p.add_argument("--max-time", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0, help="unused; runs are deterministic")
    p.add_argument("--out", default="reproduction_out")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("eval", help="demo-count and DOF studies with SVG plots")
    p.add_argument("--env", default="funnel", help="scenario for the demo-count study")
    p.add_argument("--demos", type=int, default=32)
    p.add_argument("--group-sizes", type=int, nargs="+", default=[2, 4, 8, 16])
    p.add_argument("--dof-scenarios", nargs="+", default=["free", "valley", "funnel"])
    p.add_argument("--dof-demos", type=int, default=30)
    p.add_argument("--subsets", type=int, default=100)
    _add_learning_flags(p)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="eval_out")
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return args.func(args)
    except (ConfigError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CompliantLfDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc, ValueError) else EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
