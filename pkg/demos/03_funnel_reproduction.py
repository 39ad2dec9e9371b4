"""Reproducing the funnel insertion with the learned impedance controller.

The model learned from two demonstrations is compliant in the two axes
orthogonal to the insertion direction, so the funnel wall can steer the
tool to the apex. The same model also works on a straight funnel tilted by
15 degrees. A control model with every axis stiff jams on the wall.
"""
import numpy as np

from compliantlfd.core import MotionModel
from compliantlfd.pipeline import learn_motion_model, scenario
from compliantlfd.sim import reproduce

learned = learn_motion_model([d.trajectory for d in scenario("funnel").demonstrations(2)])
model = learned.model
print("desired direction", np.round(model.desired_direction, 4), "compliant axes", model.n_compliant)
control = MotionModel(model.desired_direction, 0, [])

for name in ("funnel", "funnel-straight-tilted"):
    sc = scenario(name)
    print(f"\n{name}")
    for s in sc.repro_starts:
        r = reproduce(model, sc.env, s)
        c = reproduce(control, sc.env, s)
        print(f"  start {np.round(s, 3)}: learned {r.status:8s} {r.target_distance * 1e3:5.1f} mm | "
              f"stiff {c.status:8s} {c.target_distance * 1e3:5.1f} mm")
