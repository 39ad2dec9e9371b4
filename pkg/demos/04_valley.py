"""Valley environments: sliding down to the groove, and along it.

Down-valley demonstrations drop onto either plate, so their mean directions
differ across the groove and one compliant axis is learned. In the side
variant the tool is pressed onto one plate and pushed along the groove; the
learned compliant axis lies in the plate, along the groove.
"""
import numpy as np

from compliantlfd.pipeline import angle_between_deg, learn_motion_model, scenario
from compliantlfd.sim import physics_violations, reproduce

for name in ("valley", "valley-side"):
    sc = scenario(name)
    demos = sc.demonstrations(2)
    bad = sum(len(physics_violations(d.trace, sc.env)) for d in demos)
    m = learn_motion_model([d.trajectory for d in demos]).model
    print(f"\n{name}: direction {np.round(m.desired_direction, 3)}, {m.n_compliant} compliant axes, "
          f"{bad} physics violations in the demonstrations")
    for a, t in zip(m.compliant_axes, sc.true_axes):
        t = t - (t @ m.desired_direction) * m.desired_direction
        e = angle_between_deg(a, t)
        print(f"  axis {np.round(a, 3)}: {min(e, 180 - e):.1f} deg from the reference")
    for s in sc.repro_starts:
        r = reproduce(m, sc.env, s)
        print(f"  start {np.round(s, 3)}: {r.status}, {r.target_distance * 1e3:.1f} mm from target")
