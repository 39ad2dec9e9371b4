"""Learning a desired force direction from two funnel demonstrations.

Two simulated demonstrators push a peg into a curved funnel from sides 90
degrees apart. Each 20-sample window yields a constraint polygon in the
angular plane; the polygons vote on a grid, the vector median of the most
voted cells picks the inliers, and the centre of the largest circle inside
their intersection becomes the learned direction.
"""
import numpy as np

from compliantlfd import geometry as geo
from compliantlfd.core import preprocess
from compliantlfd.direction import learn_direction
from compliantlfd.pipeline import angle_between_deg, scenario

sc = scenario("funnel")
demos = sc.demonstrations(2, seed=0)
for d in demos:
    print(f"{d.trajectory.name}: {len(d.trajectory)} samples, start {np.round(d.trace.positions[0], 3)}, "
          f"end {np.round(d.trace.positions[-1], 4)}")

samples = [preprocess(d.trajectory) for d in demos]
contact = sum(s.in_contact for ms in samples for s in ms)
print(f"{sum(map(len, samples))} motion samples, {contact} in contact")

res = learn_direction(samples)
print(f"{len(res.polygons)} polygons, {res.inlier_count} inliers, grid maximum {res.grid.counts.max()} votes")
print(f"feasible polygon has {len(res.feasible_polygon)} vertices, "
      f"area {np.degrees(np.sqrt(geo.polygon_area(res.feasible_polygon))) ** 2:.1f} deg^2")
print(f"Chebyshev centre {np.round(np.degrees(res.center), 2)} deg, radius {np.degrees(res.chebyshev_radius):.2f} deg")
print("learned direction:", np.round(res.desired_direction, 4))
print(f"error from the funnel axis: {angle_between_deg(res.desired_direction, sc.true_direction):.2f} deg")
