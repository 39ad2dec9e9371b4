"""How many compliant axes? BIC over the demonstrations' mean directions.

The mean motion of each demonstration is expressed as an angular offset
from the learned desired direction. Model 0 says every offset is noise,
model 1 allows spread along one line, model 2 along any direction. The
table below is printed for free space, a valley and a funnel.
"""
import numpy as np

from compliantlfd.pipeline import learn_motion_model, scenario

for name, n in (("free", 2), ("valley", 2), ("funnel", 2), ("valley-side", 2)):
    sc = scenario(name)
    learned = learn_motion_model([d.trajectory for d in sc.demonstrations(n, seed=1)])
    print(f"\n{name}: {learned.model.n_compliant} compliant axes")
    for m, k, ll, b in learned.compliance.table():
        print(f"  model {m}  k={k}  logL={ll:9.3f}  BIC={b:9.3f}")
    for a in learned.model.compliant_axes:
        print("  axis", np.round(a, 3))

# misaligned valley-side demonstrations spread in two directions
sc = scenario("valley-side", misaligned=True)
learned = learn_motion_model([d.trajectory for d in sc.demonstrations(2)])
print(f"\nvalley-side, misaligned: model {learned.model.n_compliant} is selected")
