"""Integrate a 3 x 3 lattice of starting points per pinhole and summarise.

Prints start and end x for each trajectory, shows that none crosses the
symmetry plane, and writes the full ensemble to ``trajectories.csv``.

    python3 demos/trajectories.py [ewea|ewua|uwea]
"""
import sys

import numpy as np

from pilotwave import export_trajectories, integrate_ensemble, make_scenario, square_grid_initials

kind = sys.argv[1] if len(sys.argv) > 1 else "ewea"
sc = make_scenario(kind)
inits = square_grid_initials(sc, 3)
trajs = integrate_ensemble(sc, inits.points, 0.0, 1.5e-9)

print(f"{kind}: {len(trajs)} trajectories, {len(trajs[0])} samples each")
print(" id    x(0) um    z(0) um    x(T) um    z(T) um  status")
for i, tr in enumerate(trajs):
    print(f"{i:3d} {tr.x[0] * 1e6:10.4f} {tr.z[0] * 1e6:10.4f} "
          f"{tr.x[-1] * 1e6:10.4f} {tr.z[-1] * 1e6:10.4f}  {tr.status.value}")

crossed = sum(len(set(np.sign(tr.x[tr.x != 0]))) > 1 for tr in trajs)
print(f"trajectories crossing x = 0: {crossed}")
print(f"screen distance y(T) = {trajs[0].y[-1]:.6f} m")
print("wrote", export_trajectories(trajs, "trajectories.csv"))
