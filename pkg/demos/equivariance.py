"""Born-rule sampled ensemble against the evolved density.

Samples starting points from |psi(0)|^2, integrates them to the end time and
compares the endpoint histogram with the binned |psi(T)|^2. The distance is
set against the value an ideal independent sample of the same size gives,
which is the best any finite ensemble can do.

    python3 demos/equivariance.py [n]
"""
import sys

import numpy as np

from pilotwave import born_sample_initials, integrate_ensemble, make_scenario
from pilotwave.observables import bin_probabilities, endpoint_density_distance

n = int(sys.argv[1]) if len(sys.argv) > 1 else 5000
T = 1.5e-9
sc = make_scenario("ewea")
inits = born_sample_initials(sc, n, seed=0)
trajs = integrate_ensemble(sc, inits.points, 0.0, T)
d = endpoint_density_distance(trajs, sc, T)

p = bin_probabilities(sc, T).ravel()
noise = np.sum(np.sqrt(2 * p * (1 - p) / (np.pi * n)))
print(f"n = {n}: L1(endpoints, |psi|^2) = {d:.4f}; expected for ideal sampling = {noise:.4f}")
for m in (2_000, 20_000, 200_000, 2_000_000):
    print(f"   ideal-sampling L1 at n = {m:>9,d}: {np.sum(np.sqrt(2 * p * (1 - p) / (np.pi * m))):.4f}")
