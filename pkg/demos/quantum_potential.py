"""Quantum potential along the x axis as the packets start to overlap.

For the unequal-amplitude preset the valleys on the weaker packet's side
are deeper; this prints the first valley on each side of the centre and
a coarse table of Q(x) at z = 0.

    python3 demos/quantum_potential.py
"""
import numpy as np

from pilotwave import fields, make_scenario
from pilotwave.observables import first_valley_depths

t = 7.5e-10
for kind in ("ewea", "ewua"):
    sc = make_scenario(kind)
    neg, pos = first_valley_depths(sc, t)
    print(f"{kind}: first valley depth  -x side {neg:.3e} J   +x side {pos:.3e} J")

sc = make_scenario("ewua")
x = np.linspace(-2e-6, 2e-6, 21)
q = fields.quantum_potential(sc, x, 0.0, 0.0, t, on_node="nan")[2]
rho = fields.intensity(sc, x, 0.0, 0.0, t)
print("\n    x um      R^2 (rel)        Q (J)")
for xi, ri, qi in zip(x, rho / rho.max(), q):
    print(f"{xi * 1e6:8.2f} {ri:14.4e} {qi:12.3e}")
