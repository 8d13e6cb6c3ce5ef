"""Central-fringe visibility of the three presets at the end of the run.

Scans the intensity along x at z = 0 and prints a coarse text profile
around the central maximum, then the visibility of each preset.

    python3 demos/fringes.py
"""
import numpy as np

from pilotwave import central_fringe_visibility, fringe_profile, make_scenario

T = 1.5e-9


def text_profile(profile, width=60, step=80):
    v = profile.values / profile.values.max()
    mid = len(v) // 2
    for i in range(mid - 10 * step, mid + 10 * step + 1, step):
        bar = "#" * int(round(width * v[i]))
        print(f"{profile.axis_positions[i] * 1e6:+6.2f} um |{bar}")


for kind in ("ewea", "ewua", "uwea"):
    prof = fringe_profile(make_scenario(kind), T)
    print(f"\n{kind}: V = {central_fringe_visibility(prof):.4f}")
    text_profile(prof)

# the unequal-amplitude visibility has a closed form: 2 a b / (a^2 + b^2)
a, b = 0.25, 0.75
print(f"\nequal widths, amplitudes 1/4 and 3/4: analytic V = {2 * a * b / (a * a + b * b):.4f}")
