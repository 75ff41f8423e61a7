"""Can a passive interferometer see the Earth turn?

Run:  python3 demos/04_earth_rotation.py
"""

import math

from pcvi.scenario import CoherenceSpec, DesignQuery, coherence_check, earth_scenario, solve_design

# Which (l, N) give a 24-fold shift, i.e. one spot passage per hour?
print("4 l (N + 1/2) = 24 with N >= 1:", solve_design(DesignQuery(24, n_min=1)))
print("allowing N = 0 as well:       ", solve_design(DesignQuery(24)))

for ell, n in [(4, 1), (6, 60)]:
    print()
    print(earth_scenario(ell, n).report())

# The shift follows the projection of the Earth's rate onto the axis.
print("\naxis angle  transit period (l=4, N=1)")
for deg in (0, 30, 60, 89, 90):
    res = earth_scenario(4, 1, math.radians(deg))
    print(f"  {deg:3d} deg   {res.transit_period:.1f} s")

for hz in (1e3, 1e10):
    v = coherence_check(CoherenceSpec(2 * math.pi * hz), 1.0)
    print(f"\nlinewidth {hz:.0e} Hz, 1 m arm: coherence length {v.coherence_length:.3g} m,"
          f" feasible {v.feasible} (margin {v.margin:.3g})")
