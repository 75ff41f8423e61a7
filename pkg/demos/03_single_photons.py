"""One photon at a time: fringes still appear, but two detectors never click together.

Run:  python3 demos/03_single_photons.py
"""

from pcvi import BeamGeometry, alternating_chain, run_chain
from pcvi.sampler import coincidences, four_windows, occupancy_chisquare, sample_events, visibility
from pcvi.vortex import radial_peak

geom = BeamGeometry(d0=1e-3)
seg = run_chain(alternating_chain(0, 1, 0.3, geom)).entrance
windows = four_windows(radial_peak(1, geom))

for R in (1.0, 0.9, 0.5):
    rec = sample_events(seg, geom, 300_000, seed=7, ratio=R)
    st = coincidences(rec, windows, gate=1e-9)
    _, p = occupancy_chisquare(rec)
    # max/min over fine bins is biased upward by counting noise; 60 bins keep it small
    print(f"R = {R}: visibility {visibility(rec, bins=60):.3f} (expect {2 * R / (1 + R * R):.3f}),"
          f" helix occupancy p = {p:.2f}, coincidences {sum(st.coincidences.values())}")

# Which-way information removes the cross term and the fringes with it.
rec = sample_events(seg, geom, 300_000, seed=7, ratio=1.0, which_way=True)
print(f"which-way: visibility {visibility(rec, bins=60):.3f}")

# An attenuated laser sometimes puts two photons in one pulse.
rec = sample_events(seg, geom, 300_000, seed=7, ratio=1.0, mean_photons=0.5)
st = coincidences(rec, windows, gate=1e-9)
for pair, g in st.g2.items():
    print(f"attenuated laser, windows {pair}: {st.coincidences[pair]} coincidences, g2(0) = {g:.2f}")
