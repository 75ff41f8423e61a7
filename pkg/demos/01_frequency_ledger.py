"""Walk a photon through rotating OAM inverters and watch the shift build up.

Run:  python3 demos/01_frequency_ledger.py
"""

from pcvi import BeamGeometry, ElementKind, alternating_chain, run_chain
from pcvi.chain import Chain, OpticalElement
from pcvi.mechanics import element_loads

geom = BeamGeometry(d0=1e-3)
ell, spin = 2, 1.0

# A single spinning Dove prism in front of a static phase-conjugating mirror.
# The prism shifts the photon on the way in and again on the way back.
chain = Chain(
    (
        OpticalElement(ElementKind.BEAMSPLITTER, 0.0),
        OpticalElement(ElementKind.DOVE_PRISM, 0.1, spin),
        OpticalElement(ElementKind.PHASE_CONJUGATING_MIRROR, 0.2),
    ),
    geom,
    geom.photon(ell),
)
ledger = run_chain(chain)
print("single prism + static PCM")
for ev in ledger.events:
    print(f"  {ev.kind.value:24s} {ev.direction.value:9s} l {ev.ell_in:+d} -> {ev.ell_out:+d}"
          f"   shift {ev.d_omega:+.3f} rad/s")
for seg in ledger.segments:
    print(f"  segment {seg.index}: delta_omega {seg.delta_omega:+.3f} rad/s, {seg.pattern}")

# Swap the mirror for a retroreflector: the OAM is not conjugated, so the
# return pass through the prism undoes the forward shift.
retro = Chain(chain.elements[:2] + (OpticalElement(ElementKind.RETROREFLECTOR, 0.2),), geom, geom.photon(ell))
print("\nsame prism + retroreflector")
for seg in run_chain(retro).segments:
    print(f"  segment {seg.index}: delta_omega {seg.delta_omega:+.3f} rad/s, {seg.pattern}")

# Counter-rotating neighbours keep the photon's OAM and the element spin
# aligned, so every pass adds to the shift.
print("\nalternating chains, l = 2, spin 1 rad/s")
for n in range(5):
    led = run_chain(alternating_chain(n, ell, spin, geom))
    print(f"  N = {n}: |delta_omega| = {abs(led.net_delta_omega):5.1f} rad/s"
          f" ({led.alternations} OAM flips, 4 l (N + 1/2) = {4 * ell * (n + 0.5):.0f})")

# Mechanical side: the torque each element feels at 1 mW.
print("\nloads at 1 mW for N = 2")
led = run_chain(alternating_chain(2, ell, spin, geom))
for e, ld in zip(led.chain.elements, element_loads(led, 1e-3)):
    print(f"  {e.kind.value:24s} torque {ld.torque:+.3e} N m   force {ld.force_z:.3e} N")
