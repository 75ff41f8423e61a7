import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcvi import (
    BeamGeometry,
    Chain,
    Direction,
    ElementKind,
    OpticalElement,
    PatternKind,
    PhysicsContractError,
    alternating_chain,
    reflect_pcm,
    reflect_retro,
    run_chain,
    transmit_oam_inverter,
)
from pcvi.chain import DEFAULT_INERTIA
from pcvi.constants import HBAR

BS = ElementKind.BEAMSPLITTER
DP = ElementKind.DOVE_PRISM
PCM = ElementKind.PHASE_CONJUGATING_MIRROR
RETRO = ElementKind.RETROREFLECTOR


def make_chain(geom, ell, *specs):
    elems = [OpticalElement(BS, 0.0)]
    elems += [OpticalElement(kind, 0.1 * (i + 1), spin) for i, (kind, spin) in enumerate(specs)]
    return Chain(tuple(elems), geom, geom.photon(ell))


# element operations -------------------------------------------------------

def test_corotating_prism_lowers_frequency(geom):
    out, _ = transmit_oam_inverter(geom.photon(3), OpticalElement(DP, 0.1, 2.0))
    assert out.shift == -2 * 3 * 2.0
    assert out.ell_z == -3


def test_static_prism_only_flips(geom):
    s = geom.photon(2)
    out, spin = transmit_oam_inverter(s, OpticalElement(DP, 0.1, 0.0))
    assert out.shift == 0 and out.ell_z == -2 and spin == 0
    assert out.direction is Direction.FORWARD


def test_counter_rotating_prism_raises_frequency(geom):
    out, _ = transmit_oam_inverter(geom.photon(2), OpticalElement(DP, 0.1, -1.0))
    assert out.shift > 0


def test_recoil_term_scale():
    # 1 g disc of 1 cm radius
    assert DEFAULT_INERTIA == pytest.approx(5e-8)
    assert 1e-28 < HBAR / DEFAULT_INERTIA < 1e-26


def test_exact_recoil_values(geom):
    I = 5e-8
    out, spin = transmit_oam_inverter(geom.photon(2), OpticalElement(DP, 0.1, 0.0, moment_of_inertia=I),
                                      exact_recoil=True)
    assert out.shift == pytest.approx(-2 * 4 * HBAR / I, rel=1e-15)
    assert spin == pytest.approx(2 * 2 * HBAR / I, rel=1e-15)


def test_unphysical_shift_rejected(geom):
    with pytest.raises(PhysicsContractError, match="unphysical"):
        transmit_oam_inverter(geom.photon(1), OpticalElement(DP, 0.1, geom.omega))


def test_wrong_element_kinds(geom):
    with pytest.raises(PhysicsContractError):
        transmit_oam_inverter(geom.photon(1), OpticalElement(PCM, 0.1))
    with pytest.raises(PhysicsContractError):
        reflect_pcm(geom.photon(1), OpticalElement(DP, 0.1))
    with pytest.raises(PhysicsContractError):
        reflect_retro(geom.photon(1), OpticalElement(PCM, 0.1))


def test_static_pcm(geom):
    out = reflect_pcm(geom.photon(2), OpticalElement(PCM, 0.2))
    assert out.shift == 0 and out.ell_z == -2 and out.direction is Direction.BACKWARD


def test_rotating_pcm_shift(geom):
    out = reflect_pcm(geom.photon(3), OpticalElement(PCM, 0.2, 0.5))
    assert abs(out.shift) == 2 * 3 * 0.5


def test_pcm_bias(geom):
    out = reflect_pcm(geom.photon(1), OpticalElement(PCM, 0.2, 0.0, bias_shift=2 * math.pi))
    assert out.shift == 2 * math.pi


def test_pcm_rejects_backward_input(geom):
    back = geom.photon(1).evolve(direction=Direction.BACKWARD)
    with pytest.raises(PhysicsContractError):
        reflect_pcm(back, OpticalElement(PCM, 0.2))
    with pytest.raises(PhysicsContractError):
        reflect_retro(back, OpticalElement(RETRO, 0.2))


def test_retro_keeps_oam_and_frequency(geom):
    out = reflect_retro(geom.photon(2), OpticalElement(RETRO, 0.2, 5.0, efficiency=0.81))
    assert out.ell_z == 2 and out.shift == 0 and out.direction is Direction.BACKWARD
    assert out.amplitude == pytest.approx(0.9, rel=1e-15)


# figure configurations ----------------------------------------------------

def test_prism_then_static_pcm(geom):
    ell, W = 2, 0.7
    led = run_chain(make_chain(geom, ell, (DP, W), (PCM, 0.0)))
    entrance, inner = led.segments
    assert inner.delta_omega == 0 and inner.is_helical
    assert entrance.delta_omega == -4 * ell * W
    assert entrance.theta_dot == -2 * W


def test_prism_then_retro_cancels(geom):
    led = run_chain(make_chain(geom, 3, (DP, 1.3), (RETRO, 0.0)))
    assert all(s.delta_omega == 0 for s in led.segments)
    assert all(s.pattern.kind is PatternKind.TOROIDAL for s in led.segments)


def test_prism_and_counter_rotating_pcm_six_fold(geom):
    ell, W = 2, 0.3
    led = run_chain(make_chain(geom, ell, (DP, -W), (PCM, W)))
    assert abs(led.net_delta_omega) == 6 * ell * W


def test_sole_rotating_pcm(geom):
    led = run_chain(alternating_chain(0, 4, 0.25, geom))
    assert abs(led.net_delta_omega) == 2 * 4 * 0.25
    assert led.alternations == 1


def test_alternating_n2_hand_traversal(geom):
    # BS | prism n=2 (+W) | prism n=1 (-W) | PCM (+W), l = 1, W = 1
    # forward: +1 -> prism(+1): -2, l=-1 -> prism(-1): -2*(-1)*(-1) = -2, l=+1
    # PCM(+1): -2, l=-1 ; back: prism(-1): -2*(-1)*(-1) = -2, l=+1 ; prism(+1): -2, l=-1
    led = run_chain(alternating_chain(2, 1, 1.0, geom))
    assert [ev.d_omega for ev in led.events] == [-2.0] * 5
    assert abs(led.net_delta_omega) == 10.0
    assert led.exit_state.ell_z == -1


def test_sixty_prisms_alternate_121_times(geom):
    led = run_chain(alternating_chain(60, 6, 1e-3, geom))
    assert led.alternations == 121
    assert abs(led.net_delta_omega) == pytest.approx(1452 * 1e-3, rel=1e-12)


def test_equivalent_inverter_kinds(geom):
    shifts = []
    for kind in (DP, ElementKind.HELICAL_WAVEPLATE, ElementKind.CYLINDRICAL_LENS_PAIR):
        shifts.append(run_chain(alternating_chain(3, 2, 0.4, geom, kind=kind)).net_delta_omega)
    assert shifts[0] == shifts[1] == shifts[2]


def test_segment_structure(geom):
    led = run_chain(alternating_chain(3, 1, 0.1, geom))
    segs = led.segments
    assert len(segs) == 4
    for a, b in zip(segs, segs[1:]):
        assert a.z_max == b.z_min
    assert led.chain.geometry.z_pc == led.chain.terminal.z_pos


def test_frame_rate_added_to_every_element(geom):
    ch = make_chain(geom, 1, (DP, -2.0), (PCM, 0.0)).with_frame_rate(1.0)
    assert [e.spin_rate for e in ch.elements] == [0.0, -1.0, 1.0]
    assert abs(run_chain(ch).net_delta_omega) == 6.0


@pytest.mark.parametrize("bad", [
    lambda g: (OpticalElement(DP, 0.0), OpticalElement(PCM, 0.1)),
    lambda g: (OpticalElement(BS, 0.0), OpticalElement(DP, 0.1)),
    lambda g: (OpticalElement(BS, 0.0), OpticalElement(PCM, 0.1), OpticalElement(DP, 0.2)),
    lambda g: (OpticalElement(BS, 0.0), OpticalElement(DP, 0.1), OpticalElement(DP, 0.1), OpticalElement(PCM, 0.3)),
    lambda g: (OpticalElement(BS, 0.0), OpticalElement(RETRO, 0.1), OpticalElement(PCM, 0.2)),
])
def test_chain_validation(geom, bad):
    with pytest.raises(PhysicsContractError):
        Chain(bad(geom), geom, geom.photon(1))


# properties ------------------------------------------------------------------

spin_values = st.sampled_from([1e-5, 3e-3, 0.25, 1.0, 2 * math.pi, 17.0]).flatmap(
    lambda v: st.sampled_from([v, -v]))


@settings(max_examples=200, deadline=None)
@given(n=st.integers(0, 8), ell=st.integers(-6, 6).filter(bool), spin=spin_values)
def test_accumulation_law(n, ell, spin):
    geom = BeamGeometry(1e-3)
    led = run_chain(alternating_chain(n, ell, spin, geom))
    expected = 4 * abs(ell) * (n + 0.5) * abs(spin)
    assert abs(led.net_delta_omega) == pytest.approx(expected, rel=1e-12)
    assert led.exit_state.ell_z == -ell
    flipped = run_chain(alternating_chain(n, ell, -spin, geom))
    assert abs(flipped.net_delta_omega) == pytest.approx(expected, rel=1e-12)


chain_specs = st.lists(
    st.tuples(st.sampled_from([DP, ElementKind.HELICAL_WAVEPLATE, ElementKind.CYLINDRICAL_LENS_PAIR]),
              st.floats(-10, 10), st.floats(1e-9, 1e-3)),
    min_size=0, max_size=8)


def random_chain(geom, ell, specs, terminal, t_spin, t_inertia):
    elems = [OpticalElement(BS, 0.0)]
    for i, (kind, spin, inertia) in enumerate(specs):
        elems.append(OpticalElement(kind, 0.1 * (i + 1), spin, moment_of_inertia=inertia))
    elems.append(OpticalElement(terminal, 0.1 * (len(specs) + 1), t_spin, moment_of_inertia=t_inertia))
    return Chain(tuple(elems), geom, geom.photon(ell))


@settings(max_examples=150, deadline=None)
@given(ell=st.integers(-6, 6), specs=chain_specs, terminal=st.sampled_from([PCM, RETRO]),
       t_spin=st.floats(-10, 10), t_inertia=st.floats(1e-9, 1e-3))
def test_exact_conservation(ell, specs, terminal, t_spin, t_inertia):
    geom = BeamGeometry(1e-3)
    led = run_chain(random_chain(geom, ell, specs, terminal, t_spin, t_inertia), exact_recoil=True)
    for ev in led.events:
        assert abs(ev.energy_residual()) <= 1e-12 * max(ev.energy_scale(), 1e-300)
        assert abs(ev.momentum_residual()) <= 1e-12 * max(HBAR * abs(ev.d_ell), 1e-300)


def test_conservation_against_rational_arithmetic(geom):
    """The recorded budget terms agree with exact rational evaluation."""
    led = run_chain(random_chain(geom, 3, [(DP, 1.5, 2e-7), (DP, -0.5, 7e-8)], PCM, 0.25, 1e-6),
                    exact_recoil=True)
    h = Fraction(HBAR)
    for ev in led.events:
        I, s, l = Fraction(ev.moment_of_inertia), Fraction(ev.spin_before), ev.ell_in
        ds = 2 * l * h / I
        dw = -2 * l * s - 2 * l * l * h / I
        assert h * dw + I / 2 * ((s + ds) ** 2 - s**2) == 0
        assert float(ds) == pytest.approx(ev.d_spin, rel=1e-15)
        assert float(-2 * l * l * h / I) == pytest.approx(ev.d_omega_recoil, rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(ell=st.integers(-6, 6).filter(bool), spins=st.lists(st.floats(-5, 5), min_size=0, max_size=6))
def test_retro_termination_cancels(ell, spins):
    geom = BeamGeometry(1e-3)
    led = run_chain(make_chain(geom, ell, *[(DP, s) for s in spins], (RETRO, 3.0)))
    assert led.net_delta_omega == pytest.approx(0.0, abs=1e-12 * (1 + sum(map(abs, spins))))
    assert led.exit_state.ell_z == ell * (-1) ** (2 * len(spins))


@settings(max_examples=100, deadline=None)
@given(ell=st.integers(-6, 6).filter(bool), spins=st.lists(st.floats(-5, 5), min_size=0, max_size=6),
       t_spin=st.floats(-5, 5))
def test_helical_segments_rotation_rate(ell, spins, t_spin):
    geom = BeamGeometry(1e-3)
    led = run_chain(make_chain(geom, ell, *[(DP, s) for s in spins], (PCM, t_spin)))
    assert led.exit_state.ell_z == -ell
    for seg in led.segments:
        assert seg.is_helical
        assert seg.theta_dot == seg.delta_omega / (seg.fwd.ell_z - seg.bwd.ell_z)
