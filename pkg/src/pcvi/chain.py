"""Optical element chain and the conservation-law ledger.

Every OAM-inverting interaction (transmission through a Dove prism, helical
waveplate or cylindrical-lens pair, and reflection from a phase-conjugating
mirror) applies one lab-frame rule::

    d_omega = -2 * ell_in * spin          (rotational Doppler term)
            - 2 * ell_in**2 * hbar / I    (recoil term, exact mode only)
    spin'   = spin + 2 * ell_in * hbar / I

which conserves energy and angular momentum of photon plus element.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .constants import HBAR
from .errors import PhysicsContractError
from .vortex import (
    BeamGeometry,
    Direction,
    PatternClass,
    PatternKind,
    PhotonState,
    classify_pattern,
    delta_omega,
)

#: 1 g disc of 1 cm radius, I = m r^2 / 2.
DEFAULT_INERTIA = 0.5 * 1e-3 * 1e-2**2


class ElementKind(enum.Enum):
    DOVE_PRISM = "DovePrism"
    HELICAL_WAVEPLATE = "HelicalWaveplate"
    CYLINDRICAL_LENS_PAIR = "CylindricalLensPair"
    PHASE_CONJUGATING_MIRROR = "PhaseConjugatingMirror"
    RETROREFLECTOR = "Retroreflector"
    BEAMSPLITTER = "Beamsplitter"

    @property
    def is_inverter(self) -> bool:
        return self in _INVERTERS

    @property
    def is_terminal(self) -> bool:
        return self in (ElementKind.PHASE_CONJUGATING_MIRROR, ElementKind.RETROREFLECTOR)


_INVERTERS = frozenset(
    {ElementKind.DOVE_PRISM, ElementKind.HELICAL_WAVEPLATE, ElementKind.CYLINDRICAL_LENS_PAIR}
)


@dataclass(frozen=True)
class OpticalElement:
    kind: ElementKind
    z_pos: float
    spin_rate: float = 0.0
    efficiency: float = 1.0
    moment_of_inertia: float = DEFAULT_INERTIA
    bias_shift: float = 0.0

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", ElementKind(self.kind))
        if not 0.0 <= self.efficiency <= 1.0:
            raise PhysicsContractError(f"efficiency must lie in [0, 1], got {self.efficiency}")
        if not self.moment_of_inertia > 0:
            raise PhysicsContractError("moment of inertia must be positive")


@dataclass(frozen=True)
class Chain:
    """Ordered element list: beamsplitter first, terminal mirror last.

    ``geometry.z_pc`` is pinned to the terminal element's position.
    """

    elements: tuple
    geometry: BeamGeometry
    input: PhotonState

    def __post_init__(self):
        elems = tuple(self.elements)
        object.__setattr__(self, "elements", elems)
        if len(elems) < 2:
            raise PhysicsContractError("a chain needs at least a beamsplitter and a terminal mirror")
        zs = [e.z_pos for e in elems]
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise PhysicsContractError(f"element positions must be strictly increasing, got {zs}")
        if elems[0].kind is not ElementKind.BEAMSPLITTER:
            raise PhysicsContractError("the first (smallest z) element must be the entrance beamsplitter")
        if not elems[-1].kind.is_terminal:
            raise PhysicsContractError("the last (largest z) element must be a PCM or retroreflector")
        for e in elems[1:-1]:
            if not e.kind.is_inverter:
                raise PhysicsContractError(
                    f"interior element at z={e.z_pos} must be OAM-alternating, got {e.kind.value}"
                )
        if self.input.direction is not Direction.FORWARD:
            raise PhysicsContractError("chain input must travel forward")
        if self.geometry.z_pc != elems[-1].z_pos:
            object.__setattr__(self, "geometry", replace(self.geometry, z_pc=elems[-1].z_pos))

    @property
    def terminal(self) -> OpticalElement:
        return self.elements[-1]

    @property
    def inverters(self) -> tuple:
        return self.elements[1:-1]

    def with_frame_rate(self, frame_rate: float) -> "Chain":
        """Add a common vehicle rotation rate to every element's spin."""
        elems = [self.elements[0]] + [
            replace(e, spin_rate=e.spin_rate + frame_rate) for e in self.elements[1:]
        ]
        return replace(self, elements=tuple(elems))


@dataclass(frozen=True)
class ElementEvent:
    """One photon/element interaction as recorded in the ledger."""

    element_index: int
    kind: ElementKind
    direction: Direction
    z_pos: float
    ell_in: int
    ell_out: int
    frequency_in: float
    frequency_out: float
    d_omega_doppler: float
    d_omega_recoil: float
    d_omega_bias: float
    spin_before: float
    d_spin: float
    moment_of_inertia: float

    @property
    def d_omega(self) -> float:
        return self.d_omega_doppler + self.d_omega_recoil + self.d_omega_bias

    @property
    def spin_after(self) -> float:
        return self.spin_before + self.d_spin

    @property
    def d_ell(self) -> int:
        return self.ell_out - self.ell_in

    @property
    def flips_oam(self) -> bool:
        return self.ell_out == -self.ell_in and self.ell_in != 0

    def energy_residual(self) -> float:
        """hbar * (photon d_omega from element exchange) + element kinetic-energy change.

        Grouped so that terms of equal magnitude cancel against each other; the
        bias shift is an external drive and is excluded.
        """
        I, s, ds = self.moment_of_inertia, self.spin_before, self.d_spin
        return (HBAR * self.d_omega_doppler + I * s * ds) + (HBAR * self.d_omega_recoil + 0.5 * I * ds * ds)

    def energy_scale(self) -> float:
        I, s, ds = self.moment_of_inertia, self.spin_before, self.d_spin
        return HBAR * (abs(self.d_omega_doppler) + abs(self.d_omega_recoil)) + abs(I * s * ds) + 0.5 * I * ds * ds

    def momentum_residual(self) -> float:
        """Photon plus element change of L_z (J s)."""
        return HBAR * self.d_ell + self.moment_of_inertia * self.d_spin


@dataclass(frozen=True)
class Segment:
    index: int
    z_min: float
    z_max: float
    fwd: PhotonState
    bwd: PhotonState
    delta_omega: float
    pattern: PatternClass
    theta_dot: Optional[float]

    @property
    def is_helical(self) -> bool:
        return self.pattern.kind is PatternKind.HELICAL

    @property
    def amplitude_ratio(self) -> float:
        if self.fwd.amplitude == 0:
            return 0.0
        return self.bwd.amplitude / self.fwd.amplitude


@dataclass
class SegmentLedger:
    chain: Chain
    segments: list = field(default_factory=list)
    events: list = field(default_factory=list)

    @property
    def entrance(self) -> Segment:
        return self.segments[0]

    @property
    def net_delta_omega(self) -> float:
        return self.entrance.delta_omega

    @property
    def alternations(self) -> int:
        return sum(1 for e in self.events if e.flips_oam)

    @property
    def exit_state(self) -> PhotonState:
        return self.entrance.bwd


def _flip_terms(ell_in: int, spin: float, inertia: float, exact_recoil: bool):
    doppler = -2.0 * ell_in * spin
    recoil = -2.0 * ell_in**2 * HBAR / inertia if exact_recoil else 0.0
    d_spin = 2.0 * ell_in * HBAR / inertia if exact_recoil else 0.0
    return doppler, recoil, d_spin


def _checked(state: PhotonState, **changes) -> PhotonState:
    try:
        return state.evolve(**changes)
    except PhysicsContractError as exc:
        raise PhysicsContractError(f"unphysical parameter regime: {exc}") from None


def transmit_oam_inverter(state: PhotonState, elem: OpticalElement, exact_recoil: bool = False,
                          spin: float | None = None):
    """Pass ``state`` through a rotating OAM-alternating element.

    Returns ``(out_state, spin_after)``.  ``spin`` overrides the element's
    nominal rate (used when the element was already kicked by an earlier pass).
    """
    if not elem.kind.is_inverter:
        raise PhysicsContractError(f"{elem.kind.value} is not an OAM-alternating element")
    spin = elem.spin_rate if spin is None else spin
    doppler, recoil, d_spin = _flip_terms(state.ell_z, spin, elem.moment_of_inertia, exact_recoil)
    out = _checked(state, ell_z=-state.ell_z, shift=state.shift + doppler + recoil)
    return out, spin + d_spin


def reflect_pcm(state: PhotonState, elem: OpticalElement, exact_recoil: bool = False,
                spin: float | None = None) -> PhotonState:
    """Phase-conjugate reflection: reverses direction and OAM, applies the Doppler rule."""
    if elem.kind is not ElementKind.PHASE_CONJUGATING_MIRROR:
        raise PhysicsContractError(f"expected a phase-conjugating mirror, got {elem.kind.value}")
    if state.direction is not Direction.FORWARD:
        raise PhysicsContractError("the PCM only reflects forward-travelling photons")
    spin = elem.spin_rate if spin is None else spin
    doppler, recoil, _ = _flip_terms(state.ell_z, spin, elem.moment_of_inertia, exact_recoil)
    return _checked(
        state,
        ell_z=-state.ell_z,
        direction=Direction.BACKWARD,
        shift=state.shift + doppler + recoil + elem.bias_shift,
        amplitude=state.amplitude * math.sqrt(elem.efficiency),
    )


def reflect_retro(state: PhotonState, elem: OpticalElement) -> PhotonState:
    """Ordinary retroreflection: direction reversed, L_z projection and frequency kept."""
    if elem.kind is not ElementKind.RETROREFLECTOR:
        raise PhysicsContractError(f"expected a retroreflector, got {elem.kind.value}")
    if state.direction is not Direction.FORWARD:
        raise PhysicsContractError("the retroreflector only reflects forward-travelling photons")
    return state.evolve(direction=Direction.BACKWARD, amplitude=state.amplitude * math.sqrt(elem.efficiency))


def run_chain(chain: Chain, exact_recoil: bool = False) -> SegmentLedger:
    """Propagate the chain input to the terminal mirror and back, filling the ledger.

    Segment ``i`` lies between elements ``i`` and ``i + 1``; segment 0 is the
    entrance segment next to the beamsplitter.
    """
    elems = chain.elements
    spins = [e.spin_rate for e in elems]
    events = []

    def interact(i, state):
        e = elems[i]
        if e.kind.is_inverter:
            doppler, recoil, d_spin = _flip_terms(state.ell_z, spins[i], e.moment_of_inertia, exact_recoil)
            out, _ = transmit_oam_inverter(state, e, exact_recoil, spins[i])
            bias = 0.0
        elif e.kind is ElementKind.PHASE_CONJUGATING_MIRROR:
            doppler, recoil, d_spin = _flip_terms(state.ell_z, spins[i], e.moment_of_inertia, exact_recoil)
            out = reflect_pcm(state, e, exact_recoil, spins[i])
            bias = e.bias_shift
        else:
            out = reflect_retro(state, e)
            doppler = recoil = d_spin = bias = 0.0
        events.append(ElementEvent(
            element_index=i, kind=e.kind, direction=state.direction, z_pos=e.z_pos,
            ell_in=state.ell_z, ell_out=out.ell_z,
            frequency_in=state.frequency, frequency_out=out.frequency,
            d_omega_doppler=doppler, d_omega_recoil=recoil, d_omega_bias=bias,
            spin_before=spins[i], d_spin=d_spin, moment_of_inertia=e.moment_of_inertia,
        ))
        spins[i] += d_spin
        return out

    n = len(elems)
    fwd = [chain.input]
    for i in range(1, n - 1):
        fwd.append(interact(i, fwd[-1]))
    bwd = [None] * (n - 1)
    bwd[n - 2] = interact(n - 1, fwd[-1])
    for i in range(n - 2, 0, -1):
        bwd[i - 1] = interact(i, bwd[i])

    ledger = SegmentLedger(chain=chain, events=events)
    for i in range(n - 1):
        f, b = fwd[i], bwd[i]
        pattern = classify_pattern(f, b)
        dw = delta_omega(f, b)
        theta_dot = dw / (f.ell_z - b.ell_z) if pattern.kind is PatternKind.HELICAL else None
        ledger.segments.append(Segment(i, elems[i].z_pos, elems[i + 1].z_pos, f, b, dw, pattern, theta_dot))
    return ledger


def alternating_chain(n_elements: int, ell: int, spin_rate: float, geometry: BeamGeometry,
                      spacing: float = 0.1, kind: ElementKind = ElementKind.DOVE_PRISM,
                      moment_of_inertia: float = DEFAULT_INERTIA, efficiency: float = 1.0) -> Chain:
    """PCM (index 0) plus ``n_elements`` inverters spinning at (-1)**n * spin_rate.

    Index ``n`` counts away from the PCM, so element ``N`` sits next to the
    entrance beamsplitter at z = 0.
    """
    if n_elements < 0:
        raise PhysicsContractError("n_elements must be non-negative")
    if ell == 0:
        raise PhysicsContractError("the alternating chain needs a nonzero charge")
    if not spacing > 0:
        raise PhysicsContractError("element spacing must be positive")
    elems = [OpticalElement(ElementKind.BEAMSPLITTER, 0.0)]
    for n in range(n_elements, 0, -1):
        elems.append(OpticalElement(kind, (n_elements - n + 1) * spacing, (-1) ** n * spin_rate,
                                    moment_of_inertia=moment_of_inertia))
    elems.append(OpticalElement(ElementKind.PHASE_CONJUGATING_MIRROR, (n_elements + 1) * spacing,
                                spin_rate, efficiency=efficiency, moment_of_inertia=moment_of_inertia))
    return Chain(tuple(elems), geometry, geometry.photon(ell))
