"""Optical torques, rotational recoil and radiation pressure on chain elements."""

from __future__ import annotations

from dataclasses import dataclass

from .constants import C, HBAR
from .errors import PhysicsContractError


@dataclass(frozen=True)
class BeamPower:
    P: float  # W
    omega: float  # rad/s

    def __post_init__(self):
        if self.P < 0:
            raise PhysicsContractError("beam power must be non-negative")
        if not self.omega > 0:
            raise PhysicsContractError("beam frequency must be positive")

    @property
    def photon_rate(self) -> float:
        return self.P / (HBAR * self.omega)


@dataclass(frozen=True)
class ElementLoads:
    torque: float = 0.0  # N m about +Z
    force_z: float = 0.0  # N along +Z


def _check_freqs(*omegas):
    if any(not w > 0 for w in omegas):
        raise PhysicsContractError("frequencies must be positive")


def pcm_recoil_torque(P: float, omega_f: float, omega_b: float, ell: int) -> float:
    """Magnitude of the rotational recoil on a phase-conjugating mirror."""
    _check_freqs(omega_f, omega_b)
    return abs(ell) * P * (1.0 / omega_f + 1.0 / omega_b)


def dove_torque(P: float, omega_f: float, omega_b: float, ell: int) -> float:
    """Torque on a Dove prism traversed forward and, after phase conjugation, backward."""
    return 2.0 * pcm_recoil_torque(P, omega_f, omega_b, ell)


def retro_prism_torque(P: float, omega_f: float, omega_b: float, ell: int) -> float:
    """Residual prism torque when the return leg comes from an ordinary retroreflector.

    Evaluated as 2 l P (w_b - w_f) / (w_f w_b) so nearly equal frequencies do
    not cancel catastrophically.
    """
    _check_freqs(omega_f, omega_b)
    return 2.0 * ell * P * (omega_b - omega_f) / (omega_f * omega_b)


def radiation_pressure(P: float, efficiency: float = 1.0) -> float:
    """Axial force on a reflecting terminal mirror; 2P/c for unit efficiency."""
    if P < 0:
        raise PhysicsContractError("beam power must be non-negative")
    return (1.0 + efficiency) * P / C


def prism_spinup(ell_z: int, moment_of_inertia: float, spin_rate: float) -> float:
    """Element spin rate after one photon of projection ``ell_z`` has its OAM inverted."""
    if not moment_of_inertia > 0:
        raise PhysicsContractError("moment of inertia must be positive")
    return spin_rate + 2.0 * ell_z * HBAR / moment_of_inertia


def angular_impulse(event) -> float:
    """Angular momentum handed to the element by a single photon (J s)."""
    return -HBAR * event.d_ell


def event_torque(event, P: float) -> float:
    """Steady-state CW torque from one ledger event: L_z flux in minus flux out."""
    _check_freqs(event.frequency_in, event.frequency_out)
    return P * (event.ell_in / event.frequency_in - event.ell_out / event.frequency_out)


def element_loads(ledger, P: float) -> list:
    """Per-element torque and axial force for CW power ``P`` through the chain."""
    elems = ledger.chain.elements
    torque = [0.0] * len(elems)
    for ev in ledger.events:
        torque[ev.element_index] += event_torque(ev, P)
    loads = []
    for i, e in enumerate(elems):
        force = radiation_pressure(P, e.efficiency) if e.kind.is_terminal else 0.0
        loads.append(ElementLoads(torque[i], force))
    return loads
